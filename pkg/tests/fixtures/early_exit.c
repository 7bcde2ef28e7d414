#include <stdio.h>
#include <stdlib.h>
#include <stdint.h>

int main(void) {
    uint64_t s = 0x853c49e6748fea9bULL;
    for (int i = 0; i < 50000; i++) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        if ((s & 0xfff) == 0x123) {
            printf("%d %llu\n", i, (unsigned long long)s);
            exit(0);
        }
    }
    printf("never %llu\n", (unsigned long long)s);
    return 0;
}
