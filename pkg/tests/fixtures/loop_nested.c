#include <stdio.h>
#include <stdint.h>

int main(void) {
    uint64_t acc = 1;
    for (int i = 0; i < 120; i++) {
        for (int j = 0; j < 90; j++) {
            acc = acc * 6364136223846793005ULL + (uint64_t)(i * j);
            if (acc & 4)
                acc ^= acc >> 11;
        }
        acc += 17;
    }
    printf("%llu\n", (unsigned long long)acc);
    return 0;
}
