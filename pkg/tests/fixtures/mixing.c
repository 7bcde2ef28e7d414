#include <stdio.h>
#include <stdint.h>

#define R4(X) X X X X
#define R16(X) R4(R4(X))

#define STEP \
    s ^= s << 13; \
    s ^= s >> 7; \
    s ^= s << 17; \
    acc += s & 0xffff;

int main(void) {
    uint64_t s = 0x2545f4914f6cdd1dULL;
    uint64_t acc = 0;
    for (int i = 0; i < 3000000; i++) {
        R16(STEP)
    }
    printf("%llu %llu\n", (unsigned long long)s, (unsigned long long)acc);
    return 0;
}
