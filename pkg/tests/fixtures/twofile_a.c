#include <stdio.h>
#include <stdint.h>

uint64_t crunch(uint64_t n);

static uint64_t lut[16] = {3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3};

__attribute__((noinline)) static uint64_t helper(uint64_t v) {
    return v * 3 + lut[v & 15];
}

int main(void) {
    uint64_t total = 0;
    for (int i = 0; i < 400; i++)
        total += helper(crunch((uint64_t)i));
    printf("%llu\n", (unsigned long long)total);
    return 0;
}
