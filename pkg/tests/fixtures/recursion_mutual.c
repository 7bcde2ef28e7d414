#include <stdio.h>
#include <stdint.h>

static uint64_t wiggle(uint64_t n, uint64_t acc);

static uint64_t waggle(uint64_t n, uint64_t acc) {
    if (n == 0)
        return acc;
    return wiggle(n - 1, acc * 3 + 1);
}

static uint64_t wiggle(uint64_t n, uint64_t acc) {
    if (n == 0)
        return acc;
    if (n & 1)
        return waggle(n - 1, acc ^ (acc << 5));
    return waggle(n - 1, acc + n);
}

int main(void) {
    printf("%llu\n", (unsigned long long)wiggle(30000, 7));
    return 0;
}
