#include <pthread.h>
#include <stdio.h>
#include <stdint.h>

static uint64_t results[4];

static void *grind_a(void *arg) {
    uint64_t s = 1;
    for (int i = 0; i < 60000; i++) s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    results[(long)arg] = s;
    return 0;
}

static void *grind_b(void *arg) {
    uint64_t s = 2;
    for (int i = 0; i < 60000; i++) { s ^= s << 13; s ^= s >> 7; s ^= s << 17; }
    results[(long)arg] = s;
    return 0;
}

static void *grind_c(void *arg) {
    uint64_t s = 3;
    for (int i = 0; i < 60000; i++) s += (s >> 3) ^ (uint64_t)i;
    results[(long)arg] = s;
    return 0;
}

static void *grind_d(void *arg) {
    uint64_t s = 4;
    for (int i = 0; i < 60000; i++) s = (s << 7) - s + (uint64_t)i;
    results[(long)arg] = s;
    return 0;
}

int main(void) {
    pthread_t t[4];
    void *(*fns[4])(void *) = {grind_a, grind_b, grind_c, grind_d};
    for (long i = 0; i < 4; i++)
        pthread_create(&t[i], 0, fns[i], (void *)i);
    uint64_t total = 0;
    for (long i = 0; i < 4; i++) {
        pthread_join(t[i], 0);
        total += results[i];
    }
    printf("%llu\n", (unsigned long long)total);
    return 0;
}
