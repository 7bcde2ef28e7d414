/* Interval-analysis runtime support. Compiled and linked together with
 * the hook-instrumented module; interval size, profile env var, and
 * thread safety are baked in when this file is emitted. */

#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#define NUGGET_INTERVAL_SIZE @INTERVAL_SIZE@ULL
#define NUGGET_PROFILE_ENV "@PROFILE_ENV@"
#define NUGGET_THREAD_SAFE @THREAD_SAFE@

#if NUGGET_THREAD_SAFE
#include <pthread.h>
static pthread_mutex_t nugget_lock = PTHREAD_MUTEX_INITIALIZER;
#define NUGGET_LOCK() pthread_mutex_lock(&nugget_lock)
#define NUGGET_UNLOCK() pthread_mutex_unlock(&nugget_lock)
#else
#define NUGGET_LOCK() ((void)0)
#define NUGGET_UNLOCK() ((void)0)
#endif

/* Defined as a constant in the instrumented module. */
extern const uint64_t __nugget_block_count;

static struct {
  int ready;
  int finalized;
  uint64_t nblocks;
  uint64_t counter;     /* global IR instruction counter */
  uint64_t interval_id;
  uint64_t boundary;    /* counter value that closes the current interval */
  uint64_t last_end;    /* counter value at the previous record emission */
  uint64_t *bbv;
  uint64_t *cstamp;
  FILE *out;
  FILE *trace;
} st;

static void nugget_fail(const char *what) {
  fprintf(stderr, "nugget-analysis: %s\n", what);
  fflush(stderr);
  abort();
}

static void put_u64(FILE *f, uint64_t v) {
  unsigned char b[8];
  int i;
  for (i = 0; i < 8; i++)
    b[i] = (unsigned char)(v >> (8 * i));
  if (fwrite(b, 1, 8, f) != 8)
    nugget_fail("short write");
}

static void put_u32(FILE *f, uint32_t v) {
  unsigned char b[4];
  int i;
  for (i = 0; i < 4; i++)
    b[i] = (unsigned char)(v >> (8 * i));
  if (fwrite(b, 1, 4, f) != 4)
    nugget_fail("short write");
}

static void emit_record(int partial) {
  uint64_t actual = st.counter - st.last_end;
  uint32_t entries = 0;
  uint64_t b;
  for (b = 0; b < st.nblocks; b++)
    if (st.bbv[b])
      entries++;
  put_u64(st.out, st.interval_id);
  put_u64(st.out, actual);
  put_u32(st.out, partial ? 1u : 0u);
  put_u32(st.out, entries);
  for (b = 0; b < st.nblocks; b++) {
    if (!st.bbv[b])
      continue;
    put_u64(st.out, b);
    put_u64(st.out, st.bbv[b]);
    put_u64(st.out, st.cstamp[b]);
  }
  memset(st.bbv, 0, st.nblocks * sizeof(uint64_t));
  memset(st.cstamp, 0, st.nblocks * sizeof(uint64_t));
  st.last_end = st.counter;
  if (!partial) {
    st.interval_id += 1;
    st.boundary = st.counter + NUGGET_INTERVAL_SIZE;
  }
}

void __nugget_fini(void);

static void nugget_setup(void) {
  const char *path;
  st.nblocks = __nugget_block_count;
  st.bbv = (uint64_t *)calloc(st.nblocks ? st.nblocks : 1, sizeof(uint64_t));
  st.cstamp = (uint64_t *)calloc(st.nblocks ? st.nblocks : 1, sizeof(uint64_t));
  if (!st.bbv || !st.cstamp)
    nugget_fail("out of memory");
  path = getenv(NUGGET_PROFILE_ENV);
  if (!path || !*path)
    path = "./nugget.profile";
  st.out = fopen(path, "wb");
  if (!st.out)
    nugget_fail("cannot open profile output");
  if (fwrite("NUGPROF1", 1, 8, st.out) != 8)
    nugget_fail("short write");
  put_u64(st.out, NUGGET_INTERVAL_SIZE);
  put_u64(st.out, st.nblocks);
  path = getenv("NUGGET_TRACE_PATH");
  if (path && *path) {
    st.trace = fopen(path, "wb");
    if (!st.trace)
      nugget_fail("cannot open trace output");
  }
  st.boundary = NUGGET_INTERVAL_SIZE;
  atexit(__nugget_fini);
  st.ready = 1;
}

void __nugget_init(void) {
  NUGGET_LOCK();
  if (!st.ready && !st.finalized)
    nugget_setup();
  NUGGET_UNLOCK();
}

void __nugget_fini(void) {
  NUGGET_LOCK();
  if (st.ready && !st.finalized) {
    st.finalized = 1;
    st.ready = 0;
    if (st.counter != st.last_end)
      emit_record(1);
    if (fclose(st.out) != 0)
      nugget_fail("profile close failed");
    if (st.trace)
      fclose(st.trace);
  }
  NUGGET_UNLOCK();
}

/* Diagnostic read used by co-instrumented marker builds. */
uint64_t __nugget_counter_peek(void) { return st.counter; }

void __nugget_bb_hook(uint64_t bb_id, uint64_t inst_count) {
  NUGGET_LOCK();
  if (!st.ready) {
    if (st.finalized) {
      NUGGET_UNLOCK();
      return;
    }
    nugget_setup();
  }
  if (st.trace)
    put_u64(st.trace, bb_id);
  st.counter += inst_count;
  st.bbv[bb_id] += 1;
  st.cstamp[bb_id] = st.counter;
  if (st.counter >= st.boundary)
    emit_record(0);
  NUGGET_UNLOCK();
}
