/* Marker runtime for one nugget. The nugget id, marker symbol
 * definitions, ROI action, and whether a start marker exists are baked
 * in at emission time; marker thresholds arrive as literal constants at
 * the hook call sites. */

#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <time.h>
#include <unistd.h>

#define NUGGET_ID @NUGGET_ID@ULL
#define NUGGET_HAS_START @HAS_START@
#define NUGGET_ACTION_TIMER @ACTION_TIMER@

@MARK_DEFS@

/* Present only in co-instrumented (analysis + marker) builds. */
extern uint64_t __nugget_counter_peek(void) __attribute__((weak));

static uint64_t mark_counts[3];
static int slot_idle[3];
static int fired_warmup;
static int fired_start;
static int fired_end;
static int roi_started;
static int roi_done;
static uint64_t t_begin_ns;

static uint64_t now_ns(void) {
  struct timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return (uint64_t)ts.tv_sec * 1000000000ull + (uint64_t)ts.tv_nsec;
}

static void emit_event(const char *kind) {
  if (&__nugget_counter_peek)
    fprintf(stderr, "NUGGET_EVENT %s %llu counter=%llu\n", kind,
            (unsigned long long)NUGGET_ID,
            (unsigned long long)__nugget_counter_peek());
  else
    fprintf(stderr, "NUGGET_EVENT %s %llu\n", kind,
            (unsigned long long)NUGGET_ID);
  fflush(stderr);
}

static void write_record(const char *status, uint64_t ns) {
  const char *path = getenv("NUGGET_ROI_OUT");
  FILE *f;
  if (!path || !*path)
    path = "./nugget.roi";
  f = fopen(path, "a");
  if (!f) {
    fprintf(stderr, "nugget-marker: cannot open ROI output\n");
    fflush(stderr);
    _exit(1);
  }
  fprintf(f, "%llu\t%llu\t%s\n", (unsigned long long)NUGGET_ID,
          (unsigned long long)ns, status);
  fflush(f);
  fclose(f);
}

static void roi_begin(void) {
  roi_started = 1;
  emit_event("START");
#if NUGGET_ACTION_TIMER
  t_begin_ns = now_ns();
#endif
}

static void roi_end(void) {
#if NUGGET_ACTION_TIMER
  uint64_t ns = now_ns() - t_begin_ns;
#else
  uint64_t ns = 0;
#endif
  emit_event("END");
  if (!roi_started) {
    write_record("MARKER_MISSED", 0);
    _exit(3);
  }
  roi_done = 1;
  write_record("OK", ns);
  _exit(0);
}

static void missed_check(void) {
  if (!roi_done) {
    write_record("MARKER_MISSED", 0);
    _exit(3);
  }
}

void __nugget_roi_init(void) {
  static int ready;
  if (ready)
    return;
  ready = 1;
  atexit(missed_check);
#if !NUGGET_HAS_START
  roi_begin();
#endif
}

static int all_fired(uint64_t mask) {
  if ((mask & 1) && !fired_warmup)
    return 0;
  if ((mask & 2) && !fired_start)
    return 0;
  if ((mask & 4) && !fired_end)
    return 0;
  return 1;
}

void __nugget_marker_hook(uint64_t slot, uint64_t mask, uint64_t warmup_at,
                          uint64_t start_at, uint64_t end_at) {
  uint64_t c;
  /* once every threshold of this site has fired, counting stops and the
   * hook degenerates to this flag check */
  if (slot_idle[slot])
    return;
  c = __atomic_add_fetch(&mark_counts[slot], 1, __ATOMIC_SEQ_CST);
  if ((mask & 1) && !fired_warmup && c == warmup_at) {
    fired_warmup = 1;
    emit_event("WARMUP");
    slot_idle[slot] = all_fired(mask);
  }
  if ((mask & 2) && !fired_start && c == start_at) {
    fired_start = 1;
    roi_begin();
    slot_idle[slot] = all_fired(mask);
  }
  if ((mask & 4) && !fired_end && c == end_at) {
    fired_end = 1;
    roi_end();
  }
}
