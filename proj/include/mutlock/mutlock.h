/*
 * C interface to the mutlock library.
 *
 * Every function returning int returns ML_OK (0) on success or a negative
 * ml_status code. When a call fails, ml_last_error() returns a message
 * describing the failure on the calling thread.
 *
 * Functions that render text take a caller buffer and a size_t in/out
 * length. On entry *len is the buffer capacity; on return it holds the
 * number of bytes required including the terminating NUL. If the buffer
 * is NULL or too small, the call returns ML_ERR_INSUFFICIENT_BUFFER and
 * writes nothing.
 */
#ifndef MUTLOCK_H
#define MUTLOCK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ML_API __declspec(dllexport)
#else
#define ML_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum ml_status {
    ML_OK = 0,
    ML_ERR_NULL_POINTER = -1,
    ML_ERR_INVALID_ARGUMENT = -2,
    ML_ERR_INSUFFICIENT_BUFFER = -3,
    ML_ERR_OUT_OF_MEMORY = -4,
    ML_ERR_IO = -5,
    ML_ERR_PARSE = -6,
    ML_ERR_EMPTY = -7,
    ML_ERR_COVERAGE = -8,
    ML_ERR_RUN = -9,
    ML_ERR_OUT_OF_RANGE = -10,
    ML_ERR_INTERNAL = -99
};

ML_API const char* ml_status_string(int status);
ML_API const char* ml_last_error(void);
ML_API uint32_t ml_available_cores(void);

/* ------------------------------------------------------------------ locks */

typedef enum ml_lock_kind {
    ML_LOCK_MUTLOCK = 0,
    ML_LOCK_TTAS = 1,
    ML_LOCK_MCS = 2,
    ML_LOCK_SLEEP = 3,
    ML_LOCK_ADAPTIVE_SLEEP = 4
} ml_lock_kind;

ML_API const char* ml_lock_kind_name(ml_lock_kind kind);
ML_API int ml_lock_kind_parse(const char* name, ml_lock_kind* out);

typedef struct ml_lock ml_lock;

/* Mutable lock. max_sws = 0 means one per available core; period (the
 * oracle's K) = 0 means the default of 10. */
ML_API int ml_mutlock_create(ml_lock** out, uint32_t max_sws, uint32_t period);

/* Any lock kind. For ML_LOCK_MUTLOCK `param` is max_sws (period 10); for
 * ML_LOCK_ADAPTIVE_SLEEP it is the spin budget (0 selects 100); otherwise
 * it is ignored. */
ML_API int ml_lock_create(ml_lock** out, ml_lock_kind kind, uint32_t param);

ML_API int ml_lock_acquire(ml_lock* lock);
ML_API int ml_lock_release(ml_lock* lock);
ML_API int ml_lock_kind_of(const ml_lock* lock, ml_lock_kind* out);

/* Racy snapshot of a mutable lock's packed state. ML_ERR_INVALID_ARGUMENT
 * for other lock kinds. */
ML_API int ml_mutlock_introspect(const ml_lock* lock, uint32_t* sws, uint32_t* thc);

ML_API void ml_lock_destroy(ml_lock* lock);

/* -------------------------------------------------------------- simulator */

typedef enum ml_sim_policy { ML_SIM_SPIN = 0, ML_SIM_SLEEP = 1, ML_SIM_HYBRID = 2 } ml_sim_policy;

typedef enum ml_activity { ML_ACT_IDLE = 0, ML_ACT_CS = 1, ML_ACT_SPIN = 2, ML_ACT_WAKE = 3 } ml_activity;

typedef enum ml_trace_format { ML_TRACE_TEXT = 0, ML_TRACE_CSV = 1 } ml_trace_format;

typedef struct ml_sim_config {
    uint32_t threads;
    ml_sim_policy policy;
    uint32_t sws;
    uint32_t cs_slots;
    uint32_t wake_slots;
} ml_sim_config;

typedef struct ml_sim_summary {
    uint32_t threads;
    uint32_t slots;
    uint32_t completion_slot;
    uint64_t cs_slots;
    uint64_t wasted_spin_slots;
    uint64_t wasted_wake_slots;
    double waste_fraction;
    double throughput_cs_per_slot;
} ml_sim_summary;

typedef struct ml_sim_trace ml_sim_trace;

ML_API int ml_sim_policy_parse(const char* name, ml_sim_policy* out);
ML_API int ml_sim_run(const ml_sim_config* config, ml_sim_trace** out);
ML_API int ml_sim_trace_summary(const ml_sim_trace* trace, ml_sim_summary* out);
ML_API int ml_sim_trace_activity(const ml_sim_trace* trace, uint32_t slot, uint32_t thread, ml_activity* out);
ML_API int ml_sim_trace_render(const ml_sim_trace* trace, ml_trace_format format, char* buf, size_t* len);
ML_API int ml_sim_summary_render(const ml_sim_trace* trace, char* buf, size_t* len);
ML_API void ml_sim_trace_destroy(ml_sim_trace* trace);

/* Wake-up correction for an sws change of `delta` with `thc` threads on
 * the lock: the lock's bookkeeping route and the model's C1/C2 route. */
ML_API int64_t ml_wuc_adjust(int64_t delta, uint32_t thc, uint32_t sws_before, uint32_t sws_after);
ML_API int64_t ml_check_c1_c2(uint32_t thc, uint32_t sws, int64_t delta);

/* -------------------------------------------------------------- lockbench */

typedef struct ml_bench_config {
    ml_lock_kind lock;
    uint32_t threads;
    double csl_us, csu_us;
    double ncsl_us, ncsu_us;
    double duration_s;
    double warmup_s;
    uint64_t seed;
    int pin;
    uint32_t period;  /* mutable lock K */
    uint32_t max_sws; /* 0: one per core */
    uint32_t spin_budget;
    int check_exclusion;
} ml_bench_config;

/* Fills the defaults: mutlock, 1 thread, zero-length sections, 1 s run,
 * 0.1 s warm-up, seed 1, K 10, spin budget 100, exclusion check on. */
ML_API void ml_bench_config_init(ml_bench_config* config);

typedef struct ml_bench_summary {
    uint64_t cs_count;
    double throughput_cs_per_s;
    double sync_cpu_s;
    double wall_s;
    double join_s;
    uint64_t exclusion_violations;
    uint64_t shared_counter;
    uint64_t warmup_cs_count;
    uint32_t threads;
} ml_bench_summary;

typedef struct ml_bench_result ml_bench_result;

ML_API int ml_bench_run(const ml_bench_config* config, ml_bench_result** out);
ML_API int ml_bench_summary_get(const ml_bench_result* result, ml_bench_summary* out);
ML_API int ml_bench_thread_stats(const ml_bench_result* result, uint32_t thread, uint64_t* cs_count,
                                 double* sync_cpu_s);
/* CSV header (no trailing newline) and one CSV row for run number `run`. */
ML_API const char* ml_bench_csv_header(void);
ML_API int ml_bench_csv_row(const ml_bench_config* config, uint32_t run, const ml_bench_result* result, char* buf,
                            size_t* len);
ML_API void ml_bench_result_destroy(ml_bench_result* result);

/* ----------------------------------------------------------------- report */

typedef enum ml_report_metric {
    ML_METRIC_THROUGHPUT = 0,
    ML_METRIC_CPU = 1,
    ML_METRIC_RATIO = 2,
    ML_METRIC_PTEXP = 3
} ml_report_metric;

typedef enum ml_report_format { ML_FORMAT_CSV = 0, ML_FORMAT_MD = 1 } ml_report_format;

typedef struct ml_report ml_report;

ML_API int ml_report_metric_parse(const char* name, ml_report_metric* out);
ML_API int ml_report_format_parse(const char* name, ml_report_format* out);
ML_API int ml_report_create(ml_report** out);
/* Parses lockbench CSV text; `source` names it in error messages. On a
 * parse error nothing from this text is kept. */
ML_API int ml_report_add_csv(ml_report* report, const char* text, const char* source);
ML_API int ml_report_add_file(ml_report* report, const char* path);
ML_API int ml_report_row_count(const ml_report* report, size_t* out);
/* ML_ERR_EMPTY when no rows were added. */
ML_API int ml_report_render(const ml_report* report, ml_report_metric metric, ml_report_format format, char* buf,
                            size_t* len);
ML_API void ml_report_destroy(ml_report* report);

#ifdef __cplusplus
}
#endif

#endif /* MUTLOCK_H */
