#include "mutlock/mutlock.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>

#include "mutlock/lock_state.hpp"
#include "mutlock/lockbench.hpp"
#include "mutlock/mcs_lock.hpp"
#include "mutlock/mutable_lock.hpp"
#include "mutlock/platform.hpp"
#include "mutlock/report.hpp"
#include "mutlock/sleep_lock.hpp"
#include "mutlock/sw_model.hpp"
#include "mutlock/ttas_lock.hpp"

using namespace mutlock;

struct ml_lock {
    ml_lock_kind kind;
    std::variant<std::unique_ptr<MutableLock>, std::unique_ptr<TtasLock>, std::unique_ptr<McsLock>,
                 std::unique_ptr<SleepLock>>
        impl;
};

struct ml_sim_trace {
    sim::SimTrace trace;
};

struct ml_bench_result {
    bench::BenchResult result;
};

struct ml_report {
    std::vector<report::BenchRow> rows;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <class F>
int guarded(F&& f) noexcept {
    try {
        g_last_error.clear();
        return f();
    } catch (const report::ParseError& e) {
        return fail(ML_ERR_PARSE, e.what());
    } catch (const report::CoverageError& e) {
        return fail(ML_ERR_COVERAGE, e.what());
    } catch (const bench::RunError& e) {
        return fail(ML_ERR_RUN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(ML_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::out_of_range& e) {
        return fail(ML_ERR_OUT_OF_RANGE, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ML_ERR_OUT_OF_MEMORY, "out of memory");
    } catch (const std::exception& e) {
        return fail(ML_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(ML_ERR_INTERNAL, "unknown exception");
    }
}

int write_output(const std::string& text, char* buf, size_t* len) {
    if (len == nullptr) return fail(ML_ERR_NULL_POINTER, "length pointer is null");
    const size_t need = text.size() + 1;
    const size_t have = *len;
    *len = need;
    if (buf == nullptr || have < need) return ML_ERR_INSUFFICIENT_BUFFER;
    std::memcpy(buf, text.c_str(), need);
    return ML_OK;
}

#define ML_REQUIRE(ptr)                                                             \
    do {                                                                            \
        if ((ptr) == nullptr) return fail(ML_ERR_NULL_POINTER, #ptr " is null");    \
    } while (0)

bench::LockKind to_core(ml_lock_kind k) {
    switch (k) {
        case ML_LOCK_MUTLOCK: return bench::LockKind::mutlock;
        case ML_LOCK_TTAS: return bench::LockKind::ttas;
        case ML_LOCK_MCS: return bench::LockKind::mcs;
        case ML_LOCK_SLEEP: return bench::LockKind::sleep;
        case ML_LOCK_ADAPTIVE_SLEEP: return bench::LockKind::adaptive_sleep;
    }
    throw std::invalid_argument("unknown lock kind " + std::to_string(static_cast<int>(k)));
}

ml_lock_kind to_c(bench::LockKind k) {
    switch (k) {
        case bench::LockKind::mutlock: return ML_LOCK_MUTLOCK;
        case bench::LockKind::ttas: return ML_LOCK_TTAS;
        case bench::LockKind::mcs: return ML_LOCK_MCS;
        case bench::LockKind::sleep: return ML_LOCK_SLEEP;
        case bench::LockKind::adaptive_sleep: return ML_LOCK_ADAPTIVE_SLEEP;
    }
    return ML_LOCK_MUTLOCK;
}

// MCS needs a queue node per (thread, lock); the C API hides it here.
McsNode& mcs_node_for(const McsLock* lock) {
    thread_local std::unordered_map<const McsLock*, std::unique_ptr<McsNode>> nodes;
    auto& slot = nodes[lock];
    if (!slot) slot = std::make_unique<McsNode>();
    return *slot;
}

bench::BenchConfig to_core(const ml_bench_config& c) {
    bench::BenchConfig b;
    b.lock = to_core(c.lock);
    b.threads = c.threads;
    b.csl_us = c.csl_us;
    b.csu_us = c.csu_us;
    b.ncsl_us = c.ncsl_us;
    b.ncsu_us = c.ncsu_us;
    b.duration_s = c.duration_s;
    b.warmup_s = c.warmup_s;
    b.seed = c.seed;
    b.pin = c.pin != 0;
    b.period = c.period;
    b.max_sws = c.max_sws;
    b.spin_budget = c.spin_budget;
    b.check_exclusion = c.check_exclusion != 0;
    return b;
}

}  // namespace

extern "C" {

const char* ml_status_string(int status) {
    switch (status) {
        case ML_OK: return "ok";
        case ML_ERR_NULL_POINTER: return "null pointer";
        case ML_ERR_INVALID_ARGUMENT: return "invalid argument";
        case ML_ERR_INSUFFICIENT_BUFFER: return "insufficient buffer";
        case ML_ERR_OUT_OF_MEMORY: return "out of memory";
        case ML_ERR_IO: return "i/o error";
        case ML_ERR_PARSE: return "parse error";
        case ML_ERR_EMPTY: return "empty input";
        case ML_ERR_COVERAGE: return "incomplete coverage";
        case ML_ERR_RUN: return "run failed";
        case ML_ERR_OUT_OF_RANGE: return "out of range";
        case ML_ERR_INTERNAL: return "internal error";
        default: return "unknown status";
    }
}

const char* ml_last_error(void) { return g_last_error.c_str(); }

uint32_t ml_available_cores(void) { return available_cores(); }

const char* ml_lock_kind_name(ml_lock_kind kind) {
    try {
        return bench::to_string(to_core(kind)).data();
    } catch (...) {
        return "unknown";
    }
}

int ml_lock_kind_parse(const char* name, ml_lock_kind* out) {
    return guarded([&]() -> int {
        ML_REQUIRE(name);
        ML_REQUIRE(out);
        auto k = bench::parse_lock_kind(name);
        if (!k) return fail(ML_ERR_INVALID_ARGUMENT, std::string("unknown lock kind '") + name + "'");
        *out = to_c(*k);
        return ML_OK;
    });
}

int ml_mutlock_create(ml_lock** out, uint32_t max_sws, uint32_t period) {
    return guarded([&]() -> int {
        ML_REQUIRE(out);
        *out = nullptr;
        auto h = std::make_unique<ml_lock>(
            ml_lock{ML_LOCK_MUTLOCK, std::make_unique<MutableLock>(max_sws, period == 0 ? core::kDefaultOraclePeriod : period)});
        *out = h.release();
        return ML_OK;
    });
}

int ml_lock_create(ml_lock** out, ml_lock_kind kind, uint32_t param) {
    return guarded([&]() -> int {
        ML_REQUIRE(out);
        *out = nullptr;
        auto h = std::make_unique<ml_lock>();
        h->kind = kind;
        switch (to_core(kind)) {
            case bench::LockKind::mutlock: h->impl = std::make_unique<MutableLock>(param); break;
            case bench::LockKind::ttas: h->impl = std::make_unique<TtasLock>(); break;
            case bench::LockKind::mcs: h->impl = std::make_unique<McsLock>(); break;
            case bench::LockKind::sleep: h->impl = std::make_unique<SleepLock>(0); break;
            case bench::LockKind::adaptive_sleep:
                h->impl = std::make_unique<SleepLock>(param == 0 ? kDefaultSpinBudget : param);
                break;
        }
        *out = h.release();
        return ML_OK;
    });
}

int ml_lock_acquire(ml_lock* lock) {
    if (lock == nullptr) return fail(ML_ERR_NULL_POINTER, "lock is null");
    return guarded([&]() -> int {
        std::visit(
            [](auto& l) {
                using L = std::decay_t<decltype(*l)>;
                if constexpr (std::is_same_v<L, McsLock>) {
                    l->lock(mcs_node_for(l.get()));
                } else {
                    l->lock();
                }
            },
            lock->impl);
        return ML_OK;
    });
}

int ml_lock_release(ml_lock* lock) {
    if (lock == nullptr) return fail(ML_ERR_NULL_POINTER, "lock is null");
    return guarded([&]() -> int {
        std::visit(
            [](auto& l) {
                using L = std::decay_t<decltype(*l)>;
                if constexpr (std::is_same_v<L, McsLock>) {
                    l->unlock(mcs_node_for(l.get()));
                } else {
                    l->unlock();
                }
            },
            lock->impl);
        return ML_OK;
    });
}

int ml_lock_kind_of(const ml_lock* lock, ml_lock_kind* out) {
    ML_REQUIRE(lock);
    ML_REQUIRE(out);
    *out = lock->kind;
    return ML_OK;
}

int ml_mutlock_introspect(const ml_lock* lock, uint32_t* sws, uint32_t* thc) {
    ML_REQUIRE(lock);
    auto* m = std::get_if<std::unique_ptr<MutableLock>>(&lock->impl);
    if (m == nullptr) return fail(ML_ERR_INVALID_ARGUMENT, "lock is not a mutable lock");
    const auto s = (*m)->snapshot();
    if (sws) *sws = s.sws;
    if (thc) *thc = s.thc;
    return ML_OK;
}

void ml_lock_destroy(ml_lock* lock) { delete lock; }

int ml_sim_policy_parse(const char* name, ml_sim_policy* out) {
    ML_REQUIRE(name);
    ML_REQUIRE(out);
    auto p = sim::parse_policy(name);
    if (!p) return fail(ML_ERR_INVALID_ARGUMENT, std::string("unknown policy '") + name + "'");
    *out = static_cast<ml_sim_policy>(*p);
    return ML_OK;
}

int ml_sim_run(const ml_sim_config* config, ml_sim_trace** out) {
    return guarded([&]() -> int {
        ML_REQUIRE(config);
        ML_REQUIRE(out);
        *out = nullptr;
        if (config->policy < ML_SIM_SPIN || config->policy > ML_SIM_HYBRID)
            return fail(ML_ERR_INVALID_ARGUMENT, "unknown policy");
        sim::SimConfig c{config->threads, static_cast<sim::Policy>(config->policy), config->sws, config->cs_slots,
                         config->wake_slots};
        auto h = std::make_unique<ml_sim_trace>(ml_sim_trace{sim::simulate(c)});
        *out = h.release();
        return ML_OK;
    });
}

int ml_sim_trace_summary(const ml_sim_trace* trace, ml_sim_summary* out) {
    ML_REQUIRE(trace);
    ML_REQUIRE(out);
    const auto& t = trace->trace;
    out->threads = t.config.threads;
    out->slots = static_cast<uint32_t>(t.slots.size());
    out->completion_slot = t.completion_slot;
    out->cs_slots = t.cs_slots();
    out->wasted_spin_slots = t.wasted_spin_slots;
    out->wasted_wake_slots = t.wasted_wake_slots;
    out->waste_fraction = t.waste_fraction();
    out->throughput_cs_per_slot = t.throughput();
    return ML_OK;
}

int ml_sim_trace_activity(const ml_sim_trace* trace, uint32_t slot, uint32_t thread, ml_activity* out) {
    ML_REQUIRE(trace);
    ML_REQUIRE(out);
    const auto& t = trace->trace;
    if (slot >= t.slots.size() || thread >= t.config.threads)
        return fail(ML_ERR_OUT_OF_RANGE, "slot or thread out of range");
    *out = static_cast<ml_activity>(t.slots[slot][thread]);
    return ML_OK;
}

int ml_sim_trace_render(const ml_sim_trace* trace, ml_trace_format format, char* buf, size_t* len) {
    return guarded([&]() -> int {
        ML_REQUIRE(trace);
        const auto f = format == ML_TRACE_CSV ? sim::TraceFormat::csv : sim::TraceFormat::text;
        return write_output(sim::render_trace(trace->trace, f), buf, len);
    });
}

int ml_sim_summary_render(const ml_sim_trace* trace, char* buf, size_t* len) {
    return guarded([&]() -> int {
        ML_REQUIRE(trace);
        return write_output(sim::render_summary(trace->trace), buf, len);
    });
}

void ml_sim_trace_destroy(ml_sim_trace* trace) { delete trace; }

int64_t ml_wuc_adjust(int64_t delta, uint32_t thc, uint32_t sws_before, uint32_t sws_after) {
    return core::wuc_adjust(delta, thc, sws_before, sws_after);
}

int64_t ml_check_c1_c2(uint32_t thc, uint32_t sws, int64_t delta) { return sim::check_c1_c2(thc, sws, delta); }

void ml_bench_config_init(ml_bench_config* config) {
    if (config == nullptr) return;
    const bench::BenchConfig d;
    *config = ml_bench_config{to_c(d.lock), d.threads,  d.csl_us,  d.csu_us,       d.ncsl_us,
                              d.ncsu_us,    d.duration_s, d.warmup_s, d.seed,         d.pin ? 1 : 0,
                              d.period,     d.max_sws,  d.spin_budget, d.check_exclusion ? 1 : 0};
}

int ml_bench_run(const ml_bench_config* config, ml_bench_result** out) {
    return guarded([&]() -> int {
        ML_REQUIRE(config);
        ML_REQUIRE(out);
        *out = nullptr;
        auto h = std::make_unique<ml_bench_result>(ml_bench_result{bench::run_bench(to_core(*config))});
        *out = h.release();
        return ML_OK;
    });
}

int ml_bench_summary_get(const ml_bench_result* result, ml_bench_summary* out) {
    ML_REQUIRE(result);
    ML_REQUIRE(out);
    const auto& r = result->result;
    *out = ml_bench_summary{r.cs_count,        r.throughput,     r.sync_cpu_s,      r.wall_s,
                            r.join_s,          r.exclusion_violations, r.shared_counter, r.warmup_cs_count,
                            static_cast<uint32_t>(r.per_thread.size())};
    return ML_OK;
}

int ml_bench_thread_stats(const ml_bench_result* result, uint32_t thread, uint64_t* cs_count, double* sync_cpu_s) {
    ML_REQUIRE(result);
    const auto& pt = result->result.per_thread;
    if (thread >= pt.size()) return fail(ML_ERR_OUT_OF_RANGE, "thread index out of range");
    if (cs_count) *cs_count = pt[thread].cs_count;
    if (sync_cpu_s) *sync_cpu_s = pt[thread].sync_cpu_s;
    return ML_OK;
}

const char* ml_bench_csv_header(void) { return bench::kCsvHeader.data(); }

int ml_bench_csv_row(const ml_bench_config* config, uint32_t run, const ml_bench_result* result, char* buf,
                     size_t* len) {
    return guarded([&]() -> int {
        ML_REQUIRE(config);
        ML_REQUIRE(result);
        return write_output(bench::csv_row(to_core(*config), run, result->result), buf, len);
    });
}

void ml_bench_result_destroy(ml_bench_result* result) { delete result; }

int ml_report_metric_parse(const char* name, ml_report_metric* out) {
    ML_REQUIRE(name);
    ML_REQUIRE(out);
    auto m = report::parse_metric(name);
    if (!m) return fail(ML_ERR_INVALID_ARGUMENT, std::string("unknown metric '") + name + "'");
    *out = static_cast<ml_report_metric>(*m);
    return ML_OK;
}

int ml_report_format_parse(const char* name, ml_report_format* out) {
    ML_REQUIRE(name);
    ML_REQUIRE(out);
    auto f = report::parse_format(name);
    if (!f) return fail(ML_ERR_INVALID_ARGUMENT, std::string("unknown format '") + name + "'");
    *out = static_cast<ml_report_format>(*f);
    return ML_OK;
}

int ml_report_create(ml_report** out) {
    return guarded([&]() -> int {
        ML_REQUIRE(out);
        *out = new ml_report{};
        return ML_OK;
    });
}

int ml_report_add_csv(ml_report* report, const char* text, const char* source) {
    return guarded([&]() -> int {
        ML_REQUIRE(report);
        ML_REQUIRE(text);
        auto rows = report::parse_csv(text, source ? source : "<input>");
        report->rows.insert(report->rows.end(), rows.begin(), rows.end());
        return ML_OK;
    });
}

int ml_report_add_file(ml_report* report, const char* path) {
    return guarded([&]() -> int {
        ML_REQUIRE(report);
        ML_REQUIRE(path);
        std::ifstream in(path, std::ios::binary);
        if (!in) return fail(ML_ERR_IO, std::string("cannot open '") + path + "'");
        std::ostringstream text;
        text << in.rdbuf();
        auto rows = report::parse_csv(text.str(), path);
        report->rows.insert(report->rows.end(), rows.begin(), rows.end());
        return ML_OK;
    });
}

int ml_report_row_count(const ml_report* report, size_t* out) {
    ML_REQUIRE(report);
    ML_REQUIRE(out);
    *out = report->rows.size();
    return ML_OK;
}

int ml_report_render(const ml_report* report, ml_report_metric metric, ml_report_format format, char* buf,
                     size_t* len) {
    return guarded([&]() -> int {
        ML_REQUIRE(report);
        if (report->rows.empty()) return fail(ML_ERR_EMPTY, "no benchmark rows");
        if (metric < ML_METRIC_THROUGHPUT || metric > ML_METRIC_PTEXP)
            return fail(ML_ERR_INVALID_ARGUMENT, "unknown metric");
        const auto f = format == ML_FORMAT_MD ? report::Format::md : report::Format::csv;
        return write_output(report::render(report::aggregate(report->rows), static_cast<report::Metric>(metric), f),
                            buf, len);
    });
}

void ml_report_destroy(ml_report* report) { delete report; }

}  // extern "C"
