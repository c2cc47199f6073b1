#include "mutlock/lockbench.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <memory>
#include <system_error>
#include <thread>

#include "mutlock/mcs_lock.hpp"
#include "mutlock/mutable_lock.hpp"
#include "mutlock/platform.hpp"
#include "mutlock/sleep_lock.hpp"
#include "mutlock/ttas_lock.hpp"

namespace mutlock::bench {

std::string_view to_string(LockKind k) noexcept {
    switch (k) {
        case LockKind::mutlock: return "mutlock";
        case LockKind::ttas: return "ttas";
        case LockKind::mcs: return "mcs";
        case LockKind::sleep: return "sleep";
        case LockKind::adaptive_sleep: return "adaptive_sleep";
    }
    return "?";
}

std::optional<LockKind> parse_lock_kind(std::string_view s) noexcept {
    for (LockKind k : kAllLockKinds) {
        if (s == to_string(k)) return k;
    }
    if (s == "adaptive") return LockKind::adaptive_sleep;
    return std::nullopt;
}

void validate(const BenchConfig& c) {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (c.threads == 0) throw ConfigError("threads must be at least 1");
    if (!finite_nonneg(c.csl_us) || !finite_nonneg(c.csu_us) || c.csl_us > c.csu_us)
        throw ConfigError("critical section bounds must satisfy 0 <= csl <= csu");
    if (!finite_nonneg(c.ncsl_us) || !finite_nonneg(c.ncsu_us) || c.ncsl_us > c.ncsu_us)
        throw ConfigError("non-critical section bounds must satisfy 0 <= ncsl <= ncsu");
    if (!std::isfinite(c.duration_s) || c.duration_s <= 0.0) throw ConfigError("duration must be positive");
    if (!finite_nonneg(c.warmup_s)) throw ConfigError("warmup must be non-negative");
    if (c.lock == LockKind::mutlock && c.period == 0) throw ConfigError("K must be at least 1");
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint32_t thread, std::uint32_t stream) noexcept {
    // splitmix64 finalizer over the seed combined with the stream position.
    std::uint64_t z = seed ^ ((static_cast<std::uint64_t>(thread) << 1 | stream) * 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

WorkloadSampler::WorkloadSampler(std::uint64_t seed, double low_us, double high_us)
    : engine_(seed), low_(low_us), high_(high_us) {
    if (!(low_us <= high_us)) throw ConfigError("workload sampler requires low <= high");
}

double WorkloadSampler::next() noexcept {
    const std::uint64_t bits = engine_() >> 11;
    if (low_ == high_) return low_;
    const double u = static_cast<double>(bits) * 0x1.0p-53;  // [0, 1)
    const double v = low_ + (high_ - low_) * u;
    return v < high_ ? v : std::nextafter(high_, low_);
}

namespace {

template <class Lock>
struct Session {
    Lock& lock_;
    void lock() noexcept { lock_.lock(); }
    void unlock() noexcept { lock_.unlock(); }
};

template <>
struct Session<McsLock> {
    McsLock& lock_;
    McsNode node{};
    void lock() noexcept { lock_.lock(node); }
    void unlock() noexcept { lock_.unlock(node); }
};

enum Phase : int { kWaiting, kWarmup, kMeasure, kStop };

struct alignas(kCacheLine) Shared {
    std::atomic<int> phase{kWaiting};
    std::atomic<std::uint32_t> ready{0};
    alignas(kCacheLine) std::atomic<std::uint32_t> occupancy{0};
    std::atomic<std::uint64_t> violations{0};
    alignas(kCacheLine) std::atomic<std::uint64_t> counter{0};
};

struct alignas(kCacheLine) WorkerOut {
    ThreadStats stats;
    std::uint64_t warmup = 0;
};

template <class Lock>
void worker(Lock& lock, const BenchConfig& c, std::uint32_t index, Shared& sh, WorkerOut& out) {
    if (c.pin) out.stats.pinned = pin_current_thread(index);
    Session<Lock> session{lock};
    WorkloadSampler cs(stream_seed(c.seed, index, 0), c.csl_us, c.csu_us);
    WorkloadSampler ncs(stream_seed(c.seed, index, 1), c.ncsl_us, c.ncsu_us);

    sh.ready.fetch_add(1, std::memory_order_acq_rel);
    while (sh.phase.load(std::memory_order_acquire) == kWaiting) std::this_thread::yield();

    std::int64_t sync_ns = 0;
    for (;;) {
        const int phase = sh.phase.load(std::memory_order_acquire);
        if (phase == kStop) break;
        const bool measuring = phase == kMeasure;
        const double cs_us = cs.next();
        const double ncs_us = ncs.next();

        const std::int64_t t0 = thread_cpu_ns();
        session.lock();
        const std::int64_t t1 = thread_cpu_ns();

        if (c.check_exclusion && sh.occupancy.fetch_add(1, std::memory_order_relaxed) != 0)
            sh.violations.fetch_add(1, std::memory_order_relaxed);
        // Deliberately not an RMW: lost updates show up as a short count.
        sh.counter.store(sh.counter.load(std::memory_order_relaxed) + 1, std::memory_order_relaxed);
        if (measuring) {
            ++out.stats.cs_count;
        } else {
            ++out.warmup;
        }
        busy_work(cs_us);
        if (c.check_exclusion) sh.occupancy.fetch_sub(1, std::memory_order_relaxed);

        const std::int64_t t2 = thread_cpu_ns();
        session.unlock();
        const std::int64_t t3 = thread_cpu_ns();

        if (measuring) sync_ns += (t1 - t0) + (t3 - t2);
        busy_work(ncs_us);
    }
    out.stats.sync_cpu_s = static_cast<double>(sync_ns) * 1e-9;
}

template <class Lock>
BenchResult drive(Lock& lock, const BenchConfig& c) {
    using clock = std::chrono::steady_clock;
    Shared sh;
    std::vector<WorkerOut> outs(c.threads);
    std::vector<std::thread> pool;
    pool.reserve(c.threads);

    auto stop_and_join = [&] {
        sh.phase.store(kStop, std::memory_order_release);
        for (auto& t : pool) t.join();
    };

    try {
        for (std::uint32_t i = 0; i < c.threads; ++i) {
            pool.emplace_back([&lock, &c, i, &sh, &outs] { worker(lock, c, i, sh, outs[i]); });
        }
    } catch (const std::system_error& e) {
        stop_and_join();
        throw RunError(std::string("failed to spawn worker thread: ") + e.what());
    }

    while (sh.ready.load(std::memory_order_acquire) < c.threads) std::this_thread::yield();
    sh.phase.store(kWarmup, std::memory_order_release);
    std::this_thread::sleep_for(std::chrono::duration<double>(c.warmup_s));

    const auto start = clock::now();
    sh.phase.store(kMeasure, std::memory_order_release);
    std::this_thread::sleep_until(start + std::chrono::duration_cast<clock::duration>(
                                              std::chrono::duration<double>(c.duration_s)));
    const auto stop = clock::now();
    stop_and_join();
    const auto joined = clock::now();

    BenchResult r;
    r.wall_s = std::chrono::duration<double>(stop - start).count();
    r.join_s = std::chrono::duration<double>(joined - stop).count();
    r.exclusion_violations = sh.violations.load();
    r.shared_counter = sh.counter.load();
    for (const auto& o : outs) {
        r.per_thread.push_back(o.stats);
        r.cs_count += o.stats.cs_count;
        r.sync_cpu_s += o.stats.sync_cpu_s;
        r.warmup_cs_count += o.warmup;
    }
    r.throughput = static_cast<double>(r.cs_count) / r.wall_s;
    return r;
}

}  // namespace

BenchResult run_bench(const BenchConfig& c) {
    validate(c);

    switch (c.lock) {
        case LockKind::mutlock: {
            auto lock = std::make_unique<MutableLock>(c.max_sws, c.period);
            return drive(*lock, c);
        }
        case LockKind::ttas: {
            auto lock = std::make_unique<TtasLock>();
            return drive(*lock, c);
        }
        case LockKind::mcs: {
            auto lock = std::make_unique<McsLock>();
            return drive(*lock, c);
        }
        case LockKind::sleep: {
            auto lock = std::make_unique<SleepLock>(0);
            return drive(*lock, c);
        }
        case LockKind::adaptive_sleep: {
            auto lock = std::make_unique<AdaptiveSleepLock>(c.spin_budget);
            return drive(*lock, c);
        }
    }
    throw ConfigError("unknown lock kind");
}

namespace {

void append_number(std::string& out, double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

void append_number(std::string& out, std::uint64_t v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

}  // namespace

std::string csv_row(const BenchConfig& c, std::uint32_t run, const BenchResult& r) {
    std::string row(to_string(c.lock));
    const auto field = [&row](auto v) {
        row.push_back(',');
        append_number(row, v);
    };
    field(static_cast<std::uint64_t>(c.threads));
    field(c.csl_us);
    field(c.csu_us);
    field(c.ncsl_us);
    field(c.ncsu_us);
    field(static_cast<std::uint64_t>(run));
    field(c.seed);
    field(r.wall_s);
    field(r.cs_count);
    field(r.throughput);
    field(r.sync_cpu_s);
    return row;
}

}  // namespace mutlock::bench
