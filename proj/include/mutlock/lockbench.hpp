#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mutlock::bench {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class RunError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LockKind { mutlock, ttas, mcs, sleep, adaptive_sleep };

inline constexpr LockKind kAllLockKinds[] = {LockKind::mutlock, LockKind::ttas, LockKind::mcs,
                                             LockKind::sleep, LockKind::adaptive_sleep};

std::string_view to_string(LockKind k) noexcept;
std::optional<LockKind> parse_lock_kind(std::string_view s) noexcept;

struct BenchConfig {
    LockKind lock = LockKind::mutlock;
    std::uint32_t threads = 1;
    // Critical / non-critical section lengths, uniform over [low, high) microseconds.
    double csl_us = 0.0;
    double csu_us = 0.0;
    double ncsl_us = 0.0;
    double ncsu_us = 0.0;
    double duration_s = 1.0;
    double warmup_s = 0.1;
    std::uint64_t seed = 1;
    bool pin = false;
    /// Mutable lock parameters; 0 max_sws means one per available core.
    std::uint32_t period = 10;
    std::uint32_t max_sws = 0;
    std::uint32_t spin_budget = 100;
    bool check_exclusion = true;
};

void validate(const BenchConfig& c);

struct ThreadStats {
    std::uint64_t cs_count = 0;
    double sync_cpu_s = 0.0;
    bool pinned = false;
};

struct BenchResult {
    std::uint64_t cs_count = 0;
    double throughput = 0.0;  // critical sections per second
    double sync_cpu_s = 0.0;  // CPU time inside acquire + release, all threads
    double wall_s = 0.0;      // measured window
    double join_s = 0.0;      // from the stop signal until every worker joined
    /// Times a thread entered the critical section while another was inside.
    std::uint64_t exclusion_violations = 0;
    /// A plain counter bumped inside every critical section; equals cs_count
    /// plus warm-up sections when exclusion holds.
    std::uint64_t shared_counter = 0;
    std::uint64_t warmup_cs_count = 0;
    std::vector<ThreadStats> per_thread;
};

/// Runs one measurement of the lockbench workload: every worker waits on a
/// start barrier, then loops {acquire; work U[csl,csu); release; work
/// U[ncsl,ncsu)} for the warm-up plus the measured duration.
BenchResult run_bench(const BenchConfig& c);

/// Seeded stream of durations, uniform over [low, high) microseconds.
class WorkloadSampler {
public:
    WorkloadSampler(std::uint64_t seed, double low_us, double high_us);
    double next() noexcept;
    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }

private:
    std::mt19937_64 engine_;
    double low_;
    double high_;
};

/// Seed for one of a worker's streams: `stream` 0 is critical sections,
/// 1 non-critical sections.
std::uint64_t stream_seed(std::uint64_t seed, std::uint32_t thread, std::uint32_t stream) noexcept;

/// Spins on the calling thread until `us` microseconds of wall time have
/// passed. Time spent preempted counts toward the total.
void busy_work(double us) noexcept;

/// CSV wire format shared with the report module.
inline constexpr std::string_view kCsvHeader =
    "lock,threads,csl_us,csu_us,ncsl_us,ncsu_us,run,seed,wall_s,cs_count,throughput_cs_per_s,sync_cpu_s";

std::string csv_row(const BenchConfig& c, std::uint32_t run, const BenchResult& r);

}  // namespace mutlock::bench
