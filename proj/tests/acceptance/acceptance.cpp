// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// hard criterion fails. `--quick` shortens the timed stress runs for local
// iteration; ctest runs the full durations.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mutlock/lock_state.hpp"
#include "mutlock/lockbench.hpp"
#include "mutlock/platform.hpp"
#include "mutlock/report.hpp"
#include "mutlock/sw_model.hpp"

using namespace mutlock;

namespace {

// Pinned parameters.
constexpr double kStressSeconds = 10.0;
constexpr double kJoinAllowanceSeconds = 5.0;
constexpr double kMinCsPerThreadPerSecond = 1.0;
constexpr int kOracleSequences = 100000;
constexpr int kOracleSequenceLength = 64;
constexpr int kPackedPairs = 1000000;
constexpr double kDirectionalSeconds = 10.0;
constexpr double kCpuFractionOfTtas = 0.5;
constexpr double kThroughputFractionOfBest = 0.9;
constexpr double kReportRelTol = 1e-12;

struct Outcome {
    bool pass;
    std::string detail;
};

int g_hard_failures = 0;

void report_line(int id, const char* title, const Outcome& o, bool soft = false) {
    const char* tag = o.pass ? "PASS" : (soft ? "SOFT-FAIL" : "FAIL");
    std::printf("[%s] %d %s: %s\n", tag, id, title, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !soft) ++g_hard_failures;
}

std::vector<std::uint32_t> distinct(std::initializer_list<std::uint32_t> v) {
    std::set<std::uint32_t> s(v);
    return {s.begin(), s.end()};
}

Outcome simulator_goldens() {
    using namespace sim;
    auto run = [](Policy p) { return simulate(SimConfig{3, p, 1, 1, 1}); };
    const auto spin = run(Policy::spin_only);
    const auto sleep = run(Policy::sleep_only);
    const auto hybrid = run(Policy::hybrid);
    std::ostringstream d;
    d << "spin completes " << spin.completion_slot << " waste " << spin.wasted_slots() << " ("
      << spin.waste_fraction() * 100 << "%); sleep completes " << sleep.completion_slot << " wake waste "
      << sleep.wasted_wake_slots << " (throughput -" << (1 - sleep.throughput() / spin.throughput()) * 100
      << "%); hybrid completes " << hybrid.completion_slot << " waste " << hybrid.wasted_slots();
    const bool ok = spin.completion_slot == 3 && spin.wasted_spin_slots == 3 && spin.wasted_wake_slots == 0 &&
                    spin.waste_fraction() == 0.5 && sleep.completion_slot == 5 && sleep.wasted_wake_slots == 2 &&
                    sleep.wasted_spin_slots == 0 && hybrid.completion_slot == 3 && hybrid.wasted_slots() == 2;
    return {ok, d.str()};
}

Outcome bookkeeping_equivalence() {
    int checked = 0, mismatches = 0;
    for (std::int64_t before = 1; before <= 8; ++before) {
        for (std::int64_t d = -8; d <= 8; ++d) {
            if (before + d < 1 || before + d > 8) continue;
            for (std::uint32_t thc = 0; thc <= 16; ++thc) {
                const auto sb = static_cast<std::uint32_t>(before);
                const auto sa = static_cast<std::uint32_t>(before + d);
                ++checked;
                if (core::wuc_adjust(d, thc, sb, sa) != sim::check_c1_c2(thc, sb, d)) ++mismatches;
            }
        }
    }
    return {mismatches == 0 && checked > 0,
            std::to_string(checked) + " cases, " + std::to_string(mismatches) + " mismatches"};
}

bench::BenchConfig stress_config(bench::LockKind k, std::uint32_t threads, double seconds) {
    bench::BenchConfig c;
    c.lock = k;
    c.threads = threads;
    c.duration_s = seconds;
    c.warmup_s = 0.1;
    return c;
}

Outcome mutual_exclusion(std::uint32_t cores, double seconds) {
    std::ostringstream d;
    bool ok = true;
    int runs = 0;
    for (auto k : bench::kAllLockKinds) {
        for (auto t : distinct({2, cores, 2 * cores})) {
            const auto r = bench::run_bench(stress_config(k, t, seconds));
            ++runs;
            const bool good = r.exclusion_violations == 0 && r.shared_counter == r.cs_count + r.warmup_cs_count;
            if (!good) {
                ok = false;
                d << bench::to_string(k) << "@" << t << " violations=" << r.exclusion_violations << "; ";
            }
        }
    }
    d << runs << " runs of " << seconds << " s, threads in {2, " << cores << ", " << 2 * cores << "}";
    return {ok, d.str()};
}

Outcome progress(std::uint32_t cores, double seconds) {
    std::ostringstream d;
    bool ok = true;
    for (auto max : distinct({1, cores})) {
        auto c = stress_config(bench::LockKind::mutlock, 2 * cores, seconds);
        c.max_sws = max;
        const auto r = bench::run_bench(c);
        std::uint64_t slowest = ~0ull;
        for (const auto& t : r.per_thread) slowest = std::min(slowest, t.cs_count);
        const bool each = static_cast<double>(slowest) >= kMinCsPerThreadPerSecond * r.wall_s;
        const bool joined = r.wall_s + r.join_s <= seconds + kJoinAllowanceSeconds;
        ok = ok && each && joined && r.exclusion_violations == 0;
        d << "max_sws=" << max << ": slowest thread " << slowest << " CS in " << r.wall_s << " s, join "
          << r.join_s << " s; ";
    }
    d << 2 * cores << " threads";
    return {ok, d.str()};
}

Outcome oracle_dynamics() {
    std::ostringstream d;
    // (a) a late wake-up with nobody spinning doubles the window.
    core::SwsOracle a(10);
    const auto grow = a.evaluate(false, true, 3);
    const bool doubled = 3 + core::clamp_delta(3, grow, 64) == 6;

    // (b) K quiet acquisitions shrink by one, not earlier.
    core::SwsOracle b(10);
    bool quiet = true;
    for (int i = 0; i < 9; ++i) quiet = quiet && b.evaluate(true, false, 5) == 0;
    const bool shrank = quiet && b.evaluate(true, false, 5) == -1;

    // (c) random event sequences keep sws inside [1, max].
    std::mt19937_64 rng(20241016);
    std::uint64_t escapes = 0, events = 0;
    for (int s = 0; s < kOracleSequences; ++s) {
        const auto max = static_cast<std::uint32_t>(1 + rng() % 64);
        core::SwsOracle o(static_cast<std::uint32_t>(1 + rng() % 16));
        std::uint32_t sws = 1;
        for (int i = 0; i < kOracleSequenceLength; ++i) {
            const auto bits = rng();
            const auto delta = o.evaluate(bits & 1, bits & 2, sws);
            sws = static_cast<std::uint32_t>(sws + core::clamp_delta(sws, delta, max));
            ++events;
            if (sws < 1 || sws > max) ++escapes;
        }
    }
    d << "doubling " << (doubled ? "ok" : "wrong") << ", K=10 decay " << (shrank ? "ok" : "wrong") << ", "
      << kOracleSequences << " sequences / " << events << " events with " << escapes << " out-of-range";
    return {doubled && shrank && escapes == 0, d.str()};
}

Outcome packed_state() {
    std::mt19937_64 rng(7);
    std::uint64_t bad = 0;
    for (int i = 0; i < kPackedPairs; ++i) {
        // Keep one unit of headroom so the field-isolation steps cannot wrap.
        const auto sws = static_cast<std::uint32_t>(rng() % 0xFFFF'FFFFu);
        const auto thc = static_cast<std::uint32_t>(rng() % 0xFFFF'FFFFu);
        const auto w = core::pack(sws, thc);
        if (core::unpack(w) != core::LockState{sws, thc}) ++bad;
        if (core::unpack(w + core::kThcUnit) != core::LockState{sws, thc + 1}) ++bad;
        if (core::unpack(w + core::kSwsUnit) != core::LockState{sws + 1, thc}) ++bad;
        if (thc > 0 && core::unpack(w - core::kThcUnit) != core::LockState{sws, thc - 1}) ++bad;
    }
    return {bad == 0, std::to_string(kPackedPairs) + " pairs, " + std::to_string(bad) + " mismatches"};
}

Outcome directional(std::uint32_t cores, double seconds) {
    auto measure = [&](bench::LockKind k) {
        auto c = stress_config(k, 2 * cores, seconds);
        c.csu_us = 366;
        c.ncsu_us = 3.7;
        return bench::run_bench(c);
    };
    const auto ttas = measure(bench::LockKind::ttas);
    const auto sleep = measure(bench::LockKind::sleep);
    const auto mut = measure(bench::LockKind::mutlock);
    const double best = std::max(ttas.throughput, sleep.throughput);
    const bool cpu_ok = mut.sync_cpu_s <= kCpuFractionOfTtas * ttas.sync_cpu_s;
    const bool tp_ok = mut.throughput >= kThroughputFractionOfBest * best;
    std::ostringstream d;
    d << 2 * cores << " threads; sync_cpu mutlock " << mut.sync_cpu_s << " s vs ttas " << ttas.sync_cpu_s
      << " s (limit x" << kCpuFractionOfTtas << "); throughput mutlock " << mut.throughput << " vs best "
      << best << " CS/s (limit x" << kThroughputFractionOfBest << ")";
    return {cpu_ok && tp_ok, d.str()};
}

Outcome report_math() {
    // Three locks by three thread counts; expected values evaluated with exact
    // rationals and rounded to double.
    std::ostringstream csv;
    csv << bench::kCsvHeader << '\n';
    const struct {
        const char* lock;
        int threads;
        double tp;
    } runs[] = {{"ttas", 1, 100},   {"ttas", 2, 80},    {"ttas", 4, 40},    {"sleep", 1, 60},
                {"sleep", 2, 70},   {"sleep", 4, 50},   {"mutlock", 1, 90}, {"mutlock", 2, 84},
                {"mutlock", 2, 86}, {"mutlock", 4, 55}};
    int n = 0;
    for (const auto& r : runs) csv << r.lock << ',' << r.threads << ",0,366,0,3.7," << n++ << ",1,1,1," << r.tp << ",0\n";
    const auto rows = report::aggregate(report::parse_csv(csv.str()));
    const auto ratios = report::ratio_to_optimum(rows);
    const auto series = report::pt_exp(rows);

    auto close = [](double got, double want) { return std::abs(got - want) <= kReportRelTol * std::abs(want); };
    auto ratio_of = [&](const char* lock) {
        for (const auto& r : ratios)
            if (r.lock == lock && r.ratio) return *r.ratio;
        return std::nan("");
    };
    const bool ok = close(ratio_of("ttas"), 0.8894830659536542) && close(ratio_of("sleep"), 0.7775401069518717) &&
                    close(ratio_of("mutlock"), 0.9666666666666667) && series.size() == 3 &&
                    series.at(1) == 80 && series.at(2) == 75 && series.at(4) == 45 &&
                    close(report::pt_exp_ratio(rows, series), 0.8335115864527629);
    std::ostringstream d;
    d << "ratios ttas=" << ratio_of("ttas") << " sleep=" << ratio_of("sleep") << " mutlock=" << ratio_of("mutlock")
      << ", pt-exp series 80/75/45, tolerance " << kReportRelTol << " relative";
    return {ok, d.str()};
}

Outcome guarded(const std::function<Outcome()>& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

}  // namespace

int main(int argc, char** argv) {
    const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
    const double stress_s = quick ? 0.5 : kStressSeconds;
    const double directional_s = quick ? 1.0 : kDirectionalSeconds;
    const std::uint32_t cores = available_cores();
    std::printf("available cores: %u%s\n", cores, quick ? " (quick mode: shortened runs)" : "");

    report_line(1, "simulator golden timelines", guarded(simulator_goldens));
    report_line(2, "bookkeeping oracle equivalence", guarded(bookkeeping_equivalence));
    report_line(3, "mutual exclusion", guarded([&] { return mutual_exclusion(cores, stress_s); }));
    report_line(4, "progress, no lost wake-ups", guarded([&] { return progress(cores, stress_s); }));
    report_line(5, "oracle dynamics", guarded(oracle_dynamics));
    report_line(6, "packed state", guarded(packed_state));
    report_line(7, "directional hardware check", guarded([&] { return directional(cores, directional_s); }),
                /*soft=*/true);
    report_line(8, "report math", guarded(report_math));
    return g_hard_failures == 0 ? 0 : 1;
}
