#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mutlock::report {

/// Raised for malformed CSV input; the message carries "source:line: ".
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a derived metric lacks the rows it needs.
class CoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BenchRow {
    std::string lock;
    std::uint32_t threads = 0;
    double csl_us = 0, csu_us = 0, ncsl_us = 0, ncsu_us = 0;
    std::uint32_t run = 0;
    std::uint64_t seed = 0;
    double wall_s = 0;
    std::uint64_t cs_count = 0;
    double throughput = 0;
    double sync_cpu_s = 0;
};

/// Parses lockbench CSV text (header line required). Blank lines are skipped.
std::vector<BenchRow> parse_csv(std::string_view text, std::string_view source = "<input>");

struct AggregateRow {
    std::string lock;
    std::uint32_t threads = 0;
    double mean_throughput = 0;
    double mean_sync_cpu = 0;
    std::uint32_t run_count = 0;

    friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// Group by (lock, threads) with arithmetic means, sorted by lock then threads.
std::vector<AggregateRow> aggregate(const std::vector<BenchRow>& rows);

struct LockRatio {
    std::string lock;
    /// Mean over thread counts of mean_throughput / optimum. Empty when
    /// coverage is incomplete.
    std::optional<double> ratio;
    /// Thread counts other locks were measured at but this one was not.
    std::vector<std::uint32_t> missing_threads;
};

/// optimum(threads) is the best mean throughput over all locks at that
/// count; each lock scores the mean of its per-count fraction of it.
/// Throws CoverageError on empty input.
std::vector<LockRatio> ratio_to_optimum(const std::vector<AggregateRow>& rows);

inline constexpr std::string_view kPtExpName = "pt-exp";

/// Expected throughput of picking the spin lock or the sleep lock at random,
/// per thread count. Throws CoverageError naming the first thread count
/// where either input row is absent.
std::map<std::uint32_t, double> pt_exp(const std::vector<AggregateRow>& rows,
                                       std::string_view spin_lock = "ttas",
                                       std::string_view sleep_lock = "sleep");

/// Ratio of the PT-EXP series against the same optimum as ratio_to_optimum.
double pt_exp_ratio(const std::vector<AggregateRow>& rows, const std::map<std::uint32_t, double>& series);

enum class Metric { throughput, cpu, ratio, ptexp };
enum class Format { csv, md };

std::optional<Metric> parse_metric(std::string_view s) noexcept;
std::optional<Format> parse_format(std::string_view s) noexcept;

/// Renders one metric as a CSV or aligned Markdown table.
std::string render(const std::vector<AggregateRow>& rows, Metric m, Format f);

}  // namespace mutlock::report
