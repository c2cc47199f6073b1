#include "mutlock/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "mutlock/lockbench.hpp"

namespace mutlock::report {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

class LineParser {
public:
    LineParser(std::string_view source, std::size_t line) : source_(source), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream msg;
        msg << source_ << ':' << line_ << ": " << what;
        throw ParseError(msg.str());
    }

    template <class T>
    T integer(std::string_view field, std::string_view name) const {
        T v{};
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size())
            fail("column '" + std::string(name) + "': expected an unsigned integer, got '" + std::string(field) + "'");
        return v;
    }

    double real(std::string_view field, std::string_view name) const {
        double v = 0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v) || v < 0)
            fail("column '" + std::string(name) + "': expected a non-negative number, got '" + std::string(field) + "'");
        return v;
    }

private:
    std::string_view source_;
    std::size_t line_;
};

double sorted_mean(std::vector<double> v) {
    // Sorting first makes the sum independent of input order.
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

std::map<std::uint32_t, double> optimum_by_threads(const std::vector<AggregateRow>& rows) {
    std::map<std::uint32_t, double> best;
    for (const auto& r : rows) {
        auto [it, inserted] = best.emplace(r.threads, r.mean_throughput);
        if (!inserted) it->second = std::max(it->second, r.mean_throughput);
    }
    return best;
}

double ratio_against(const std::map<std::uint32_t, double>& series, const std::map<std::uint32_t, double>& best) {
    std::vector<double> parts;
    for (const auto& [threads, value] : series) {
        const double opt = best.at(threads);
        parts.push_back(opt > 0 ? value / opt : 1.0);
    }
    return sorted_mean(std::move(parts));
}

std::string format_number(double v, bool compact) {
    char buf[64];
    auto res = compact ? std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6)
                       : std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& body,
                  Format f) {
    std::ostringstream out;
    if (f == Format::csv) {
        auto line = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
            out << '\n';
        };
        line(header);
        for (const auto& r : body) line(r);
        return out.str();
    }

    std::vector<std::size_t> width(header.size(), 3);
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = std::max(width[i], header[i].size());
    for (const auto& r : body)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());

    auto line = [&](const std::vector<std::string>& cells) {
        out << '|';
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << ' ' << cells[i] << std::string(width[i] - cells[i].size(), ' ') << " |";
        }
        out << '\n';
    };
    line(header);
    out << '|';
    for (std::size_t w : width) out << std::string(w + 2, '-') << '|';
    out << '\n';
    for (const auto& r : body) line(r);
    return out.str();
}

}  // namespace

std::vector<BenchRow> parse_csv(std::string_view text, std::string_view source) {
    std::vector<BenchRow> rows;
    bool header_seen = false;
    std::size_t line_no = 0;
    const std::size_t columns = split(bench::kCsvHeader, ',').size();

    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        LineParser p(source, line_no);
        if (!header_seen) {
            if (line != bench::kCsvHeader) p.fail("unexpected header; expected '" + std::string(bench::kCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != columns)
            p.fail("expected " + std::to_string(columns) + " columns, found " + std::to_string(f.size()));
        for (auto& cell : f) cell = trim(cell);

        BenchRow r;
        r.lock = std::string(f[0]);
        if (r.lock.empty()) p.fail("column 'lock' is empty");
        r.threads = p.integer<std::uint32_t>(f[1], "threads");
        if (r.threads == 0) p.fail("column 'threads' must be at least 1");
        r.csl_us = p.real(f[2], "csl_us");
        r.csu_us = p.real(f[3], "csu_us");
        r.ncsl_us = p.real(f[4], "ncsl_us");
        r.ncsu_us = p.real(f[5], "ncsu_us");
        r.run = p.integer<std::uint32_t>(f[6], "run");
        r.seed = p.integer<std::uint64_t>(f[7], "seed");
        r.wall_s = p.real(f[8], "wall_s");
        r.cs_count = p.integer<std::uint64_t>(f[9], "cs_count");
        r.throughput = p.real(f[10], "throughput_cs_per_s");
        r.sync_cpu_s = p.real(f[11], "sync_cpu_s");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<AggregateRow> aggregate(const std::vector<BenchRow>& rows) {
    struct Acc {
        std::vector<double> throughput;
        std::vector<double> cpu;
    };
    std::map<std::pair<std::string, std::uint32_t>, Acc> groups;
    for (const auto& r : rows) {
        auto& g = groups[{r.lock, r.threads}];
        g.throughput.push_back(r.throughput);
        g.cpu.push_back(r.sync_cpu_s);
    }

    std::vector<AggregateRow> out;
    out.reserve(groups.size());
    for (auto& [key, acc] : groups) {
        const auto n = static_cast<std::uint32_t>(acc.throughput.size());
        out.push_back({key.first, key.second, sorted_mean(std::move(acc.throughput)), sorted_mean(std::move(acc.cpu)), n});
    }
    return out;
}

std::vector<LockRatio> ratio_to_optimum(const std::vector<AggregateRow>& rows) {
    if (rows.empty()) throw CoverageError("no aggregate rows to rank");
    const auto best = optimum_by_threads(rows);

    std::map<std::string, std::map<std::uint32_t, double>> by_lock;
    for (const auto& r : rows) by_lock[r.lock][r.threads] = r.mean_throughput;

    std::vector<LockRatio> out;
    for (const auto& [lock, series] : by_lock) {
        LockRatio lr{lock, std::nullopt, {}};
        for (const auto& [threads, _] : best) {
            if (!series.count(threads)) lr.missing_threads.push_back(threads);
        }
        if (lr.missing_threads.empty()) lr.ratio = ratio_against(series, best);
        out.push_back(std::move(lr));
    }
    return out;
}

std::map<std::uint32_t, double> pt_exp(const std::vector<AggregateRow>& rows, std::string_view spin_lock,
                                       std::string_view sleep_lock) {
    std::map<std::uint32_t, std::pair<std::optional<double>, std::optional<double>>> pairs;
    for (const auto& r : rows) {
        if (r.lock == spin_lock) pairs[r.threads].first = r.mean_throughput;
        if (r.lock == sleep_lock) pairs[r.threads].second = r.mean_throughput;
    }
    if (pairs.empty())
        throw CoverageError("no '" + std::string(spin_lock) + "' or '" + std::string(sleep_lock) + "' rows");

    std::map<std::uint32_t, double> out;
    for (const auto& [threads, p] : pairs) {
        if (!p.first || !p.second) {
            throw CoverageError("threads=" + std::to_string(threads) + ": missing '" +
                                std::string(p.first ? sleep_lock : spin_lock) + "' row");
        }
        out[threads] = (*p.first + *p.second) / 2.0;
    }
    return out;
}

double pt_exp_ratio(const std::vector<AggregateRow>& rows, const std::map<std::uint32_t, double>& series) {
    return ratio_against(series, optimum_by_threads(rows));
}

std::optional<Metric> parse_metric(std::string_view s) noexcept {
    if (s == "throughput") return Metric::throughput;
    if (s == "cpu") return Metric::cpu;
    if (s == "ratio") return Metric::ratio;
    if (s == "ptexp") return Metric::ptexp;
    return std::nullopt;
}

std::optional<Format> parse_format(std::string_view s) noexcept {
    if (s == "csv") return Format::csv;
    if (s == "md") return Format::md;
    return std::nullopt;
}

std::string render(const std::vector<AggregateRow>& rows, Metric m, Format f) {
    const bool compact = f == Format::md;
    auto num = [compact](double v) { return format_number(v, compact); };
    std::vector<std::vector<std::string>> body;

    switch (m) {
        case Metric::throughput:
        case Metric::cpu: {
            const bool tp = m == Metric::throughput;
            for (const auto& r : rows) {
                body.push_back({r.lock, std::to_string(r.threads), std::to_string(r.run_count),
                                num(tp ? r.mean_throughput : r.mean_sync_cpu)});
            }
            return table({"lock", "threads", "runs", tp ? "mean_throughput_cs_per_s" : "mean_sync_cpu_s"}, body, f);
        }
        case Metric::ratio: {
            for (const auto& lr : ratio_to_optimum(rows)) {
                std::string missing;
                for (auto t : lr.missing_threads) missing += (missing.empty() ? "" : " ") + std::to_string(t);
                body.push_back({lr.lock, lr.ratio ? num(*lr.ratio) : "n/a", missing});
            }
            // PT-EXP joins the ranking when both of its inputs cover every thread count.
            try {
                const auto series = pt_exp(rows);
                if (series.size() == optimum_by_threads(rows).size())
                    body.push_back({std::string(kPtExpName), num(pt_exp_ratio(rows, series)), ""});
            } catch (const CoverageError&) {
            }
            return table({"lock", "ratio_to_optimum", "missing_threads"}, body, f);
        }
        case Metric::ptexp: {
            const auto series = pt_exp(rows);
            std::map<std::pair<std::string, std::uint32_t>, double> lookup;
            for (const auto& r : rows) lookup[{r.lock, r.threads}] = r.mean_throughput;
            for (const auto& [threads, value] : series) {
                body.push_back({std::to_string(threads), num(lookup.at({"ttas", threads})),
                                num(lookup.at({"sleep", threads})), num(value)});
            }
            return table({"threads", "ttas", "sleep", std::string(kPtExpName)}, body, f);
        }
    }
    return {};
}

}  // namespace mutlock::report
