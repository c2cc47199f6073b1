// mutlock: command-line front end over the C API.
//
//   mutlock sim    --threads 3 --policy hybrid --sws 1 --trace
//   mutlock bench  --lock mutlock,ttas --threads 1 2 4 --csu 3.7 --ncsu 3.7 --csv out.csv
//   mutlock report --input out.csv --metric ratio --format md
//
// Exit codes: 0 success, 1 usage or runtime error, 2 empty report input,
// 3 malformed report input, 4 incomplete coverage for the requested metric.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mutlock/mutlock.h"

namespace {

enum ExitCode { kOk = 0, kError = 1, kEmpty = 2, kParse = 3, kCoverage = 4 };

int report_failure(const char* what, int status) {
    std::cerr << "mutlock: " << what << ": " << ml_status_string(status);
    if (*ml_last_error() != '\0') std::cerr << ": " << ml_last_error();
    std::cerr << '\n';
    switch (status) {
        case ML_ERR_EMPTY: return kEmpty;
        case ML_ERR_PARSE: return kParse;
        case ML_ERR_COVERAGE: return kCoverage;
        default: return kError;
    }
}

// Calls a buffer-filling API twice: once to size, once to fill.
template <class F>
int render(F&& fill, std::string& out) {
    size_t len = 0;
    int rc = fill(nullptr, &len);
    if (rc != ML_ERR_INSUFFICIENT_BUFFER) return rc;
    std::vector<char> buf(len);
    rc = fill(buf.data(), &len);
    if (rc == ML_OK) out.assign(buf.data());
    return rc;
}

struct SimArgs {
    uint32_t threads = 3;
    std::string policy = "hybrid";
    uint32_t sws = 1;
    uint32_t cs_slots = 1;
    uint32_t wake_slots = 1;
    std::string trace;
};

int run_sim(const SimArgs& a) {
    ml_sim_config cfg{a.threads, ML_SIM_HYBRID, a.sws, a.cs_slots, a.wake_slots};
    if (int rc = ml_sim_policy_parse(a.policy.c_str(), &cfg.policy); rc != ML_OK) return report_failure("sim", rc);

    ml_sim_trace* trace = nullptr;
    if (int rc = ml_sim_run(&cfg, &trace); rc != ML_OK) return report_failure("sim", rc);

    std::string text;
    int rc = render([&](char* b, size_t* l) { return ml_sim_summary_render(trace, b, l); }, text);
    if (rc == ML_OK) std::cout << text;
    if (rc == ML_OK && !a.trace.empty()) {
        const auto fmt = a.trace == "csv" ? ML_TRACE_CSV : ML_TRACE_TEXT;
        rc = render([&](char* b, size_t* l) { return ml_sim_trace_render(trace, fmt, b, l); }, text);
        if (rc == ML_OK) std::cout << '\n' << text;
    }
    ml_sim_trace_destroy(trace);
    return rc == ML_OK ? kOk : report_failure("sim", rc);
}

struct BenchArgs {
    std::vector<std::string> locks{"mutlock"};
    std::vector<uint32_t> threads{1};
    double csl = 0, csu = 0, ncsl = 0, ncsu = 0;
    double duration = 1.0;
    double warmup = 0.1;
    uint32_t runs = 1;
    uint64_t seed = 1;
    bool pin = false;
    uint32_t k = 10;
    uint32_t max_sws = 0;
    uint32_t spin_budget = 100;
    std::string csv;
};

int run_bench_cmd(const BenchArgs& a) {
    std::vector<ml_lock_kind> kinds;
    for (const auto& name : a.locks) {
        if (name == "all") {
            for (int k = ML_LOCK_MUTLOCK; k <= ML_LOCK_ADAPTIVE_SLEEP; ++k) kinds.push_back(static_cast<ml_lock_kind>(k));
            continue;
        }
        ml_lock_kind k;
        if (int rc = ml_lock_kind_parse(name.c_str(), &k); rc != ML_OK) return report_failure("bench", rc);
        kinds.push_back(k);
    }

    std::ofstream csv;
    if (!a.csv.empty()) {
        csv.open(a.csv);
        if (!csv) {
            std::cerr << "mutlock: bench: cannot write '" << a.csv << "'\n";
            return kError;
        }
        csv << ml_bench_csv_header() << '\n';
    }

    std::printf("%-15s %7s %4s %12s %14s %12s %10s\n", "lock", "threads", "run", "cs_count", "throughput/s",
                "sync_cpu_s", "violations");
    for (ml_lock_kind kind : kinds) {
        for (uint32_t threads : a.threads) {
            for (uint32_t run = 0; run < a.runs; ++run) {
                ml_bench_config cfg;
                ml_bench_config_init(&cfg);
                cfg.lock = kind;
                cfg.threads = threads;
                cfg.csl_us = a.csl;
                cfg.csu_us = a.csu;
                cfg.ncsl_us = a.ncsl;
                cfg.ncsu_us = a.ncsu;
                cfg.duration_s = a.duration;
                cfg.warmup_s = a.warmup;
                cfg.seed = a.seed + run;
                cfg.pin = a.pin ? 1 : 0;
                cfg.period = a.k;
                cfg.max_sws = a.max_sws;
                cfg.spin_budget = a.spin_budget;

                ml_bench_result* result = nullptr;
                if (int rc = ml_bench_run(&cfg, &result); rc != ML_OK) return report_failure("bench", rc);
                ml_bench_summary s;
                ml_bench_summary_get(result, &s);
                std::printf("%-15s %7u %4u %12llu %14.1f %12.6f %10llu\n", ml_lock_kind_name(kind), threads, run,
                            static_cast<unsigned long long>(s.cs_count), s.throughput_cs_per_s, s.sync_cpu_s,
                            static_cast<unsigned long long>(s.exclusion_violations));
                std::fflush(stdout);

                if (csv.is_open()) {
                    std::string row;
                    int rc = render([&](char* b, size_t* l) { return ml_bench_csv_row(&cfg, run, result, b, l); }, row);
                    if (rc != ML_OK) {
                        ml_bench_result_destroy(result);
                        return report_failure("bench", rc);
                    }
                    csv << row << '\n';
                }
                const bool violated = s.exclusion_violations != 0;
                ml_bench_result_destroy(result);
                if (violated) {
                    std::cerr << "mutlock: bench: mutual exclusion violated by " << ml_lock_kind_name(kind) << '\n';
                    return kError;
                }
            }
        }
    }
    return kOk;
}

struct ReportArgs {
    std::vector<std::string> inputs;
    std::string format = "md";
    std::string metric = "throughput";
};

int run_report(const ReportArgs& a) {
    ml_report_metric metric;
    ml_report_format format;
    if (int rc = ml_report_metric_parse(a.metric.c_str(), &metric); rc != ML_OK) return report_failure("report", rc);
    if (int rc = ml_report_format_parse(a.format.c_str(), &format); rc != ML_OK) return report_failure("report", rc);

    ml_report* rep = nullptr;
    if (int rc = ml_report_create(&rep); rc != ML_OK) return report_failure("report", rc);
    int rc = ML_OK;
    for (const auto& path : a.inputs) {
        rc = ml_report_add_file(rep, path.c_str());
        if (rc != ML_OK) break;
    }
    std::string text;
    if (rc == ML_OK) rc = render([&](char* b, size_t* l) { return ml_report_render(rep, metric, format, b, l); }, text);
    ml_report_destroy(rep);
    if (rc != ML_OK) return report_failure("report", rc);
    std::cout << text;
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mutable lock toolkit: slot model, lock benchmark, report"};
    app.require_subcommand(1);

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("sim", "Run the slot model of a waiting policy");
    sim_cmd->add_option("--threads", sim.threads, "Contending threads")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--policy", sim.policy, "spin, sleep or hybrid")
        ->check(CLI::IsMember({"spin", "sleep", "hybrid"}));
    sim_cmd->add_option("--sws", sim.sws, "Spinning window size (hybrid)");
    sim_cmd->add_option("--cs-slots", sim.cs_slots, "Critical section length in slots");
    sim_cmd->add_option("--wake-slots", sim.wake_slots, "Wake-up latency in slots");
    sim_cmd->add_option("--trace", sim.trace, "Print the per-slot table (text or csv)")
        ->expected(0, 1)
        ->default_str("text")
        ->check(CLI::IsMember({"text", "csv"}));

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run the lock benchmark");
    bench_cmd->add_option("--lock", bench.locks, "mutlock, ttas, mcs, sleep, adaptive_sleep or all")
        ->delimiter(',');
    bench_cmd->add_option("--threads", bench.threads, "Worker thread counts")->delimiter(',');
    bench_cmd->add_option("--csl", bench.csl, "Critical section lower bound (us)");
    bench_cmd->add_option("--csu", bench.csu, "Critical section upper bound (us, exclusive)");
    bench_cmd->add_option("--ncsl", bench.ncsl, "Non-critical section lower bound (us)");
    bench_cmd->add_option("--ncsu", bench.ncsu, "Non-critical section upper bound (us, exclusive)");
    bench_cmd->add_option("--duration", bench.duration, "Measured seconds per run");
    bench_cmd->add_option("--warmup", bench.warmup, "Warm-up seconds before each run");
    bench_cmd->add_option("--runs", bench.runs, "Runs per configuration");
    bench_cmd->add_option("--seed", bench.seed, "Workload seed of run 0 (run r uses seed + r)");
    bench_cmd->add_flag("--pin", bench.pin, "Pin workers round-robin to cores");
    bench_cmd->add_option("--K", bench.k, "Mutable lock oracle period");
    bench_cmd->add_option("--max-sws", bench.max_sws, "Mutable lock window ceiling (0: cores)");
    bench_cmd->add_option("--spin-budget", bench.spin_budget, "Adaptive sleep lock polls before sleeping");
    bench_cmd->add_option("--csv", bench.csv, "Write results as CSV to PATH");

    ReportArgs rep;
    auto* report_cmd = app.add_subcommand("report", "Aggregate benchmark CSV files");
    report_cmd->add_option("--input", rep.inputs, "Benchmark CSV files")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--format", rep.format, "csv or md")->check(CLI::IsMember({"csv", "md"}));
    report_cmd->add_option("--metric", rep.metric, "throughput, cpu, ratio or ptexp")
        ->check(CLI::IsMember({"throughput", "cpu", "ratio", "ptexp"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kError;
    }

    if (*sim_cmd) return run_sim(sim);
    if (*bench_cmd) return run_bench_cmd(bench);
    return run_report(rep);
}
