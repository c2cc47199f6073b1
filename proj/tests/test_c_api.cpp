#include <atomic>
#include <chrono>
#include <cstring>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "mutlock/mutlock.h"

namespace {

std::string render_sim_summary(const ml_sim_trace* t) {
    size_t len = 0;
    REQUIRE(ml_sim_summary_render(t, nullptr, &len) == ML_ERR_INSUFFICIENT_BUFFER);
    std::vector<char> buf(len);
    REQUIRE(ml_sim_summary_render(t, buf.data(), &len) == ML_OK);
    return buf.data();
}

}  // namespace

TEST_SUITE("c_api") {
    TEST_CASE("status strings and null handling") {
        CHECK(std::strcmp(ml_status_string(ML_OK), "ok") == 0);
        CHECK(std::strlen(ml_status_string(ML_ERR_COVERAGE)) > 0);
        CHECK(std::strlen(ml_status_string(12345)) > 0);
        CHECK(ml_lock_acquire(nullptr) == ML_ERR_NULL_POINTER);
        CHECK(std::strlen(ml_last_error()) > 0);
        CHECK(ml_lock_create(nullptr, ML_LOCK_TTAS, 0) == ML_ERR_NULL_POINTER);
        CHECK(ml_available_cores() >= 1);
        ml_lock_destroy(nullptr);
        ml_sim_trace_destroy(nullptr);
        ml_bench_result_destroy(nullptr);
        ml_report_destroy(nullptr);
    }

    TEST_CASE("lock kinds by name") {
        ml_lock_kind k;
        CHECK(ml_lock_kind_parse("mcs", &k) == ML_OK);
        CHECK(k == ML_LOCK_MCS);
        CHECK(ml_lock_kind_parse("nope", &k) == ML_ERR_INVALID_ARGUMENT);
        CHECK(std::strcmp(ml_lock_kind_name(ML_LOCK_ADAPTIVE_SLEEP), "adaptive_sleep") == 0);
        ml_lock* l = nullptr;
        CHECK(ml_lock_create(&l, static_cast<ml_lock_kind>(17), 0) == ML_ERR_INVALID_ARGUMENT);
        CHECK(l == nullptr);
    }

    TEST_CASE("every lock kind excludes across threads") {
        for (int kind = ML_LOCK_MUTLOCK; kind <= ML_LOCK_ADAPTIVE_SLEEP; ++kind) {
            CAPTURE(kind);
            ml_lock* l = nullptr;
            REQUIRE(ml_lock_create(&l, static_cast<ml_lock_kind>(kind), 0) == ML_OK);
            ml_lock_kind got;
            CHECK(ml_lock_kind_of(l, &got) == ML_OK);
            CHECK(got == kind);
            // Time-bounded: FIFO spin locks convoy badly when threads outnumber cores.
            long counter = 0;
            std::atomic<long> total{0};
            std::atomic<bool> stop{false};
            std::vector<std::thread> pool;
            for (int t = 0; t < 4; ++t) {
                pool.emplace_back([&] {
                    long mine = 0;
                    while (!stop.load(std::memory_order_relaxed)) {
                        ml_lock_acquire(l);
                        ++counter;
                        ml_lock_release(l);
                        ++mine;
                    }
                    total += mine;
                });
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(150));
            stop = true;
            for (auto& t : pool) t.join();
            CHECK(total.load() > 0);
            CHECK(counter == total.load());
            ml_lock_destroy(l);
        }
    }

    TEST_CASE("mutable lock introspection") {
        ml_lock* l = nullptr;
        REQUIRE(ml_mutlock_create(&l, 4, 0) == ML_OK);
        uint32_t sws = 0, thc = 0;
        CHECK(ml_mutlock_introspect(l, &sws, &thc) == ML_OK);
        CHECK(sws == 1);
        CHECK(thc == 0);
        ml_lock_acquire(l);
        ml_mutlock_introspect(l, &sws, &thc);
        CHECK(thc == 1);
        ml_lock_release(l);
        ml_lock_destroy(l);

        ml_lock* t = nullptr;
        REQUIRE(ml_lock_create(&t, ML_LOCK_TTAS, 0) == ML_OK);
        CHECK(ml_mutlock_introspect(t, &sws, &thc) == ML_ERR_INVALID_ARGUMENT);
        ml_lock_destroy(t);
    }

    TEST_CASE("simulator goldens through the C API") {
        ml_sim_config cfg{3, ML_SIM_SLEEP, 1, 1, 1};
        ml_sim_trace* t = nullptr;
        REQUIRE(ml_sim_run(&cfg, &t) == ML_OK);
        ml_sim_summary s;
        REQUIRE(ml_sim_trace_summary(t, &s) == ML_OK);
        CHECK(s.completion_slot == 5);
        CHECK(s.wasted_wake_slots == 2);
        CHECK(s.slots == 5);
        ml_activity a;
        CHECK(ml_sim_trace_activity(t, 1, 1, &a) == ML_OK);
        CHECK(a == ML_ACT_WAKE);
        CHECK(ml_sim_trace_activity(t, 5, 0, &a) == ML_ERR_OUT_OF_RANGE);
        CHECK(render_sim_summary(t).find("completion_slot=5\n") != std::string::npos);

        size_t small = 4;
        char buf[4];
        CHECK(ml_sim_trace_render(t, ML_TRACE_CSV, buf, &small) == ML_ERR_INSUFFICIENT_BUFFER);
        CHECK(small > 4);
        ml_sim_trace_destroy(t);

        cfg = {3, ML_SIM_HYBRID, 0, 1, 1};
        t = nullptr;
        CHECK(ml_sim_run(&cfg, &t) == ML_ERR_INVALID_ARGUMENT);
        CHECK(t == nullptr);
    }

    TEST_CASE("both bookkeeping routes are exported") {
        CHECK(ml_wuc_adjust(+4, 6, 4, 8) == 2);
        CHECK(ml_check_c1_c2(6, 4, +4) == 2);
    }

    TEST_CASE("bench run and csv row") {
        ml_bench_config cfg;
        ml_bench_config_init(&cfg);
        CHECK(cfg.period == 10);
        CHECK(cfg.spin_budget == 100);
        cfg.lock = ML_LOCK_TTAS;
        cfg.threads = 2;
        cfg.duration_s = 0.1;
        cfg.warmup_s = 0.02;
        ml_bench_result* r = nullptr;
        REQUIRE(ml_bench_run(&cfg, &r) == ML_OK);
        ml_bench_summary s;
        REQUIRE(ml_bench_summary_get(r, &s) == ML_OK);
        CHECK(s.threads == 2);
        CHECK(s.cs_count > 0);
        CHECK(s.exclusion_violations == 0);
        uint64_t c0 = 0, c1 = 0;
        double cpu = 0;
        CHECK(ml_bench_thread_stats(r, 0, &c0, &cpu) == ML_OK);
        CHECK(ml_bench_thread_stats(r, 1, &c1, &cpu) == ML_OK);
        CHECK(c0 + c1 == s.cs_count);
        CHECK(ml_bench_thread_stats(r, 2, &c1, &cpu) == ML_ERR_OUT_OF_RANGE);

        size_t len = 0;
        CHECK(ml_bench_csv_row(&cfg, 0, r, nullptr, &len) == ML_ERR_INSUFFICIENT_BUFFER);
        std::vector<char> row(len);
        CHECK(ml_bench_csv_row(&cfg, 0, r, row.data(), &len) == ML_OK);
        CHECK(std::string(row.data()).rfind("ttas,2,", 0) == 0);
        ml_bench_result_destroy(r);

        cfg.threads = 0;
        CHECK(ml_bench_run(&cfg, &r) == ML_ERR_INVALID_ARGUMENT);
    }

    TEST_CASE("report lifecycle") {
        ml_report* rep = nullptr;
        REQUIRE(ml_report_create(&rep) == ML_OK);
        size_t len = 0;
        CHECK(ml_report_render(rep, ML_METRIC_THROUGHPUT, ML_FORMAT_CSV, nullptr, &len) == ML_ERR_EMPTY);

        const std::string header = ml_bench_csv_header();
        CHECK(ml_report_add_csv(rep, (header + "\nttas,1,0,0,0,0,0,1,1,oops,1,1\n").c_str(), "bad") == ML_ERR_PARSE);
        CHECK(std::string(ml_last_error()).find("bad:2:") != std::string::npos);
        size_t n = 99;
        CHECK(ml_report_row_count(rep, &n) == ML_OK);
        CHECK(n == 0);

        CHECK(ml_report_add_csv(rep, (header + "\nttas,1,0,0,0,0,0,1,1,10,10,1\n").c_str(), "good") == ML_OK);
        CHECK(ml_report_render(rep, ML_METRIC_PTEXP, ML_FORMAT_CSV, nullptr, &len) == ML_ERR_COVERAGE);
        CHECK(ml_report_render(rep, ML_METRIC_THROUGHPUT, ML_FORMAT_CSV, nullptr, &len) ==
              ML_ERR_INSUFFICIENT_BUFFER);
        std::vector<char> out(len);
        CHECK(ml_report_render(rep, ML_METRIC_THROUGHPUT, ML_FORMAT_CSV, out.data(), &len) == ML_OK);
        CHECK(std::string(out.data()) == "lock,threads,runs,mean_throughput_cs_per_s\nttas,1,1,10\n");

        CHECK(ml_report_add_file(rep, "/nonexistent/dir/x.csv") == ML_ERR_IO);
        ml_report_destroy(rep);

        ml_report_metric m;
        CHECK(ml_report_metric_parse("ratio", &m) == ML_OK);
        CHECK(m == ML_METRIC_RATIO);
        CHECK(ml_report_metric_parse("x", &m) == ML_ERR_INVALID_ARGUMENT);
    }
}
