#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "mutlock/lockbench.hpp"

using namespace mutlock::bench;

TEST_SUITE("workload") {
    TEST_CASE("stream seeds") {
        // Reference values from an independent splitmix64 implementation.
        CHECK(stream_seed(1, 0, 0) == 0x5692161d100b05e5ull);
        CHECK(stream_seed(1, 0, 1) == 0xe4d971771b652c20ull);
        CHECK(stream_seed(1, 1, 0) == 0xbeeb8da1658eec67ull);
        CHECK(stream_seed(42, 3, 1) == 0x53ad348af3ddaf4bull);
    }

    TEST_CASE("sampler draws 53-bit uniforms from the engine") {
        WorkloadSampler s(99, 2.0, 6.0);
        std::mt19937_64 ref(99);
        for (int i = 0; i < 1000; ++i) {
            const double u = static_cast<double>(ref() >> 11) / 9007199254740992.0;
            REQUIRE(s.next() == 2.0 + 4.0 * u);
        }
    }

    TEST_CASE("degenerate and invalid ranges") {
        WorkloadSampler zero(1, 0.0, 0.0);
        WorkloadSampler fixed(1, 3.5, 3.5);
        for (int i = 0; i < 10; ++i) {
            CHECK(zero.next() == 0.0);
            CHECK(fixed.next() == 3.5);
        }
        CHECK_THROWS_AS(WorkloadSampler(1, 2.0, 1.0), ConfigError);
    }

    TEST_CASE("samples stay in [low, high) and average to the midpoint") {
        WorkloadSampler s(2024, 0.0, 366.0);
        double sum = 0;
        constexpr int kN = 1000000;
        for (int i = 0; i < kN; ++i) {
            const double v = s.next();
            REQUIRE(v >= 0.0);
            REQUIRE(v < 366.0);
            sum += v;
        }
        CHECK(std::abs(sum / kN - 183.0) <= 0.02 * 183.0);
    }

    TEST_CASE("same seed, same stream") {
        WorkloadSampler a(5, 0, 10), b(5, 0, 10), c(6, 0, 10);
        bool differs = false;
        for (int i = 0; i < 100; ++i) {
            const double x = a.next();
            REQUIRE(x == b.next());
            differs |= x != c.next();
        }
        CHECK(differs);
    }

    TEST_CASE("busy work lasts about as long as asked") {
        using clock = std::chrono::steady_clock;
        for (double us : {50.0, 500.0}) {
            std::vector<double> took;
            for (int i = 0; i < 15; ++i) {
                const auto t0 = clock::now();
                busy_work(us);
                took.push_back(std::chrono::duration<double, std::micro>(clock::now() - t0).count());
            }
            std::sort(took.begin(), took.end());
            CAPTURE(us);
            CHECK(took[took.size() / 2] == doctest::Approx(us).epsilon(0.2));
        }
    }
}

TEST_SUITE("run_bench") {
    TEST_CASE("configuration errors") {
        BenchConfig c;
        c.threads = 0;
        CHECK_THROWS_AS(run_bench(c), ConfigError);
        c = {};
        c.csl_us = 5;
        c.csu_us = 1;
        CHECK_THROWS_AS(run_bench(c), ConfigError);
        c = {};
        c.ncsu_us = -1;
        CHECK_THROWS_AS(run_bench(c), ConfigError);
        c = {};
        c.duration_s = 0;
        CHECK_THROWS_AS(run_bench(c), ConfigError);
        c = {};
        c.period = 0;
        CHECK_THROWS_AS(run_bench(c), ConfigError);
        c.lock = LockKind::ttas;
        CHECK_NOTHROW(validate(c));
    }

    TEST_CASE("lock names") {
        for (LockKind k : kAllLockKinds) CHECK(parse_lock_kind(to_string(k)) == k);
        CHECK(parse_lock_kind("adaptive") == LockKind::adaptive_sleep);
        CHECK_FALSE(parse_lock_kind("spin").has_value());
    }

    TEST_CASE("every lock kind runs a short contended benchmark") {
        for (LockKind k : kAllLockKinds) {
            CAPTURE(to_string(k));
            BenchConfig c;
            c.lock = k;
            c.threads = 3;
            c.csu_us = 2;
            c.ncsu_us = 2;
            c.duration_s = 0.2;
            c.warmup_s = 0.05;
            const auto r = run_bench(c);
            CHECK(r.exclusion_violations == 0);
            CHECK(r.cs_count > 0);
            CHECK(r.shared_counter == r.cs_count + r.warmup_cs_count);
            REQUIRE(r.per_thread.size() == 3);
            std::uint64_t sum = 0;
            double cpu = 0;
            for (const auto& t : r.per_thread) {
                sum += t.cs_count;
                cpu += t.sync_cpu_s;
            }
            CHECK(sum == r.cs_count);
            CHECK(cpu == doctest::Approx(r.sync_cpu_s));
            CHECK(r.wall_s == doctest::Approx(0.2).epsilon(0.25));
            CHECK(r.throughput == doctest::Approx(r.cs_count / r.wall_s));
            CHECK(r.sync_cpu_s >= 0);
        }
    }

    TEST_CASE("csv row layout") {
        BenchConfig c;
        c.lock = LockKind::mcs;
        c.threads = 4;
        c.csu_us = 366;
        c.ncsu_us = 3.7;
        c.seed = 9;
        BenchResult r;
        r.wall_s = 1.5;
        r.cs_count = 300;
        r.throughput = 200;
        r.sync_cpu_s = 0.25;
        CHECK(csv_row(c, 2, r) == "mcs,4,0,366,0,3.7,2,9,1.5,300,200,0.25");
        CHECK(std::string(kCsvHeader).find("throughput_cs_per_s") != std::string::npos);
    }
}
