#include "mutlock/platform.hpp"

#include <pthread.h>
#include <sched.h>
#include <time.h>

#include <thread>
#include <vector>

namespace mutlock {

namespace {

std::vector<int> allowed_cpus() {
    std::vector<int> cpus;
    cpu_set_t set;
    CPU_ZERO(&set);
    if (sched_getaffinity(0, sizeof(set), &set) == 0) {
        for (int i = 0; i < CPU_SETSIZE; ++i) {
            if (CPU_ISSET(i, &set)) cpus.push_back(i);
        }
    }
    return cpus;
}

}  // namespace

std::uint32_t available_cores() noexcept {
    cpu_set_t set;
    CPU_ZERO(&set);
    if (sched_getaffinity(0, sizeof(set), &set) == 0) {
        int n = CPU_COUNT(&set);
        if (n > 0) return static_cast<std::uint32_t>(n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

std::int64_t thread_cpu_ns() noexcept {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<std::int64_t>(ts.tv_sec) * 1'000'000'000 + ts.tv_nsec;
}

bool pin_current_thread(std::uint32_t n) noexcept {
    try {
        auto cpus = allowed_cpus();
        if (cpus.empty()) return false;
        cpu_set_t set;
        CPU_ZERO(&set);
        CPU_SET(cpus[n % cpus.size()], &set);
        return pthread_setaffinity_np(pthread_self(), sizeof(set), &set) == 0;
    } catch (...) {
        return false;
    }
}

}  // namespace mutlock
