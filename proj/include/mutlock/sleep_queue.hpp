#pragma once

#include <atomic>
#include <cstdint>

#include "mutlock/platform.hpp"

namespace mutlock {

/// Counting-semaphore sleep queue on top of a Linux futex.
///
/// Permits accumulate: a wake_up() that lands before the matching sleep()
/// is not lost, the next sleeper consumes it without blocking. sleep()
/// never returns without having consumed exactly one permit.
class alignas(kCacheLine) SleepQueue {
public:
    SleepQueue() = default;
    SleepQueue(const SleepQueue&) = delete;
    SleepQueue& operator=(const SleepQueue&) = delete;

    void sleep() noexcept;

    /// Adds n permits and wakes up to n blocked sleepers. Returns n.
    std::uint32_t wake_up(std::uint32_t n) noexcept;

    /// Consumes a permit if one is available without blocking.
    bool try_sleep() noexcept;

    /// Racy snapshots, for tests and instrumentation only.
    std::uint32_t permits() const noexcept { return permits_.load(std::memory_order_relaxed); }
    std::uint32_t sleepers() const noexcept { return sleepers_.load(std::memory_order_relaxed); }

private:
    std::atomic<std::uint32_t> permits_{0};
    std::atomic<std::uint32_t> sleepers_{0};
};

}  // namespace mutlock
