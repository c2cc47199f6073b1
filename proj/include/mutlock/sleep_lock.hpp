#pragma once

#include <atomic>
#include <cstdint>

#include "mutlock/platform.hpp"
#include "mutlock/sleep_queue.hpp"

namespace mutlock {

inline constexpr std::uint32_t kDefaultSpinBudget = 100;

/// Sleep lock with an optional bounded spin phase.
///
/// The word counts the holder plus every queued thread. One failed
/// fetch-and-add sends the caller to the sleep queue; unlock() hands the
/// lock directly to one sleeper. With a non-zero budget the caller first
/// polls for a free lock up to `spin_budget` times, like the adaptive
/// flavour of the pthread mutex.
class alignas(kCacheLine) SleepLock {
public:
    explicit SleepLock(std::uint32_t spin_budget = 0) noexcept : spin_budget_(spin_budget) {}
    SleepLock(const SleepLock&) = delete;
    SleepLock& operator=(const SleepLock&) = delete;

    /// Returns true if the caller had to sleep.
    bool lock() noexcept {
        for (std::uint32_t i = 0; i < spin_budget_; ++i) {
            std::uint32_t expected = 0;
            if (count_.load(std::memory_order_relaxed) == 0 &&
                count_.compare_exchange_weak(expected, 1, std::memory_order_acquire,
                                             std::memory_order_relaxed)) {
                return false;
            }
            cpu_relax();
        }
        if (count_.fetch_add(1, std::memory_order_acquire) == 0) return false;
        queue_.sleep();
        return true;
    }

    void unlock() noexcept {
        if (count_.fetch_sub(1, std::memory_order_release) > 1) queue_.wake_up(1);
    }

    std::uint32_t spin_budget() const noexcept { return spin_budget_; }
    bool is_locked() const noexcept { return count_.load(std::memory_order_relaxed) != 0; }

private:
    std::atomic<std::uint32_t> count_{0};
    std::uint32_t spin_budget_;
    SleepQueue queue_;
};

/// The adaptive variant is the same lock with a spin budget.
class AdaptiveSleepLock : public SleepLock {
public:
    explicit AdaptiveSleepLock(std::uint32_t spin_budget = kDefaultSpinBudget) noexcept
        : SleepLock(spin_budget) {}
};

}  // namespace mutlock
