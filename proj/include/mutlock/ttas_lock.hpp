#pragma once

#include <atomic>

#include "mutlock/platform.hpp"

namespace mutlock {

/// Test-and-test-and-set spin lock. Waiters poll with plain loads and only
/// issue the exchange once the lock looks free; there is no backoff.
///
/// lock() reports whether the caller ever observed the lock held before it
/// got in, which is the `spun` signal the mutable lock's oracle consumes.
class alignas(kCacheLine) TtasLock {
public:
    TtasLock() = default;
    TtasLock(const TtasLock&) = delete;
    TtasLock& operator=(const TtasLock&) = delete;

    bool lock() noexcept {
        bool contended = false;
        for (;;) {
            while (held_.load(std::memory_order_relaxed)) {
                contended = true;
                cpu_relax();
            }
            if (!held_.exchange(true, std::memory_order_acquire)) return contended;
            contended = true;
        }
    }

    void unlock() noexcept { held_.store(false, std::memory_order_release); }

    bool is_locked() const noexcept { return held_.load(std::memory_order_relaxed); }

private:
    std::atomic<bool> held_{false};
};

}  // namespace mutlock
