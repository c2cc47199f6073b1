#pragma once

#include <atomic>
#include <cstdint>

#include "mutlock/lock_state.hpp"
#include "mutlock/platform.hpp"
#include "mutlock/sleep_queue.hpp"
#include "mutlock/ttas_lock.hpp"

namespace mutlock {

/// Hybrid spin/sleep lock with an adaptive spinning window.
///
/// Arriving threads bump thc with one fetch-and-add on the packed state.
/// Threads that land inside the window go straight for the inner spin
/// lock; the rest sleep until a release moves them into the window. Each
/// release wakes a sleeper before the lock is actually free, so when the
/// holder leaves there is usually a thread already running to take over.
///
/// Not FIFO. Not recursive. Calling unlock() from a thread that does not
/// hold the lock is undefined (asserts in debug builds). At most 2^31 - 1
/// threads may be on one lock at a time.
class MutableLock {
public:
    /// max_sws = 0 selects the number of available cores. period must be
    /// at least 1; std::invalid_argument otherwise.
    explicit MutableLock(std::uint32_t max_sws = 0, std::uint32_t period = core::kDefaultOraclePeriod);
    MutableLock(const MutableLock&) = delete;
    MutableLock& operator=(const MutableLock&) = delete;

    void lock() noexcept;
    void unlock() noexcept;

    /// Racy view of the packed state, for instrumentation.
    core::LockState snapshot() const noexcept {
        return core::unpack(lstate_.load(std::memory_order_acquire));
    }

    std::uint32_t max_sws() const noexcept { return max_sws_; }
    std::uint32_t period() const noexcept { return oracle_.period(); }

    /// Racy; only meaningful while quiescent.
    std::int64_t wake_up_count() const noexcept { return wuc_; }
    std::uint32_t sleep_queue_permits() const noexcept { return sleepq_.permits(); }
    std::uint32_t sleeping_threads() const noexcept { return sleepq_.sleepers(); }

private:
    TtasLock slock_;
    alignas(kCacheLine) std::atomic<core::PackedState> lstate_;
    // Guarded by slock_.
    std::int64_t wuc_ = 0;
    core::SwsOracle oracle_;
    std::uint32_t max_sws_;
    SleepQueue sleepq_;
};

}  // namespace mutlock
