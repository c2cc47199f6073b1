#include "mutlock/mutable_lock.hpp"

#include <cassert>
#include <stdexcept>

namespace mutlock {

using core::unpack;

MutableLock::MutableLock(std::uint32_t max_sws, std::uint32_t period)
    : lstate_(core::pack(1, 0)),
      oracle_(period),
      max_sws_(max_sws == 0 ? available_cores() : max_sws) {
    if (period == 0) throw std::invalid_argument("oracle period must be at least 1");
}

void MutableLock::lock() noexcept {
    const core::LockState arrival = unpack(lstate_.fetch_add(core::kThcUnit, std::memory_order_seq_cst));

    bool slept = false;
    if (arrival.thc >= arrival.sws) {
        slept = true;
        sleepq_.sleep();
    }
    const bool spun = slock_.lock();

    // sws only moves under slock_, so this read is exact.
    const std::uint32_t sws_now = unpack(lstate_.load(std::memory_order_acquire)).sws;
    std::int64_t delta = oracle_.evaluate(spun, slept, sws_now);
    if (arrival.sws != sws_now) return;

    delta = core::clamp_delta(sws_now, delta, max_sws_);
    if (delta == 0) return;

    const core::LockState before =
        unpack(lstate_.fetch_add(core::sws_increment(delta), std::memory_order_seq_cst));
    const auto after = static_cast<std::uint32_t>(static_cast<std::int64_t>(before.sws) + delta);
    wuc_ += core::wuc_adjust(delta, before.thc, before.sws, after);
}

void MutableLock::unlock() noexcept {
    assert(slock_.is_locked());
    const core::ReleaseDecision decision = core::plan_release(wuc_);
    wuc_ = decision.wuc_after;

    const core::LockState before = unpack(lstate_.fetch_sub(core::kThcUnit, std::memory_order_seq_cst));
    slock_.unlock();

    const std::uint32_t wake = core::wakeups_owed(decision, before.thc, before.sws);
    if (wake > 0) sleepq_.wake_up(wake);
}

}  // namespace mutlock
