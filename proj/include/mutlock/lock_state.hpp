#pragma once

#include <algorithm>
#include <cstdint>

namespace mutlock::core {

/// The mutable lock's packed state: spinning-window size in the upper
/// 32 bits, thread count (waiters plus holder) in the lower 32 bits.
/// Adding 1 touches only thc; adding d << 32 touches only sws.
struct LockState {
    std::uint32_t sws = 0;
    std::uint32_t thc = 0;

    friend constexpr bool operator==(LockState, LockState) = default;
};

using PackedState = std::uint64_t;

inline constexpr PackedState kThcUnit = 1;
inline constexpr PackedState kSwsUnit = PackedState{1} << 32;

constexpr PackedState pack(std::uint32_t sws, std::uint32_t thc) noexcept {
    return (static_cast<PackedState>(sws) << 32) | thc;
}

constexpr PackedState pack(LockState s) noexcept { return pack(s.sws, s.thc); }

constexpr LockState unpack(PackedState word) noexcept {
    return {static_cast<std::uint32_t>(word >> 32), static_cast<std::uint32_t>(word)};
}

/// Word to fetch-and-add for a signed change of sws. Negative deltas rely
/// on modular wrap-around of the upper half.
constexpr PackedState sws_increment(std::int64_t delta) noexcept {
    return static_cast<PackedState>(delta) << 32;
}

/// Restricts a proposed variation so that sws + delta stays in [1, max].
constexpr std::int64_t clamp_delta(std::uint32_t sws, std::int64_t delta, std::uint32_t max) noexcept {
    const std::int64_t lo = 1 - static_cast<std::int64_t>(sws);
    const std::int64_t hi = static_cast<std::int64_t>(max) - static_cast<std::int64_t>(sws);
    return std::min(std::max(delta, lo), hi);
}

/// Correction to the wake-up count after sws moved from sws_before to
/// sws_after with thc threads on the lock.
///
/// Growing the window over sleepers wakes min(|delta|, thc - sws_before)
/// extra threads. Shrinking it below the current spinners suppresses
/// min(|delta|, thc - sws_after) future wake-ups (negative result).
constexpr std::int64_t wuc_adjust(std::int64_t delta, std::uint32_t thc, std::uint32_t sws_before,
                                  std::uint32_t sws_after) noexcept {
    if (delta == 0) return 0;
    const std::int64_t sign = delta > 0 ? 1 : -1;
    const std::int64_t magnitude = delta > 0 ? delta : -delta;
    std::int64_t base = 0;
    if (sign < 0 && thc > sws_after) {
        base = static_cast<std::int64_t>(thc) - sws_after;
    } else if (sign > 0 && thc > sws_before) {
        base = static_cast<std::int64_t>(thc) - sws_before;
    }
    return sign * std::min(magnitude, base);
}

/// What one release owes the sleep queue.
struct ReleaseDecision {
    /// Threads to wake; -1 means this release swallows one wake-up.
    std::int64_t r_wuc = 0;
    /// Value the lock's wake-up count takes after this release.
    std::int64_t wuc_after = 0;
};

/// First half of a release, done while the inner lock is still held.
constexpr ReleaseDecision plan_release(std::int64_t wuc) noexcept {
    if (wuc >= 0) return {wuc, 0};
    return {-1, wuc + 1};
}

/// Second half, once the thread count has been decremented. thc_before and
/// sws come from the same atomic snapshot.
constexpr std::uint32_t wakeups_owed(ReleaseDecision d, std::uint32_t thc_before, std::uint32_t sws) noexcept {
    if (d.r_wuc < 0) return 0;
    std::int64_t n = d.r_wuc;
    if (thc_before > sws) ++n;
    return static_cast<std::uint32_t>(n);
}

inline constexpr std::uint32_t kDefaultOraclePeriod = 10;

/// SWS adaptation policy. Not thread safe: the owner calls it under the
/// lock's inner spin lock.
///
/// A thread that slept and then found nobody spinning means the window was
/// too small to hide the wake-up latency, so sws doubles. After `period`
/// acquisitions without that event, sws shrinks by one.
class SwsOracle {
public:
    explicit constexpr SwsOracle(std::uint32_t period = kDefaultOraclePeriod) noexcept : period_(period) {}

    constexpr std::int64_t evaluate(bool spun, bool slept, std::uint32_t current_sws) noexcept {
        ++count_;
        if (slept && !spun) {
            count_ = 0;
            return current_sws;
        }
        if (count_ >= period_) {
            count_ = 0;
            return -1;
        }
        return 0;
    }

    constexpr std::uint32_t count() const noexcept { return count_; }
    constexpr std::uint32_t period() const noexcept { return period_; }

private:
    std::uint32_t period_;
    std::uint32_t count_ = 0;
};

}  // namespace mutlock::core
