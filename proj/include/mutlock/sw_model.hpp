#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mutlock::sim {

/// Slot-level model of the spinning window. Time advances in slots; every
/// thread arrives at slot 0 and runs one critical section. Wherever the
/// abstract model picks "a random" thread, the model picks the lowest index.

class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Policy { spin_only, sleep_only, hybrid };

std::string_view to_string(Policy p) noexcept;
/// Accepts "spin", "sleep", "hybrid" and the *_only spellings.
std::optional<Policy> parse_policy(std::string_view s) noexcept;

struct SimConfig {
    std::uint32_t threads = 3;
    Policy policy = Policy::hybrid;
    std::uint32_t sws = 1;
    std::uint32_t cs_slots = 1;
    std::uint32_t wake_slots = 1;
};

/// Throws ModelError when the configuration violates its invariants.
void validate(const SimConfig& c);

using ThreadId = std::uint32_t;

/// Position-indexed view of the lock: index 0 is the holder, indices
/// 1..sws the spinning window, anything further out sleeps.
struct WaitArray {
    std::optional<ThreadId> holder;
    /// waiters[k] sits at index k + 1.
    std::vector<ThreadId> waiters;

    std::uint32_t occupied() const noexcept {
        return static_cast<std::uint32_t>(waiters.size()) + (holder ? 1u : 0u);
    }
    friend bool operator==(const WaitArray&, const WaitArray&) = default;
};

enum class SlotRole { holder, spin, sleep };

/// Role that index i plays under window size sws.
SlotRole role_at(std::uint32_t index, std::uint32_t sws) noexcept;

/// Index of a thread in the array, if present.
std::optional<std::uint32_t> index_of(const WaitArray& a, ThreadId t) noexcept;

enum class Event { arrival, release };

/// Applies one event. An arrival takes the first free index. A release
/// empties index 0, promotes the lowest-index spinner and moves the
/// lowest-index sleeper into the freed window slot; indices further out
/// shift down by one. `arriving` is only read for arrivals.
/// Throws ModelError on a release with nobody holding the lock.
WaitArray window_transition(const WaitArray& a, Event e, std::uint32_t sws, ThreadId arriving = 0);

/// Promotes the waiter at `index` (1-based, inside the window) into the
/// vacant holder slot and refills its slot with the first sleeper.
/// Returns the woken sleeper, if any.
std::optional<ThreadId> promote(WaitArray& a, std::uint32_t index, std::uint32_t sws);

/// Wake-up correction prescribed when sws changes by delta with thc threads
/// waiting: conditions C1 (grow over sleepers) and C2 (shrink under spinners).
std::int64_t check_c1_c2(std::uint32_t thc, std::uint32_t sws, std::int64_t delta) noexcept;

enum class Activity : std::uint8_t { idle, cs, spin, wake };

char activity_code(Activity a) noexcept;
std::string_view to_string(Activity a) noexcept;

struct SimTrace {
    SimConfig config;
    /// slots[t][thread]
    std::vector<std::vector<Activity>> slots;
    /// First slot after the last critical section ends.
    std::uint32_t completion_slot = 0;
    std::uint64_t wasted_spin_slots = 0;
    std::uint64_t wasted_wake_slots = 0;
    /// Largest number of threads simultaneously spinning or waking.
    std::uint32_t peak_window_occupancy = 0;

    std::uint64_t cs_slots() const noexcept;
    std::uint64_t wasted_slots() const noexcept { return wasted_spin_slots + wasted_wake_slots; }
    /// Wasted thread-slots over all busy (cs + wasted) thread-slots.
    double waste_fraction() const noexcept;
    /// Critical sections completed per slot.
    double throughput() const noexcept;
};

/// Runs the model to completion. Deterministic in its input.
SimTrace simulate(const SimConfig& c);

enum class TraceFormat { text, csv };

std::string render_trace(const SimTrace& t, TraceFormat f);
std::string render_summary(const SimTrace& t);

}  // namespace mutlock::sim
