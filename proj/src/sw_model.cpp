#include "mutlock/sw_model.hpp"

#include <algorithm>
#include <sstream>

namespace mutlock::sim {

std::string_view to_string(Policy p) noexcept {
    switch (p) {
        case Policy::spin_only: return "spin";
        case Policy::sleep_only: return "sleep";
        case Policy::hybrid: return "hybrid";
    }
    return "?";
}

std::optional<Policy> parse_policy(std::string_view s) noexcept {
    if (s == "spin" || s == "spin_only") return Policy::spin_only;
    if (s == "sleep" || s == "sleep_only") return Policy::sleep_only;
    if (s == "hybrid") return Policy::hybrid;
    return std::nullopt;
}

void validate(const SimConfig& c) {
    if (c.threads == 0) throw ModelError("threads must be at least 1");
    if (c.cs_slots == 0) throw ModelError("cs_slots must be at least 1");
    if (c.policy == Policy::hybrid && c.sws == 0) throw ModelError("hybrid policy requires sws >= 1");
}

SlotRole role_at(std::uint32_t index, std::uint32_t sws) noexcept {
    if (index == 0) return SlotRole::holder;
    if (index <= sws) return SlotRole::spin;
    return SlotRole::sleep;
}

std::optional<std::uint32_t> index_of(const WaitArray& a, ThreadId t) noexcept {
    if (a.holder == t) return 0u;
    auto it = std::find(a.waiters.begin(), a.waiters.end(), t);
    if (it == a.waiters.end()) return std::nullopt;
    return static_cast<std::uint32_t>(it - a.waiters.begin()) + 1;
}

std::optional<ThreadId> promote(WaitArray& a, std::uint32_t index, std::uint32_t sws) {
    if (a.holder) throw ModelError("promote: the lock is still held");
    if (index == 0 || index > a.waiters.size()) throw ModelError("promote: no waiter at that index");

    auto& w = a.waiters;
    a.holder = w[index - 1];
    w.erase(w.begin() + (index - 1));

    if (index > sws || w.size() < sws) return std::nullopt;
    // The first sleeper now sits at vector position sws - 1.
    const ThreadId woken = w[sws - 1];
    w.erase(w.begin() + (sws - 1));
    w.insert(w.begin() + (index - 1), woken);
    return woken;
}

WaitArray window_transition(const WaitArray& a, Event e, std::uint32_t sws, ThreadId arriving) {
    WaitArray next = a;
    if (e == Event::arrival) {
        if (!next.holder && next.waiters.empty()) {
            next.holder = arriving;
        } else {
            next.waiters.push_back(arriving);
        }
        return next;
    }
    if (!next.holder) throw ModelError("release on an array with no holder");
    next.holder.reset();
    if (!next.waiters.empty()) promote(next, 1, sws);
    return next;
}

std::int64_t check_c1_c2(std::uint32_t thc, std::uint32_t sws, std::int64_t delta) noexcept {
    const std::int64_t t = thc;
    const std::int64_t s = sws;
    if (delta > 0 && t > s) return std::min(delta, t - s);
    if (delta < 0 && t > s + delta) return -std::min(-delta, t - (s + delta));
    return 0;
}

char activity_code(Activity a) noexcept {
    switch (a) {
        case Activity::idle: return '.';
        case Activity::cs: return 'C';
        case Activity::spin: return 'S';
        case Activity::wake: return 'W';
    }
    return '?';
}

std::string_view to_string(Activity a) noexcept {
    switch (a) {
        case Activity::idle: return "idle";
        case Activity::cs: return "cs";
        case Activity::spin: return "spin";
        case Activity::wake: return "wake";
    }
    return "?";
}

std::uint64_t SimTrace::cs_slots() const noexcept {
    std::uint64_t n = 0;
    for (const auto& row : slots) n += static_cast<std::uint64_t>(std::count(row.begin(), row.end(), Activity::cs));
    return n;
}

double SimTrace::waste_fraction() const noexcept {
    const double busy = static_cast<double>(cs_slots() + wasted_slots());
    return busy == 0 ? 0.0 : static_cast<double>(wasted_slots()) / busy;
}

double SimTrace::throughput() const noexcept {
    return completion_slot == 0 ? 0.0 : static_cast<double>(config.threads) / completion_slot;
}

namespace {

enum class State { sleeping, waking, ready, holding, done };

struct ThreadState {
    State state = State::sleeping;
    std::uint32_t remaining = 0;
};

std::uint32_t window_size(const SimConfig& c) {
    switch (c.policy) {
        case Policy::spin_only: return c.threads;
        case Policy::sleep_only: return 0;
        case Policy::hybrid: return c.sws;
    }
    return 0;
}

void start_waking(ThreadState& t, std::uint32_t wake_slots) {
    if (wake_slots == 0) {
        t.state = State::ready;
    } else {
        t.state = State::waking;
        t.remaining = wake_slots;
    }
}

}  // namespace

SimTrace simulate(const SimConfig& c) {
    validate(c);
    const std::uint32_t window = window_size(c);

    SimTrace trace;
    trace.config = c;

    std::vector<ThreadState> threads(c.threads);
    WaitArray array;
    for (ThreadId t = 0; t < c.threads; ++t) {
        array = window_transition(array, Event::arrival, window, t);
        switch (role_at(*index_of(array, t), window)) {
            case SlotRole::holder: threads[t] = {State::holding, c.cs_slots}; break;
            case SlotRole::spin: threads[t] = {State::ready, 0}; break;
            case SlotRole::sleep: threads[t] = {State::sleeping, 0}; break;
        }
    }

    // Every slot either runs a CS or advances some wake-up, so this bound is never reached.
    const std::uint64_t slot_limit =
        static_cast<std::uint64_t>(c.threads) * (c.cs_slots + c.wake_slots + 1) + 1;
    std::uint32_t done = 0;

    for (std::uint32_t slot = 0; done < c.threads; ++slot) {
        if (slot >= slot_limit) throw std::logic_error("simulation failed to make progress");

        if (!array.holder) {
            // Lowest-index thread that is running and not still waking up.
            for (std::uint32_t i = 0; i < array.waiters.size(); ++i) {
                const ThreadId cand = array.waiters[i];
                if (threads[cand].state != State::ready) continue;
                threads[cand] = {State::holding, c.cs_slots};
                if (auto woken = promote(array, i + 1, window)) start_waking(threads[*woken], c.wake_slots);
                break;
            }
        }

        std::vector<Activity> row(c.threads, Activity::idle);
        std::uint32_t in_window = 0;
        for (ThreadId t = 0; t < c.threads; ++t) {
            switch (threads[t].state) {
                case State::holding: row[t] = Activity::cs; break;
                case State::ready:
                    row[t] = Activity::spin;
                    ++trace.wasted_spin_slots;
                    ++in_window;
                    break;
                case State::waking:
                    row[t] = Activity::wake;
                    ++trace.wasted_wake_slots;
                    ++in_window;
                    break;
                case State::sleeping:
                case State::done: break;
            }
        }
        trace.peak_window_occupancy = std::max(trace.peak_window_occupancy, in_window);
        trace.slots.push_back(std::move(row));

        for (ThreadId t = 0; t < c.threads; ++t) {
            auto& ts = threads[t];
            if (ts.state == State::waking && --ts.remaining == 0) ts.state = State::ready;
        }
        if (array.holder) {
            auto& h = threads[*array.holder];
            if (--h.remaining == 0) {
                h.state = State::done;
                array.holder.reset();
                ++done;
                trace.completion_slot = slot + 1;
                if (c.policy == Policy::sleep_only) {
                    for (ThreadId t : array.waiters) {
                        if (threads[t].state == State::sleeping) {
                            start_waking(threads[t], c.wake_slots);
                            break;
                        }
                    }
                }
            }
        }
    }
    return trace;
}

std::string render_trace(const SimTrace& t, TraceFormat f) {
    std::ostringstream out;
    const std::uint32_t n = t.config.threads;
    if (f == TraceFormat::csv) {
        out << "slot";
        for (std::uint32_t i = 0; i < n; ++i) out << ",T" << i;
        out << '\n';
        for (std::size_t s = 0; s < t.slots.size(); ++s) {
            out << s;
            for (Activity a : t.slots[s]) out << ',' << to_string(a);
            out << '\n';
        }
        return out.str();
    }

    // One row per thread, one column per slot.
    out << "slot ";
    for (std::size_t s = 0; s < t.slots.size(); ++s) out << (s % 10);
    out << '\n';
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string label = "T" + std::to_string(i);
        label.resize(5, ' ');
        out << label;
        for (const auto& row : t.slots) out << activity_code(row[i]);
        out << '\n';
    }
    out << "     C=critical section S=spin W=waking .=idle/asleep\n";
    return out.str();
}

std::string render_summary(const SimTrace& t) {
    std::ostringstream out;
    out << "policy=" << to_string(t.config.policy);
    if (t.config.policy == Policy::hybrid) out << " sws=" << t.config.sws;
    out << " threads=" << t.config.threads << " cs_slots=" << t.config.cs_slots
        << " wake_slots=" << t.config.wake_slots << '\n'
        << "completion_slot=" << t.completion_slot << '\n'
        << "cs_slots_total=" << t.cs_slots() << '\n'
        << "wasted_spin_slots=" << t.wasted_spin_slots << '\n'
        << "wasted_wake_slots=" << t.wasted_wake_slots << '\n'
        << "waste_fraction=" << t.waste_fraction() << '\n'
        << "throughput_cs_per_slot=" << t.throughput() << '\n';
    return out.str();
}

}  // namespace mutlock::sim
