#pragma once

#include <atomic>

#include "mutlock/platform.hpp"

namespace mutlock {

/// Queue node owned by the waiting thread. It must stay alive and must not
/// be reused for another lock() until the matching unlock() returns.
struct alignas(kCacheLine) McsNode {
    std::atomic<McsNode*> next{nullptr};
    std::atomic<bool> waiting{false};
};

/// Mellor-Crummey/Scott queue lock: FIFO handoff, each waiter spins on the
/// flag of its own node.
class alignas(kCacheLine) McsLock {
public:
    McsLock() = default;
    McsLock(const McsLock&) = delete;
    McsLock& operator=(const McsLock&) = delete;

    /// Returns true if the caller had to queue behind another thread.
    bool lock(McsNode& node) noexcept {
        node.next.store(nullptr, std::memory_order_relaxed);
        node.waiting.store(true, std::memory_order_relaxed);
        McsNode* pred = tail_.exchange(&node, std::memory_order_acq_rel);
        if (pred == nullptr) return false;
        pred->next.store(&node, std::memory_order_release);
        while (node.waiting.load(std::memory_order_acquire)) cpu_relax();
        return true;
    }

    void unlock(McsNode& node) noexcept {
        McsNode* succ = node.next.load(std::memory_order_acquire);
        if (succ == nullptr) {
            McsNode* expected = &node;
            if (tail_.compare_exchange_strong(expected, nullptr, std::memory_order_acq_rel,
                                              std::memory_order_relaxed)) {
                return;
            }
            // A successor swapped itself into tail but has not linked yet.
            while ((succ = node.next.load(std::memory_order_acquire)) == nullptr) cpu_relax();
        }
        succ->waiting.store(false, std::memory_order_release);
    }

    bool is_locked() const noexcept { return tail_.load(std::memory_order_relaxed) != nullptr; }

private:
    std::atomic<McsNode*> tail_{nullptr};
};

}  // namespace mutlock
