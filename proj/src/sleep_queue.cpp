#include "mutlock/sleep_queue.hpp"

#include <linux/futex.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <climits>

namespace mutlock {

namespace {

static_assert(sizeof(std::atomic<std::uint32_t>) == sizeof(std::uint32_t));

long futex(std::atomic<std::uint32_t>* word, int op, std::uint32_t val) noexcept {
    return syscall(SYS_futex, reinterpret_cast<std::uint32_t*>(word), op | FUTEX_PRIVATE_FLAG, val,
                   nullptr, nullptr, 0);
}

}  // namespace

bool SleepQueue::try_sleep() noexcept {
    std::uint32_t p = permits_.load(std::memory_order_relaxed);
    while (p > 0) {
        if (permits_.compare_exchange_weak(p, p - 1, std::memory_order_acquire,
                                           std::memory_order_relaxed)) {
            return true;
        }
    }
    return false;
}

void SleepQueue::sleep() noexcept {
    for (;;) {
        if (try_sleep()) return;
        // Publishing ourselves before re-reading the word pairs with the
        // waker's fetch_add-then-load of sleepers_; one side always sees the other.
        sleepers_.fetch_add(1, std::memory_order_seq_cst);
        if (permits_.load(std::memory_order_seq_cst) == 0) {
            futex(&permits_, FUTEX_WAIT, 0);
        }
        sleepers_.fetch_sub(1, std::memory_order_relaxed);
    }
}

std::uint32_t SleepQueue::wake_up(std::uint32_t n) noexcept {
    if (n == 0) return 0;
    permits_.fetch_add(n, std::memory_order_seq_cst);
    if (sleepers_.load(std::memory_order_seq_cst) > 0) {
        futex(&permits_, FUTEX_WAKE, n > INT_MAX ? INT_MAX : n);
    }
    return n;
}

}  // namespace mutlock
