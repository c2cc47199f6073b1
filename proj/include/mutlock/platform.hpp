#pragma once

#include <cstdint>

namespace mutlock {

inline constexpr std::size_t kCacheLine = 64;

/// Spin-loop hint for the sibling hyper-thread.
inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_ia32_pause();
#elif defined(__aarch64__) || defined(__arm__)
    asm volatile("yield" ::: "memory");
#else
    asm volatile("" ::: "memory");
#endif
}

/// Number of logical cores this process may run on (affinity mask, not the
/// machine total). Never returns 0.
std::uint32_t available_cores() noexcept;

/// CPU time consumed by the calling thread, in nanoseconds.
std::int64_t thread_cpu_ns() noexcept;

/// Pins the calling thread to the n-th CPU of the process affinity mask,
/// wrapping around. Returns false if the kernel refused.
bool pin_current_thread(std::uint32_t n) noexcept;

}  // namespace mutlock
