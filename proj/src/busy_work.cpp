#include <chrono>

#include "mutlock/lockbench.hpp"
#include "mutlock/platform.hpp"

namespace mutlock::bench {

void busy_work(double us) noexcept {
    if (!(us > 0.0)) return;
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + std::chrono::duration_cast<clock::duration>(
                                             std::chrono::duration<double, std::micro>(us));
    while (clock::now() < deadline) cpu_relax();
}

}  // namespace mutlock::bench
