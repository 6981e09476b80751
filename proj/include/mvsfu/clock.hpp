#pragma once

#include <chrono>
#include <cstdint>

namespace mvsfu {

// Microseconds since an arbitrary epoch. Protocol state machines never read
// a clock themselves; callers pass `now` in, which is what makes the
// simulated-clock tests possible.
using Micros = uint64_t;

constexpr Micros kMicrosPerMilli = 1000;
constexpr Micros kMicrosPerSec = 1000000;

// Monotonic wall-side clock for the socket shells.
inline Micros steady_now_us() {
    auto d = std::chrono::steady_clock::now().time_since_epoch();
    return static_cast<Micros>(std::chrono::duration_cast<std::chrono::microseconds>(d).count());
}

}  // namespace mvsfu
