// Counter-based deterministic random bits (splitmix64). Used wherever a
// decision must be a pure function of (seed, index): link emulation,
// synthetic payload content, motion phase offsets. Keeping the generator
// stateless by construction makes replay trivial.
#pragma once

#include <cstdint>

namespace mvsfu {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// n-th draw of the stream identified by (seed, salt).
inline uint64_t mix_draw(uint64_t seed, uint64_t salt, uint64_t n) {
    return splitmix64(splitmix64(seed ^ splitmix64(salt)) + n);
}

// Uniform in [0, 1) with 53 bits of precision.
inline double unit_double(uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace mvsfu
