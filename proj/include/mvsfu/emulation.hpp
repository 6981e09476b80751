// Deterministic link emulation for tests and desk-scale experiments.
// Every drop/delay decision is a pure function of (seed, invocation index),
// so identical seeds and send schedules replay identically.
#pragma once

#include <cstdint>
#include <optional>

#include "mvsfu/clock.hpp"
#include "mvsfu/rng.hpp"

namespace mvsfu {

struct EmulatedLink {
    double loss_probability = 0.0;  // [0, 1]
    int64_t base_latency_ms = 0;
    int64_t jitter_ms = 0;
    uint64_t seed = 0;

    bool enabled() const {
        return loss_probability > 0.0 || base_latency_ms > 0 || jitter_ms > 0;
    }

    // Scheduled delivery time for the n-th frame this link has seen, or
    // nullopt when that frame is dropped.
    std::optional<Micros> apply(Micros now) {
        uint64_t n = invocations_++;
        if (loss_probability > 0.0 &&
            unit_double(mix_draw(seed, 0xD0D0, n)) < loss_probability)
            return std::nullopt;
        Micros delay = static_cast<Micros>(base_latency_ms) * kMicrosPerMilli;
        if (jitter_ms > 0)
            delay += static_cast<Micros>(unit_double(mix_draw(seed, 0x1177E4, n)) *
                                         static_cast<double>(jitter_ms) * kMicrosPerMilli);
        return now + delay;
    }

    uint64_t invocations() const { return invocations_; }

private:
    uint64_t invocations_ = 0;
};

}  // namespace mvsfu
