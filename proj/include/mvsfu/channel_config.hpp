#pragma once

#include <cstdint>
#include <string>

#include "mvsfu/errors.hpp"

namespace mvsfu {

// Per-channel reliability contract, mirroring data-channel semantics.
enum class ChannelMode : uint8_t {
    ReliableOrdered = 0,    // retransmit until acked, deliver in seq order
    ReliableUnordered = 1,  // retransmit until acked, deliver as they arrive
    PartialRetransmit = 2,  // give up after max_retransmits retries
    PartialTimed = 3,       // give up once the frame is older than max_lifetime_ms
    Unreliable = 4,         // fire and forget
};

inline bool channel_mode_known(uint8_t m) { return m <= 4; }

inline bool mode_is_reliable(ChannelMode m) {
    return m == ChannelMode::ReliableOrdered || m == ChannelMode::ReliableUnordered;
}

// Modes 0-3 keep unacked state and expect per-frame ACKs.
inline bool mode_wants_ack(ChannelMode m) { return m != ChannelMode::Unreliable; }

struct ChannelConfig {
    uint16_t channel_id = 0;
    ChannelMode mode = ChannelMode::ReliableOrdered;
    int max_retransmits = -1;   // PartialRetransmit only, must be >= 0
    int64_t max_lifetime_ms = 0;  // PartialTimed only, must be > 0

    void validate() const {
        if (mode == ChannelMode::PartialRetransmit && max_retransmits < 0)
            throw ChannelError("channel " + std::to_string(channel_id) +
                               ": partial-retransmit mode requires max_retransmits >= 0");
        if (mode == ChannelMode::PartialTimed && max_lifetime_ms <= 0)
            throw ChannelError("channel " + std::to_string(channel_id) +
                               ": partial-timed mode requires max_lifetime_ms > 0");
    }

    bool operator==(const ChannelConfig&) const = default;
};

// Retransmission timer knobs. Fixed schedule, no RTT estimation: first retry
// fires initial_rto_ms after send and the interval doubles up to rto_cap_ms.
struct TransportTuning {
    int64_t initial_rto_ms = 200;
    int64_t rto_cap_ms = 1600;
    uint32_t dup_window = 4096;   // receive-side duplicate suppression span
    uint32_t reorder_cap = 1024;  // mode-0 reorder buffer entries

    bool operator==(const TransportTuning&) const = default;
};

}  // namespace mvsfu
