#pragma once

#include <stdexcept>
#include <string>

namespace mvsfu {

// Precondition violations on the encode side (oversize payloads, bad
// quaternions). Decode-side problems are reported as DecodeError values,
// never thrown: arbitrary network bytes must not raise.
struct WireError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ChannelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mvsfu
