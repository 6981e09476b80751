// Binary wire format: the datagram frame shared by every UDP endpoint and
// (length-prefixed) by the relay stream, plus the pose and media payloads
// it carries. All multi-byte integers and float bit patterns are big-endian.
//
// Frame layout, header exactly 20 bytes:
//
//   offset  size  field
//   0       2     magic 0x4D56
//   2       1     version (1)
//   3       1     frame type
//   4       2     channel id
//   6       4     sequence number
//   10      8     timestamp, microseconds since sender session epoch
//   18      2     payload length
//   20      ...   payload
//
// See docs/wire.md for a worked hex dump.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "mvsfu/bytes.hpp"
#include "mvsfu/clock.hpp"
#include "mvsfu/errors.hpp"

namespace mvsfu {

constexpr uint16_t kFrameMagic = 0x4D56;
constexpr uint8_t kWireVersion = 1;
constexpr size_t kFrameHeaderSize = 20;
// Whole-datagram path budget; payloads above this are an encode error.
constexpr size_t kDatagramBudget = 1400;
constexpr size_t kMaxPayload = kDatagramBudget - kFrameHeaderSize;

enum class FrameType : uint8_t {
    Data = 0x01,
    Ack = 0x02,
    Ping = 0x03,
    Pong = 0x04,
    Signal = 0x05,
    Close = 0x06,
    Bind = 0x07,
};

inline bool frame_type_known(uint8_t t) {
    return t >= 0x01 && t <= 0x07;
}

struct DatagramFrame {
    FrameType type = FrameType::Data;
    uint16_t channel_id = 0;
    uint32_t seq = 0;
    Micros timestamp_us = 0;
    Bytes payload;

    bool operator==(const DatagramFrame&) const = default;
};

enum class DecodeError : uint8_t {
    None = 0,
    BadMagic,
    BadVersion,
    UnknownType,
    Truncated,
    BadLength,
    BadFlags,
    BadQuaternion,
};

inline const char* decode_error_name(DecodeError e) {
    switch (e) {
        case DecodeError::None: return "none";
        case DecodeError::BadMagic: return "bad_magic";
        case DecodeError::BadVersion: return "bad_version";
        case DecodeError::UnknownType: return "unknown_type";
        case DecodeError::Truncated: return "truncated";
        case DecodeError::BadLength: return "bad_length";
        case DecodeError::BadFlags: return "bad_flags";
        case DecodeError::BadQuaternion: return "bad_quaternion";
    }
    return "?";
}

// Decode result: value on success, reason otherwise.
template <typename T>
struct Decoded {
    std::optional<T> value;
    DecodeError error = DecodeError::None;

    bool ok() const { return value.has_value(); }
    const T& operator*() const { return *value; }
    const T* operator->() const { return &*value; }

    static Decoded fail(DecodeError e) { return Decoded{std::nullopt, e}; }
};

inline Bytes encode_frame(const DatagramFrame& f) {
    if (f.payload.size() > kMaxPayload)
        throw WireError("payload exceeds datagram budget: " + std::to_string(f.payload.size()));
    ByteWriter w;
    w.put_u16(kFrameMagic);
    w.put_u8(kWireVersion);
    w.put_u8(static_cast<uint8_t>(f.type));
    w.put_u16(f.channel_id);
    w.put_u32(f.seq);
    w.put_u64(f.timestamp_us);
    w.put_u16(static_cast<uint16_t>(f.payload.size()));
    w.put_bytes(f.payload);
    return w.take();
}

inline Decoded<DatagramFrame> decode_frame(ByteSpan bytes) {
    ByteReader r(bytes);
    uint16_t magic = r.read_u16();
    if (!r.ok()) return Decoded<DatagramFrame>::fail(DecodeError::Truncated);
    if (magic != kFrameMagic) return Decoded<DatagramFrame>::fail(DecodeError::BadMagic);
    uint8_t version = r.read_u8();
    uint8_t type = r.read_u8();
    if (!r.ok()) return Decoded<DatagramFrame>::fail(DecodeError::Truncated);
    if (version != kWireVersion) return Decoded<DatagramFrame>::fail(DecodeError::BadVersion);
    if (!frame_type_known(type)) return Decoded<DatagramFrame>::fail(DecodeError::UnknownType);
    DatagramFrame f;
    f.type = static_cast<FrameType>(type);
    f.channel_id = r.read_u16();
    f.seq = r.read_u32();
    f.timestamp_us = r.read_u64();
    uint16_t len = r.read_u16();
    if (!r.ok()) return Decoded<DatagramFrame>::fail(DecodeError::Truncated);
    if (r.remaining() < len) return Decoded<DatagramFrame>::fail(DecodeError::Truncated);
    if (r.remaining() > len) return Decoded<DatagramFrame>::fail(DecodeError::BadLength);
    f.payload = r.read_bytes(len);
    return Decoded<DatagramFrame>{std::move(f), DecodeError::None};
}

// ---------------------------------------------------------------------------
// Pose payload
//
//   avatar id   u32
//   node flags  u8   bit0 body, bit1 head, bit2 left hand, bit3 right hand
//   per present node, in bit order:
//     position x, y, z   3 x f32, meters
//     rotation x, y, z, w  4 x f32, unit quaternion
//
// Full four-node payload is 4 + 1 + 4*28 = 117 bytes.

enum PoseNode : uint8_t {
    kNodeBody = 0,
    kNodeHead = 1,
    kNodeLeftHand = 2,
    kNodeRightHand = 3,
};
constexpr int kPoseNodeCount = 4;
constexpr uint8_t kAllNodesMask = 0x0F;
constexpr size_t kBytesPerNode = 28;

// Payload size for k present nodes: 5 + 28*k.
constexpr size_t pose_payload_size(int node_count) {
    return 5 + kBytesPerNode * static_cast<size_t>(node_count);
}

struct Vec3 {
    float x = 0, y = 0, z = 0;
    bool operator==(const Vec3&) const = default;
};

struct Quat {
    float x = 0, y = 0, z = 0, w = 1;
    bool operator==(const Quat&) const = default;

    double norm() const {
        return std::sqrt(static_cast<double>(x) * x + static_cast<double>(y) * y +
                         static_cast<double>(z) * z + static_cast<double>(w) * w);
    }

    Quat normalized() const {
        double n = norm();
        if (n == 0.0) return Quat{0, 0, 0, 1};
        float inv = static_cast<float>(1.0 / n);
        return Quat{x * inv, y * inv, z * inv, w * inv};
    }
};

// A quaternion is wire-legal when its norm is within 1 +/- 1e-3.
constexpr double kQuatNormTolerance = 1e-3;

inline bool quat_norm_ok(const Quat& q) {
    return std::abs(q.norm() - 1.0) <= kQuatNormTolerance;
}

struct NodeSample {
    Vec3 position;
    Quat rotation;
    bool operator==(const NodeSample&) const = default;
};

struct AvatarPose {
    uint8_t node_flags = 0;
    std::array<NodeSample, kPoseNodeCount> nodes{};
    Micros timestamp_us = 0;
    uint32_t seq = 0;

    bool has_node(PoseNode n) const { return node_flags & (1u << n); }

    void set_node(PoseNode n, const NodeSample& s) {
        node_flags |= (1u << n);
        nodes[n] = s;
    }

    int node_count() const { return std::popcount(static_cast<unsigned>(node_flags & kAllNodesMask)); }

    bool operator==(const AvatarPose& o) const {
        if (node_flags != o.node_flags) return false;
        for (int n = 0; n < kPoseNodeCount; ++n)
            if (has_node(static_cast<PoseNode>(n)) && !(nodes[n] == o.nodes[n])) return false;
        return true;
    }
};

inline Bytes encode_pose(const AvatarPose& pose, uint32_t avatar_id) {
    if ((pose.node_flags & kAllNodesMask) == 0) throw WireError("pose has no nodes");
    if (pose.node_flags & ~kAllNodesMask) throw WireError("pose has unknown node flags");
    ByteWriter w;
    w.put_u32(avatar_id);
    w.put_u8(pose.node_flags);
    for (int n = 0; n < kPoseNodeCount; ++n) {
        if (!pose.has_node(static_cast<PoseNode>(n))) continue;
        const NodeSample& s = pose.nodes[n];
        if (!quat_norm_ok(s.rotation))
            throw WireError("rotation norm outside tolerance");
        Quat q = s.rotation.normalized();
        w.put_f32(s.position.x);
        w.put_f32(s.position.y);
        w.put_f32(s.position.z);
        w.put_f32(q.x);
        w.put_f32(q.y);
        w.put_f32(q.z);
        w.put_f32(q.w);
    }
    return w.take();
}

struct DecodedPose {
    uint32_t avatar_id = 0;
    AvatarPose pose;
};

inline Decoded<DecodedPose> decode_pose(ByteSpan payload) {
    ByteReader r(payload);
    DecodedPose out;
    out.avatar_id = r.read_u32();
    uint8_t flags = r.read_u8();
    if (!r.ok()) return Decoded<DecodedPose>::fail(DecodeError::Truncated);
    if (flags == 0 || (flags & ~kAllNodesMask)) return Decoded<DecodedPose>::fail(DecodeError::BadFlags);
    int count = std::popcount(static_cast<unsigned>(flags));
    if (payload.size() != pose_payload_size(count)) return Decoded<DecodedPose>::fail(DecodeError::BadLength);
    out.pose.node_flags = flags;
    for (int n = 0; n < kPoseNodeCount; ++n) {
        if (!(flags & (1u << n))) continue;
        NodeSample s;
        s.position.x = r.read_f32();
        s.position.y = r.read_f32();
        s.position.z = r.read_f32();
        s.rotation.x = r.read_f32();
        s.rotation.y = r.read_f32();
        s.rotation.z = r.read_f32();
        s.rotation.w = r.read_f32();
        if (!r.ok()) return Decoded<DecodedPose>::fail(DecodeError::Truncated);
        if (!quat_norm_ok(s.rotation)) return Decoded<DecodedPose>::fail(DecodeError::BadQuaternion);
        s.rotation = s.rotation.normalized();
        out.pose.nodes[n] = s;
    }
    return Decoded<DecodedPose>{std::move(out), DecodeError::None};
}

// ---------------------------------------------------------------------------
// Media payload: 5-byte header, content opaque to the forwarder.

enum class MediaKind : uint8_t { Audio = 0, Video = 1 };

struct MediaPayload {
    uint32_t source_id = 0;
    MediaKind kind = MediaKind::Audio;
    Bytes content;

    bool operator==(const MediaPayload&) const = default;
};

constexpr size_t kMediaHeaderSize = 5;

inline Bytes encode_media(const MediaPayload& m) {
    if (kMediaHeaderSize + m.content.size() > kMaxPayload) throw WireError("media content too large");
    ByteWriter w;
    w.put_u32(m.source_id);
    w.put_u8(static_cast<uint8_t>(m.kind));
    w.put_bytes(m.content);
    return w.take();
}

inline Decoded<MediaPayload> decode_media(ByteSpan payload) {
    ByteReader r(payload);
    MediaPayload m;
    m.source_id = r.read_u32();
    uint8_t kind = r.read_u8();
    if (!r.ok()) return Decoded<MediaPayload>::fail(DecodeError::Truncated);
    if (kind > 1) return Decoded<MediaPayload>::fail(DecodeError::BadFlags);
    m.kind = static_cast<MediaKind>(kind);
    m.content = r.read_bytes(r.remaining());
    return Decoded<MediaPayload>{std::move(m), DecodeError::None};
}

// Relay stream framing: 4-byte big-endian length, then one wire frame.
inline Bytes length_prefixed(ByteSpan frame_bytes) {
    ByteWriter w;
    w.put_u32(static_cast<uint32_t>(frame_bytes.size()));
    w.put_bytes(frame_bytes);
    return w.take();
}

}  // namespace mvsfu
