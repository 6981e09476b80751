// Avatar-pose data model and client-side behavior: synthetic motion
// sampling, last-writer-wins remote store, and playback interpolation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>

#include "mvsfu/errors.hpp"
#include "mvsfu/rng.hpp"
#include "mvsfu/wire.hpp"

namespace mvsfu {

inline Quat quat_from_axis_angle(float ax, float ay, float az, float angle_rad) {
    float h = angle_rad * 0.5f;
    float s = std::sin(h);
    return Quat{ax * s, ay * s, az * s, std::cos(h)}.normalized();
}

inline float quat_dot(const Quat& a, const Quat& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z + a.w * b.w;
}

// Shortest-arc spherical interpolation, renormalized. Falls back to
// normalized lerp when the arc is too small for a stable sin division.
inline Quat slerp(const Quat& a, const Quat& b, float u) {
    Quat bb = b;
    float dot = quat_dot(a, b);
    if (dot < 0.0f) {
        bb = Quat{-b.x, -b.y, -b.z, -b.w};
        dot = -dot;
    }
    if (dot > 0.9995f) {
        Quat q{a.x + (bb.x - a.x) * u, a.y + (bb.y - a.y) * u, a.z + (bb.z - a.z) * u,
               a.w + (bb.w - a.w) * u};
        return q.normalized();
    }
    float theta = std::acos(std::min(dot, 1.0f));
    float sin_theta = std::sin(theta);
    float wa = std::sin((1.0f - u) * theta) / sin_theta;
    float wb = std::sin(u * theta) / sin_theta;
    return Quat{wa * a.x + wb * bb.x, wa * a.y + wb * bb.y, wa * a.z + wb * bb.z,
                wa * a.w + wb * bb.w}
        .normalized();
}

inline Vec3 lerp(const Vec3& a, const Vec3& b, float u) {
    return Vec3{a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u, a.z + (b.z - a.z) * u};
}

// Interpolate between two samples of one node. `u` outside [0,1] is clamped;
// the caller can watch the clamp counter to spot scheduling bugs.
inline NodeSample interpolate(const NodeSample& a, const NodeSample& b, float u,
                              uint64_t* clamp_counter = nullptr) {
    if (u < 0.0f || u > 1.0f) {
        if (clamp_counter) ++*clamp_counter;
        u = u < 0.0f ? 0.0f : 1.0f;
    }
    return NodeSample{lerp(a.position, b.position, u), slerp(a.rotation, b.rotation, u)};
}

// ---------------------------------------------------------------------------
// Synthetic motion. Pose at time t is a pure function of (profile, t): the
// body walks a circle in the XZ plane starting at (radius, 0, 0) and moving
// counter-clockwise toward +Z, the head rides 1.6 m above the body with a
// sinusoidal bob, and the hands swing in anti-phase. The seed only offsets
// the bob/swing phases so distinct clients do not move in lockstep.

struct MotionProfile {
    uint64_t seed = 0;
    float walk_radius_m = 2.0f;
    float angular_speed_rad_s = 0.5f;
    float head_bob_amplitude_m = 0.05f;
    float head_bob_frequency_hz = 1.8f;
    float hand_swing_amplitude_rad = 0.6f;
    float hand_swing_frequency_hz = 0.9f;
};

constexpr float kHeadHeightM = 1.6f;

inline AvatarPose sample_local_pose(const MotionProfile& p, Micros t_us) {
    // Compute in double: session times reach minutes, and float seconds lose
    // the sub-millisecond detail the bob/swing terms need.
    const double t = static_cast<double>(t_us) * 1e-6;
    const double two_pi = 2.0 * std::numbers::pi;
    const double bob_phase = unit_double(mix_draw(p.seed, 0xB0B, 0)) * two_pi;
    const double swing_phase = unit_double(mix_draw(p.seed, 0x5A11, 0)) * two_pi;

    const double a = static_cast<double>(p.angular_speed_rad_s) * t;
    Vec3 body_pos{static_cast<float>(p.walk_radius_m * std::cos(a)), 0.0f,
                  static_cast<float>(p.walk_radius_m * std::sin(a))};
    // Face the direction of travel, yaw about +Y.
    float heading = static_cast<float>(std::atan2(std::cos(a), -std::sin(a)));
    Quat body_rot = quat_from_axis_angle(0, 1, 0, heading);

    float bob = static_cast<float>(
        p.head_bob_amplitude_m * std::sin(two_pi * p.head_bob_frequency_hz * t + bob_phase));
    Vec3 head_pos{body_pos.x, kHeadHeightM + bob, body_pos.z};

    float swing = static_cast<float>(
        p.hand_swing_amplitude_rad *
        std::sin(two_pi * p.hand_swing_frequency_hz * t + swing_phase));
    Quat left_rot = slerp(body_rot, quat_from_axis_angle(1, 0, 0, swing), 0.5f);
    Quat right_rot = slerp(body_rot, quat_from_axis_angle(1, 0, 0, -swing), 0.5f);
    Vec3 left_pos{body_pos.x - 0.25f, 1.0f + 0.2f * swing, body_pos.z};
    Vec3 right_pos{body_pos.x + 0.25f, 1.0f - 0.2f * swing, body_pos.z};

    AvatarPose pose;
    pose.timestamp_us = t_us;
    pose.set_node(kNodeBody, NodeSample{body_pos, body_rot});
    pose.set_node(kNodeHead, NodeSample{head_pos, body_rot});
    pose.set_node(kNodeLeftHand, NodeSample{left_pos, left_rot});
    pose.set_node(kNodeRightHand, NodeSample{right_pos, right_rot});
    return pose;
}

// ---------------------------------------------------------------------------
// Remote pose store, last-writer-wins per (avatar, node). Each avatar has a
// single writer, so sender timestamps are internally consistent and older
// samples can simply be ignored.

class PoseStore {
public:
    struct NodeSlot {
        NodeSample latest;
        Micros latest_t_us = 0;
        NodeSample previous;
        Micros previous_t_us = 0;
        bool has_latest = false;
        bool has_previous = false;
    };

    struct AvatarSlots {
        NodeSlot nodes[kPoseNodeCount];
        uint64_t applied = 0;
        uint64_t stale = 0;
    };

    // Returns true when at least one node was newer than the stored sample.
    bool apply_remote(uint32_t avatar_id, const AvatarPose& pose) {
        AvatarSlots& slots = avatars_[avatar_id];
        bool any = false;
        for (int n = 0; n < kPoseNodeCount; ++n) {
            if (!pose.has_node(static_cast<PoseNode>(n))) continue;
            NodeSlot& slot = slots.nodes[n];
            if (slot.has_latest && pose.timestamp_us <= slot.latest_t_us) continue;
            slot.previous = slot.latest;
            slot.previous_t_us = slot.latest_t_us;
            slot.has_previous = slot.has_latest;
            slot.latest = pose.nodes[n];
            slot.latest_t_us = pose.timestamp_us;
            slot.has_latest = true;
            any = true;
        }
        if (any)
            ++slots.applied;
        else
            ++slots.stale;
        return any;
    }

    // Playback sample at render time. Renders one publish interval behind
    // the newest sample so two samples bracket the render point.
    std::optional<NodeSample> sample_interpolated(uint32_t avatar_id, PoseNode node,
                                                  Micros render_t_us) {
        auto it = avatars_.find(avatar_id);
        if (it == avatars_.end()) return std::nullopt;
        NodeSlot& slot = it->second.nodes[node];
        if (!slot.has_latest) return std::nullopt;
        if (!slot.has_previous || slot.latest_t_us == slot.previous_t_us) return slot.latest;
        double u = (static_cast<double>(render_t_us) - static_cast<double>(slot.previous_t_us)) /
                   (static_cast<double>(slot.latest_t_us) - static_cast<double>(slot.previous_t_us));
        return interpolate(slot.previous, slot.latest, static_cast<float>(u), &clamps_);
    }

    const NodeSlot* node(uint32_t avatar_id, PoseNode n) const {
        auto it = avatars_.find(avatar_id);
        if (it == avatars_.end()) return nullptr;
        return &it->second.nodes[n];
    }

    const AvatarSlots* avatar(uint32_t avatar_id) const {
        auto it = avatars_.find(avatar_id);
        return it == avatars_.end() ? nullptr : &it->second;
    }

    const std::unordered_map<uint32_t, AvatarSlots>& avatars() const { return avatars_; }
    size_t avatar_count() const { return avatars_.size(); }
    uint64_t interpolation_clamps() const { return clamps_; }

private:
    std::unordered_map<uint32_t, AvatarSlots> avatars_;
    uint64_t clamps_ = 0;
};

}  // namespace mvsfu
