// Room registry and selective forwarding: each published frame is received
// once and fanned out to every other room member. Recipient queues are
// bounded; overflow drops lossy-channel frames and evicts the slow consumer
// for reliable ones, so reliable channels never lose data silently.
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "mvsfu/channel_config.hpp"
#include "mvsfu/clock.hpp"
#include "mvsfu/wire.hpp"

namespace mvsfu {

constexpr size_t kSubscriberQueueCap = 1024;
constexpr Micros kEmptyRoomTtlUs = 60 * kMicrosPerSec;
constexpr size_t kForwardLogRingCap = 65536;
constexpr size_t kDefaultRoomCapacity = 1000;

// One payload waiting to be re-framed onto a subscriber's channel.
struct OutboundItem {
    uint16_t channel_id = 0;
    ChannelMode mode = ChannelMode::ReliableOrdered;
    FrameType type = FrameType::Data;
    Bytes payload;
    Micros origin_timestamp_us = 0;
    Micros ingress_us = 0;  // when the frame entered the forwarder
};

struct Participant {
    std::string client_id;
    uint64_t session_id = 0;
    std::deque<OutboundItem> outbound;
    bool slow_consumer = false;
};

struct ForwardRecord {
    std::string room_id;
    std::string from_client;
    uint16_t channel_id = 0;
    uint32_t seq = 0;
    uint32_t recipient_count = 0;
    Micros timestamp_us = 0;

    bool operator==(const ForwardRecord&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const ForwardRecord& r) {
    return os << r.room_id << ',' << r.from_client << ',' << r.channel_id << ',' << r.seq << ','
              << r.recipient_count << ',' << r.timestamp_us;
}

enum class EnqueueResult : uint8_t { Enqueued, Dropped, EvictedSession };

enum class RoomStatus : uint8_t {
    Ok,
    DuplicateRoom,
    UnknownRoom,
    RoomFull,
    DuplicateClient,
    BadCapacity,
    UnknownMember,
};

inline const char* room_status_name(RoomStatus s) {
    switch (s) {
        case RoomStatus::Ok: return "ok";
        case RoomStatus::DuplicateRoom: return "duplicate_room";
        case RoomStatus::UnknownRoom: return "unknown_room";
        case RoomStatus::RoomFull: return "room_full";
        case RoomStatus::DuplicateClient: return "duplicate_client";
        case RoomStatus::BadCapacity: return "bad_capacity";
        case RoomStatus::UnknownMember: return "unknown_member";
    }
    return "?";
}

struct Room {
    std::string room_id;
    size_t capacity = kDefaultRoomCapacity;
    std::map<std::string, Participant> members;
    Micros empty_since_us = 0;
    bool ever_joined = false;
    uint64_t forwarded = 0;
};

struct RoomCounters {
    uint64_t forwards = 0;
    uint64_t forward_drops_nonmember = 0;
    uint64_t queue_drops = 0;
    uint64_t evictions = 0;
    uint64_t stale_leaves = 0;
    uint64_t rooms_reaped = 0;
    size_t max_queue_depth = 0;
};

class RoomRegistry {
public:
    struct Hooks {
        // Fan a signaling event to one member (peer_joined / peer_left).
        std::function<void(const Participant&, const std::string& peer, bool joined)> notify_peer_event;
        // Queue overflow on a reliable channel: session layer must close this
        // participant's session with a slow-consumer error.
        std::function<void(const Participant&)> evict;
    };

    explicit RoomRegistry(Hooks hooks = {}) : hooks_(std::move(hooks)) {}

    RoomStatus create_room(const std::string& room_id, size_t capacity) {
        if (capacity < 2) return RoomStatus::BadCapacity;
        if (rooms_.count(room_id)) return RoomStatus::DuplicateRoom;
        Room r;
        r.room_id = room_id;
        r.capacity = capacity;
        rooms_.emplace(room_id, std::move(r));
        return RoomStatus::Ok;
    }

    Room* find(const std::string& room_id) {
        auto it = rooms_.find(room_id);
        return it == rooms_.end() ? nullptr : &it->second;
    }

    struct JoinResult {
        RoomStatus status = RoomStatus::Ok;
        std::vector<std::string> prior_members;
        Participant* participant = nullptr;
    };

    JoinResult join_room(const std::string& room_id, const std::string& client_id,
                         uint64_t session_id) {
        auto it = rooms_.find(room_id);
        if (it == rooms_.end()) return {RoomStatus::UnknownRoom, {}, nullptr};
        Room& room = it->second;
        if (room.members.count(client_id)) return {RoomStatus::DuplicateClient, {}, nullptr};
        if (room.members.size() >= room.capacity) return {RoomStatus::RoomFull, {}, nullptr};

        JoinResult result;
        result.prior_members.reserve(room.members.size());
        for (auto& [id, member] : room.members) {
            result.prior_members.push_back(id);
            if (hooks_.notify_peer_event) hooks_.notify_peer_event(member, client_id, true);
        }
        Participant p;
        p.client_id = client_id;
        p.session_id = session_id;
        auto [mit, inserted] = room.members.emplace(client_id, std::move(p));
        (void)inserted;
        room.ever_joined = true;
        result.participant = &mit->second;
        return result;
    }

    RoomStatus leave_room(const std::string& room_id, const std::string& client_id, Micros now) {
        auto it = rooms_.find(room_id);
        if (it == rooms_.end()) {
            ++counters_.stale_leaves;
            return RoomStatus::UnknownRoom;
        }
        Room& room = it->second;
        auto mit = room.members.find(client_id);
        if (mit == room.members.end()) {
            ++counters_.stale_leaves;
            return RoomStatus::UnknownMember;
        }
        room.members.erase(mit);
        for (auto& [id, member] : room.members)
            if (hooks_.notify_peer_event) hooks_.notify_peer_event(member, client_id, false);
        if (room.members.empty()) room.empty_since_us = now;
        return RoomStatus::Ok;
    }

    // Fan one published frame out to every other member. Returns the
    // recipients that accepted the item (evicted members are handled through
    // the hook and excluded).
    std::vector<const Participant*> forward(const std::string& room_id,
                                            const std::string& from_client,
                                            const OutboundItem& item, uint32_t origin_seq) {
        std::vector<const Participant*> recipients;
        auto it = rooms_.find(room_id);
        if (it == rooms_.end()) {
            ++counters_.forward_drops_nonmember;
            return recipients;
        }
        Room& room = it->second;
        if (!room.members.count(from_client)) {
            ++counters_.forward_drops_nonmember;
            return recipients;
        }

        std::vector<Participant*> to_evict;
        for (auto& [id, member] : room.members) {
            if (id == from_client) continue;
            switch (enqueue_with_backpressure(member, item)) {
                case EnqueueResult::Enqueued:
                    recipients.push_back(&member);
                    break;
                case EnqueueResult::Dropped:
                    break;
                case EnqueueResult::EvictedSession:
                    to_evict.push_back(&member);
                    break;
            }
        }
        ++counters_.forwards;
        ++room.forwarded;
        record(ForwardRecord{room_id, from_client, item.channel_id, origin_seq,
                             static_cast<uint32_t>(recipients.size()), item.origin_timestamp_us});
        for (Participant* victim : to_evict)
            if (hooks_.evict) hooks_.evict(*victim);
        return recipients;
    }

    // Bounded-queue admission. Reliable modes must not lose data, so a full
    // queue there means the consumer is too slow to stay in the session.
    EnqueueResult enqueue_with_backpressure(Participant& p, const OutboundItem& item) {
        if (p.outbound.size() >= kSubscriberQueueCap) {
            if (mode_is_reliable(item.mode)) {
                p.slow_consumer = true;
                ++counters_.evictions;
                return EnqueueResult::EvictedSession;
            }
            ++counters_.queue_drops;
            return EnqueueResult::Dropped;
        }
        p.outbound.push_back(item);
        counters_.max_queue_depth = std::max(counters_.max_queue_depth, p.outbound.size());
        return EnqueueResult::Enqueued;
    }

    // Reap rooms that have sat empty past the TTL.
    void tick(Micros now) {
        for (auto it = rooms_.begin(); it != rooms_.end();) {
            Room& room = it->second;
            if (room.members.empty() && room.ever_joined &&
                now - room.empty_since_us >= kEmptyRoomTtlUs) {
                ++counters_.rooms_reaped;
                it = rooms_.erase(it);
            } else {
                ++it;
            }
        }
    }

    const std::map<std::string, Room>& rooms() const { return rooms_; }
    const RoomCounters& counters() const { return counters_; }

    const std::deque<ForwardRecord>& forward_log() const { return log_ring_; }
    void set_forward_log_sink(std::ostream* sink) { log_sink_ = sink; }
    void clear_forward_log() { log_ring_.clear(); }

private:
    void record(const ForwardRecord& r) {
        if (log_ring_.size() >= kForwardLogRingCap) log_ring_.pop_front();
        log_ring_.push_back(r);
        if (log_sink_) *log_sink_ << r << '\n';
    }

    Hooks hooks_;
    std::map<std::string, Room> rooms_;
    RoomCounters counters_;
    std::deque<ForwardRecord> log_ring_;
    std::ostream* log_sink_ = nullptr;
};

}  // namespace mvsfu
