// Data-channel style transport over datagrams: per-channel sequence spaces,
// per-frame ACKs, fixed-schedule retransmission, duplicate suppression and
// (mode 0) in-order delivery. One ChannelSet describes one side of one
// session; everything is driven by explicit `now` values so the whole state
// machine runs identically under a simulated clock.
//
// Frames to put on the wire accumulate in an internal queue; callers pull
// them with take_out() after send/on_datagram/tick.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "mvsfu/channel_config.hpp"
#include "mvsfu/clock.hpp"
#include "mvsfu/wire.hpp"

namespace mvsfu {

struct OutgoingDatagram {
    Bytes bytes;
    uint16_t channel_id = 0;
    ChannelMode mode = ChannelMode::ReliableOrdered;
    bool retransmit = false;
};

struct Delivery {
    FrameType type = FrameType::Data;
    uint16_t channel_id = 0;
    uint32_t seq = 0;
    Micros timestamp_us = 0;
    Bytes payload;
};

struct ChannelSetStats {
    uint64_t sent = 0;
    uint64_t retransmits = 0;
    uint64_t abandoned = 0;
    uint64_t acks_received = 0;
    uint64_t unknown_acks = 0;
    uint64_t acks_sent = 0;
    uint64_t delivered = 0;
    uint64_t duplicates = 0;
    uint64_t window_drops = 0;
    uint64_t reorder_drops = 0;
    uint64_t decode_errors = 0;
    uint64_t unknown_channel = 0;
    uint64_t pings = 0;
    uint64_t unexpected = 0;
};

class ChannelSet {
public:
    explicit ChannelSet(TransportTuning tuning = {}) : tuning_(tuning) {}

    void open_channel(const ChannelConfig& config) {
        config.validate();
        if (channels_.count(config.channel_id))
            throw ChannelError("channel " + std::to_string(config.channel_id) + " already open");
        Channel ch;
        ch.config = config;
        channels_.emplace(config.channel_id, std::move(ch));
    }

    void close_channel(uint16_t channel_id) { channels_.erase(channel_id); }
    bool is_open(uint16_t channel_id) const { return channels_.count(channel_id) != 0; }

    const ChannelConfig* config(uint16_t channel_id) const {
        auto it = channels_.find(channel_id);
        return it == channels_.end() ? nullptr : &it->second.config;
    }

    // Queue one frame. `timestamp_us` rides the header unchanged, which lets
    // a forwarder re-frame traffic while preserving the origin timestamp;
    // 0 means "stamp with now".
    uint32_t send(uint16_t channel_id, ByteSpan payload, Micros now,
                  FrameType type = FrameType::Data, Micros timestamp_us = 0) {
        auto it = channels_.find(channel_id);
        if (it == channels_.end())
            throw ChannelError("send on closed channel " + std::to_string(channel_id));
        if (payload.size() > kMaxPayload)
            throw ChannelError("payload exceeds datagram budget");
        Channel& ch = it->second;
        DatagramFrame f;
        f.type = type;
        f.channel_id = channel_id;
        f.seq = ch.next_seq++;
        f.timestamp_us = timestamp_us ? timestamp_us : now;
        f.payload.assign(payload.begin(), payload.end());
        Bytes bytes = encode_frame(f);
        if (mode_wants_ack(ch.config.mode)) {
            Unacked u;
            u.bytes = bytes;
            u.first_sent_at = now;
            u.last_sent_at = now;
            u.transmit_count = 1;
            u.rto_ms = tuning_.initial_rto_ms;
            ch.unacked.emplace(f.seq, std::move(u));
        }
        out_.push_back(OutgoingDatagram{std::move(bytes), channel_id, ch.config.mode, false});
        ++stats_.sent;
        return f.seq;
    }

    // Feed one inbound datagram. Returns application deliveries; ACK/PONG
    // responses are queued on the out queue. Decode failures are counted,
    // never fatal.
    std::vector<Delivery> on_datagram(ByteSpan bytes, Micros now) {
        std::vector<Delivery> deliveries;
        auto decoded = decode_frame(bytes);
        if (!decoded.ok()) {
            ++stats_.decode_errors;
            return deliveries;
        }
        const DatagramFrame& f = *decoded;
        switch (f.type) {
            case FrameType::Ack:
                on_ack(f);
                break;
            case FrameType::Ping:
                ++stats_.pings;
                emit_control(FrameType::Pong, f.channel_id, f.seq, now);
                break;
            case FrameType::Pong:
            case FrameType::Close:
                deliveries.push_back(Delivery{f.type, f.channel_id, f.seq, f.timestamp_us, f.payload});
                break;
            case FrameType::Bind:
                // Bind is demultiplexed before the channel layer; seeing one
                // here means a peer misbehaved.
                ++stats_.unexpected;
                break;
            case FrameType::Data:
            case FrameType::Signal:
                on_data(f, now, deliveries);
                break;
        }
        return deliveries;
    }

    // Retransmission timer. Emits due retransmits, abandons what the channel
    // mode says to abandon.
    void tick(Micros now) {
        for (auto& [id, ch] : channels_) {
            if (!mode_wants_ack(ch.config.mode)) continue;
            for (auto it = ch.unacked.begin(); it != ch.unacked.end();) {
                Unacked& u = it->second;
                if (ch.config.mode == ChannelMode::PartialTimed &&
                    now - u.first_sent_at >= static_cast<Micros>(ch.config.max_lifetime_ms) * kMicrosPerMilli) {
                    it = ch.unacked.erase(it);
                    ++stats_.abandoned;
                    continue;
                }
                if (now - u.last_sent_at >= static_cast<Micros>(u.rto_ms) * kMicrosPerMilli) {
                    if (ch.config.mode == ChannelMode::PartialRetransmit &&
                        u.transmit_count >= 1 + static_cast<uint32_t>(ch.config.max_retransmits)) {
                        it = ch.unacked.erase(it);
                        ++stats_.abandoned;
                        continue;
                    }
                    out_.push_back(OutgoingDatagram{u.bytes, id, ch.config.mode, true});
                    u.last_sent_at = now;
                    u.rto_ms = std::min(u.rto_ms * 2, tuning_.rto_cap_ms);
                    ++u.transmit_count;
                    ++stats_.retransmits;
                }
                ++it;
            }
        }
    }

    // Ping/pong keep-alive, outside any channel's seq space.
    uint32_t send_ping(Micros now) {
        uint32_t seq = ping_seq_++;
        emit_control(FrameType::Ping, 0, seq, now);
        return seq;
    }

    void send_close(Micros now) { emit_control(FrameType::Close, 0, 0, now); }

    std::vector<OutgoingDatagram> take_out() { return std::exchange(out_, {}); }
    bool has_out() const { return !out_.empty(); }

    size_t unacked_count() const {
        size_t n = 0;
        for (const auto& [id, ch] : channels_) n += ch.unacked.size();
        return n;
    }

    size_t unacked_count(uint16_t channel_id) const {
        auto it = channels_.find(channel_id);
        return it == channels_.end() ? 0 : it->second.unacked.size();
    }

    const ChannelSetStats& stats() const { return stats_; }
    const TransportTuning& tuning() const { return tuning_; }

private:
    struct Unacked {
        Bytes bytes;
        Micros first_sent_at = 0;
        Micros last_sent_at = 0;
        uint32_t transmit_count = 0;
        int64_t rto_ms = 0;
    };

    struct Channel {
        ChannelConfig config;
        // Send side.
        uint32_t next_seq = 0;
        std::map<uint32_t, Unacked> unacked;
        // Receive side, duplicate-suppression window over recent seqs.
        bool any_seen = false;
        uint32_t max_seen = 0;
        std::vector<bool> seen_window;
        // Receive side, mode 0 only.
        uint32_t next_expected = 0;
        std::map<uint32_t, DatagramFrame> reorder;
    };

    void on_ack(const DatagramFrame& f) {
        auto it = channels_.find(f.channel_id);
        if (it == channels_.end()) {
            ++stats_.unknown_acks;
            return;
        }
        if (it->second.unacked.erase(f.seq))
            ++stats_.acks_received;
        else
            ++stats_.unknown_acks;
    }

    void emit_control(FrameType type, uint16_t channel_id, uint32_t seq, Micros now) {
        DatagramFrame f;
        f.type = type;
        f.channel_id = channel_id;
        f.seq = seq;
        f.timestamp_us = now;
        out_.push_back(OutgoingDatagram{encode_frame(f), channel_id, ChannelMode::Unreliable, false});
        if (type == FrameType::Ack) ++stats_.acks_sent;
    }

    enum class RxOutcome { Deliver, Buffer, Duplicate, Drop };

    void on_data(const DatagramFrame& f, Micros now, std::vector<Delivery>& deliveries) {
        auto it = channels_.find(f.channel_id);
        if (it == channels_.end()) {
            ++stats_.unknown_channel;
            return;
        }
        Channel& ch = it->second;

        RxOutcome outcome = ch.config.mode == ChannelMode::ReliableOrdered
                                ? classify_ordered(ch, f)
                                : classify_windowed(ch, f.seq);

        // Acks confirm frames we delivered, buffered or already hold;
        // dropped frames stay unconfirmed so reliable senders retry.
        if (mode_wants_ack(ch.config.mode) && outcome != RxOutcome::Drop)
            emit_control(FrameType::Ack, f.channel_id, f.seq, now);

        switch (outcome) {
            case RxOutcome::Deliver:
                ++stats_.delivered;
                deliveries.push_back(Delivery{f.type, f.channel_id, f.seq, f.timestamp_us, f.payload});
                if (ch.config.mode == ChannelMode::ReliableOrdered) drain_reorder(ch, deliveries);
                break;
            case RxOutcome::Buffer:
                ch.reorder.emplace(f.seq, f);
                break;
            case RxOutcome::Duplicate:
                ++stats_.duplicates;
                break;
            case RxOutcome::Drop:
                break;
        }
    }

    RxOutcome classify_ordered(Channel& ch, const DatagramFrame& f) {
        if (f.seq < ch.next_expected) return RxOutcome::Duplicate;
        if (f.seq == ch.next_expected) return RxOutcome::Deliver;
        if (ch.reorder.count(f.seq)) return RxOutcome::Duplicate;
        if (ch.reorder.size() >= tuning_.reorder_cap) {
            ++stats_.reorder_drops;
            return RxOutcome::Drop;
        }
        return RxOutcome::Buffer;
    }

    RxOutcome classify_windowed(Channel& ch, uint32_t seq) {
        const uint32_t w = tuning_.dup_window;
        if (ch.seen_window.empty()) ch.seen_window.assign(w, false);
        if (!ch.any_seen) {
            ch.any_seen = true;
            ch.max_seen = seq;
            ch.seen_window[seq % w] = true;
            return RxOutcome::Deliver;
        }
        if (seq > ch.max_seen) {
            uint32_t advance = seq - ch.max_seen;
            if (advance >= w) {
                std::fill(ch.seen_window.begin(), ch.seen_window.end(), false);
            } else {
                for (uint32_t s = ch.max_seen + 1; s <= seq; ++s) ch.seen_window[s % w] = false;
            }
            ch.max_seen = seq;
            ch.seen_window[seq % w] = true;
            return RxOutcome::Deliver;
        }
        if (ch.max_seen - seq >= w) {
            ++stats_.window_drops;
            return RxOutcome::Drop;
        }
        if (ch.seen_window[seq % w]) return RxOutcome::Duplicate;
        ch.seen_window[seq % w] = true;
        return RxOutcome::Deliver;
    }

    void drain_reorder(Channel& ch, std::vector<Delivery>& deliveries) {
        ++ch.next_expected;
        auto it = ch.reorder.find(ch.next_expected);
        while (it != ch.reorder.end()) {
            const DatagramFrame& f = it->second;
            ++stats_.delivered;
            deliveries.push_back(Delivery{f.type, f.channel_id, f.seq, f.timestamp_us, f.payload});
            ch.reorder.erase(it);
            it = ch.reorder.find(++ch.next_expected);
        }
    }

    TransportTuning tuning_;
    std::map<uint16_t, Channel> channels_;
    std::vector<OutgoingDatagram> out_;
    uint32_t ping_seq_ = 0;
    ChannelSetStats stats_;
};

constexpr uint16_t kSignalChannel = 0;
constexpr uint16_t kTransformChannel = 1;
constexpr uint16_t kAudioChannel = 2;
constexpr uint16_t kVideoChannel = 3;

}  // namespace mvsfu
