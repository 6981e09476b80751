// Text signaling messages. JSON on the wire; carried over the WebSocket
// before takeover and verbatim inside SIGNAL datagram frames afterwards.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvsfu/channel_config.hpp"

namespace mvsfu {

enum class SignalType : uint8_t {
    Join,
    Accept,
    BindOk,
    Switch,
    SwitchOk,
    Publish,
    PeerJoined,
    PeerLeft,
    Leave,
    Error,
};

inline const char* signal_type_name(SignalType t) {
    switch (t) {
        case SignalType::Join: return "join";
        case SignalType::Accept: return "accept";
        case SignalType::BindOk: return "bind_ok";
        case SignalType::Switch: return "switch";
        case SignalType::SwitchOk: return "switch_ok";
        case SignalType::Publish: return "publish";
        case SignalType::PeerJoined: return "peer_joined";
        case SignalType::PeerLeft: return "peer_left";
        case SignalType::Leave: return "leave";
        case SignalType::Error: return "error";
    }
    return "?";
}

inline std::optional<SignalType> signal_type_from_name(const std::string& s) {
    if (s == "join") return SignalType::Join;
    if (s == "accept") return SignalType::Accept;
    if (s == "bind_ok") return SignalType::BindOk;
    if (s == "switch") return SignalType::Switch;
    if (s == "switch_ok") return SignalType::SwitchOk;
    if (s == "publish") return SignalType::Publish;
    if (s == "peer_joined") return SignalType::PeerJoined;
    if (s == "peer_left") return SignalType::PeerLeft;
    if (s == "leave") return SignalType::Leave;
    if (s == "error") return SignalType::Error;
    return std::nullopt;
}

// Experiment condition: who carries avatar transforms.
enum class Condition : uint8_t {
    Baseline,   // transforms relayed by the web-server role over the stream
    Delegated,  // transforms delegated to the forwarding unit's datagram channel
};

inline const char* condition_name(Condition c) {
    return c == Condition::Baseline ? "baseline" : "delegated";
}

inline std::optional<Condition> condition_from_name(const std::string& s) {
    if (s == "baseline") return Condition::Baseline;
    if (s == "delegated") return Condition::Delegated;
    return std::nullopt;
}

// One entry of the channel table announced in accept.
struct ChannelDesc {
    std::string label;
    ChannelConfig config;
    bool operator==(const ChannelDesc&) const = default;
};

// The fixed four-channel table every session negotiates: reliable-ordered
// signaling and transforms, fire-and-forget audio, one-retry video.
inline std::vector<ChannelDesc> default_channel_table() {
    std::vector<ChannelDesc> t(4);
    t[0].label = "signaling";
    t[0].config = ChannelConfig{0, ChannelMode::ReliableOrdered, -1, 0};
    t[1].label = "transform";
    t[1].config = ChannelConfig{1, ChannelMode::ReliableOrdered, -1, 0};
    t[2].label = "audio";
    t[2].config = ChannelConfig{2, ChannelMode::Unreliable, -1, 0};
    t[3].label = "video";
    t[3].config = ChannelConfig{3, ChannelMode::PartialRetransmit, 1, 0};
    return t;
}

// Flat message struct: `type` selects which fields are meaningful. Unused
// fields stay at their defaults so whole-struct equality works for
// round-trip checks.
struct SignalMessage {
    SignalType type = SignalType::Error;

    std::string room_id;    // join
    std::string client_id;  // join, peer_joined, peer_left
    Condition condition = Condition::Delegated;  // join

    std::string udp_host;  // accept
    uint16_t udp_port = 0;  // accept
    std::string token_hex;  // accept, 32 hex chars
    std::vector<ChannelDesc> channels;  // accept

    std::string media;  // publish: "audio" | "video" | "transform"

    std::string code;     // error
    std::string message;  // error

    bool operator==(const SignalMessage&) const = default;

    static SignalMessage join(std::string room, std::string client, Condition cond) {
        SignalMessage m;
        m.type = SignalType::Join;
        m.room_id = std::move(room);
        m.client_id = std::move(client);
        m.condition = cond;
        return m;
    }

    static SignalMessage error(std::string code, std::string text) {
        SignalMessage m;
        m.type = SignalType::Error;
        m.code = std::move(code);
        m.message = std::move(text);
        return m;
    }

    static SignalMessage simple(SignalType t) {
        SignalMessage m;
        m.type = t;
        return m;
    }

    static SignalMessage peer_event(SignalType t, std::string client) {
        SignalMessage m;
        m.type = t;
        m.client_id = std::move(client);
        return m;
    }
};

enum class SignalDecodeError : uint8_t {
    None = 0,
    Malformed,
    MissingType,
    UnknownType,
    MissingField,
    BadField,
};

inline const char* signal_decode_error_name(SignalDecodeError e) {
    switch (e) {
        case SignalDecodeError::None: return "none";
        case SignalDecodeError::Malformed: return "malformed";
        case SignalDecodeError::MissingType: return "missing_type";
        case SignalDecodeError::UnknownType: return "unknown_type";
        case SignalDecodeError::MissingField: return "missing_field";
        case SignalDecodeError::BadField: return "bad_field";
    }
    return "?";
}

struct DecodedSignal {
    std::optional<SignalMessage> value;
    SignalDecodeError error = SignalDecodeError::None;

    bool ok() const { return value.has_value(); }
    const SignalMessage& operator*() const { return *value; }

    static DecodedSignal fail(SignalDecodeError e) { return DecodedSignal{std::nullopt, e}; }
};

inline std::string encode_signal(const SignalMessage& m) {
    nlohmann::json j;
    j["type"] = signal_type_name(m.type);
    switch (m.type) {
        case SignalType::Join:
            j["room_id"] = m.room_id;
            j["client_id"] = m.client_id;
            j["condition"] = condition_name(m.condition);
            break;
        case SignalType::Accept: {
            j["udp_host"] = m.udp_host;
            j["udp_port"] = m.udp_port;
            j["token"] = m.token_hex;
            auto chans = nlohmann::json::array();
            for (const auto& c : m.channels) {
                nlohmann::json e;
                e["id"] = c.config.channel_id;
                e["label"] = c.label;
                e["mode"] = static_cast<int>(c.config.mode);
                if (c.config.mode == ChannelMode::PartialRetransmit)
                    e["max_retransmits"] = c.config.max_retransmits;
                if (c.config.mode == ChannelMode::PartialTimed)
                    e["max_lifetime_ms"] = c.config.max_lifetime_ms;
                chans.push_back(std::move(e));
            }
            j["channels"] = std::move(chans);
            break;
        }
        case SignalType::PeerJoined:
        case SignalType::PeerLeft:
            j["client_id"] = m.client_id;
            break;
        case SignalType::Publish:
            j["media"] = m.media;
            break;
        case SignalType::Error:
            j["code"] = m.code;
            j["message"] = m.message;
            break;
        case SignalType::BindOk:
        case SignalType::Switch:
        case SignalType::SwitchOk:
        case SignalType::Leave:
            break;
    }
    return j.dump();
}

inline DecodedSignal decode_signal(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return DecodedSignal::fail(SignalDecodeError::Malformed);
    if (!j.contains("type") || !j["type"].is_string())
        return DecodedSignal::fail(SignalDecodeError::MissingType);
    auto type = signal_type_from_name(j["type"].get<std::string>());
    if (!type) return DecodedSignal::fail(SignalDecodeError::UnknownType);

    auto str_field = [&](const char* key, std::string& out) -> SignalDecodeError {
        if (!j.contains(key)) return SignalDecodeError::MissingField;
        if (!j[key].is_string()) return SignalDecodeError::BadField;
        out = j[key].get<std::string>();
        return SignalDecodeError::None;
    };

    SignalMessage m;
    m.type = *type;
    switch (*type) {
        case SignalType::Join: {
            if (auto e = str_field("room_id", m.room_id); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            if (auto e = str_field("client_id", m.client_id); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            std::string cond;
            if (auto e = str_field("condition", cond); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            auto c = condition_from_name(cond);
            if (!c) return DecodedSignal::fail(SignalDecodeError::BadField);
            m.condition = *c;
            break;
        }
        case SignalType::Accept: {
            if (auto e = str_field("udp_host", m.udp_host); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            if (auto e = str_field("token", m.token_hex); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            if (!j.contains("udp_port") || !j["udp_port"].is_number_unsigned())
                return DecodedSignal::fail(SignalDecodeError::MissingField);
            uint64_t port = j["udp_port"].get<uint64_t>();
            if (port > 0xFFFF) return DecodedSignal::fail(SignalDecodeError::BadField);
            m.udp_port = static_cast<uint16_t>(port);
            if (!j.contains("channels") || !j["channels"].is_array())
                return DecodedSignal::fail(SignalDecodeError::MissingField);
            for (const auto& e : j["channels"]) {
                if (!e.is_object() || !e.contains("id") || !e.contains("mode") || !e.contains("label"))
                    return DecodedSignal::fail(SignalDecodeError::BadField);
                if (!e["id"].is_number_unsigned() || !e["mode"].is_number_unsigned() ||
                    !e["label"].is_string())
                    return DecodedSignal::fail(SignalDecodeError::BadField);
                uint64_t id = e["id"].get<uint64_t>();
                uint64_t mode = e["mode"].get<uint64_t>();
                if (id > 0xFFFF || !channel_mode_known(static_cast<uint8_t>(mode)))
                    return DecodedSignal::fail(SignalDecodeError::BadField);
                ChannelDesc d;
                d.label = e["label"].get<std::string>();
                d.config.channel_id = static_cast<uint16_t>(id);
                d.config.mode = static_cast<ChannelMode>(mode);
                if (e.contains("max_retransmits")) {
                    if (!e["max_retransmits"].is_number_integer())
                        return DecodedSignal::fail(SignalDecodeError::BadField);
                    d.config.max_retransmits = e["max_retransmits"].get<int>();
                }
                if (e.contains("max_lifetime_ms")) {
                    if (!e["max_lifetime_ms"].is_number_integer())
                        return DecodedSignal::fail(SignalDecodeError::BadField);
                    d.config.max_lifetime_ms = e["max_lifetime_ms"].get<int64_t>();
                }
                try {
                    d.config.validate();
                } catch (const ChannelError&) {
                    return DecodedSignal::fail(SignalDecodeError::BadField);
                }
                m.channels.push_back(std::move(d));
            }
            break;
        }
        case SignalType::PeerJoined:
        case SignalType::PeerLeft:
            if (auto e = str_field("client_id", m.client_id); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            break;
        case SignalType::Publish:
            if (auto e = str_field("media", m.media); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            break;
        case SignalType::Error:
            if (auto e = str_field("code", m.code); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            if (auto e = str_field("message", m.message); e != SignalDecodeError::None)
                return DecodedSignal::fail(e);
            break;
        case SignalType::BindOk:
        case SignalType::Switch:
        case SignalType::SwitchOk:
        case SignalType::Leave:
            break;
    }
    return DecodedSignal{std::move(m), SignalDecodeError::None};
}

}  // namespace mvsfu
