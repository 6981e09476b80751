// Big-endian byte packing helpers shared by all wire codecs.
//
// ByteReader is bounds-checked with a sticky failure flag: reads past the
// end return zero and mark the reader bad instead of touching memory, so
// decoders can run a full field list and check ok() once at the end.
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace mvsfu {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

class ByteWriter {
public:
    void put_u8(uint8_t v) { buf_.push_back(v); }

    void put_u16(uint16_t v) {
        buf_.push_back(static_cast<uint8_t>(v >> 8));
        buf_.push_back(static_cast<uint8_t>(v));
    }

    void put_u32(uint32_t v) {
        for (int s = 24; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
    }

    void put_u64(uint64_t v) {
        for (int s = 56; s >= 0; s -= 8) buf_.push_back(static_cast<uint8_t>(v >> s));
    }

    void put_f32(float v) { put_u32(std::bit_cast<uint32_t>(v)); }

    void put_bytes(ByteSpan b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    size_t size() const { return buf_.size(); }
    Bytes take() { return std::move(buf_); }
    const Bytes& data() const { return buf_; }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(ByteSpan data) : data_(data) {}

    uint8_t read_u8() {
        if (!need(1)) return 0;
        return data_[pos_++];
    }

    uint16_t read_u16() {
        if (!need(2)) return 0;
        uint16_t v = static_cast<uint16_t>(data_[pos_] << 8 | data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    uint32_t read_u32() {
        if (!need(4)) return 0;
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 4;
        return v;
    }

    uint64_t read_u64() {
        if (!need(8)) return 0;
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | data_[pos_ + i];
        pos_ += 8;
        return v;
    }

    float read_f32() { return std::bit_cast<float>(read_u32()); }

    Bytes read_bytes(size_t n) {
        if (!need(n)) return {};
        Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    size_t remaining() const { return ok_ ? data_.size() - pos_ : 0; }
    bool ok() const { return ok_; }

private:
    bool need(size_t n) {
        if (!ok_ || data_.size() - pos_ < n) {
            ok_ = false;
            return false;
        }
        return true;
    }

    ByteSpan data_;
    size_t pos_ = 0;
    bool ok_ = true;
};

inline std::string to_hex(ByteSpan b) {
    static const char digits[] = "0123456789abcdef";
    std::string s;
    s.reserve(b.size() * 2);
    for (uint8_t c : b) {
        s.push_back(digits[c >> 4]);
        s.push_back(digits[c & 0xF]);
    }
    return s;
}

inline bool from_hex(const std::string& s, Bytes& out) {
    if (s.size() % 2 != 0) return false;
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    out.clear();
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = nib(s[i]), lo = nib(s[i + 1]);
        if (hi < 0 || lo < 0) return false;
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return true;
}

}  // namespace mvsfu
