#include "accdict/wire.hpp"

#include <limits>

namespace accdict {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint32_t get_u32_be(std::span<const std::uint8_t> in) {
    if (in.size() < 4) throw error(errc::parse_error, "need 4 bytes");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in[i];
    return v;
}

std::uint64_t get_u64_be(std::span<const std::uint8_t> in) {
    if (in.size() < 8) throw error(errc::parse_error, "need 8 bytes");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in[i];
    return v;
}

void FrameWriter::field(std::span<const std::uint8_t> bytes) {
    if (bytes.size() > std::numeric_limits<std::uint32_t>::max()) throw error(errc::domain_error, "field too long");
    put_u32_be(out_, static_cast<std::uint32_t>(bytes.size()));
    out_.insert(out_.end(), bytes.begin(), bytes.end());
}

void FrameWriter::field(std::string_view text) {
    field(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void FrameWriter::u8(std::uint8_t v) { field(std::span<const std::uint8_t>(&v, 1)); }

void FrameWriter::u32(std::uint32_t v) {
    std::vector<std::uint8_t> b;
    put_u32_be(b, v);
    field(b);
}

void FrameWriter::u64(std::uint64_t v) {
    std::vector<std::uint8_t> b;
    put_u64_be(b, v);
    field(b);
}

void FrameWriter::fixed(const BigInt& v, std::size_t width) { field(to_bytes(v, width)); }

void FrameWriter::big(const BigInt& v) { field(to_bytes(v, byte_length(v))); }

std::span<const std::uint8_t> FrameReader::field() {
    const std::uint32_t len = get_u32_be(in_);
    if (in_.size() - 4 < len) throw error(errc::parse_error, "field length exceeds frame");
    auto out = in_.subspan(4, len);
    in_ = in_.subspan(4 + len);
    return out;
}

std::string FrameReader::text() {
    auto f = field();
    return std::string(f.begin(), f.end());
}

std::uint8_t FrameReader::u8() {
    auto f = field();
    if (f.size() != 1) throw error(errc::parse_error, "expected 1-byte field");
    return f[0];
}

std::uint32_t FrameReader::u32() {
    auto f = field();
    if (f.size() != 4) throw error(errc::parse_error, "expected 4-byte field");
    return get_u32_be(f);
}

std::uint64_t FrameReader::u64() {
    auto f = field();
    if (f.size() != 8) throw error(errc::parse_error, "expected 8-byte field");
    return get_u64_be(f);
}

BigInt FrameReader::fixed(std::size_t width) {
    auto f = field();
    if (f.size() != width) throw error(errc::parse_error, "fixed-width field has wrong length");
    return from_bytes(f);
}

BigInt FrameReader::big() { return from_bytes(field()); }

void FrameReader::finish() const {
    if (!in_.empty()) throw error(errc::parse_error, "trailing bytes in frame");
}

}  // namespace accdict
