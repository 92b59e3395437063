#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accdict/numtheory.hpp"

namespace accdict {

// Length-prefixed binary framing: every field is a 4-byte big-endian length
// followed by that many bytes.
class FrameWriter {
public:
    void field(std::span<const std::uint8_t> bytes);
    void field(std::string_view text);
    void u8(std::uint8_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    // Fixed-width big-endian encoding.
    void fixed(const BigInt& v, std::size_t width);
    // Minimal big-endian encoding (empty for zero).
    void big(const BigInt& v);

    const std::vector<std::uint8_t>& bytes() const noexcept { return out_; }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class FrameReader {
public:
    explicit FrameReader(std::span<const std::uint8_t> bytes) : in_(bytes) {}

    std::span<const std::uint8_t> field();
    std::string text();
    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    BigInt fixed(std::size_t width);
    BigInt big();

    bool done() const noexcept { return in_.empty(); }
    // Throws parse_error unless every byte was consumed.
    void finish() const;

private:
    std::span<const std::uint8_t> in_;
};

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint32_t get_u32_be(std::span<const std::uint8_t> in);
std::uint64_t get_u64_be(std::span<const std::uint8_t> in);

}  // namespace accdict
