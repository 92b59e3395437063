#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "accdict/numtheory.hpp"

namespace accdict {

// Collision-resistant digest of application bytes to `bits` bits. Kept apart
// from the two-universal rep_hash used for prime representatives.
using AppHash = std::function<BigInt(std::span<const std::uint8_t> data, unsigned bits)>;

std::vector<std::uint8_t> sha256(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> hmac_sha256(std::span<const std::uint8_t> key,
                                      std::span<const std::uint8_t> data);

// SHA-256 in counter mode, truncated to the top `bits` bits.
BigInt sha256_digest(std::span<const std::uint8_t> data, unsigned bits);

const AppHash& default_app_hash();

inline std::span<const std::uint8_t> as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace accdict
