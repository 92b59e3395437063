#include "accdict/app_hash.hpp"

#include <sodium.h>

namespace accdict {

namespace {

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

std::vector<std::uint8_t> sha256(std::span<const std::uint8_t> data) {
    ensure_sodium();
    std::vector<std::uint8_t> out(crypto_hash_sha256_BYTES);
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

std::vector<std::uint8_t> hmac_sha256(std::span<const std::uint8_t> key,
                                      std::span<const std::uint8_t> data) {
    ensure_sodium();
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    crypto_auth_hmacsha256_update(&st, data.data(), data.size());
    std::vector<std::uint8_t> out(crypto_auth_hmacsha256_BYTES);
    crypto_auth_hmacsha256_final(&st, out.data());
    return out;
}

BigInt sha256_digest(std::span<const std::uint8_t> data, unsigned bits) {
    ensure_sodium();
    std::vector<std::uint8_t> stream;
    for (std::uint32_t block = 0; stream.size() * 8 < bits; ++block) {
        crypto_hash_sha256_state st;
        crypto_hash_sha256_init(&st);
        const std::uint8_t ctr[4] = {static_cast<std::uint8_t>(block >> 24),
                                     static_cast<std::uint8_t>(block >> 16),
                                     static_cast<std::uint8_t>(block >> 8),
                                     static_cast<std::uint8_t>(block)};
        crypto_hash_sha256_update(&st, ctr, sizeof ctr);
        crypto_hash_sha256_update(&st, data.data(), data.size());
        std::uint8_t out[crypto_hash_sha256_BYTES];
        crypto_hash_sha256_final(&st, out);
        stream.insert(stream.end(), out, out + sizeof out);
    }
    BigInt v = from_bytes(stream);
    v >>= static_cast<unsigned long>(stream.size() * 8 - bits);
    return v;
}

const AppHash& default_app_hash() {
    static const AppHash h = sha256_digest;
    return h;
}

}  // namespace accdict
