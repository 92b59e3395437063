#include "accdict/signature.hpp"

#include <sodium.h>

#include "accdict/app_hash.hpp"

namespace accdict {

namespace {

Bytes random_seed(Rng& rng, std::size_t len) {
    Bytes out(len);
    for (std::size_t i = 0; i < len; i += 8) {
        const std::uint64_t w = rng();
        for (std::size_t j = 0; j < 8 && i + j < len; ++j) out[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
    }
    return out;
}

void require_sodium() {
    if (sodium_init() < 0) throw error(errc::invalid_parameter, "libsodium initialisation failed");
}

}  // namespace

KeyPair KeyedDigestScheme::keygen(Rng& rng) const {
    Bytes key = random_seed(rng, 32);
    return KeyPair{key, key};
}

Bytes KeyedDigestScheme::sign(std::span<const std::uint8_t> secret_key, std::span<const std::uint8_t> message) const {
    if (secret_key.empty()) throw error(errc::invalid_parameter, "empty signing key");
    return hmac_sha256(secret_key, message);
}

bool KeyedDigestScheme::verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
                               std::span<const std::uint8_t> signature) const {
    if (public_key.empty() || signature.size() != 32) return false;
    const Bytes expect = hmac_sha256(public_key, message);
    return sodium_memcmp(expect.data(), signature.data(), 32) == 0;
}

KeyPair Ed25519Scheme::keygen(Rng& rng) const {
    require_sodium();
    const Bytes seed = random_seed(rng, crypto_sign_SEEDBYTES);
    KeyPair kp{Bytes(crypto_sign_PUBLICKEYBYTES), Bytes(crypto_sign_SECRETKEYBYTES)};
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
    return kp;
}

Bytes Ed25519Scheme::sign(std::span<const std::uint8_t> secret_key, std::span<const std::uint8_t> message) const {
    require_sodium();
    if (secret_key.size() != crypto_sign_SECRETKEYBYTES) throw error(errc::invalid_parameter, "bad ed25519 secret key");
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_key.data());
    return sig;
}

bool Ed25519Scheme::verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
                           std::span<const std::uint8_t> signature) const {
    require_sodium();
    if (public_key.size() != crypto_sign_PUBLICKEYBYTES || signature.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(), public_key.data()) == 0;
}

std::shared_ptr<const SignatureScheme> make_signature_scheme(std::string_view name) {
    if (name == "keyed-digest") return std::make_shared<KeyedDigestScheme>();
    if (name == "ed25519") return std::make_shared<Ed25519Scheme>();
    throw error(errc::invalid_parameter, "unknown signature scheme '" + std::string(name) + "'");
}

}  // namespace accdict
