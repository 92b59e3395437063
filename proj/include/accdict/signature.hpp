#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accdict/numtheory.hpp"

namespace accdict {

using Bytes = std::vector<std::uint8_t>;

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
};

class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual std::string name() const = 0;
    virtual KeyPair keygen(Rng& rng) const = 0;
    virtual Bytes sign(std::span<const std::uint8_t> secret_key, std::span<const std::uint8_t> message) const = 0;
    virtual bool verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
                        std::span<const std::uint8_t> signature) const = 0;
    virtual std::size_t signature_size() const = 0;
};

// HMAC-SHA256 with the public key equal to the secret key. Deterministic and
// handy for fixtures, but anyone who can verify can also sign: NOT for
// production use.
class KeyedDigestScheme final : public SignatureScheme {
public:
    std::string name() const override { return "keyed-digest"; }
    KeyPair keygen(Rng& rng) const override;
    Bytes sign(std::span<const std::uint8_t> secret_key, std::span<const std::uint8_t> message) const override;
    bool verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
                std::span<const std::uint8_t> signature) const override;
    std::size_t signature_size() const override { return 32; }
};

// Ed25519 through libsodium; keys derive from a 32-byte seed drawn from rng.
class Ed25519Scheme final : public SignatureScheme {
public:
    std::string name() const override { return "ed25519"; }
    KeyPair keygen(Rng& rng) const override;
    Bytes sign(std::span<const std::uint8_t> secret_key, std::span<const std::uint8_t> message) const override;
    bool verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> message,
                std::span<const std::uint8_t> signature) const override;
    std::size_t signature_size() const override { return 64; }
};

// "keyed-digest" or "ed25519".
std::shared_ptr<const SignatureScheme> make_signature_scheme(std::string_view name);

}  // namespace accdict
