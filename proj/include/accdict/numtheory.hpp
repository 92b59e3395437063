#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "accdict/error.hpp"

namespace accdict {

using BigInt = mpz_class;
using Rng = std::mt19937_64;

// Operation counts for one measurement scope. Passed explicitly (never global)
// so that benchmark counts are reproducible and independent across threads.
struct OpCounter {
    std::uint64_t modexp_count = 0;
    std::uint64_t modmul_count = 0;

    void reset() noexcept { modexp_count = modmul_count = 0; }
};

// base^exponent mod modulus. Counts one modexp on `counter` when given.
BigInt modpow(const BigInt& base, const BigInt& exponent, const BigInt& modulus,
              OpCounter* counter = nullptr);

// a*b mod modulus. Counts one modmul.
BigInt modmul(const BigInt& a, const BigInt& b, const BigInt& modulus,
              OpCounter* counter = nullptr);

struct GcdResult {
    BigInt g;
    BigInt u;
    BigInt v;
};

// Extended Euclid: g = gcd(a, b) = a*u + b*v.
GcdResult ext_gcd(const BigInt& a, const BigInt& b);

// Miller-Rabin with `rounds` random bases drawn from rng. Small-prime trial
// division runs first; n < 4 is decided directly.
bool is_probable_prime(const BigInt& n, unsigned rounds, Rng& rng);

inline constexpr unsigned default_mr_rounds = 64;

struct SafePrimeOptions {
    unsigned rounds = default_mr_rounds;
    // 0 selects the default of 64 * bits^2 candidates.
    std::uint64_t attempt_budget = 0;
};

// A prime p of exactly `bits` bits with (p-1)/2 also prime.
BigInt gen_safe_prime(unsigned bits, Rng& rng, const SafePrimeOptions& opts = {});

// Uniform integer with at most `bits` bits.
BigInt random_bits(Rng& rng, unsigned bits);
// Uniform integer in [lo, hi].
BigInt random_range(Rng& rng, const BigInt& lo, const BigInt& hi);

unsigned bit_length(const BigInt& v);
std::size_t byte_length(const BigInt& v);

std::string to_hex(const BigInt& v);
BigInt from_hex(std::string_view hex);

// Big-endian, left-padded to `width` bytes. Throws domain_error if v does not fit.
std::vector<std::uint8_t> to_bytes(const BigInt& v, std::size_t width);
BigInt from_bytes(std::span<const std::uint8_t> bytes);

std::string bytes_to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_to_bytes(std::string_view hex);

}  // namespace accdict
