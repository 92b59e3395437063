#include "accdict/numtheory.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace accdict {

const char* to_string(errc code) {
    switch (code) {
    case errc::invalid_modulus: return "invalid-modulus";
    case errc::undefined_gcd: return "undefined-gcd";
    case errc::generation_failure: return "generation-failure";
    case errc::domain_error: return "domain-error";
    case errc::no_preimage: return "no-preimage";
    case errc::representative_failure: return "representative-failure";
    case errc::key_mismatch: return "key-mismatch";
    case errc::not_a_member: return "not-a-member";
    case errc::duplicate: return "duplicate";
    case errc::empty_tree: return "empty-tree";
    case errc::unset_exponent: return "unset-exponent";
    case errc::invalid_parameter: return "invalid-parameter";
    case errc::invalid_params: return "invalid-params";
    case errc::not_initialized: return "not-initialized";
    case errc::sentinel_digest: return "sentinel-digest";
    case errc::parse_error: return "parse-error";
    case errc::io_error: return "io-error";
    }
    return "unknown";
}

namespace {

constexpr auto small_primes = [] {
    std::array<unsigned, 168> out{};
    std::size_t count = 0;
    for (unsigned n = 2; count < out.size(); ++n) {
        bool prime = true;
        for (unsigned d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                prime = false;
                break;
            }
        }
        if (prime) out[count++] = n;
    }
    return out;
}();

// -1: composite, 1: prime (n is a small prime), 0: undecided.
int trial_divide(const BigInt& n) {
    for (unsigned p : small_primes) {
        if (cmp(n, p) == 0) return 1;
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return -1;
    }
    return 0;
}

bool miller_rabin_round(const BigInt& n, const BigInt& n_minus_1, const BigInt& d,
                        unsigned s, const BigInt& base) {
    BigInt x;
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n_minus_1) return true;
    for (unsigned r = 1; r < s; ++r) {
        mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
        if (x == n_minus_1) return true;
        if (x == 1) return false;
    }
    return false;
}

}  // namespace

BigInt modpow(const BigInt& base, const BigInt& exponent, const BigInt& modulus,
              OpCounter* counter) {
    if (modulus < 2) throw error(errc::invalid_modulus, "modulus must be >= 2");
    if (sgn(exponent) < 0) throw error(errc::domain_error, "negative exponent");
    BigInt out;
    mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
    if (counter) ++counter->modexp_count;
    return out;
}

BigInt modmul(const BigInt& a, const BigInt& b, const BigInt& modulus, OpCounter* counter) {
    if (modulus < 2) throw error(errc::invalid_modulus, "modulus must be >= 2");
    BigInt out = a * b;
    mpz_mod(out.get_mpz_t(), out.get_mpz_t(), modulus.get_mpz_t());
    if (counter) ++counter->modmul_count;
    return out;
}

GcdResult ext_gcd(const BigInt& a, const BigInt& b) {
    if (sgn(a) < 0 || sgn(b) < 0) throw error(errc::domain_error, "ext_gcd takes nonnegative inputs");
    if (a == 0 && b == 0) throw error(errc::undefined_gcd, "gcd(0, 0)");
    GcdResult r;
    mpz_gcdext(r.g.get_mpz_t(), r.u.get_mpz_t(), r.v.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

bool is_probable_prime(const BigInt& n, unsigned rounds, Rng& rng) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (int t = trial_divide(n); t != 0) return t > 0;

    const BigInt n_minus_1 = n - 1;
    BigInt d = n_minus_1;
    unsigned s = static_cast<unsigned>(mpz_scan1(d.get_mpz_t(), 0));
    mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

    const BigInt lo = 2;
    const BigInt hi = n - 2;
    for (unsigned i = 0; i < std::max(rounds, 1u); ++i) {
        if (!miller_rabin_round(n, n_minus_1, d, s, random_range(rng, lo, hi))) return false;
    }
    return true;
}

BigInt gen_safe_prime(unsigned bits, Rng& rng, const SafePrimeOptions& opts) {
    if (bits < 4) throw error(errc::invalid_parameter, "safe primes need bits >= 4");
    const std::uint64_t budget =
        opts.attempt_budget ? opts.attempt_budget : 64ull * bits * bits;

    // q has bits-1 bits with the top bit set, so p = 2q+1 has exactly `bits` bits.
    const unsigned qbits = bits - 1;
    for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
        BigInt q = random_bits(rng, qbits);
        mpz_setbit(q.get_mpz_t(), qbits - 1);
        mpz_setbit(q.get_mpz_t(), 0);
        BigInt p = 2 * q + 1;
        if (trial_divide(q) < 0 || trial_divide(p) < 0) continue;
        // One cheap round on each before spending the full budget of rounds.
        if (!is_probable_prime(q, 1, rng) || !is_probable_prime(p, 1, rng)) continue;
        if (is_probable_prime(q, opts.rounds, rng) && is_probable_prime(p, opts.rounds, rng))
            return p;
    }
    throw error(errc::generation_failure,
                "no safe prime of " + std::to_string(bits) + " bits within budget");
}

BigInt random_bits(Rng& rng, unsigned bits) {
    BigInt out = 0;
    unsigned remaining = bits;
    while (remaining > 0) {
        const unsigned take = std::min(remaining, 64u);
        std::uint64_t word = rng();
        if (take < 64) word &= (std::uint64_t{1} << take) - 1;
        out <<= take;
        BigInt w;
        mpz_import(w.get_mpz_t(), 1, 1, sizeof(word), 0, 0, &word);
        out += w;
        remaining -= take;
    }
    return out;
}

BigInt random_range(Rng& rng, const BigInt& lo, const BigInt& hi) {
    if (hi < lo) throw error(errc::domain_error, "empty range");
    const BigInt span = hi - lo + 1;
    const unsigned bits = bit_length(span);
    for (;;) {
        BigInt r = random_bits(rng, bits);
        if (r < span) return lo + r;
    }
}

unsigned bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return static_cast<unsigned>(mpz_sizeinbase(v.get_mpz_t(), 2));
}

std::size_t byte_length(const BigInt& v) { return (bit_length(v) + 7) / 8; }

std::string to_hex(const BigInt& v) { return v.get_str(16); }

BigInt from_hex(std::string_view hex) {
    if (hex.empty()) throw error(errc::parse_error, "empty hex string");
    for (char c : hex) {
        if (!std::isxdigit(static_cast<unsigned char>(c)))
            throw error(errc::parse_error, "bad hex digit in '" + std::string(hex) + "'");
    }
    return BigInt(std::string(hex), 16);
}

std::vector<std::uint8_t> to_bytes(const BigInt& v, std::size_t width) {
    if (sgn(v) < 0) throw error(errc::domain_error, "negative value");
    const std::size_t len = byte_length(v);
    if (len > width) throw error(errc::domain_error, "value wider than " + std::to_string(width) + " bytes");
    std::vector<std::uint8_t> out(width, 0);
    if (len > 0) {
        std::size_t written = 0;
        mpz_export(out.data() + (width - len), &written, 1, 1, 1, 0, v.get_mpz_t());
    }
    return out;
}

BigInt from_bytes(std::span<const std::uint8_t> bytes) {
    BigInt out = 0;
    if (!bytes.empty()) mpz_import(out.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
    return out;
}

std::string bytes_to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::vector<std::uint8_t> hex_to_bytes(std::string_view hex) {
    if (hex.size() % 2 != 0) throw error(errc::parse_error, "odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw error(errc::parse_error, "bad hex digit");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

}  // namespace accdict
