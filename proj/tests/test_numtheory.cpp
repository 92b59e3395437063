#include <gtest/gtest.h>

#include <numeric>

#include "accdict/numtheory.hpp"

using namespace accdict;

namespace {

bool trial_division_prime(unsigned long n) {
    if (n < 2) return false;
    for (unsigned long d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

}  // namespace

TEST(Modpow, Examples) {
    EXPECT_EQ(modpow(3, 0, 253), 1);
    EXPECT_EQ(modpow(2, 10, 1000), 24);
    EXPECT_EQ(modpow(2, 35, 253), 142);
}

TEST(Modpow, IteratedMultiplicationOracle) {
    BigInt acc = 1;
    for (int e = 0; e < 200; ++e) {
        EXPECT_EQ(modpow(2, e, 253), acc) << "e=" << e;
        acc = (acc * 2) % 253;
    }
}

TEST(Modpow, RejectsSmallModulus) {
    try {
        modpow(2, 3, 1);
        FAIL() << "expected invalid_modulus";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::invalid_modulus);
    }
}

TEST(Modpow, CountsOnePerCall) {
    OpCounter c;
    modpow(2, 5, 253, &c);
    modpow(3, 5, 253, &c);
    modmul(3, 5, 253, &c);
    EXPECT_EQ(c.modexp_count, 2u);
    EXPECT_EQ(c.modmul_count, 1u);
    c.reset();
    EXPECT_EQ(c.modexp_count, 0u);
}

TEST(Modpow, ReducesExponentByOrder) {
    // Orders of small bases mod 253 found by brute force.
    for (unsigned a = 2; a < 40; ++a) {
        if (std::gcd(a, 253u) != 1) continue;
        unsigned ord = 1;
        BigInt v = a;
        while (v != 1) {
            v = (v * a) % 253;
            ++ord;
        }
        for (unsigned e = 0; e < 500; e += 7) EXPECT_EQ(modpow(a, e, 253), modpow(a, e % ord, 253));
    }
}

TEST(ExtGcd, Examples) {
    auto r = ext_gcd(0, 5);
    EXPECT_EQ(r.g, 5);
    EXPECT_EQ(r.u, 0);
    EXPECT_EQ(r.v, 1);
    r = ext_gcd(6, 4);
    EXPECT_EQ(r.g, 2);
    EXPECT_EQ(r.u, 1);
    EXPECT_EQ(r.v, -1);
    r = ext_gcd(35, 143);
    EXPECT_EQ(r.g, 1);
    EXPECT_EQ(r.u, -49);
    EXPECT_EQ(r.v, 12);
}

TEST(ExtGcd, BothZeroIsAnError) {
    try {
        ext_gcd(0, 0);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::undefined_gcd);
    }
}

TEST(ExtGcd, BezoutHoldsOnRandomPairs) {
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const BigInt a = random_bits(rng, 96);
        const BigInt b = random_bits(rng, 80);
        if (a == 0 && b == 0) continue;
        const auto r = ext_gcd(a, b);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        ASSERT_EQ(r.g, g);
        ASSERT_EQ(a * r.u + b * r.v, r.g);
    }
}

TEST(MillerRabin, Examples) {
    Rng rng(1);
    EXPECT_FALSE(is_probable_prime(0, 8, rng));
    EXPECT_FALSE(is_probable_prime(1, 8, rng));
    EXPECT_TRUE(is_probable_prime(2, 8, rng));
    EXPECT_TRUE(is_probable_prime(3, 8, rng));
    EXPECT_FALSE(is_probable_prime(561, 8, rng));
    EXPECT_TRUE(is_probable_prime(7919, 8, rng));
}

TEST(MillerRabin, AgreesWithTrialDivisionBelowOneMillion) {
    Rng rng(2);
    std::vector<bool> sieve(1000000, true);
    sieve[0] = sieve[1] = false;
    for (std::size_t i = 2; i * i < sieve.size(); ++i) {
        if (!sieve[i]) continue;
        for (std::size_t j = i * i; j < sieve.size(); j += i) sieve[j] = false;
    }
    for (unsigned long n = 0; n < 1000000; ++n) {
        ASSERT_EQ(is_probable_prime(n, 4, rng), static_cast<bool>(sieve[n])) << n;
    }
    // Spot-check the sieve itself.
    for (unsigned long n : {97ul, 561ul, 7919ul, 999983ul}) EXPECT_EQ(sieve[n], trial_division_prime(n));
}

TEST(SafePrime, OutputsHaveSafeStructure) {
    Rng rng(3);
    for (unsigned bits : {5u, 10u, 32u, 64u, 128u}) {
        const BigInt p = gen_safe_prime(bits, rng);
        EXPECT_EQ(bit_length(p), bits);
        EXPECT_TRUE(is_probable_prime(p, 64, rng));
        EXPECT_TRUE(is_probable_prime((p - 1) / 2, 64, rng));
    }
}

TEST(SafePrime, KnownValuesPassTheCheck) {
    Rng rng(4);
    EXPECT_TRUE(is_probable_prime(23, 64, rng) && is_probable_prime(11, 64, rng));
    EXPECT_TRUE(is_probable_prime(1019, 64, rng) && is_probable_prime(509, 64, rng));
    EXPECT_FALSE(is_probable_prime(15, 64, rng));
}

TEST(SafePrime, RejectsTinyBitCounts) {
    Rng rng(5);
    EXPECT_THROW(gen_safe_prime(3, rng), error);
}

TEST(SafePrime, BudgetExhaustionReportsFailure) {
    Rng rng(6);
    SafePrimeOptions opts;
    opts.attempt_budget = 1;
    int failures = 0;
    for (int i = 0; i < 20; ++i) {
        try {
            gen_safe_prime(256, rng, opts);
        } catch (const error& e) {
            EXPECT_EQ(e.code(), errc::generation_failure);
            ++failures;
        }
    }
    EXPECT_GT(failures, 0);
}

TEST(Bytes, FixedWidthRoundTrip) {
    const BigInt v = from_hex("0102ff");
    const auto b = to_bytes(v, 5);
    ASSERT_EQ(b.size(), 5u);
    EXPECT_EQ(b[0], 0);
    EXPECT_EQ(b[4], 0xff);
    EXPECT_EQ(from_bytes(b), v);
    EXPECT_EQ(bytes_to_hex(b), "00000102ff");
    EXPECT_EQ(hex_to_bytes("00000102ff"), b);
    EXPECT_THROW(to_bytes(v, 2), error);
    EXPECT_EQ(byte_length(BigInt(253)), 1u);
    EXPECT_EQ(bit_length(BigInt(253)), 8u);
}
