#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "accdict/numtheory.hpp"
#include "accdict/primerep.hpp"

namespace accdict {

// Broadcast once by the source: modulus, seed and representative hash.
struct PublicParams {
    BigInt N;
    BigInt a;
    unsigned k = 0;
    UniversalHash rep_hash;
    // Toy mode relaxes the size checks so hand-checkable moduli can be used.
    bool toy = false;

    // Fixed encoding widths, so proofs never leak the dictionary size.
    std::size_t residue_bytes() const { return byte_length(N); }
    std::size_t rep_bytes() const { return (3 * k + 7) / 8; }
};

// Source-only secret. Never written into directory- or user-facing artifacts.
struct TrapdoorKey {
    BigInt P;
    BigInt Q;
    BigInt phi;
};

struct AccumulationValue {
    BigInt value;
    friend bool operator==(const AccumulationValue&, const AccumulationValue&) = default;
};

struct Witness {
    BigInt element;  // k-bit digest
    BigInt x;        // prime representative of element
    BigInt value;    // A_i with A_i^x = A (mod N)
};

struct Instance {
    PublicParams params;
    TrapdoorKey trapdoor;
};

struct SetupOptions {
    // Bits of N. 0 picks the smallest size meeting P, Q > 2^{3k/2}.
    unsigned modulus_bits = 0;
    unsigned rounds = default_mr_rounds;
    bool toy = false;
};

// Throws invalid_params when an invariant of PublicParams fails.
void validate_params(const PublicParams& params);
// Throws key_mismatch unless P*Q = N and phi = (P-1)(Q-1).
void check_trapdoor(const PublicParams& params, const TrapdoorKey& trapdoor);

Instance setup(unsigned k, Rng& rng, const SetupOptions& opts = {});

// N = 11*23 = 253, a = 2, k = 2 and a hash selecting the two top input bits.
Instance toy_instance();

// Product of reps reduced mod phi. Counts one modmul per factor after the first.
BigInt exponent_product(std::span<const BigInt> reps, const BigInt& phi, OpCounter* counter = nullptr);

// a^(prod reps) mod N by iterated exponentiation, no trapdoor needed.
AccumulationValue accumulate_public(const PublicParams& params, std::span<const BigInt> reps,
                                    OpCounter* counter = nullptr);
// Same value with the exponent reduced mod phi first: a single modexp.
AccumulationValue accumulate_trapdoor(const PublicParams& params, const TrapdoorKey& trapdoor,
                                      std::span<const BigInt> reps, OpCounter* counter = nullptr);

// Accumulation of every rep except reps[index]; n-1 modexps.
BigInt witness_direct(const PublicParams& params, std::span<const BigInt> reps, std::size_t index,
                      OpCounter* counter = nullptr);

// Checks rep_hash(x) = element, the representative range (production mode),
// and witness^x = A. Malformed input yields false.
bool verify(const PublicParams& params, const BigInt& element, const BigInt& x, const BigInt& witness,
            const AccumulationValue& A, OpCounter* counter = nullptr);

AccumulationValue insert_element(const PublicParams& params, const AccumulationValue& A, const BigInt& x_new,
                                 OpCounter* counter = nullptr);

// Recomputes the accumulation without `removed`. With a trapdoor the exponent
// is reduced mod phi (one modexp), otherwise n-1 modexps. Inverses mod phi are
// never used.
AccumulationValue delete_element(const PublicParams& params, std::span<const BigInt> reps,
                                 const BigInt& removed, const TrapdoorKey* trapdoor = nullptr,
                                 OpCounter* counter = nullptr);

// Line-oriented text: k, N (hex), a (hex), rep_hash serialization.
void write_params(std::ostream& out, const PublicParams& params);
PublicParams read_params(std::istream& in, bool toy = false);
// P and Q in hex, one per line.
void write_trapdoor(std::ostream& out, const TrapdoorKey& trapdoor);
TrapdoorKey read_trapdoor(std::istream& in);

}  // namespace accdict
