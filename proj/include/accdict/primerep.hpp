#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "accdict/numtheory.hpp"

namespace accdict {

// Packed bit vector over the 3k-bit input space. Bit i of the vector is bit i
// of the integer it encodes (least significant first).
using BitRow = std::vector<std::uint64_t>;

// h(x) = U x over GF(2), with U a k x 3k binary matrix.
class UniversalHash {
public:
    UniversalHash() = default;
    explicit UniversalHash(unsigned k);

    unsigned k() const noexcept { return k_; }
    unsigned input_bits() const noexcept { return 3 * k_; }
    std::size_t words_per_row() const noexcept { return words_; }

    // Matrix access by (row, column). Column 0 multiplies the most significant
    // input bit and row 0 produces the most significant output bit.
    bool get(unsigned row, unsigned col) const;
    void set(unsigned row, unsigned col, bool value);

    const BitRow& row_bits(unsigned row) const { return rows_[row]; }

    BigInt eval(const BigInt& x) const;

    // "k hexbits": k in decimal, then the k*3k matrix bits row-major (column 0
    // first), packed MSB-first into hex digits with the last digit zero-padded.
    std::string serialize() const;
    static UniversalHash parse(std::string_view text);

    friend bool operator==(const UniversalHash&, const UniversalHash&) = default;

private:
    unsigned k_ = 0;
    std::size_t words_ = 0;
    std::vector<BitRow> rows_;
};

UniversalHash sample_hash(unsigned k, Rng& rng);
BigInt hash_eval(const UniversalHash& h, const BigInt& x);

BitRow to_bitrow(const BigInt& x, std::size_t words);
BigInt from_bitrow(const BitRow& bits);

// All solutions of U x = e: particular xor span(nullspace_basis).
struct PreimageSpace {
    unsigned input_bits = 0;
    BitRow particular;
    std::vector<BitRow> nullspace_basis;

    BigInt particular_value() const { return from_bitrow(particular); }
    // Uniform member of the solution set.
    BigInt sample(Rng& rng) const;
};

PreimageSpace preimage_space(const UniversalHash& h, const BigInt& e);

struct PrimeRepresentative {
    BigInt element;  // k-bit value e
    BigInt x;        // prime with h(x) = e
    unsigned k = 0;

    friend bool operator==(const PrimeRepresentative&, const PrimeRepresentative&) = default;
};

struct RepSearchOptions {
    // 0 selects 16 * k^2 candidates.
    std::uint64_t budget = 0;
    unsigned rounds = default_mr_rounds;
};

std::uint64_t default_rep_budget(unsigned k);

// True when x lies strictly between sqrt(2^{3k}) and 2^{3k}.
bool representative_in_range(const BigInt& x, unsigned k);

// Samples preimages of e until one is a prime in range. The search always
// enforces the range; `samples_used` reports how many candidates were drawn.
PrimeRepresentative find_prime_representative(const UniversalHash& h, const BigInt& e, Rng& rng,
                                              const RepSearchOptions& opts = {},
                                              std::uint64_t* samples_used = nullptr);

// h(x) = e, range and primality. Toy mode skips all three.
bool validate_representative(const UniversalHash& h, const PrimeRepresentative& rep, Rng& rng,
                             bool toy = false, unsigned rounds = default_mr_rounds);

// Representatives are assigned once per digest and reused afterwards.
class RepresentativeCache {
public:
    RepresentativeCache(const UniversalHash& h, RepSearchOptions opts = {}) : h_(&h), opts_(opts) {}

    const BigInt& get_or_find(const BigInt& digest, Rng& rng);
    const BigInt* find(const BigInt& digest) const;
    std::size_t size() const noexcept { return cache_.size(); }
    // Candidates sampled across all searches so far.
    std::uint64_t samples() const noexcept { return samples_; }

private:
    const UniversalHash* h_;
    RepSearchOptions opts_;
    std::map<BigInt, BigInt> cache_;
    std::uint64_t samples_ = 0;
};

}  // namespace accdict
