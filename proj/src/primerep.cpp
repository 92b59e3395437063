#include "accdict/primerep.hpp"

#include <bit>
#include <cctype>
#include <sstream>

namespace accdict {

namespace {

std::size_t words_for(unsigned bits) { return (bits + 63) / 64; }

bool test_bit(const BitRow& r, unsigned i) { return (r[i / 64] >> (i % 64)) & 1u; }

void flip_bit(BitRow& r, unsigned i) { r[i / 64] ^= std::uint64_t{1} << (i % 64); }

void xor_into(BitRow& dst, const BitRow& src) {
    for (std::size_t w = 0; w < dst.size(); ++w) dst[w] ^= src[w];
}

bool parity_and(const BitRow& a, const BitRow& b) {
    unsigned acc = 0;
    for (std::size_t w = 0; w < a.size(); ++w) acc ^= std::popcount(a[w] & b[w]);
    return acc & 1u;
}

BigInt pow2(unsigned bits) {
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, bits);
    return out;
}

}  // namespace

BitRow to_bitrow(const BigInt& x, std::size_t words) {
    BitRow out(words, 0);
    std::size_t count = 0;
    if (x != 0) {
        if (mpz_sizeinbase(x.get_mpz_t(), 2) > words * 64)
            throw error(errc::domain_error, "value wider than bit row");
        mpz_export(out.data(), &count, -1, sizeof(std::uint64_t), 0, 0, x.get_mpz_t());
    }
    return out;
}

BigInt from_bitrow(const BitRow& bits) {
    BigInt out = 0;
    if (!bits.empty())
        mpz_import(out.get_mpz_t(), bits.size(), -1, sizeof(std::uint64_t), 0, 0, bits.data());
    return out;
}

UniversalHash::UniversalHash(unsigned k)
    : k_(k), words_(words_for(3 * k)), rows_(k, BitRow(words_for(3 * k), 0)) {
    if (k == 0) throw error(errc::invalid_parameter, "hash needs k >= 1");
}

bool UniversalHash::get(unsigned row, unsigned col) const {
    return test_bit(rows_.at(row), input_bits() - 1 - col);
}

void UniversalHash::set(unsigned row, unsigned col, bool value) {
    if (get(row, col) != value) flip_bit(rows_.at(row), input_bits() - 1 - col);
}

BigInt UniversalHash::eval(const BigInt& x) const {
    if (sgn(x) < 0 || bit_length(x) > input_bits())
        throw error(errc::domain_error, "hash input must be below 2^" + std::to_string(input_bits()));
    const BitRow v = to_bitrow(x, words_);
    BigInt out = 0;
    for (unsigned r = 0; r < k_; ++r) {
        out <<= 1;
        if (parity_and(rows_[r], v)) out += 1;
    }
    return out;
}

std::string UniversalHash::serialize() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string hex;
    unsigned nibble = 0;
    unsigned filled = 0;
    for (unsigned r = 0; r < k_; ++r) {
        for (unsigned c = 0; c < input_bits(); ++c) {
            nibble = (nibble << 1) | (get(r, c) ? 1u : 0u);
            if (++filled == 4) {
                hex.push_back(digits[nibble]);
                nibble = filled = 0;
            }
        }
    }
    if (filled > 0) hex.push_back(digits[nibble << (4 - filled)]);
    return std::to_string(k_) + " " + hex;
}

UniversalHash UniversalHash::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    unsigned k = 0;
    std::string hex;
    if (!(in >> k >> hex) || k == 0) throw error(errc::parse_error, "hash: expected 'k hexbits'");
    std::string rest;
    if (in >> rest) throw error(errc::parse_error, "hash: trailing data");
    UniversalHash h(k);
    const std::size_t total = std::size_t{k} * h.input_bits();
    if (hex.size() != (total + 3) / 4) throw error(errc::parse_error, "hash: wrong bit count");
    for (std::size_t i = 0; i < total; ++i) {
        const char ch = hex[i / 4];
        int v;
        if (ch >= '0' && ch <= '9') v = ch - '0';
        else if (ch >= 'a' && ch <= 'f') v = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F') v = ch - 'A' + 10;
        else throw error(errc::parse_error, "hash: bad hex digit");
        const bool bit = (v >> (3 - i % 4)) & 1;
        h.set(static_cast<unsigned>(i / h.input_bits()), static_cast<unsigned>(i % h.input_bits()), bit);
    }
    if (const std::size_t pad = hex.size() * 4 - total; pad > 0) {
        const char last = static_cast<char>(std::tolower(static_cast<unsigned char>(hex.back())));
        const int v = last <= '9' ? last - '0' : last - 'a' + 10;
        if (v & ((1 << pad) - 1)) throw error(errc::parse_error, "hash: nonzero padding bits");
    }
    return h;
}

UniversalHash sample_hash(unsigned k, Rng& rng) {
    UniversalHash h(k);
    for (unsigned r = 0; r < k; ++r)
        for (unsigned c = 0; c < h.input_bits(); ++c) h.set(r, c, rng() & 1u);
    return h;
}

BigInt hash_eval(const UniversalHash& h, const BigInt& x) { return h.eval(x); }

BigInt PreimageSpace::sample(Rng& rng) const {
    BitRow v = particular;
    std::uint64_t bits = 0;
    unsigned left = 0;
    for (const BitRow& b : nullspace_basis) {
        if (left == 0) {
            bits = rng();
            left = 64;
        }
        if (bits & 1u) xor_into(v, b);
        bits >>= 1;
        --left;
    }
    return from_bitrow(v);
}

PreimageSpace preimage_space(const UniversalHash& h, const BigInt& e) {
    const unsigned k = h.k();
    const unsigned n = h.input_bits();
    if (sgn(e) < 0 || bit_length(e) > k) throw error(errc::domain_error, "target wider than k bits");

    // Augmented rows [U | e]; row r's right-hand side is output bit k-1-r.
    std::vector<BitRow> rows(k);
    std::vector<bool> rhs(k);
    for (unsigned r = 0; r < k; ++r) {
        rows[r] = h.row_bits(r);
        rhs[r] = mpz_tstbit(e.get_mpz_t(), k - 1 - r);
    }

    // Reduced row echelon form over GF(2).
    std::vector<unsigned> pivot_col;
    unsigned rank = 0;
    for (unsigned col = 0; col < n && rank < k; ++col) {
        unsigned sel = rank;
        while (sel < k && !test_bit(rows[sel], col)) ++sel;
        if (sel == k) continue;
        std::swap(rows[sel], rows[rank]);
        std::swap(rhs[sel], rhs[rank]);
        for (unsigned r = 0; r < k; ++r) {
            if (r != rank && test_bit(rows[r], col)) {
                xor_into(rows[r], rows[rank]);
                rhs[r] = rhs[r] ^ rhs[rank];
            }
        }
        pivot_col.push_back(col);
        ++rank;
    }
    for (unsigned r = rank; r < k; ++r) {
        if (rhs[r]) throw error(errc::no_preimage, "target outside the column space of U");
    }

    PreimageSpace space;
    space.input_bits = n;
    space.particular = BitRow(h.words_per_row(), 0);
    for (unsigned r = 0; r < rank; ++r) {
        if (rhs[r]) flip_bit(space.particular, pivot_col[r]);
    }

    std::vector<bool> is_pivot(n, false);
    for (unsigned c : pivot_col) is_pivot[c] = true;
    for (unsigned f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        BitRow v(h.words_per_row(), 0);
        flip_bit(v, f);
        for (unsigned r = 0; r < rank; ++r) {
            if (test_bit(rows[r], f)) flip_bit(v, pivot_col[r]);
        }
        space.nullspace_basis.push_back(std::move(v));
    }
    return space;
}

std::uint64_t default_rep_budget(unsigned k) { return 16ull * k * k; }

bool representative_in_range(const BigInt& x, unsigned k) {
    const BigInt upper = pow2(3 * k);
    return x < upper && x * x > upper;
}

PrimeRepresentative find_prime_representative(const UniversalHash& h, const BigInt& e, Rng& rng,
                                              const RepSearchOptions& opts,
                                              std::uint64_t* samples_used) {
    const PreimageSpace space = preimage_space(h, e);
    const std::uint64_t budget = opts.budget ? opts.budget : default_rep_budget(h.k());
    for (std::uint64_t i = 0; i < budget; ++i) {
        BigInt x = space.sample(rng);
        if (!mpz_odd_p(x.get_mpz_t()) && x != 2) continue;
        if (!representative_in_range(x, h.k())) continue;
        if (is_probable_prime(x, 1, rng) && is_probable_prime(x, opts.rounds, rng)) {
            if (samples_used) *samples_used = i + 1;
            return PrimeRepresentative{e, std::move(x), h.k()};
        }
    }
    if (samples_used) *samples_used = budget;
    throw error(errc::representative_failure,
                "no prime representative within " + std::to_string(budget) + " samples");
}

bool validate_representative(const UniversalHash& h, const PrimeRepresentative& rep, Rng& rng,
                             bool toy, unsigned rounds) {
    if (toy) return true;
    if (rep.k != h.k()) return false;
    if (!representative_in_range(rep.x, h.k())) return false;
    if (h.eval(rep.x) != rep.element) return false;
    return is_probable_prime(rep.x, rounds, rng);
}

const BigInt& RepresentativeCache::get_or_find(const BigInt& digest, Rng& rng) {
    auto it = cache_.find(digest);
    if (it != cache_.end()) return it->second;
    std::uint64_t used = 0;
    try {
        PrimeRepresentative rep = find_prime_representative(*h_, digest, rng, opts_, &used);
        samples_ += used;
        return cache_.emplace(digest, std::move(rep.x)).first->second;
    } catch (...) {
        samples_ += used;
        throw;
    }
}

const BigInt* RepresentativeCache::find(const BigInt& digest) const {
    auto it = cache_.find(digest);
    return it == cache_.end() ? nullptr : &it->second;
}

}  // namespace accdict
