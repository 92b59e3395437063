#include "accdict/accumulator.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <string>

namespace accdict {

namespace {

BigInt pow2(unsigned bits) {
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, bits);
    return out;
}

unsigned hash_rank(const UniversalHash& h) {
    std::vector<BitRow> rows;
    for (unsigned r = 0; r < h.k(); ++r) rows.push_back(h.row_bits(r));
    unsigned rank = 0;
    for (unsigned col = 0; col < h.input_bits() && rank < rows.size(); ++col) {
        auto bit = [col](const BitRow& row) { return (row[col / 64] >> (col % 64)) & 1u; };
        auto it = std::find_if(rows.begin() + rank, rows.end(), bit);
        if (it == rows.end()) continue;
        std::iter_swap(rows.begin() + rank, it);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (r != rank && bit(rows[r])) {
                for (std::size_t w = 0; w < rows[r].size(); ++w) rows[r][w] ^= rows[rank][w];
            }
        }
        ++rank;
    }
    return rank;
}

std::string read_line(std::istream& in, const char* what) {
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (!line.empty()) return line;
    }
    throw error(errc::parse_error, std::string("missing ") + what);
}

}  // namespace

void validate_params(const PublicParams& params) {
    if (params.N < 2) throw error(errc::invalid_params, "N < 2");
    if (params.k == 0) throw error(errc::invalid_params, "k must be positive");
    if (params.rep_hash.k() != params.k) throw error(errc::invalid_params, "rep_hash width differs from k");
    if (params.a <= 1 || params.a >= params.N) throw error(errc::invalid_params, "a outside (1, N)");
    BigInt g;
    mpz_gcd(g.get_mpz_t(), params.a.get_mpz_t(), params.N.get_mpz_t());
    if (g != 1) throw error(errc::invalid_params, "gcd(a, N) != 1");
    if (!params.toy && params.k < 8) throw error(errc::invalid_params, "k below 8 needs toy mode");
    if (!params.toy && params.N < pow2(3 * params.k))
        throw error(errc::invalid_params, "N below 2^{3k}");
}

void check_trapdoor(const PublicParams& params, const TrapdoorKey& trapdoor) {
    if (trapdoor.P * trapdoor.Q != params.N) throw error(errc::key_mismatch, "P*Q != N");
    if (trapdoor.phi != (trapdoor.P - 1) * (trapdoor.Q - 1)) throw error(errc::key_mismatch, "phi != (P-1)(Q-1)");
    if (!params.toy) {
        const BigInt bound = pow2(3 * params.k);
        if (trapdoor.P * trapdoor.P <= bound || trapdoor.Q * trapdoor.Q <= bound)
            throw error(errc::key_mismatch, "factor not above 2^{3k/2}");
    }
}

Instance setup(unsigned k, Rng& rng, const SetupOptions& opts) {
    if (k < 2 || (!opts.toy && k < 8))
        throw error(errc::invalid_parameter, "k too small for " + std::string(opts.toy ? "toy" : "production") + " mode");
    const unsigned min_factor_bits = (3 * k + 1) / 2 + 1;
    const unsigned factor_bits = std::max(min_factor_bits, (opts.modulus_bits + 1) / 2);

    SafePrimeOptions sp;
    sp.rounds = opts.rounds;
    Instance inst;
    TrapdoorKey& td = inst.trapdoor;
    td.P = gen_safe_prime(factor_bits, rng, sp);
    for (int attempt = 0;; ++attempt) {
        td.Q = gen_safe_prime(factor_bits, rng, sp);
        if (td.Q == td.P) continue;
        // Two b-bit factors give 2b-1 or 2b bits; retry a few times for the exact size asked.
        const unsigned nbits = bit_length(td.P * td.Q);
        if (opts.modulus_bits == 0 || nbits == opts.modulus_bits || attempt >= 32) break;
    }
    td.phi = (td.P - 1) * (td.Q - 1);

    PublicParams& pp = inst.params;
    pp.N = td.P * td.Q;
    pp.k = k;
    pp.toy = opts.toy;
    for (;;) {
        pp.a = random_range(rng, 2, pp.N - 1);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), pp.a.get_mpz_t(), pp.N.get_mpz_t());
        if (g == 1) break;
    }
    // A rank-deficient hash leaves some digests without preimages; resample.
    do {
        pp.rep_hash = sample_hash(k, rng);
    } while (hash_rank(pp.rep_hash) < k);

    validate_params(pp);
    check_trapdoor(pp, td);
    return inst;
}

Instance toy_instance() {
    Instance inst;
    inst.trapdoor = TrapdoorKey{11, 23, 220};
    inst.params.N = 253;
    inst.params.a = 2;
    inst.params.k = 2;
    inst.params.toy = true;
    inst.params.rep_hash = UniversalHash(2);
    inst.params.rep_hash.set(0, 0, true);
    inst.params.rep_hash.set(1, 1, true);
    return inst;
}

BigInt exponent_product(std::span<const BigInt> reps, const BigInt& phi, OpCounter* counter) {
    if (reps.empty()) return BigInt(1);
    BigInt acc = reps[0] % phi;
    for (std::size_t i = 1; i < reps.size(); ++i) acc = modmul(acc, reps[i], phi, counter);
    return acc;
}

AccumulationValue accumulate_public(const PublicParams& params, std::span<const BigInt> reps,
                                    OpCounter* counter) {
    BigInt acc = params.a;
    for (const BigInt& x : reps) acc = modpow(acc, x, params.N, counter);
    return {acc};
}

AccumulationValue accumulate_trapdoor(const PublicParams& params, const TrapdoorKey& trapdoor,
                                      std::span<const BigInt> reps, OpCounter* counter) {
    check_trapdoor(params, trapdoor);
    if (reps.empty()) return {params.a};
    return {modpow(params.a, exponent_product(reps, trapdoor.phi, counter), params.N, counter)};
}

BigInt witness_direct(const PublicParams& params, std::span<const BigInt> reps, std::size_t index,
                      OpCounter* counter) {
    if (index >= reps.size()) throw error(errc::not_a_member, "witness index out of range");
    BigInt acc = params.a;
    for (std::size_t j = 0; j < reps.size(); ++j) {
        if (j != index) acc = modpow(acc, reps[j], params.N, counter);
    }
    return acc;
}

bool verify(const PublicParams& params, const BigInt& element, const BigInt& x, const BigInt& witness,
            const AccumulationValue& A, OpCounter* counter) {
    if (x < 2 || bit_length(x) > 3 * params.k) return false;
    if (!params.toy && !representative_in_range(x, params.k)) return false;
    if (params.rep_hash.eval(x) != element) return false;
    if (witness < 1 || witness >= params.N) return false;
    return modpow(witness, x, params.N, counter) == A.value;
}

AccumulationValue insert_element(const PublicParams& params, const AccumulationValue& A, const BigInt& x_new,
                                 OpCounter* counter) {
    if (x_new < 2 && !params.toy) throw error(errc::domain_error, "representative must be >= 2");
    return {modpow(A.value, x_new, params.N, counter)};
}

AccumulationValue delete_element(const PublicParams& params, std::span<const BigInt> reps,
                                 const BigInt& removed, const TrapdoorKey* trapdoor, OpCounter* counter) {
    auto it = std::find(reps.begin(), reps.end(), removed);
    if (it == reps.end()) throw error(errc::not_a_member, "deleted representative is not accumulated");
    std::vector<BigInt> after(reps.begin(), it);
    after.insert(after.end(), it + 1, reps.end());
    if (trapdoor) return accumulate_trapdoor(params, *trapdoor, after, counter);
    return accumulate_public(params, after, counter);
}

void write_params(std::ostream& out, const PublicParams& params) {
    out << params.k << '\n'
        << to_hex(params.N) << '\n'
        << to_hex(params.a) << '\n'
        << params.rep_hash.serialize() << '\n';
}

PublicParams read_params(std::istream& in, bool toy) {
    PublicParams p;
    const std::string k_line = read_line(in, "k");
    try {
        std::size_t used = 0;
        p.k = static_cast<unsigned>(std::stoul(k_line, &used));
        if (used != k_line.size()) throw error(errc::parse_error, "k");
    } catch (const std::logic_error&) {
        throw error(errc::parse_error, "bad k line");
    }
    p.N = from_hex(read_line(in, "N"));
    p.a = from_hex(read_line(in, "a"));
    p.rep_hash = UniversalHash::parse(read_line(in, "rep_hash"));
    p.toy = toy;
    validate_params(p);
    return p;
}

void write_trapdoor(std::ostream& out, const TrapdoorKey& trapdoor) {
    out << to_hex(trapdoor.P) << '\n' << to_hex(trapdoor.Q) << '\n';
}

TrapdoorKey read_trapdoor(std::istream& in) {
    TrapdoorKey td;
    td.P = from_hex(read_line(in, "P"));
    td.Q = from_hex(read_line(in, "Q"));
    td.phi = (td.P - 1) * (td.Q - 1);
    return td;
}

}  // namespace accdict
