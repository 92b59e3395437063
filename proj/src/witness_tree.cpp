#include "accdict/witness_tree.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace accdict {

WitnessTree WitnessTree::build_exponent_tree(const TrapdoorKey& trapdoor, std::span<const BigInt> reps,
                                             OpCounter* counter) {
    if (reps.empty()) throw error(errc::empty_tree, "no representatives to build a tree over");
    WitnessTree t;
    t.n_ = reps.size();
    t.leaves_ = 1;
    while (t.leaves_ < t.n_) t.leaves_ *= 2;
    const std::size_t nodes = 2 * t.leaves_ - 1;
    t.x_.assign(nodes, BigInt(1));
    t.real_.assign(nodes, false);
    for (std::size_t i = 0; i < t.n_; ++i) {
        const std::size_t v = t.leaf_node(i);
        t.x_[v] = reps[i] % trapdoor.phi;
        t.real_[v] = true;
    }
    // Heap order visits children before parents when walked backwards.
    for (std::size_t v = t.leaves_ - 1; v-- > 0;) {
        t.real_[v] = t.real_[left(v)] || t.real_[right(v)];
        if (!t.real_[right(v)]) {
            t.x_[v] = t.x_[left(v)];
        } else {
            t.x_[v] = modmul(t.x_[left(v)], t.x_[right(v)], trapdoor.phi, counter);
        }
    }
    return t;
}

std::vector<BigInt> WitnessTree::propagate_witnesses(const PublicParams& params, OpCounter* counter) {
    if (x_.empty()) throw error(errc::unset_exponent, "phase 1 has not run");
    const std::size_t nodes = x_.size();
    a_.assign(nodes, BigInt(0));
    has_a_.assign(nodes, false);
    a_[0] = params.a;
    has_a_[0] = true;
    for (std::size_t v = 1; v < nodes; ++v) {
        if (!real_[v]) continue;
        const std::size_t parent = (v - 1) / 2;
        const std::size_t sibling = (v % 2 == 1) ? v + 1 : v - 1;
        if (!real_[sibling]) {
            a_[v] = a_[parent];
        } else {
            a_[v] = modpow(a_[parent], x_[sibling], params.N, counter);
        }
        has_a_[v] = true;
    }
    std::vector<BigInt> out;
    out.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) out.push_back(a_[leaf_node(i)]);
    return out;
}

const BigInt& WitnessTree::root_exponent() const {
    if (x_.empty()) throw error(errc::unset_exponent, "phase 1 has not run");
    return x_[0];
}

const BigInt& WitnessTree::value(std::size_t node) const {
    if (node >= has_a_.size() || !has_a_[node]) throw error(errc::unset_exponent, "node value not computed");
    return a_[node];
}

std::vector<BigInt> precompute_witnesses(const PublicParams& params, const TrapdoorKey& trapdoor,
                                         std::span<const BigInt> reps, OpCounter* counter) {
    if (reps.empty()) return {};
    return WitnessTree::build_exponent_tree(trapdoor, reps, counter).propagate_witnesses(params, counter);
}

void write_witness_vector(std::ostream& out, const std::string& basis_line,
                          std::span<const WitnessEntry> entries) {
    out << basis_line << '\n';
    for (const WitnessEntry& e : entries)
        out << to_hex(e.digest) << ' ' << to_hex(e.rep) << ' ' << to_hex(e.witness) << '\n';
}

std::vector<WitnessEntry> read_witness_vector(std::istream& in, std::string& basis_line) {
    if (!std::getline(in, basis_line)) throw error(errc::parse_error, "missing basis line");
    std::vector<WitnessEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string d, r, w, extra;
        if (!(ls >> d >> r >> w) || (ls >> extra)) throw error(errc::parse_error, "bad witness line: " + line);
        out.push_back({from_hex(d), from_hex(r), from_hex(w)});
    }
    return out;
}

}  // namespace accdict
