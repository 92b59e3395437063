#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "accdict/accumulator.hpp"

namespace accdict {

// Complete binary tree over the representatives, stored in heap order (root 0,
// children 2i+1 and 2i+2). Leaves past the n real ones hold the neutral
// exponent 1.
class WitnessTree {
public:
    WitnessTree() = default;

    // Phase 1: x(leaf) = x_i mod phi, x(v) = x(u) x(w) mod phi bottom-up.
    static WitnessTree build_exponent_tree(const TrapdoorKey& trapdoor, std::span<const BigInt> reps,
                                           OpCounter* counter = nullptr);

    // Phase 2: A(root) = a, A(v) = A(parent)^{x(sibling)} top-down. Returns the
    // n leaf witnesses in input order.
    std::vector<BigInt> propagate_witnesses(const PublicParams& params, OpCounter* counter = nullptr);

    std::size_t size() const noexcept { return n_; }
    std::size_t leaf_slots() const noexcept { return leaves_; }
    std::size_t node_count() const noexcept { return x_.size(); }

    const BigInt& exponent(std::size_t node) const { return x_.at(node); }
    const BigInt& root_exponent() const;
    bool has_value(std::size_t node) const { return node < has_a_.size() && has_a_[node]; }
    const BigInt& value(std::size_t node) const;

    static std::size_t left(std::size_t v) { return 2 * v + 1; }
    static std::size_t right(std::size_t v) { return 2 * v + 2; }
    std::size_t leaf_node(std::size_t i) const { return leaves_ - 1 + i; }

private:
    std::size_t n_ = 0;
    std::size_t leaves_ = 0;
    std::vector<BigInt> x_;
    std::vector<bool> real_;
    std::vector<BigInt> a_;
    std::vector<bool> has_a_;
};

// All n witnesses with O(n) modexps; needs the trapdoor.
std::vector<BigInt> precompute_witnesses(const PublicParams& params, const TrapdoorKey& trapdoor,
                                         std::span<const BigInt> reps, OpCounter* counter = nullptr);

struct WitnessEntry {
    BigInt digest;
    BigInt rep;
    BigInt witness;
    friend bool operator==(const WitnessEntry&, const WitnessEntry&) = default;
};

// Basis line, then one "digest rep witness" hex triple per line.
void write_witness_vector(std::ostream& out, const std::string& basis_line,
                          std::span<const WitnessEntry> entries);
std::vector<WitnessEntry> read_witness_vector(std::istream& in, std::string& basis_line);

}  // namespace accdict
