#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "accdict/accumulator.hpp"
#include "accdict/app_hash.hpp"
#include "accdict/item.hpp"

namespace accdict {

// One accumulated member of a subset. In a leaf it is an item; in an inner
// subset it stands for a child, with key = the child's smallest item key,
// digest = digest of the child's alpha and rep = that digest's representative.
struct HierMember {
    BigInt key;
    BigInt digest;
    BigInt rep;
    BigInt witness;
    std::uint64_t child = 0;  // 0 in leaves; node ids start at 1
    friend bool operator==(const HierMember&, const HierMember&) = default;
};

struct HierNode {
    std::uint64_t id = 0;
    std::uint64_t parent = 0;  // equal to id for the root
    unsigned level = 0;
    BigInt alpha;
    BigInt alpha_digest;
    BigInt alpha_rep;
    std::vector<HierMember> members;  // sorted by key
    friend bool operator==(const HierNode&, const HierNode&) = default;
};

using HierNodeMap = std::map<std::uint64_t, HierNode>;

// Values and witnesses from the leaf subset up to the root.
struct ProofChain {
    BigInt element;
    BigInt x;
    std::vector<BigInt> values;      // alpha(Y_c) ... alpha(Y_0)
    std::vector<BigInt> value_reps;  // reps of alpha(Y_c) ... alpha(Y_1)
    std::vector<BigInt> witnesses;   // e in Y_c, then alpha(Y_i) in Y_{i-1}
    friend bool operator==(const ProofChain&, const ProofChain&) = default;
};

// Fixed-width encoding: depends on k, |N| and c only.
std::vector<std::uint8_t> encode_chain(const PublicParams& params, const ProofChain& chain);
ProofChain decode_chain(const PublicParams& params, std::span<const std::uint8_t> bytes);

// Digest of a subset value as fed to the representative pipeline.
BigInt alpha_digest(const PublicParams& params, const AppHash& app_hash, const BigInt& alpha);

// g_i = round(n^{1/(c+1)}) for every level.
std::vector<std::size_t> uniform_branching(std::size_t n, unsigned c);
// g_i = round(n^{e_i}) for explicit exponents, e.g. {1/2, 1/4}.
std::vector<std::size_t> branching_from_exponents(std::size_t n, std::span<const double> exponents);

// Changed and deleted subsets since the last take_update.
struct HierarchyUpdate {
    std::uint64_t root = 0;
    unsigned c = 0;
    std::vector<HierNode> nodes;
    std::vector<std::uint64_t> removed;
    friend bool operator==(const HierarchyUpdate&, const HierarchyUpdate&) = default;
};

// Source side. branching[i] is the number of children of each level-i
// subset, so level-c subsets hold about n / prod(branching) items.
class Hierarchy {
public:
    static Hierarchy build(const PublicParams& params, const TrapdoorKey& trapdoor, std::vector<Item> items,
                           std::vector<std::size_t> branching, RepresentativeCache& cache, Rng& rng,
                           AppHash app_hash = default_app_hash(), OpCounter* counter = nullptr);

    // Rebuild over the current items with new branching factors. Old node ids
    // are reported as removed in the next update; new ids never reuse them.
    void reshape(std::vector<std::size_t> branching);

    void insert(const Item& item);
    void erase(const BigInt& key);
    void source_update(UpdateOp op, const Item& item);

    HierarchyUpdate take_update();

    unsigned c() const noexcept { return static_cast<unsigned>(branching_.size()); }
    std::size_t size() const noexcept { return n_; }
    const std::vector<std::size_t>& branching() const noexcept { return branching_; }
    AccumulationValue accumulation() const { return {nodes_.at(root_).alpha}; }
    const HierNodeMap& nodes() const noexcept { return nodes_; }
    std::uint64_t root() const noexcept { return root_; }
    std::size_t target(unsigned level) const;

    ProofChain prove_chain(const BigInt& key) const;
    bool contains(const BigInt& key) const;
    // Subsets within twice their targets (root excluded), consistent values.
    bool invariants_hold() const;

    void set_counter(OpCounter* counter) noexcept { counter_ = counter; }

private:
    Hierarchy() = default;
    static Hierarchy build(const PublicParams& params, const TrapdoorKey& trapdoor, std::vector<Item> items,
                           std::vector<std::size_t> branching, RepresentativeCache& cache, Rng& rng, AppHash app_hash,
                           OpCounter* counter, std::uint64_t id_base);

    std::uint64_t new_node(unsigned level, std::uint64_t parent);
    void recompute(HierNode& node);
    void rebalance_from(std::uint64_t id);
    void split(std::uint64_t id);
    void fix_underflow(std::uint64_t id);
    void reparent_members(HierNode& node);
    std::size_t position_in_parent(const HierNode& node) const;
    void refresh();

    const PublicParams* params_ = nullptr;
    const TrapdoorKey* trapdoor_ = nullptr;
    RepresentativeCache* cache_ = nullptr;
    Rng* rng_ = nullptr;
    AppHash app_hash_;
    OpCounter* counter_ = nullptr;

    std::vector<std::size_t> branching_;
    std::size_t leaf_target_ = 1;
    std::size_t n_ = 0;
    std::uint64_t next_id_ = 0;
    std::uint64_t root_ = 0;
    HierNodeMap nodes_;

    std::set<std::uint64_t> dirty_;    // values to recompute
    std::set<std::uint64_t> touched_;  // records to ship
    std::set<std::uint64_t> removed_;
};

// Directory side: node records only, no trapdoor.
class HierarchyView {
public:
    void apply(const HierarchyUpdate& update);
    ProofChain prove_chain(const BigInt& key) const;
    bool contains(const BigInt& key) const;
    AccumulationValue accumulation() const;
    const HierNodeMap& nodes() const noexcept { return nodes_; }
    unsigned c() const noexcept { return c_; }
    std::uint64_t root() const noexcept { return root_; }
    // Leaf member with the largest key <= probe, or nullptr.
    const HierMember* floor_member(const BigInt& probe) const;
    std::size_t size() const;

private:
    HierNodeMap nodes_;
    std::uint64_t root_ = 0;
    unsigned c_ = 0;
};

// Leaf holding key (descending by smallest keys), and the key's chain.
std::uint64_t locate_leaf(const HierNodeMap& nodes, std::uint64_t root, unsigned c, const BigInt& key);
ProofChain prove_chain(const HierNodeMap& nodes, std::uint64_t root, unsigned c, const BigInt& key);

// c+1 modexps: the element link plus one per level.
bool verify_chain(const PublicParams& params, const AppHash& app_hash, const BigInt& element,
                  const ProofChain& chain, const AccumulationValue& A_top, OpCounter* counter = nullptr);

void write_hierarchy_update(std::ostream& out, const std::string& basis_line, const HierarchyUpdate& update);
HierarchyUpdate read_hierarchy_update(std::istream& in, std::string& basis_line);

// Level-order (id, parent, alpha, rep) lines, then each subset's witness vector.
void write_hierarchy_snapshot(std::ostream& out, const HierNodeMap& nodes, std::uint64_t root);

}  // namespace accdict
