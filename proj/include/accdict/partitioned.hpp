#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "accdict/accumulator.hpp"
#include "accdict/item.hpp"
#include "accdict/product_tree.hpp"

namespace accdict {

// Group-size rule shared by the partitioned and hierarchical schemes. With
// target m, a group is healthy while m/2 <= size <= 2m.
struct SizeBounds {
    std::size_t target = 0;

    bool too_small(std::size_t s) const { return 2 * s < target; }
    bool too_large(std::size_t s) const { return s > 2 * target; }
    bool can_merge(std::size_t a, std::size_t b) const { return a + b <= 2 * target; }
    // ceil(3m/4)
    std::size_t borrow_target() const { return (3 * target + 3) / 4; }
};

enum class UnderflowFix { none, merge_left, merge_right, borrow_left, borrow_right };

// Merge with a neighbour when the union fits, otherwise borrow. Between two
// viable neighbours the smaller one wins; equal sizes go left.
UnderflowFix choose_underflow_fix(std::size_t self, std::optional<std::size_t> left,
                                  std::optional<std::size_t> right, const SizeBounds& bounds);

struct GroupDelta {
    std::size_t index = 0;
    BigInt B;
    std::vector<Item> added;
    std::vector<BigInt> removed;
    friend bool operator==(const GroupDelta&, const GroupDelta&) = default;
};

// What a directory receives: the new accumulation, every B_j, and per-group
// membership changes relative to group j of the previous update.
struct PartitionUpdate {
    AccumulationValue A;
    std::vector<GroupDelta> groups;
    friend bool operator==(const PartitionUpdate&, const PartitionUpdate&) = default;
};

// Source-side state of the parameterized scheme. Groups are contiguous key
// ranges, each backed by a product tree holding y_j = prod reps mod phi.
class PartitionState {
public:
    static PartitionState build(const PublicParams& params, const TrapdoorKey& trapdoor,
                                std::vector<Item> items, std::size_t p, OpCounter* counter = nullptr);

    // Insert or delete one item: product tree update, rebalancing when a size
    // bound breaks, then all B_j and A recomputed with the trapdoor.
    void source_update(UpdateOp op, const Item& item);
    void insert(const Item& item) { source_update(UpdateOp::insert, item); }
    void erase(const BigInt& key);

    // Changes since the previous call (or since build for the first call).
    PartitionUpdate take_update();

    // Spread the current items evenly over p groups again.
    void redistribute(std::size_t p);

    std::size_t p() const noexcept { return p_; }
    std::size_t size() const noexcept { return n_; }
    std::size_t group_count() const noexcept { return groups_.size(); }
    std::size_t group_size(std::size_t j) const { return groups_.at(j).tree.size(); }
    BigInt group_product(std::size_t j) const { return groups_.at(j).tree.product(); }
    std::vector<Item> group_items(std::size_t j) const { return groups_.at(j).tree.items(); }
    const std::vector<BigInt>& B() const noexcept { return B_; }
    const AccumulationValue& accumulation() const noexcept { return A_; }
    std::size_t find_group(const BigInt& key) const;
    bool contains(const BigInt& key) const;

    SizeBounds bounds() const;
    // Size bound per group plus range ordering and cached products.
    bool invariants_hold() const;

    // Smallest and largest group sizes, from the size index.
    std::size_t min_group_size() const;
    std::size_t max_group_size() const;

    void set_counter(OpCounter* counter);

private:
    struct Group {
        std::uint64_t id = 0;
        ProductTree tree;
    };

    PartitionState(const PublicParams& params, const TrapdoorKey& trapdoor, std::size_t p, OpCounter* counter);

    Group make_group();
    void touch(std::size_t j);
    void rebalance();
    void fix_underflow(std::size_t j);
    void split_group(std::size_t j);
    void recompute_accumulations();
    void index_insert(const Group& g);
    void index_erase(const Group& g);
    std::size_t index_of(std::uint64_t id) const;

    const PublicParams* params_;
    const TrapdoorKey* trapdoor_;
    std::size_t p_;
    OpCounter* counter_;
    std::size_t n_ = 0;
    std::uint64_t next_id_ = 0;
    std::vector<Group> groups_;
    std::set<std::pair<std::size_t, std::uint64_t>> size_index_;
    std::vector<BigInt> B_;
    AccumulationValue A_;
    std::vector<std::vector<BigInt>> committed_;
    std::set<std::uint64_t> dirty_ids_;
    std::size_t dirty_from_ = 0;
};

// Directory-side mirror: member lists and B_j, never y_j or phi.
class PartitionView {
public:
    void apply(const PartitionUpdate& update);

    // A_i = B_j^(prod of the other reps in group j): |Y_j| - 1 modexps.
    Witness query_witness(const PublicParams& params, const BigInt& key, OpCounter* counter = nullptr) const;

    std::size_t group_count() const noexcept { return groups_.size(); }
    const AccumulationValue& accumulation() const noexcept { return A_; }
    std::size_t locate(const BigInt& key) const;
    // Member with the largest key <= probe, or nullptr.
    const Item* floor_item(const BigInt& probe) const;
    std::size_t size() const;

private:
    struct Group {
        BigInt B;
        std::vector<Item> members;  // sorted by key
    };
    std::vector<Group> groups_;
    AccumulationValue A_;
};

// Text form: one line per group, "j B_j +key:digest:rep ... -key ...".
void write_partition_update(std::ostream& out, const std::string& basis_line, const PartitionUpdate& update);
PartitionUpdate read_partition_update(std::istream& in, std::string& basis_line);

}  // namespace accdict
