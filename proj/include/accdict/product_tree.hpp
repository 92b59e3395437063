#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "accdict/item.hpp"

namespace accdict {

// Treap keyed by Item::key. Every node caches the product of the
// representatives in its subtree mod `modulus`, so an insert or erase touches
// O(log n) cached products.
class ProductTree {
public:
    ProductTree();
    ProductTree(BigInt modulus, std::uint64_t seed, OpCounter* counter = nullptr);
    ProductTree(ProductTree&&) noexcept;
    ProductTree& operator=(ProductTree&&) noexcept;
    ~ProductTree();

    std::size_t size() const noexcept;
    bool empty() const noexcept { return size() == 0; }
    // Product of all representatives mod modulus; 1 when empty.
    BigInt product() const;

    void insert(Item item);
    Item erase(const BigInt& key);
    const Item* find(const BigInt& key) const;

    const Item& min() const;
    const Item& max() const;

    // Detach the first / last `count` items into a new tree.
    ProductTree split_first(std::size_t count);
    ProductTree split_last(std::size_t count);
    // Attach a tree whose keys all exceed (precede) this tree's keys.
    void append(ProductTree&& other);
    void prepend(ProductTree&& other);

    std::vector<Item> items() const;
    void set_counter(OpCounter* counter) noexcept { counter_ = counter; }
    // Checks ordering, sizes and cached products; used by tests.
    bool check_invariants() const;

private:
    struct Node;
    using Ptr = std::unique_ptr<Node>;

    void pull(Node& n);
    Ptr merge(Ptr a, Ptr b);
    std::pair<Ptr, Ptr> split_key(Ptr t, const BigInt& key);
    std::pair<Ptr, Ptr> split_count(Ptr t, std::size_t count);
    ProductTree detached(Ptr root) const;

    BigInt modulus_ = 2;
    std::uint64_t prio_state_ = 0;
    OpCounter* counter_ = nullptr;
    Ptr root_;
};

}  // namespace accdict
