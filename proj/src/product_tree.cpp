#include "accdict/product_tree.hpp"

#include <functional>

namespace accdict {

struct ProductTree::Node {
    Item item;
    std::uint64_t prio = 0;
    std::size_t size = 1;
    BigInt product;
    Ptr left;
    Ptr right;
};

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace

ProductTree::ProductTree(BigInt modulus, std::uint64_t seed, OpCounter* counter)
    : modulus_(std::move(modulus)), prio_state_(seed), counter_(counter) {
    if (modulus_ < 2) throw error(errc::invalid_modulus, "product tree modulus must be >= 2");
}

ProductTree::~ProductTree() = default;
ProductTree::ProductTree() = default;
ProductTree::ProductTree(ProductTree&&) noexcept = default;
ProductTree& ProductTree::operator=(ProductTree&&) noexcept = default;

std::size_t ProductTree::size() const noexcept { return root_ ? root_->size : 0; }

BigInt ProductTree::product() const { return root_ ? root_->product : BigInt(1); }

void ProductTree::pull(Node& n) {
    n.size = 1;
    n.product = n.item.rep % modulus_;
    if (n.left) {
        n.size += n.left->size;
        n.product = modmul(n.left->product, n.product, modulus_, counter_);
    }
    if (n.right) {
        n.size += n.right->size;
        n.product = modmul(n.product, n.right->product, modulus_, counter_);
    }
}

ProductTree::Ptr ProductTree::merge(Ptr a, Ptr b) {
    if (!a) return b;
    if (!b) return a;
    if (a->prio >= b->prio) {
        a->right = merge(std::move(a->right), std::move(b));
        pull(*a);
        return a;
    }
    b->left = merge(std::move(a), std::move(b->left));
    pull(*b);
    return b;
}

// (keys < key, keys >= key)
std::pair<ProductTree::Ptr, ProductTree::Ptr> ProductTree::split_key(Ptr t, const BigInt& key) {
    if (!t) return {nullptr, nullptr};
    if (t->item.key < key) {
        auto [l, r] = split_key(std::move(t->right), key);
        t->right = std::move(l);
        pull(*t);
        return {std::move(t), std::move(r)};
    }
    auto [l, r] = split_key(std::move(t->left), key);
    t->left = std::move(r);
    pull(*t);
    return {std::move(l), std::move(t)};
}

std::pair<ProductTree::Ptr, ProductTree::Ptr> ProductTree::split_count(Ptr t, std::size_t count) {
    if (!t) return {nullptr, nullptr};
    const std::size_t left_size = t->left ? t->left->size : 0;
    if (count <= left_size) {
        auto [l, r] = split_count(std::move(t->left), count);
        t->left = std::move(r);
        pull(*t);
        return {std::move(l), std::move(t)};
    }
    auto [l, r] = split_count(std::move(t->right), count - left_size - 1);
    t->right = std::move(l);
    pull(*t);
    return {std::move(t), std::move(r)};
}

void ProductTree::insert(Item item) {
    auto node = std::make_unique<Node>();
    node->prio = splitmix64(prio_state_);
    node->item = std::move(item);
    auto [l, r] = split_key(std::move(root_), node->item.key);
    if (r) {
        const Node* m = r.get();
        while (m->left) m = m->left.get();
        if (m->item.key == node->item.key) {
            root_ = merge(std::move(l), std::move(r));
            throw error(errc::duplicate, "key already present in group");
        }
    }
    pull(*node);
    root_ = merge(merge(std::move(l), std::move(node)), std::move(r));
}

Item ProductTree::erase(const BigInt& key) {
    auto [l, rest] = split_key(std::move(root_), key);
    auto [mid, r] = split_count(std::move(rest), 1);
    if (!mid || mid->item.key != key) {
        root_ = merge(std::move(l), merge(std::move(mid), std::move(r)));
        throw error(errc::not_a_member, "key not present in group");
    }
    Item out = std::move(mid->item);
    root_ = merge(std::move(l), std::move(r));
    return out;
}

const Item* ProductTree::find(const BigInt& key) const {
    const Node* n = root_.get();
    while (n) {
        if (key < n->item.key) n = n->left.get();
        else if (n->item.key < key) n = n->right.get();
        else return &n->item;
    }
    return nullptr;
}

const Item& ProductTree::min() const {
    if (!root_) throw error(errc::not_a_member, "empty tree");
    const Node* n = root_.get();
    while (n->left) n = n->left.get();
    return n->item;
}

const Item& ProductTree::max() const {
    if (!root_) throw error(errc::not_a_member, "empty tree");
    const Node* n = root_.get();
    while (n->right) n = n->right.get();
    return n->item;
}

ProductTree ProductTree::detached(Ptr root) const {
    ProductTree t(modulus_, prio_state_ ^ 0x5bd1e995u, counter_);
    t.root_ = std::move(root);
    return t;
}

ProductTree ProductTree::split_first(std::size_t count) {
    auto [l, r] = split_count(std::move(root_), count);
    root_ = std::move(r);
    return detached(std::move(l));
}

ProductTree ProductTree::split_last(std::size_t count) {
    const std::size_t n = size();
    auto [l, r] = split_count(std::move(root_), count >= n ? 0 : n - count);
    root_ = std::move(l);
    return detached(std::move(r));
}

void ProductTree::append(ProductTree&& other) {
    if (other.root_ && root_ && !(max().key < other.min().key))
        throw error(errc::invalid_parameter, "append requires larger keys");
    root_ = merge(std::move(root_), std::move(other.root_));
}

void ProductTree::prepend(ProductTree&& other) {
    if (other.root_ && root_ && !(other.max().key < min().key))
        throw error(errc::invalid_parameter, "prepend requires smaller keys");
    root_ = merge(std::move(other.root_), std::move(root_));
}

std::vector<Item> ProductTree::items() const {
    std::vector<Item> out;
    out.reserve(size());
    std::function<void(const Node*)> walk = [&](const Node* n) {
        if (!n) return;
        walk(n->left.get());
        out.push_back(n->item);
        walk(n->right.get());
    };
    walk(root_.get());
    return out;
}

bool ProductTree::check_invariants() const {
    bool ok = true;
    std::function<void(const Node*, const BigInt*, const BigInt*)> walk =
        [&](const Node* n, const BigInt* lo, const BigInt* hi) {
            if (!n || !ok) return;
            if ((lo && !(*lo < n->item.key)) || (hi && !(n->item.key < *hi))) ok = false;
            if (n->left && n->left->prio > n->prio) ok = false;
            if (n->right && n->right->prio > n->prio) ok = false;
            std::size_t size = 1;
            BigInt prod = n->item.rep % modulus_;
            if (n->left) {
                size += n->left->size;
                prod = (n->left->product * prod) % modulus_;
            }
            if (n->right) {
                size += n->right->size;
                prod = (prod * n->right->product) % modulus_;
            }
            if (size != n->size || prod != n->product) ok = false;
            walk(n->left.get(), lo, &n->item.key);
            walk(n->right.get(), &n->item.key, hi);
        };
    walk(root_.get(), nullptr, nullptr);
    return ok;
}

}  // namespace accdict
