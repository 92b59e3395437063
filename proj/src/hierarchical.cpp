#include "accdict/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

#include "accdict/partitioned.hpp"
#include "accdict/witness_tree.hpp"

namespace accdict {

namespace {

auto key_less = [](const HierMember& m, const BigInt& key) { return m.key < key; };

std::size_t digest_bytes(const PublicParams& params) { return (params.k + 7) / 8; }

void put(std::vector<std::uint8_t>& out, const BigInt& v, std::size_t width) {
    const auto bytes = to_bytes(v, width);
    out.insert(out.end(), bytes.begin(), bytes.end());
}

BigInt take(std::span<const std::uint8_t>& in, std::size_t width) {
    if (in.size() < width) throw error(errc::parse_error, "proof chain truncated");
    BigInt v = from_bytes(in.first(width));
    in = in.subspan(width);
    return v;
}

std::string read_nonempty(std::istream& in, const char* what) {
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return line;
    }
    throw error(errc::parse_error, std::string("missing ") + what);
}

}  // namespace

BigInt alpha_digest(const PublicParams& params, const AppHash& app_hash, const BigInt& alpha) {
    const auto bytes = to_bytes(alpha, params.residue_bytes());
    return app_hash(bytes, params.k);
}

std::vector<std::size_t> uniform_branching(std::size_t n, unsigned c) {
    if (c < 1) throw error(errc::invalid_parameter, "c must be >= 1");
    const double g = std::round(std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), 1.0 / (c + 1)));
    return std::vector<std::size_t>(c, std::max<std::size_t>(1, static_cast<std::size_t>(g)));
}

std::vector<std::size_t> branching_from_exponents(std::size_t n, std::span<const double> exponents) {
    if (exponents.empty()) throw error(errc::invalid_parameter, "branching needs at least one level");
    std::vector<std::size_t> out;
    for (double e : exponents) {
        if (!(e > 0.0) || e >= 1.0) throw error(errc::invalid_parameter, "branching exponent outside (0, 1)");
        const double g = std::round(std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), e));
        out.push_back(std::max<std::size_t>(1, static_cast<std::size_t>(g)));
    }
    return out;
}

std::vector<std::uint8_t> encode_chain(const PublicParams& params, const ProofChain& chain) {
    const std::size_t c = chain.value_reps.size();
    if (c < 1 || c > 255 || chain.values.size() != c + 1 || chain.witnesses.size() != c + 1)
        throw error(errc::invalid_parameter, "malformed proof chain");
    std::vector<std::uint8_t> out;
    out.push_back(static_cast<std::uint8_t>(c));
    put(out, chain.element, digest_bytes(params));
    put(out, chain.x, params.rep_bytes());
    for (const BigInt& v : chain.values) put(out, v, params.residue_bytes());
    for (const BigInt& r : chain.value_reps) put(out, r, params.rep_bytes());
    for (const BigInt& w : chain.witnesses) put(out, w, params.residue_bytes());
    return out;
}

ProofChain decode_chain(const PublicParams& params, std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw error(errc::parse_error, "empty proof chain");
    const std::size_t c = bytes[0];
    if (c < 1) throw error(errc::parse_error, "proof chain with c = 0");
    bytes = bytes.subspan(1);
    ProofChain chain;
    chain.element = take(bytes, digest_bytes(params));
    chain.x = take(bytes, params.rep_bytes());
    for (std::size_t i = 0; i <= c; ++i) chain.values.push_back(take(bytes, params.residue_bytes()));
    for (std::size_t i = 0; i < c; ++i) chain.value_reps.push_back(take(bytes, params.rep_bytes()));
    for (std::size_t i = 0; i <= c; ++i) chain.witnesses.push_back(take(bytes, params.residue_bytes()));
    if (!bytes.empty()) throw error(errc::parse_error, "trailing bytes after proof chain");
    return chain;
}

std::uint64_t locate_leaf(const HierNodeMap& nodes, std::uint64_t root, unsigned c, const BigInt& key) {
    auto it = nodes.find(root);
    if (it == nodes.end()) throw error(errc::not_initialized, "hierarchy has no root");
    const HierNode* node = &it->second;
    while (node->level < c) {
        const auto& ms = node->members;
        if (ms.empty()) throw error(errc::not_a_member, "empty inner subset");
        auto pos = std::upper_bound(ms.begin(), ms.end(), key,
                                    [](const BigInt& k, const HierMember& m) { return k < m.key; });
        if (pos != ms.begin()) --pos;
        node = &nodes.at(pos->child);
    }
    return node->id;
}

ProofChain prove_chain(const HierNodeMap& nodes, std::uint64_t root, unsigned c, const BigInt& key) {
    const HierNode* node = &nodes.at(locate_leaf(nodes, root, c, key));
    auto it = std::lower_bound(node->members.begin(), node->members.end(), key, key_less);
    if (it == node->members.end() || it->key != key) throw error(errc::not_a_member, "key not in the hierarchy");

    ProofChain chain;
    chain.element = it->digest;
    chain.x = it->rep;
    chain.witnesses.push_back(it->witness);
    chain.values.push_back(node->alpha);
    while (node->id != root) {
        const HierNode& parent = nodes.at(node->parent);
        auto m = std::find_if(parent.members.begin(), parent.members.end(),
                              [&](const HierMember& hm) { return hm.child == node->id; });
        if (m == parent.members.end()) throw error(errc::not_a_member, "subset missing from its parent");
        chain.value_reps.push_back(node->alpha_rep);
        chain.witnesses.push_back(m->witness);
        chain.values.push_back(parent.alpha);
        node = &parent;
    }
    return chain;
}

bool verify_chain(const PublicParams& params, const AppHash& app_hash, const BigInt& element,
                  const ProofChain& chain, const AccumulationValue& A_top, OpCounter* counter) {
    const std::size_t c = chain.value_reps.size();
    if (c < 1 || chain.values.size() != c + 1 || chain.witnesses.size() != c + 1) return false;
    if (chain.element != element) return false;
    for (const BigInt& v : chain.values) {
        if (sgn(v) <= 0 || v >= params.N) return false;
    }
    if (chain.values[c] != A_top.value) return false;
    try {
        if (!verify(params, element, chain.x, chain.witnesses[0], {chain.values[0]}, counter)) return false;
        for (std::size_t i = 0; i < c; ++i) {
            const BigInt d = alpha_digest(params, app_hash, chain.values[i]);
            if (!verify(params, d, chain.value_reps[i], chain.witnesses[i + 1], {chain.values[i + 1]}, counter))
                return false;
        }
    } catch (const error&) {
        return false;
    }
    return true;
}

Hierarchy Hierarchy::build(const PublicParams& params, const TrapdoorKey& trapdoor, std::vector<Item> items,
                           std::vector<std::size_t> branching, RepresentativeCache& cache, Rng& rng,
                           AppHash app_hash, OpCounter* counter) {
    return build(params, trapdoor, std::move(items), std::move(branching), cache, rng, std::move(app_hash), counter, 0);
}

Hierarchy Hierarchy::build(const PublicParams& params, const TrapdoorKey& trapdoor, std::vector<Item> items,
                           std::vector<std::size_t> branching, RepresentativeCache& cache, Rng& rng,
                           AppHash app_hash, OpCounter* counter, std::uint64_t id_base) {
    const std::size_t n = items.size();
    if (branching.empty()) throw error(errc::invalid_parameter, "c must be >= 1");
    if (n < 1) throw error(errc::invalid_parameter, "hierarchy needs n >= 1");
    std::size_t leaves = 1;
    for (std::size_t g : branching) {
        if (g < 1) throw error(errc::invalid_parameter, "branching factors must be >= 1");
        leaves *= g;
        if (leaves > n) throw error(errc::invalid_parameter, "more leaf subsets than items");
    }
    check_trapdoor(params, trapdoor);
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.key < b.key; });
    for (std::size_t i = 1; i < n; ++i) {
        if (items[i].key == items[i - 1].key) throw error(errc::duplicate, "duplicate key in build input");
    }

    Hierarchy h;
    h.params_ = &params;
    h.trapdoor_ = &trapdoor;
    h.cache_ = &cache;
    h.rng_ = &rng;
    h.app_hash_ = std::move(app_hash);
    h.counter_ = counter;
    h.branching_ = std::move(branching);
    h.leaf_target_ = (n + leaves - 1) / leaves;
    h.n_ = n;
    h.next_id_ = id_base;

    const unsigned c = h.c();
    // Top-down: each subset splits its contiguous range into near-equal chunks.
    auto grow = [&](auto& self, unsigned level, std::uint64_t parent, std::size_t lo, std::size_t hi) -> std::uint64_t {
        const std::uint64_t id = h.new_node(level, parent);
        if (level == 0) {
            h.root_ = id;
            h.nodes_[id].parent = id;
        }
        if (level == c) {
            auto& ms = h.nodes_[id].members;
            for (std::size_t i = lo; i < hi; ++i) ms.push_back(HierMember{items[i].key, items[i].digest, items[i].rep, 0, 0});
            return id;
        }
        const std::size_t g = h.branching_[level];
        const std::size_t count = hi - lo;
        std::size_t pos = lo;
        for (std::size_t j = 0; j < g; ++j) {
            const std::size_t take = count / g + (j < count % g ? 1 : 0);
            const std::uint64_t child = self(self, level + 1, id, pos, pos + take);
            h.nodes_[id].members.push_back(HierMember{items[pos].key, 0, 0, 0, child});
            pos += take;
        }
        return id;
    };
    grow(grow, 0, 0, 0, n);
    for (const auto& [id, node] : h.nodes_) h.dirty_.insert(id);
    h.refresh();
    return h;
}

void Hierarchy::reshape(std::vector<std::size_t> branching) {
    std::vector<Item> items;
    items.reserve(n_);
    for (const auto& [id, node] : nodes_) {
        if (node.level != c()) continue;
        for (const HierMember& m : node.members) items.push_back(Item{m.key, m.digest, m.rep});
    }
    std::set<std::uint64_t> gone = std::move(removed_);
    for (const auto& [id, node] : nodes_) gone.insert(id);
    const std::uint64_t id_base = next_id_;
    Hierarchy fresh = build(*params_, *trapdoor_, std::move(items), std::move(branching), *cache_, *rng_, app_hash_,
                            counter_, id_base);
    *this = std::move(fresh);
    removed_ = std::move(gone);
}

std::uint64_t Hierarchy::new_node(unsigned level, std::uint64_t parent) {
    const std::uint64_t id = ++next_id_;
    HierNode& node = nodes_[id];
    node.id = id;
    node.parent = parent;
    node.level = level;
    touched_.insert(id);
    return id;
}

std::size_t Hierarchy::target(unsigned level) const {
    if (level == 0) return 0;
    if (level >= c()) return leaf_target_;
    return branching_[level];
}

void Hierarchy::recompute(HierNode& node) {
    std::vector<BigInt> reps;
    reps.reserve(node.members.size());
    for (const HierMember& m : node.members) reps.push_back(m.rep);
    if (reps.empty()) {
        node.alpha = params_->a;
    } else {
        WitnessTree tree = WitnessTree::build_exponent_tree(*trapdoor_, reps, counter_);
        node.alpha = modpow(params_->a, tree.root_exponent(), params_->N, counter_);
        std::vector<BigInt> w = tree.propagate_witnesses(*params_, counter_);
        for (std::size_t i = 0; i < w.size(); ++i) node.members[i].witness = std::move(w[i]);
    }
    if (node.id != root_) {
        node.alpha_digest = alpha_digest(*params_, app_hash_, node.alpha);
        node.alpha_rep = cache_->get_or_find(node.alpha_digest, *rng_);
    }
}

void Hierarchy::refresh() {
    for (unsigned level = c() + 1; level-- > 0;) {
        std::vector<std::uint64_t> here;
        for (std::uint64_t id : dirty_) {
            if (nodes_.at(id).level == level) here.push_back(id);
        }
        for (std::uint64_t id : here) {
            HierNode& node = nodes_.at(id);
            recompute(node);
            touched_.insert(id);
            dirty_.erase(id);
            if (id == root_) continue;
            HierNode& parent = nodes_.at(node.parent);
            for (HierMember& m : parent.members) {
                if (m.child != id) continue;
                if (!node.members.empty()) m.key = node.members.front().key;
                m.digest = node.alpha_digest;
                m.rep = node.alpha_rep;
            }
            dirty_.insert(parent.id);
        }
    }
}

void Hierarchy::reparent_members(HierNode& node) {
    if (node.level >= c()) return;
    for (const HierMember& m : node.members) {
        HierNode& child = nodes_.at(m.child);
        if (child.parent != node.id) {
            child.parent = node.id;
            touched_.insert(child.id);
        }
    }
}

std::size_t Hierarchy::position_in_parent(const HierNode& node) const {
    const HierNode& parent = nodes_.at(node.parent);
    for (std::size_t i = 0; i < parent.members.size(); ++i) {
        if (parent.members[i].child == node.id) return i;
    }
    throw error(errc::not_a_member, "subset missing from its parent");
}

void Hierarchy::split(std::uint64_t id) {
    const unsigned level = nodes_.at(id).level;
    const std::uint64_t parent_id = nodes_.at(id).parent;
    const std::uint64_t upper_id = new_node(level, parent_id);
    HierNode& node = nodes_.at(id);
    HierNode& upper = nodes_.at(upper_id);
    const std::size_t keep = (node.members.size() + 1) / 2;
    upper.members.assign(std::make_move_iterator(node.members.begin() + static_cast<std::ptrdiff_t>(keep)),
                         std::make_move_iterator(node.members.end()));
    node.members.resize(keep);
    reparent_members(upper);

    HierNode& parent = nodes_.at(parent_id);
    const std::size_t pos = position_in_parent(node);
    parent.members.insert(parent.members.begin() + static_cast<std::ptrdiff_t>(pos + 1),
                          HierMember{upper.members.front().key, 0, 0, 0, upper_id});
    dirty_.insert(id);
    dirty_.insert(upper_id);
    dirty_.insert(parent_id);
}

void Hierarchy::fix_underflow(std::uint64_t id) {
    HierNode& node = nodes_.at(id);
    HierNode& parent = nodes_.at(node.parent);
    const std::size_t pos = position_in_parent(node);
    const SizeBounds bounds{target(node.level)};
    std::optional<std::size_t> left, right;
    if (pos > 0) left = nodes_.at(parent.members[pos - 1].child).members.size();
    if (pos + 1 < parent.members.size()) right = nodes_.at(parent.members[pos + 1].child).members.size();
    const std::size_t self = node.members.size();

    auto absorb = [&](std::size_t keep_pos) {
        HierNode& keep = nodes_.at(parent.members[keep_pos].child);
        const std::uint64_t gone_id = parent.members[keep_pos + 1].child;
        HierNode& gone = nodes_.at(gone_id);
        keep.members.insert(keep.members.end(), std::make_move_iterator(gone.members.begin()),
                            std::make_move_iterator(gone.members.end()));
        reparent_members(keep);
        parent.members.erase(parent.members.begin() + static_cast<std::ptrdiff_t>(keep_pos + 1));
        dirty_.insert(keep.id);
        dirty_.erase(gone_id);
        touched_.erase(gone_id);
        removed_.insert(gone_id);
        nodes_.erase(gone_id);
    };

    switch (choose_underflow_fix(self, left, right, bounds)) {
    case UnderflowFix::none:
        return;
    case UnderflowFix::merge_left:
        absorb(pos - 1);
        break;
    case UnderflowFix::merge_right:
        absorb(pos);
        break;
    case UnderflowFix::borrow_left: {
        HierNode& from = nodes_.at(parent.members[pos - 1].child);
        const std::size_t need = bounds.borrow_target() - self;
        const auto first = from.members.end() - static_cast<std::ptrdiff_t>(need);
        node.members.insert(node.members.begin(), std::make_move_iterator(first),
                            std::make_move_iterator(from.members.end()));
        from.members.erase(first, from.members.end());
        reparent_members(node);
        parent.members[pos].key = node.members.front().key;
        dirty_.insert(from.id);
        dirty_.insert(id);
        break;
    }
    case UnderflowFix::borrow_right: {
        HierNode& from = nodes_.at(parent.members[pos + 1].child);
        const std::size_t need = bounds.borrow_target() - self;
        const auto last = from.members.begin() + static_cast<std::ptrdiff_t>(need);
        node.members.insert(node.members.end(), std::make_move_iterator(from.members.begin()),
                            std::make_move_iterator(last));
        from.members.erase(from.members.begin(), last);
        reparent_members(node);
        parent.members[pos + 1].key = from.members.front().key;
        dirty_.insert(from.id);
        dirty_.insert(id);
        break;
    }
    }
    dirty_.insert(parent.id);
}

void Hierarchy::rebalance_from(std::uint64_t id) {
    std::uint64_t cur = id;
    while (cur != root_) {
        const HierNode& node = nodes_.at(cur);
        const std::uint64_t parent = node.parent;
        const SizeBounds bounds{target(node.level)};
        const std::size_t s = node.members.size();
        if (bounds.too_large(s)) {
            split(cur);
        } else if (bounds.too_small(s) && nodes_.at(parent).members.size() > 1) {
            fix_underflow(cur);
        } else {
            break;
        }
        cur = parent;
    }
}

void Hierarchy::insert(const Item& item) {
    HierNode& leaf = nodes_.at(locate_leaf(nodes_, root_, c(), item.key));
    auto it = std::lower_bound(leaf.members.begin(), leaf.members.end(), item.key, key_less);
    if (it != leaf.members.end() && it->key == item.key) throw error(errc::duplicate, "key already in the dictionary");
    leaf.members.insert(it, HierMember{item.key, item.digest, item.rep, 0, 0});
    ++n_;
    dirty_.insert(leaf.id);
    rebalance_from(leaf.id);
    refresh();
}

void Hierarchy::erase(const BigInt& key) {
    HierNode& leaf = nodes_.at(locate_leaf(nodes_, root_, c(), key));
    auto it = std::lower_bound(leaf.members.begin(), leaf.members.end(), key, key_less);
    if (it == leaf.members.end() || it->key != key) throw error(errc::not_a_member, "key not in the dictionary");
    leaf.members.erase(it);
    --n_;
    std::uint64_t cur = leaf.id;
    // Drop emptied subsets; their parents lose a member and may empty in turn.
    while (cur != root_ && nodes_.at(cur).members.empty()) {
        const std::uint64_t parent_id = nodes_.at(cur).parent;
        HierNode& parent = nodes_.at(parent_id);
        parent.members.erase(parent.members.begin() + static_cast<std::ptrdiff_t>(position_in_parent(nodes_.at(cur))));
        dirty_.erase(cur);
        touched_.erase(cur);
        removed_.insert(cur);
        nodes_.erase(cur);
        cur = parent_id;
    }
    dirty_.insert(cur);
    rebalance_from(cur);
    refresh();
}

void Hierarchy::source_update(UpdateOp op, const Item& item) {
    if (op == UpdateOp::insert) insert(item);
    else erase(item.key);
}

HierarchyUpdate Hierarchy::take_update() {
    HierarchyUpdate up;
    up.root = root_;
    up.c = c();
    for (std::uint64_t id : touched_) {
        auto it = nodes_.find(id);
        if (it != nodes_.end()) up.nodes.push_back(it->second);
    }
    up.removed.assign(removed_.begin(), removed_.end());
    touched_.clear();
    removed_.clear();
    return up;
}

ProofChain Hierarchy::prove_chain(const BigInt& key) const { return accdict::prove_chain(nodes_, root_, c(), key); }

bool Hierarchy::contains(const BigInt& key) const {
    const HierNode& leaf = nodes_.at(locate_leaf(nodes_, root_, c(), key));
    auto it = std::lower_bound(leaf.members.begin(), leaf.members.end(), key, key_less);
    return it != leaf.members.end() && it->key == key;
}

bool Hierarchy::invariants_hold() const {
    std::size_t items = 0;
    for (const auto& [id, node] : nodes_) {
        if (node.id != id) return false;
        if (id != root_) {
            const auto pit = nodes_.find(node.parent);
            if (pit == nodes_.end() || pit->second.level + 1 != node.level) return false;
            const HierNode& parent = pit->second;
            const SizeBounds bounds{target(node.level)};
            if (bounds.too_large(node.members.size())) return false;
            if (bounds.too_small(node.members.size()) && parent.members.size() > 1) return false;
            auto m = std::find_if(parent.members.begin(), parent.members.end(),
                                  [&](const HierMember& hm) { return hm.child == id; });
            if (m == parent.members.end()) return false;
            if (m->digest != node.alpha_digest || m->rep != node.alpha_rep) return false;
            if (!node.members.empty() && m->key != node.members.front().key) return false;
            if (node.alpha_digest != alpha_digest(*params_, app_hash_, node.alpha)) return false;
        }
        if (node.level == c()) items += node.members.size();
        BigInt e = 1;
        for (std::size_t i = 0; i < node.members.size(); ++i) {
            if (i > 0 && !(node.members[i - 1].key < node.members[i].key)) return false;
            if ((node.level == c()) != (node.members[i].child == 0)) return false;
            e = (e * node.members[i].rep) % trapdoor_->phi;
        }
        BigInt alpha;
        mpz_powm(alpha.get_mpz_t(), params_->a.get_mpz_t(), e.get_mpz_t(), params_->N.get_mpz_t());
        if (alpha != node.alpha) return false;
        for (const HierMember& m : node.members) {
            BigInt check;
            mpz_powm(check.get_mpz_t(), m.witness.get_mpz_t(), m.rep.get_mpz_t(), params_->N.get_mpz_t());
            if (check != node.alpha) return false;
        }
    }
    return items == n_;
}

void HierarchyView::apply(const HierarchyUpdate& update) {
    for (std::uint64_t id : update.removed) nodes_.erase(id);
    for (const HierNode& node : update.nodes) nodes_[node.id] = node;
    root_ = update.root;
    c_ = update.c;
}

ProofChain HierarchyView::prove_chain(const BigInt& key) const { return accdict::prove_chain(nodes_, root_, c_, key); }

bool HierarchyView::contains(const BigInt& key) const {
    const HierNode& leaf = nodes_.at(locate_leaf(nodes_, root_, c_, key));
    auto it = std::lower_bound(leaf.members.begin(), leaf.members.end(), key, key_less);
    return it != leaf.members.end() && it->key == key;
}

const HierMember* HierarchyView::floor_member(const BigInt& probe) const {
    if (nodes_.empty()) return nullptr;
    const HierNode& leaf = nodes_.at(locate_leaf(nodes_, root_, c_, probe));
    auto it = std::upper_bound(leaf.members.begin(), leaf.members.end(), probe,
                               [](const BigInt& k, const HierMember& m) { return k < m.key; });
    if (it == leaf.members.begin()) return nullptr;
    return &*std::prev(it);
}

std::size_t HierarchyView::size() const {
    std::size_t n = 0;
    for (const auto& [id, node] : nodes_) {
        if (node.level == c_) n += node.members.size();
    }
    return n;
}

AccumulationValue HierarchyView::accumulation() const {
    auto it = nodes_.find(root_);
    if (it == nodes_.end()) throw error(errc::not_initialized, "hierarchy view is empty");
    return {it->second.alpha};
}

void write_hierarchy_update(std::ostream& out, const std::string& basis_line, const HierarchyUpdate& update) {
    out << basis_line << '\n'
        << "hier " << update.root << ' ' << update.c << ' ' << update.nodes.size() << ' ' << update.removed.size()
        << '\n';
    out << "removed";
    for (std::uint64_t id : update.removed) out << ' ' << id;
    out << '\n';
    for (const HierNode& node : update.nodes) {
        out << "node " << node.id << ' ' << node.parent << ' ' << node.level << ' ' << to_hex(node.alpha) << ' '
            << to_hex(node.alpha_digest) << ' ' << to_hex(node.alpha_rep) << ' ' << node.members.size() << '\n';
        for (const HierMember& m : node.members) {
            out << to_hex(m.key) << ' ' << to_hex(m.digest) << ' ' << to_hex(m.rep) << ' ' << to_hex(m.witness)
                << ' ' << m.child << '\n';
        }
    }
}

HierarchyUpdate read_hierarchy_update(std::istream& in, std::string& basis_line) {
    basis_line = read_nonempty(in, "basis line");
    HierarchyUpdate up;
    std::size_t node_count = 0, removed_count = 0;
    {
        std::istringstream ls(read_nonempty(in, "hierarchy header"));
        std::string tag;
        if (!(ls >> tag >> up.root >> up.c >> node_count >> removed_count) || tag != "hier")
            throw error(errc::parse_error, "bad hierarchy header");
    }
    {
        std::istringstream ls(read_nonempty(in, "removed line"));
        std::string tag;
        if (!(ls >> tag) || tag != "removed") throw error(errc::parse_error, "bad removed line");
        std::uint64_t id;
        while (ls >> id) up.removed.push_back(id);
        if (up.removed.size() != removed_count) throw error(errc::parse_error, "removed count mismatch");
    }
    for (std::size_t i = 0; i < node_count; ++i) {
        std::istringstream ls(read_nonempty(in, "node line"));
        std::string tag, alpha, digest, rep;
        HierNode node;
        std::size_t members = 0;
        if (!(ls >> tag >> node.id >> node.parent >> node.level >> alpha >> digest >> rep >> members) || tag != "node")
            throw error(errc::parse_error, "bad node line");
        node.alpha = from_hex(alpha);
        node.alpha_digest = from_hex(digest);
        node.alpha_rep = from_hex(rep);
        for (std::size_t j = 0; j < members; ++j) {
            std::istringstream ms(read_nonempty(in, "member line"));
            std::string key, d, r, w;
            HierMember m;
            if (!(ms >> key >> d >> r >> w >> m.child)) throw error(errc::parse_error, "bad member line");
            m.key = from_hex(key);
            m.digest = from_hex(d);
            m.rep = from_hex(r);
            m.witness = from_hex(w);
            node.members.push_back(std::move(m));
        }
        up.nodes.push_back(std::move(node));
    }
    return up;
}

void write_hierarchy_snapshot(std::ostream& out, const HierNodeMap& nodes, std::uint64_t root) {
    std::vector<const HierNode*> order;
    std::deque<std::uint64_t> queue{root};
    while (!queue.empty()) {
        const HierNode& node = nodes.at(queue.front());
        queue.pop_front();
        order.push_back(&node);
        for (const HierMember& m : node.members) {
            if (m.child != 0) queue.push_back(m.child);
        }
    }
    for (const HierNode* node : order) {
        out << node->id << ' ' << node->parent << ' ' << to_hex(node->alpha) << ' ' << to_hex(node->alpha_rep) << '\n';
    }
    for (const HierNode* node : order) {
        std::vector<WitnessEntry> entries;
        for (const HierMember& m : node->members) entries.push_back(WitnessEntry{m.digest, m.rep, m.witness});
        write_witness_vector(out, "subset " + std::to_string(node->id), entries);
    }
}

}  // namespace accdict
