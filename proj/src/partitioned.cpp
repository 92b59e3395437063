#include "accdict/partitioned.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace accdict {

UnderflowFix choose_underflow_fix(std::size_t self, std::optional<std::size_t> left,
                                  std::optional<std::size_t> right, const SizeBounds& bounds) {
    if (!bounds.too_small(self)) return UnderflowFix::none;
    const bool merge_l = left && bounds.can_merge(self, *left);
    const bool merge_r = right && bounds.can_merge(self, *right);
    if (merge_l && merge_r) return *right < *left ? UnderflowFix::merge_right : UnderflowFix::merge_left;
    if (merge_l) return UnderflowFix::merge_left;
    if (merge_r) return UnderflowFix::merge_right;
    if (left && right) return *right < *left ? UnderflowFix::borrow_right : UnderflowFix::borrow_left;
    if (left) return UnderflowFix::borrow_left;
    if (right) return UnderflowFix::borrow_right;
    return UnderflowFix::none;
}

PartitionState::PartitionState(const PublicParams& params, const TrapdoorKey& trapdoor, std::size_t p,
                               OpCounter* counter)
    : params_(&params), trapdoor_(&trapdoor), p_(p), counter_(counter) {}

PartitionState::Group PartitionState::make_group() {
    Group g;
    g.id = next_id_++;
    g.tree = ProductTree(trapdoor_->phi, 0x243f6a8885a308d3ull ^ (g.id * 0x9e3779b97f4a7c15ull), counter_);
    return g;
}

PartitionState PartitionState::build(const PublicParams& params, const TrapdoorKey& trapdoor,
                                     std::vector<Item> items, std::size_t p, OpCounter* counter) {
    const std::size_t n = items.size();
    if (p < 1 || p > std::max<std::size_t>(1, n))
        throw error(errc::invalid_parameter, "p must satisfy 1 <= p <= max(1, n)");
    check_trapdoor(params, trapdoor);
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.key < b.key; });
    for (std::size_t i = 1; i < n; ++i) {
        if (items[i].key == items[i - 1].key) throw error(errc::duplicate, "duplicate key in build input");
    }

    PartitionState st(params, trapdoor, p, counter);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < p; ++j) {
        const std::size_t take = n / p + (j < n % p ? 1 : 0);
        Group g = st.make_group();
        for (std::size_t i = 0; i < take; ++i) g.tree.insert(std::move(items[pos++]));
        st.index_insert(g);
        st.groups_.push_back(std::move(g));
    }
    st.n_ = n;
    st.recompute_accumulations();
    st.dirty_from_ = 0;
    return st;
}

void PartitionState::set_counter(OpCounter* counter) {
    counter_ = counter;
    for (Group& g : groups_) g.tree.set_counter(counter);
}

SizeBounds PartitionState::bounds() const { return SizeBounds{(n_ + p_ - 1) / p_}; }

void PartitionState::index_insert(const Group& g) { size_index_.emplace(g.tree.size(), g.id); }

void PartitionState::index_erase(const Group& g) { size_index_.erase({g.tree.size(), g.id}); }

std::size_t PartitionState::index_of(std::uint64_t id) const {
    for (std::size_t j = 0; j < groups_.size(); ++j) {
        if (groups_[j].id == id) return j;
    }
    throw error(errc::not_a_member, "unknown group id");
}

void PartitionState::touch(std::size_t j) { dirty_ids_.insert(groups_[j].id); }

std::size_t PartitionState::find_group(const BigInt& key) const {
    // Last group whose smallest key is <= key; keys below every group go to group 0.
    std::size_t lo = 0, hi = groups_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (!groups_[mid].tree.empty() && groups_[mid].tree.min().key <= key) lo = mid;
        else hi = mid;
    }
    return lo;
}

bool PartitionState::contains(const BigInt& key) const {
    return groups_[find_group(key)].tree.find(key) != nullptr;
}

std::size_t PartitionState::min_group_size() const {
    return size_index_.empty() ? 0 : size_index_.begin()->first;
}

std::size_t PartitionState::max_group_size() const {
    return size_index_.empty() ? 0 : size_index_.rbegin()->first;
}

void PartitionState::source_update(UpdateOp op, const Item& item) {
    if (op == UpdateOp::erase) {
        erase(item.key);
        return;
    }
    const std::size_t j = find_group(item.key);
    Group& g = groups_[j];
    if (g.tree.find(item.key)) throw error(errc::duplicate, "key already in the dictionary");
    index_erase(g);
    g.tree.insert(item);
    index_insert(g);
    touch(j);
    ++n_;
    rebalance();
    recompute_accumulations();
}

void PartitionState::erase(const BigInt& key) {
    const std::size_t j = find_group(key);
    Group& g = groups_[j];
    if (!g.tree.find(key)) throw error(errc::not_a_member, "key not in the dictionary");
    index_erase(g);
    g.tree.erase(key);
    index_insert(g);
    touch(j);
    --n_;
    rebalance();
    recompute_accumulations();
}

void PartitionState::rebalance() {
    const SizeBounds b = bounds();
    for (;;) {
        const auto [min_size, min_id] = *size_index_.begin();
        if (groups_.size() > 1 && b.too_small(min_size)) {
            fix_underflow(index_of(min_id));
            continue;
        }
        const auto [max_size, max_id] = *size_index_.rbegin();
        if (b.too_large(max_size)) {
            split_group(index_of(max_id));
            continue;
        }
        break;
    }
}

void PartitionState::fix_underflow(std::size_t j) {
    const SizeBounds b = bounds();
    std::optional<std::size_t> left, right;
    if (j > 0) left = groups_[j - 1].tree.size();
    if (j + 1 < groups_.size()) right = groups_[j + 1].tree.size();
    const std::size_t self = groups_[j].tree.size();

    switch (choose_underflow_fix(self, left, right, b)) {
    case UnderflowFix::none:
        return;
    case UnderflowFix::merge_left:
    case UnderflowFix::merge_right: {
        const std::size_t keep = choose_underflow_fix(self, left, right, b) == UnderflowFix::merge_left ? j - 1 : j;
        index_erase(groups_[keep]);
        index_erase(groups_[keep + 1]);
        groups_[keep].tree.append(std::move(groups_[keep + 1].tree));
        dirty_ids_.erase(groups_[keep + 1].id);
        groups_.erase(groups_.begin() + static_cast<std::ptrdiff_t>(keep + 1));
        index_insert(groups_[keep]);
        touch(keep);
        dirty_from_ = std::min(dirty_from_, keep + 1);
        return;
    }
    case UnderflowFix::borrow_left: {
        const std::size_t need = b.borrow_target() - self;
        index_erase(groups_[j - 1]);
        index_erase(groups_[j]);
        groups_[j].tree.prepend(groups_[j - 1].tree.split_last(need));
        index_insert(groups_[j - 1]);
        index_insert(groups_[j]);
        touch(j - 1);
        touch(j);
        return;
    }
    case UnderflowFix::borrow_right: {
        const std::size_t need = b.borrow_target() - self;
        index_erase(groups_[j + 1]);
        index_erase(groups_[j]);
        groups_[j].tree.append(groups_[j + 1].tree.split_first(need));
        index_insert(groups_[j + 1]);
        index_insert(groups_[j]);
        touch(j + 1);
        touch(j);
        return;
    }
    }
}

void PartitionState::split_group(std::size_t j) {
    index_erase(groups_[j]);
    const std::size_t s = groups_[j].tree.size();
    Group upper = make_group();
    upper.tree = groups_[j].tree.split_last(s / 2);
    upper.tree.set_counter(counter_);
    index_insert(groups_[j]);
    index_insert(upper);
    touch(j);
    dirty_ids_.insert(upper.id);
    groups_.insert(groups_.begin() + static_cast<std::ptrdiff_t>(j + 1), std::move(upper));
    dirty_from_ = std::min(dirty_from_, j + 1);
}

void PartitionState::recompute_accumulations() {
    const BigInt& phi = trapdoor_->phi;
    const std::size_t g = groups_.size();
    std::vector<BigInt> y(g);
    for (std::size_t j = 0; j < g; ++j) y[j] = groups_[j].tree.product();

    // prefix[j] = y_0 ... y_{j-1}, suffix[j] = y_j ... y_{g-1}
    std::vector<BigInt> prefix(g + 1), suffix(g + 1);
    prefix[0] = 1;
    suffix[g] = 1;
    for (std::size_t j = 0; j < g; ++j) prefix[j + 1] = modmul(prefix[j], y[j], phi, counter_);
    for (std::size_t j = g; j-- > 0;) suffix[j] = modmul(y[j], suffix[j + 1], phi, counter_);

    B_.assign(g, BigInt());
    for (std::size_t j = 0; j < g; ++j) {
        const BigInt e = modmul(prefix[j], suffix[j + 1], phi, counter_);
        B_[j] = modpow(params_->a, e, params_->N, counter_);
    }
    A_.value = n_ == 0 ? params_->a : modpow(params_->a, prefix[g], params_->N, counter_);
}

void PartitionState::redistribute(std::size_t p) {
    std::vector<Item> all;
    all.reserve(n_);
    for (const Group& g : groups_) {
        auto items = g.tree.items();
        std::move(items.begin(), items.end(), std::back_inserter(all));
    }
    auto committed = std::move(committed_);
    PartitionState fresh = build(*params_, *trapdoor_, std::move(all), p, counter_);
    fresh.next_id_ = std::max(fresh.next_id_, next_id_);
    *this = std::move(fresh);
    committed_ = std::move(committed);
    dirty_from_ = 0;
}

PartitionUpdate PartitionState::take_update() {
    PartitionUpdate up;
    up.A = A_;
    std::vector<std::vector<BigInt>> now(groups_.size());
    for (std::size_t j = 0; j < groups_.size(); ++j) {
        GroupDelta d;
        d.index = j;
        d.B = B_[j];
        const bool changed = j >= dirty_from_ || j >= committed_.size() || dirty_ids_.count(groups_[j].id);
        if (!changed) {
            now[j] = std::move(committed_[j]);
            up.groups.push_back(std::move(d));
            continue;
        }
        const std::vector<Item> items = groups_[j].tree.items();
        static const std::vector<BigInt> none;
        const std::vector<BigInt>& before = j < committed_.size() ? committed_[j] : none;
        std::size_t a = 0, b = 0;
        while (a < items.size() || b < before.size()) {
            if (b == before.size() || (a < items.size() && items[a].key < before[b])) {
                d.added.push_back(items[a++]);
            } else if (a == items.size() || before[b] < items[a].key) {
                d.removed.push_back(before[b++]);
            } else {
                ++a;
                ++b;
            }
        }
        now[j].reserve(items.size());
        for (const Item& it : items) now[j].push_back(it.key);
        up.groups.push_back(std::move(d));
    }
    committed_ = std::move(now);
    dirty_ids_.clear();
    dirty_from_ = groups_.size();
    return up;
}

bool PartitionState::invariants_hold() const {
    const SizeBounds b = bounds();
    if (size_index_.size() != groups_.size()) return false;
    std::size_t total = 0;
    BigInt y_all = 1;
    for (std::size_t j = 0; j < groups_.size(); ++j) {
        const ProductTree& t = groups_[j].tree;
        if (!t.check_invariants()) return false;
        if (!size_index_.count({t.size(), groups_[j].id})) return false;
        if (groups_.size() > 1 && (b.too_small(t.size()) || b.too_large(t.size()))) return false;
        if (j > 0 && !t.empty() && !groups_[j - 1].tree.empty() && !(groups_[j - 1].tree.max().key < t.min().key))
            return false;
        total += t.size();
        y_all = (y_all * t.product()) % trapdoor_->phi;
    }
    if (total != n_) return false;
    for (std::size_t j = 0; j < groups_.size(); ++j) {
        BigInt check;
        mpz_powm(check.get_mpz_t(), B_[j].get_mpz_t(), groups_[j].tree.product().get_mpz_t(), params_->N.get_mpz_t());
        if (n_ > 0 && check != A_.value) return false;
    }
    return true;
}

std::size_t PartitionView::locate(const BigInt& key) const {
    if (groups_.empty()) throw error(errc::not_initialized, "partition view has no groups");
    std::size_t lo = 0, hi = groups_.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (!groups_[mid].members.empty() && groups_[mid].members.front().key <= key) lo = mid;
        else hi = mid;
    }
    return lo;
}

const Item* PartitionView::floor_item(const BigInt& probe) const {
    if (groups_.empty()) return nullptr;
    const auto& ms = groups_[locate(probe)].members;
    auto it = std::upper_bound(ms.begin(), ms.end(), probe, [](const BigInt& k, const Item& m) { return k < m.key; });
    if (it == ms.begin()) return nullptr;
    return &*std::prev(it);
}

std::size_t PartitionView::size() const {
    std::size_t n = 0;
    for (const Group& g : groups_) n += g.members.size();
    return n;
}

void PartitionView::apply(const PartitionUpdate& update) {
    std::vector<Group> next(update.groups.size());
    for (std::size_t j = 0; j < update.groups.size(); ++j) {
        const GroupDelta& d = update.groups[j];
        if (d.index != j) throw error(errc::parse_error, "group deltas out of order");
        Group& g = next[j];
        g.B = d.B;
        if (j < groups_.size()) g.members = std::move(groups_[j].members);
        for (const BigInt& key : d.removed) {
            auto it = std::lower_bound(g.members.begin(), g.members.end(), key,
                                       [](const Item& m, const BigInt& k) { return m.key < k; });
            if (it == g.members.end() || it->key != key) throw error(errc::not_a_member, "delta removes unknown key");
            g.members.erase(it);
        }
        for (const Item& item : d.added) {
            auto it = std::lower_bound(g.members.begin(), g.members.end(), item.key,
                                       [](const Item& m, const BigInt& k) { return m.key < k; });
            if (it != g.members.end() && it->key == item.key) throw error(errc::duplicate, "delta adds existing key");
            g.members.insert(it, item);
        }
    }
    groups_ = std::move(next);
    A_ = update.A;
}

Witness PartitionView::query_witness(const PublicParams& params, const BigInt& key, OpCounter* counter) const {
    const Group& g = groups_[locate(key)];
    auto it = std::lower_bound(g.members.begin(), g.members.end(), key,
                               [](const Item& m, const BigInt& k) { return m.key < k; });
    if (it == g.members.end() || it->key != key) throw error(errc::not_a_member, "key not in its group");
    BigInt w = g.B;
    for (const Item& m : g.members) {
        if (&m != &*it) w = modpow(w, m.rep, params.N, counter);
    }
    return Witness{it->digest, it->rep, std::move(w)};
}

void write_partition_update(std::ostream& out, const std::string& basis_line, const PartitionUpdate& update) {
    out << basis_line << '\n' << "A " << to_hex(update.A.value) << ' ' << update.groups.size() << '\n';
    for (const GroupDelta& d : update.groups) {
        out << d.index << ' ' << to_hex(d.B);
        for (const Item& it : d.added)
            out << " +" << to_hex(it.key) << ':' << to_hex(it.digest) << ':' << to_hex(it.rep);
        for (const BigInt& key : d.removed) out << " -" << to_hex(key);
        out << '\n';
    }
}

PartitionUpdate read_partition_update(std::istream& in, std::string& basis_line) {
    if (!std::getline(in, basis_line)) throw error(errc::parse_error, "missing basis line");
    std::string line;
    if (!std::getline(in, line)) throw error(errc::parse_error, "missing accumulation line");
    PartitionUpdate up;
    std::size_t count = 0;
    {
        std::istringstream ls(line);
        std::string tag, hex;
        if (!(ls >> tag >> hex >> count) || tag != "A") throw error(errc::parse_error, "bad accumulation line");
        up.A.value = from_hex(hex);
    }
    for (std::size_t j = 0; j < count; ++j) {
        if (!std::getline(in, line)) throw error(errc::parse_error, "missing group line");
        std::istringstream ls(line);
        GroupDelta d;
        std::string hex;
        if (!(ls >> d.index >> hex) || d.index != j) throw error(errc::parse_error, "bad group line");
        d.B = from_hex(hex);
        std::string tok;
        while (ls >> tok) {
            if (tok.size() < 2) throw error(errc::parse_error, "bad delta token");
            if (tok[0] == '-') {
                d.removed.push_back(from_hex(tok.substr(1)));
            } else if (tok[0] == '+') {
                const auto c1 = tok.find(':'), c2 = tok.rfind(':');
                if (c1 == std::string::npos || c1 == c2) throw error(errc::parse_error, "bad added item");
                d.added.push_back(Item{from_hex(tok.substr(1, c1 - 1)), from_hex(tok.substr(c1 + 1, c2 - c1 - 1)),
                                       from_hex(tok.substr(c2 + 1))});
            } else {
                throw error(errc::parse_error, "bad delta token");
            }
        }
        up.groups.push_back(std::move(d));
    }
    return up;
}

}  // namespace accdict
