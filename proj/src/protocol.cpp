#include "accdict/protocol.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "accdict/wire.hpp"
#include "accdict/witness_tree.hpp"

namespace accdict {

namespace {

BigInt pow2(unsigned bits) {
    BigInt out;
    mpz_ui_pow_ui(out.get_mpz_t(), 2, bits);
    return out;
}

std::size_t digest_width(const PublicParams& params) { return (params.k + 7) / 8; }
std::size_t interval_width(const PublicParams& params) { return (2 * params.k + 7) / 8; }

std::size_t parse_size(std::string_view text, const char* what) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw error(errc::invalid_parameter, std::string("bad ") + what + " '" + std::string(text) + "'");
    return v;
}

std::vector<std::string> split_commas(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

void write_item(FrameWriter& w, const Item& it) {
    w.big(it.key);
    w.big(it.digest);
    w.big(it.rep);
}

Item read_item(FrameReader& r) {
    Item it;
    it.key = r.big();
    it.digest = r.big();
    it.rep = r.big();
    return it;
}

}  // namespace

const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::straightforward: return "straightforward";
    case Scheme::precomputed: return "precomputed";
    case Scheme::partitioned: return "partitioned";
    case Scheme::hierarchical: return "hierarchical";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view name) {
    for (Scheme s : {Scheme::straightforward, Scheme::precomputed, Scheme::partitioned, Scheme::hierarchical}) {
        if (name == to_string(s)) return s;
    }
    throw error(errc::invalid_parameter, "unknown scheme '" + std::string(name) + "'");
}

// ---- intervals ----

IntervalSet::IntervalSet(unsigned K) : K_(K), top_(pow2(K) - 1) {
    if (K < 2) throw error(errc::invalid_parameter, "interval width K must be >= 2");
}

IntervalSet IntervalSet::build(unsigned K, std::span<const BigInt> digests) {
    IntervalSet s(K);
    for (const BigInt& d : digests) s.apply(UpdateOp::insert, d);
    return s;
}

BigInt IntervalSet::join(const BigInt& lo, const BigInt& hi) const {
    BigInt v = lo;
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), K_);
    return v + hi;
}

std::pair<BigInt, BigInt> IntervalSet::split(const BigInt& interval) const {
    BigInt lo, hi;
    mpz_fdiv_q_2exp(lo.get_mpz_t(), interval.get_mpz_t(), K_);
    mpz_fdiv_r_2exp(hi.get_mpz_t(), interval.get_mpz_t(), K_);
    return {lo, hi};
}

std::vector<BigInt> IntervalSet::values() const {
    std::vector<BigInt> out;
    out.reserve(size());
    BigInt prev = 0;
    for (const BigInt& x : x_) {
        out.push_back(join(prev, x));
        prev = x;
    }
    out.push_back(join(prev, top_));
    return out;
}

IntervalSet::Delta IntervalSet::diff(UpdateOp op, const BigInt& digest) const {
    if (digest == 0 || digest == top_) throw error(errc::sentinel_digest, "digest collides with a sentinel");
    if (sgn(digest) < 0 || digest > top_) throw error(errc::domain_error, "digest wider than K bits");
    auto next = x_.upper_bound(digest);
    const BigInt hi = next == x_.end() ? top_ : *next;
    auto at = x_.lower_bound(digest);
    const BigInt lo = at == x_.begin() ? BigInt(0) : *std::prev(at);
    Delta d;
    if (op == UpdateOp::insert) {
        if (contains(digest)) throw error(errc::duplicate, "digest already present");
        d.removed = {join(lo, hi)};
        d.added = {join(lo, digest), join(digest, hi)};
    } else {
        if (!contains(digest)) throw error(errc::not_a_member, "digest not present");
        d.removed = {join(lo, digest), join(digest, hi)};
        d.added = {join(lo, hi)};
    }
    return d;
}

void IntervalSet::apply(UpdateOp op, const BigInt& digest) {
    diff(op, digest);  // validates
    if (op == UpdateOp::insert) x_.insert(digest);
    else x_.erase(digest);
}

bool IntervalSet::tiles() const {
    BigInt expect_lo = 0;
    const auto vals = values();
    for (const BigInt& v : vals) {
        auto [lo, hi] = split(v);
        if (lo != expect_lo || !(lo < hi)) return false;
        expect_lo = hi;
    }
    return expect_lo == top_;
}

// ---- basis ----

Bytes basis_message(const PublicParams& params, const AccumulationValue& A, std::uint64_t t) {
    Bytes out;
    put_u32_be(out, params.k);
    const Bytes a = to_bytes(A.value, params.residue_bytes());
    out.insert(out.end(), a.begin(), a.end());
    put_u64_be(out, t);
    return out;
}

std::string basis_line(const Basis& basis) {
    return "basis " + to_hex(basis.A.value) + " " + std::to_string(basis.t) + " " + bytes_to_hex(basis.sig);
}

Basis parse_basis_line(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string tag, a, t, sig;
    if (!(in >> tag >> a >> t >> sig) || tag != "basis") throw error(errc::parse_error, "bad basis line");
    Basis b;
    b.A.value = from_hex(a);
    b.t = parse_size(t, "timestamp");
    b.sig = hex_to_bytes(sig);
    return b;
}

// ---- update info ----

Bytes encode_update(const UpdateInfo& info) {
    FrameWriter w;
    w.u8(static_cast<std::uint8_t>(info.scheme));
    w.big(info.basis.A.value);
    w.u64(info.basis.t);
    w.field(info.basis.sig);
    switch (info.scheme) {
    case Scheme::straightforward:
        w.u32(static_cast<std::uint32_t>(info.flat.added.size()));
        for (const Item& it : info.flat.added) write_item(w, it);
        w.u32(static_cast<std::uint32_t>(info.flat.removed.size()));
        for (const BigInt& key : info.flat.removed) w.big(key);
        break;
    case Scheme::precomputed:
        w.u32(static_cast<std::uint32_t>(info.witnesses.size()));
        for (const ItemWitness& iw : info.witnesses) {
            write_item(w, iw.item);
            w.big(iw.witness);
        }
        break;
    case Scheme::partitioned:
        w.big(info.partition.A.value);
        w.u32(static_cast<std::uint32_t>(info.partition.groups.size()));
        for (const GroupDelta& g : info.partition.groups) {
            w.u32(static_cast<std::uint32_t>(g.index));
            w.big(g.B);
            w.u32(static_cast<std::uint32_t>(g.added.size()));
            for (const Item& it : g.added) write_item(w, it);
            w.u32(static_cast<std::uint32_t>(g.removed.size()));
            for (const BigInt& key : g.removed) w.big(key);
        }
        break;
    case Scheme::hierarchical:
        w.u64(info.hierarchy.root);
        w.u32(info.hierarchy.c);
        w.u32(static_cast<std::uint32_t>(info.hierarchy.nodes.size()));
        for (const HierNode& node : info.hierarchy.nodes) {
            w.u64(node.id);
            w.u64(node.parent);
            w.u32(node.level);
            w.big(node.alpha);
            w.big(node.alpha_digest);
            w.big(node.alpha_rep);
            w.u32(static_cast<std::uint32_t>(node.members.size()));
            for (const HierMember& m : node.members) {
                w.big(m.key);
                w.big(m.digest);
                w.big(m.rep);
                w.big(m.witness);
                w.u64(m.child);
            }
        }
        w.u32(static_cast<std::uint32_t>(info.hierarchy.removed.size()));
        for (std::uint64_t id : info.hierarchy.removed) w.u64(id);
        break;
    }
    return w.take();
}

UpdateInfo decode_update(std::span<const std::uint8_t> bytes) {
    FrameReader r(bytes);
    UpdateInfo info;
    const std::uint8_t scheme = r.u8();
    if (scheme > 3) throw error(errc::parse_error, "unknown scheme tag");
    info.scheme = static_cast<Scheme>(scheme);
    info.basis.A.value = r.big();
    info.basis.t = r.u64();
    auto sig = r.field();
    info.basis.sig.assign(sig.begin(), sig.end());
    switch (info.scheme) {
    case Scheme::straightforward: {
        for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) info.flat.added.push_back(read_item(r));
        for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) info.flat.removed.push_back(r.big());
        break;
    }
    case Scheme::precomputed: {
        for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
            ItemWitness iw;
            iw.item = read_item(r);
            iw.witness = r.big();
            info.witnesses.push_back(std::move(iw));
        }
        break;
    }
    case Scheme::partitioned: {
        info.partition.A.value = r.big();
        for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
            GroupDelta g;
            g.index = r.u32();
            g.B = r.big();
            for (std::uint32_t j = 0, m = r.u32(); j < m; ++j) g.added.push_back(read_item(r));
            for (std::uint32_t j = 0, m = r.u32(); j < m; ++j) g.removed.push_back(r.big());
            info.partition.groups.push_back(std::move(g));
        }
        break;
    }
    case Scheme::hierarchical: {
        info.hierarchy.root = r.u64();
        info.hierarchy.c = r.u32();
        for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) {
            HierNode node;
            node.id = r.u64();
            node.parent = r.u64();
            node.level = r.u32();
            node.alpha = r.big();
            node.alpha_digest = r.big();
            node.alpha_rep = r.big();
            for (std::uint32_t j = 0, m = r.u32(); j < m; ++j) {
                HierMember mb;
                mb.key = r.big();
                mb.digest = r.big();
                mb.rep = r.big();
                mb.witness = r.big();
                mb.child = r.u64();
                node.members.push_back(std::move(mb));
            }
            info.hierarchy.nodes.push_back(std::move(node));
        }
        for (std::uint32_t i = 0, n = r.u32(); i < n; ++i) info.hierarchy.removed.push_back(r.u64());
        break;
    }
    }
    r.finish();
    return info;
}

// ---- scheme parameters ----

std::size_t resolve_p(const std::string& rule, std::size_t n) {
    const std::size_t cap = std::max<std::size_t>(1, n);
    std::size_t p;
    if (rule == "sqrt") p = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    else if (rule == "n") p = n;
    else p = parse_size(rule, "p rule");
    return std::clamp<std::size_t>(p, 1, cap);
}

namespace {

// Shrinks the largest factor until there are no more leaf subsets than items.
std::vector<std::size_t> fit_branching(std::vector<std::size_t> g, std::size_t n) {
    auto product = [&] {
        std::size_t p = 1;
        for (std::size_t v : g) p = p > n ? p : p * v;
        return p;
    };
    while (product() > std::max<std::size_t>(n, 1)) --*std::max_element(g.begin(), g.end());
    return g;
}

}  // namespace

std::vector<std::size_t> resolve_branching(const std::string& spec, std::size_t n) {
    return fit_branching(resolve_branching_raw(spec, n), n);
}

std::vector<std::size_t> resolve_branching_raw(const std::string& spec, std::size_t n) {
    if (spec.rfind("c=", 0) == 0) {
        const std::size_t c = parse_size(std::string_view(spec).substr(2), "level count");
        if (c < 1 || c > 64) throw error(errc::invalid_parameter, "c must be in [1, 64]");
        return uniform_branching(n, static_cast<unsigned>(c));
    }
    if (spec.rfind("g=", 0) == 0) {
        std::vector<std::size_t> g;
        for (const std::string& part : split_commas(spec.substr(2))) g.push_back(parse_size(part, "branching factor"));
        return g;
    }
    std::vector<double> exps;
    for (const std::string& part : split_commas(spec)) {
        try {
            std::size_t used = 0;
            exps.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::logic_error&) {
            throw error(errc::invalid_parameter, "bad branching exponent '" + part + "'");
        }
    }
    return branching_from_exponents(n, exps);
}

BigInt interval_digest(const PublicParams& params, const AppHash& app_hash, const BigInt& interval) {
    const Bytes bytes = to_bytes(interval, interval_width(params));
    return app_hash(bytes, params.k);
}

// ---- source ----

Source::Source(const PublicParams& params, const TrapdoorKey& trapdoor, SchemeConfig config,
               std::shared_ptr<const SignatureScheme> signer, Bytes secret_key, std::uint64_t seed, AppHash app_hash)
    : params_(params),
      trapdoor_(trapdoor),
      config_(std::move(config)),
      signer_(std::move(signer)),
      secret_key_(std::move(secret_key)),
      app_hash_(std::move(app_hash)),
      rng_(seed),
      cache_(params_.rep_hash),
      intervals_(params.k) {
    validate_params(params_);
    check_trapdoor(params_, trapdoor_);
    if (!signer_) throw error(errc::invalid_parameter, "no signature scheme");
}

BigInt Source::ingest(std::span<const std::uint8_t> element) const {
    BigInt d = app_hash_(element, params_.k);
    if (d == 0 || d == intervals_.top()) throw error(errc::sentinel_digest, "element digests to a reserved sentinel");
    return d;
}

Item Source::make_item(const BigInt& interval) {
    const BigInt digest = interval_digest(params_, app_hash_, interval);
    return Item{interval, digest, cache_.get_or_find(digest, rng_)};
}

void Source::set_counter(OpCounter* counter) {
    counter_ = counter;
    if (partition_) partition_->set_counter(counter);
    if (hierarchy_) hierarchy_->set_counter(counter);
}

void Source::build(std::span<const BigInt> digests) {
    intervals_ = IntervalSet::build(params_.k, digests);
    items_.clear();
    std::vector<Item> items;
    for (const BigInt& v : intervals_.values()) {
        Item it = make_item(v);
        items_.emplace(v, it);
        items.push_back(std::move(it));
    }
    partition_.reset();
    hierarchy_.reset();
    const std::size_t n = items.size();
    if (config_.scheme == Scheme::partitioned) {
        partition_.emplace(PartitionState::build(params_, trapdoor_, std::move(items), resolve_p(config_.p_rule, n),
                                                 counter_));
    } else if (config_.scheme == Scheme::hierarchical) {
        hierarchy_.emplace(Hierarchy::build(params_, trapdoor_, std::move(items),
                                            resolve_branching(config_.branching, n), cache_, rng_, app_hash_,
                                            counter_));
    }
    built_ = true;
    shaped_n_ = n;
}

void Source::maybe_reshape() {
    const std::size_t n = items_.size();
    if (n <= 2 * shaped_n_ && 2 * n >= shaped_n_) return;
    shaped_n_ = n;
    if (partition_) {
        const std::size_t p = resolve_p(config_.p_rule, n);
        if (p != partition_->p()) partition_->redistribute(p);
    } else if (hierarchy_) {
        auto branching = resolve_branching(config_.branching, n);
        if (branching != hierarchy_->branching()) hierarchy_->reshape(std::move(branching));
    }
}

void Source::apply_delta(const IntervalSet::Delta& delta) {
    // Additions first so the structures never pass through n = 0.
    for (const BigInt& key : delta.added) {
        Item it = make_item(key);
        items_.emplace(key, it);
        if (partition_) partition_->insert(it);
        if (hierarchy_) hierarchy_->insert(it);
    }
    for (const BigInt& key : delta.removed) {
        items_.erase(key);
        if (partition_) partition_->erase(key);
        if (hierarchy_) hierarchy_->erase(key);
    }
}

void Source::insert_digest(const BigInt& digest) {
    if (!built_) build({});
    const auto delta = intervals_.diff(UpdateOp::insert, digest);
    intervals_.apply(UpdateOp::insert, digest);
    apply_delta(delta);
    maybe_reshape();
}

void Source::erase_digest(const BigInt& digest) {
    if (!built_) build({});
    const auto delta = intervals_.diff(UpdateOp::erase, digest);
    intervals_.apply(UpdateOp::erase, digest);
    apply_delta(delta);
    maybe_reshape();
}

AccumulationValue Source::accumulation() const {
    if (partition_) return partition_->accumulation();
    if (hierarchy_) return hierarchy_->accumulation();
    std::vector<BigInt> reps;
    reps.reserve(items_.size());
    for (const auto& [key, it] : items_) reps.push_back(it.rep);
    return accumulate_trapdoor(params_, trapdoor_, reps, counter_);
}

UpdateInfo Source::epoch_commit(std::uint64_t epoch_index, std::uint64_t delta_ms) {
    if (!built_) build({});
    if (delta_ms == 0) throw error(errc::invalid_parameter, "epoch length must be positive");
    if (epoch_index > UINT64_MAX / delta_ms) throw error(errc::invalid_parameter, "timestamp overflows 64 bits");
    UpdateInfo info;
    info.scheme = config_.scheme;
    info.basis.A = accumulation();
    info.basis.t = epoch_index * delta_ms;
    info.basis.sig = signer_->sign(secret_key_, basis_message(params_, info.basis.A, info.basis.t));

    switch (config_.scheme) {
    case Scheme::straightforward: {
        for (const auto& [key, it] : items_) {
            if (!committed_.count(key)) info.flat.added.push_back(it);
        }
        for (const auto& [key, it] : committed_) {
            if (!items_.count(key)) info.flat.removed.push_back(key);
        }
        committed_ = items_;
        break;
    }
    case Scheme::precomputed: {
        std::vector<BigInt> reps;
        for (const auto& [key, it] : items_) reps.push_back(it.rep);
        std::vector<BigInt> w = precompute_witnesses(params_, trapdoor_, reps, counter_);
        std::size_t i = 0;
        for (const auto& [key, it] : items_) info.witnesses.push_back(ItemWitness{it, std::move(w[i++])});
        break;
    }
    case Scheme::partitioned:
        info.partition = partition_->take_update();
        break;
    case Scheme::hierarchical:
        info.hierarchy = hierarchy_->take_update();
        break;
    }
    return info;
}

// ---- responses ----

Bytes encode_response(const PublicParams& params, const QueryResponse& response) {
    if (response.witness.has_value() == response.chain.has_value())
        throw error(errc::invalid_parameter, "response must carry exactly one proof");
    FrameWriter w;
    w.u8(static_cast<std::uint8_t>(response.answer));
    w.fixed(response.digest, digest_width(params));
    w.fixed(response.interval, interval_width(params));
    if (response.witness) {
        w.u8(0);
        w.fixed(response.witness->element, digest_width(params));
        w.fixed(response.witness->x, params.rep_bytes());
        w.fixed(response.witness->value, params.residue_bytes());
    } else {
        w.u8(1);
        w.field(encode_chain(params, *response.chain));
    }
    w.fixed(response.basis.A.value, params.residue_bytes());
    w.u64(response.basis.t);
    w.field(response.basis.sig);
    return w.take();
}

QueryResponse decode_response(const PublicParams& params, std::span<const std::uint8_t> bytes) {
    FrameReader r(bytes);
    QueryResponse resp;
    const std::uint8_t answer = r.u8();
    if (answer > 1) throw error(errc::parse_error, "bad answer tag");
    resp.answer = static_cast<Answer>(answer);
    resp.digest = r.fixed(digest_width(params));
    resp.interval = r.fixed(interval_width(params));
    const std::uint8_t kind = r.u8();
    if (kind == 0) {
        Witness wt;
        wt.element = r.fixed(digest_width(params));
        wt.x = r.fixed(params.rep_bytes());
        wt.value = r.fixed(params.residue_bytes());
        resp.witness = std::move(wt);
    } else if (kind == 1) {
        resp.chain = decode_chain(params, r.field());
    } else {
        throw error(errc::parse_error, "bad proof kind");
    }
    resp.basis.A.value = r.fixed(params.residue_bytes());
    resp.basis.t = r.u64();
    auto sig = r.field();
    resp.basis.sig.assign(sig.begin(), sig.end());
    r.finish();
    return resp;
}

// ---- directory ----

Directory::Directory(const PublicParams& params, Scheme scheme, AppHash app_hash)
    : params_(params), scheme_(scheme), app_hash_(std::move(app_hash)) {}

void Directory::apply(const UpdateInfo& info) {
    if (info.scheme != scheme_) throw error(errc::invalid_parameter, "update info is for another scheme");
    switch (scheme_) {
    case Scheme::straightforward:
        for (const BigInt& key : info.flat.removed) {
            if (!flat_.erase(key)) throw error(errc::not_a_member, "update removes an unknown interval");
        }
        for (const Item& it : info.flat.added) flat_[it.key] = it;
        break;
    case Scheme::precomputed:
        precomputed_.clear();
        for (const ItemWitness& iw : info.witnesses) precomputed_.emplace(iw.item.key, iw);
        break;
    case Scheme::partitioned:
        partition_.apply(info.partition);
        break;
    case Scheme::hierarchical:
        hierarchy_.apply(info.hierarchy);
        break;
    }
    basis_ = info.basis;
}

std::size_t Directory::interval_count() const {
    switch (scheme_) {
    case Scheme::straightforward: return flat_.size();
    case Scheme::precomputed: return precomputed_.size();
    case Scheme::partitioned: return partition_.size();
    case Scheme::hierarchical: return hierarchy_.size();
    }
    return 0;
}

Item Directory::floor_interval(const BigInt& probe) const {
    auto floor_in = [&](const auto& map) -> const auto& {
        auto it = map.upper_bound(probe);
        if (it == map.begin()) throw error(errc::not_initialized, "no interval covers the digest");
        return std::prev(it)->second;
    };
    switch (scheme_) {
    case Scheme::straightforward:
        return floor_in(flat_);
    case Scheme::precomputed:
        return floor_in(precomputed_).item;
    case Scheme::partitioned:
        if (const Item* it = partition_.floor_item(probe)) return *it;
        break;
    case Scheme::hierarchical:
        if (const HierMember* m = hierarchy_.floor_member(probe)) return Item{m->key, m->digest, m->rep};
        break;
    }
    throw error(errc::not_initialized, "no interval covers the digest");
}

QueryResponse Directory::answer_query(const BigInt& digest, OpCounter* counter) const {
    if (!basis_) throw error(errc::not_initialized, "directory has no basis yet");
    const BigInt top = pow2(params_.k) - 1;
    if (sgn(digest) < 0 || digest > top) throw error(errc::domain_error, "digest wider than k bits");
    BigInt probe = digest;
    mpz_mul_2exp(probe.get_mpz_t(), probe.get_mpz_t(), params_.k);
    probe += top;

    QueryResponse resp;
    resp.digest = digest;
    resp.basis = *basis_;

    const Item item = floor_interval(probe);
    resp.interval = item.key;
    BigInt lo;
    mpz_fdiv_q_2exp(lo.get_mpz_t(), item.key.get_mpz_t(), params_.k);
    resp.answer = (lo == digest && digest != 0) ? Answer::member : Answer::non_member;

    switch (scheme_) {
    case Scheme::straightforward: {
        BigInt w = params_.a;
        for (const auto& [key, it] : flat_) {
            if (key != item.key) w = modpow(w, it.rep, params_.N, counter);
        }
        resp.witness = Witness{item.digest, item.rep, std::move(w)};
        break;
    }
    case Scheme::precomputed:
        resp.witness = Witness{item.digest, item.rep, precomputed_.at(item.key).witness};
        break;
    case Scheme::partitioned:
        resp.witness = partition_.query_witness(params_, item.key, counter);
        break;
    case Scheme::hierarchical:
        resp.chain = hierarchy_.prove_chain(item.key);
        break;
    }
    return resp;
}

// ---- user ----

const char* to_string(Reject r) {
    switch (r) {
    case Reject::none: return "accept";
    case Reject::bad_signature: return "bad-signature";
    case Reject::stale: return "stale";
    case Reject::bad_proof: return "bad-proof";
    case Reject::inconsistent_interval: return "inconsistent-interval";
    }
    return "unknown";
}

Verdict user_verify(const QueryResponse& response, const BigInt& queried_digest, const SignatureScheme& scheme,
                    std::span<const std::uint8_t> public_key, std::uint64_t now_ms, std::uint64_t delta_ms,
                    const PublicParams& params, const AppHash& app_hash, OpCounter* counter) {
    const AccumulationValue& A = response.basis.A;
    if (sgn(A.value) <= 0 || A.value >= params.N) return {Reject::bad_signature};
    if (!scheme.verify(public_key, basis_message(params, A, response.basis.t), response.basis.sig))
        return {Reject::bad_signature};

    const std::uint64_t t = response.basis.t;
    if (now_ms < t || now_ms - t >= delta_ms) return {Reject::stale};

    const unsigned K = params.k;
    const BigInt top = pow2(K) - 1;
    if (response.digest != queried_digest || sgn(queried_digest) < 0 || queried_digest > top)
        return {Reject::inconsistent_interval};
    if (sgn(response.interval) < 0 || bit_length(response.interval) > 2 * K) return {Reject::inconsistent_interval};
    BigInt lo, hi;
    mpz_fdiv_q_2exp(lo.get_mpz_t(), response.interval.get_mpz_t(), K);
    mpz_fdiv_r_2exp(hi.get_mpz_t(), response.interval.get_mpz_t(), K);
    if (!(lo < hi)) return {Reject::inconsistent_interval};
    const BigInt& d = queried_digest;
    if (response.answer == Answer::member) {
        if (d != lo || d == 0) return {Reject::inconsistent_interval};
    } else {
        const bool inside = lo < d && d < hi;
        const bool low_sentinel = d == 0 && lo == 0;
        const bool high_sentinel = d == top && hi == top;
        if (!inside && !low_sentinel && !high_sentinel) return {Reject::inconsistent_interval};
    }

    const BigInt e = interval_digest(params, app_hash, response.interval);
    if (response.witness.has_value() == response.chain.has_value()) return {Reject::bad_proof};
    if (response.witness) {
        const Witness& w = *response.witness;
        if (w.element != e || !verify(params, e, w.x, w.value, A, counter)) return {Reject::bad_proof};
    } else if (!verify_chain(params, app_hash, e, *response.chain, A, counter)) {
        return {Reject::bad_proof};
    }
    return {};
}

}  // namespace accdict
