#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "accdict/accumulator.hpp"
#include "accdict/app_hash.hpp"
#include "accdict/hierarchical.hpp"
#include "accdict/item.hpp"
#include "accdict/partitioned.hpp"
#include "accdict/signature.hpp"

namespace accdict {

enum class Scheme : std::uint8_t { straightforward = 0, precomputed = 1, partitioned = 2, hierarchical = 3 };

const char* to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

// Sorted K-bit digests x_1..x_n with sentinels x_0 = 0 and x_{n+1} = 2^K - 1.
// Members are the 2K-bit values x_i * 2^K + x_{i+1}.
class IntervalSet {
public:
    explicit IntervalSet(unsigned K);
    static IntervalSet build(unsigned K, std::span<const BigInt> digests);

    unsigned K() const noexcept { return K_; }
    const BigInt& top() const noexcept { return top_; }
    const std::set<BigInt>& digests() const noexcept { return x_; }
    std::size_t size() const noexcept { return x_.size() + 1; }
    bool contains(const BigInt& digest) const { return x_.count(digest) != 0; }

    BigInt join(const BigInt& lo, const BigInt& hi) const;
    std::pair<BigInt, BigInt> split(const BigInt& interval) const;

    std::vector<BigInt> values() const;

    struct Delta {
        std::vector<BigInt> removed;
        std::vector<BigInt> added;
    };
    // Insert: one removal and two additions. Delete: two removals and one addition.
    Delta diff(UpdateOp op, const BigInt& digest) const;
    void apply(UpdateOp op, const BigInt& digest);

    // The intervals cover [0, 2^K - 1] with no gaps or overlaps.
    bool tiles() const;

private:
    unsigned K_;
    BigInt top_;
    std::set<BigInt> x_;
};

// The signed pair (A, t).
struct Basis {
    AccumulationValue A;
    std::uint64_t t = 0;
    Bytes sig;
    friend bool operator==(const Basis&, const Basis&) = default;
};

// 4-byte big-endian k, fixed-width big-endian A, 8-byte big-endian t.
Bytes basis_message(const PublicParams& params, const AccumulationValue& A, std::uint64_t t);
std::string basis_line(const Basis& basis);
Basis parse_basis_line(std::string_view line);

struct ItemWitness {
    Item item;
    BigInt witness;
    friend bool operator==(const ItemWitness&, const ItemWitness&) = default;
};

struct FlatDelta {
    std::vector<Item> added;
    std::vector<BigInt> removed;
    friend bool operator==(const FlatDelta&, const FlatDelta&) = default;
};

// Per-epoch data shipped from the source to directories. Only the member
// matching `scheme` is populated.
struct UpdateInfo {
    Scheme scheme = Scheme::straightforward;
    Basis basis;
    FlatDelta flat;
    std::vector<ItemWitness> witnesses;
    PartitionUpdate partition;
    HierarchyUpdate hierarchy;
    friend bool operator==(const UpdateInfo&, const UpdateInfo&) = default;
};

Bytes encode_update(const UpdateInfo& info);
UpdateInfo decode_update(std::span<const std::uint8_t> bytes);

struct SchemeConfig {
    Scheme scheme = Scheme::straightforward;
    // "sqrt" or a fixed group count.
    std::string p_rule = "sqrt";
    // "c=<levels>" for the uniform hierarchy, or exponents such as "0.5,0.25".
    std::string branching = "c=2";
};

std::size_t resolve_p(const std::string& rule, std::size_t n);
// Clamped so the product of the factors never exceeds n.
std::vector<std::size_t> resolve_branching(const std::string& spec, std::size_t n);
std::vector<std::size_t> resolve_branching_raw(const std::string& spec, std::size_t n);

// Interval digest: app_hash over the fixed-width 2K-bit encoding.
BigInt interval_digest(const PublicParams& params, const AppHash& app_hash, const BigInt& interval);

class Source {
public:
    Source(const PublicParams& params, const TrapdoorKey& trapdoor, SchemeConfig config,
           std::shared_ptr<const SignatureScheme> signer, Bytes secret_key, std::uint64_t seed,
           AppHash app_hash = default_app_hash());
    Source(const Source&) = delete;
    Source& operator=(const Source&) = delete;

    // Digest of an application element; throws sentinel_digest for 0 and 2^K - 1.
    BigInt ingest(std::span<const std::uint8_t> element) const;

    void build(std::span<const BigInt> digests);
    void insert_digest(const BigInt& digest);
    void erase_digest(const BigInt& digest);
    void insert_element(std::span<const std::uint8_t> element) { insert_digest(ingest(element)); }
    void erase_element(std::span<const std::uint8_t> element) { erase_digest(ingest(element)); }

    UpdateInfo epoch_commit(std::uint64_t epoch_index, std::uint64_t delta_ms);

    const PublicParams& params() const noexcept { return params_; }
    const IntervalSet& intervals() const noexcept { return intervals_; }
    AccumulationValue accumulation() const;
    const SchemeConfig& config() const noexcept { return config_; }
    RepresentativeCache& rep_cache() noexcept { return cache_; }
    const PartitionState* partition() const noexcept { return partition_ ? &*partition_ : nullptr; }
    const Hierarchy* hierarchy() const noexcept { return hierarchy_ ? &*hierarchy_ : nullptr; }
    void set_counter(OpCounter* counter);

private:
    Item make_item(const BigInt& interval);
    void apply_delta(const IntervalSet::Delta& delta);
    // Re-derive p or the branching once n leaves [shaped_n / 2, 2 * shaped_n].
    void maybe_reshape();

    PublicParams params_;
    TrapdoorKey trapdoor_;
    SchemeConfig config_;
    std::shared_ptr<const SignatureScheme> signer_;
    Bytes secret_key_;
    AppHash app_hash_;
    Rng rng_;
    RepresentativeCache cache_;
    OpCounter* counter_ = nullptr;

    IntervalSet intervals_;
    std::map<BigInt, Item> items_;
    std::map<BigInt, Item> committed_;
    std::optional<PartitionState> partition_;
    std::optional<Hierarchy> hierarchy_;
    bool built_ = false;
    std::size_t shaped_n_ = 0;
};

enum class Answer : std::uint8_t { non_member = 0, member = 1 };

struct QueryResponse {
    Answer answer = Answer::non_member;
    BigInt digest;    // the queried digest
    BigInt interval;  // 2K-bit interval value
    // Exactly one of the two proofs is set.
    std::optional<Witness> witness;
    std::optional<ProofChain> chain;
    Basis basis;
    friend bool operator==(const QueryResponse& a, const QueryResponse& b) {
        return a.answer == b.answer && a.digest == b.digest && a.interval == b.interval && a.chain == b.chain &&
               a.basis == b.basis && a.witness.has_value() == b.witness.has_value() &&
               (!a.witness || (a.witness->element == b.witness->element && a.witness->x == b.witness->x &&
                               a.witness->value == b.witness->value));
    }
};

// Fixed-width fields; the length depends on k, |N|, c and the signature only.
Bytes encode_response(const PublicParams& params, const QueryResponse& response);
QueryResponse decode_response(const PublicParams& params, std::span<const std::uint8_t> bytes);

class Directory {
public:
    Directory(const PublicParams& params, Scheme scheme, AppHash app_hash = default_app_hash());

    void apply(const UpdateInfo& info);
    QueryResponse answer_query(const BigInt& digest, OpCounter* counter = nullptr) const;

    bool has_basis() const noexcept { return basis_.has_value(); }
    std::size_t interval_count() const;

private:
    Item floor_interval(const BigInt& probe) const;

    PublicParams params_;
    Scheme scheme_;
    AppHash app_hash_;
    std::optional<Basis> basis_;
    std::map<BigInt, Item> flat_;
    std::map<BigInt, ItemWitness> precomputed_;
    PartitionView partition_;
    HierarchyView hierarchy_;
};

enum class Reject { none, bad_signature, stale, bad_proof, inconsistent_interval };
const char* to_string(Reject r);

struct Verdict {
    Reject reason = Reject::none;
    bool accepted() const noexcept { return reason == Reject::none; }
    explicit operator bool() const noexcept { return accepted(); }
};

// Signature, freshness (t <= now < t + delta), interval consistency with the
// answer for `queried_digest`, then the accumulator proof.
Verdict user_verify(const QueryResponse& response, const BigInt& queried_digest, const SignatureScheme& scheme,
                    std::span<const std::uint8_t> public_key, std::uint64_t now_ms, std::uint64_t delta_ms,
                    const PublicParams& params, const AppHash& app_hash = default_app_hash(),
                    OpCounter* counter = nullptr);

}  // namespace accdict
