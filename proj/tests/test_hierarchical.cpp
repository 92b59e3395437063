#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "accdict/hierarchical.hpp"
#include "test_util.hpp"

using namespace accdict;

namespace {

struct Fixture {
    Instance inst;
    Rng rng;
    RepresentativeCache cache;

    explicit Fixture(std::uint64_t seed, unsigned k = 16)
        : inst(k == 2 ? toy_instance() : make(k, seed)), rng(seed), cache(inst.params.rep_hash) {}

    static Instance make(unsigned k, std::uint64_t seed) {
        Rng r(seed);
        return setup(k, r);
    }

    Hierarchy build(std::vector<Item> items, std::vector<std::size_t> branching) {
        return Hierarchy::build(inst.params, inst.trapdoor, std::move(items), std::move(branching), cache, rng);
    }
};

const HierNode& child_of(const Hierarchy& h, const HierNode& node, std::size_t i) {
    return h.nodes().at(node.members.at(i).child);
}

}  // namespace

TEST(Branching, Vectors) {
    EXPECT_EQ(uniform_branching(4096, 2), (std::vector<std::size_t>{16, 16}));
    EXPECT_EQ(uniform_branching(4, 1), (std::vector<std::size_t>{2}));
    const double half_quarter[] = {0.5, 0.25};
    EXPECT_EQ(branching_from_exponents(1u << 12, half_quarter), (std::vector<std::size_t>{64, 8}));
    const double thirds[] = {2.0 / 3, 1.0 / 3};
    EXPECT_EQ(branching_from_exponents(1u << 18, thirds), (std::vector<std::size_t>{4096, 64}));
    EXPECT_THROW(uniform_branching(16, 0), error);
    const double bad[] = {1.5};
    EXPECT_THROW(branching_from_exponents(16, bad), error);
}

TEST(Hierarchy, ToyTwoLevel) {
    Fixture f(1, 2);
    auto h = f.build(test::items_from_reps({5, 7, 11, 13}), {2});
    ASSERT_EQ(h.c(), 1u);
    const HierNode& root = h.nodes().at(h.root());
    ASSERT_EQ(root.members.size(), 2u);
    const HierNode& left = child_of(h, root, 0);
    const HierNode& right = child_of(h, root, 1);
    EXPECT_EQ(left.alpha, 142);
    EXPECT_EQ(right.alpha, accumulate_public(f.inst.params, std::vector<BigInt>{11, 13}).value);
    const std::vector<BigInt> child_reps{left.alpha_rep, right.alpha_rep};
    EXPECT_EQ(root.alpha, accumulate_public(f.inst.params, child_reps).value);
    EXPECT_EQ(h.accumulation().value, root.alpha);
    EXPECT_TRUE(h.invariants_hold());

    const ProofChain chain = h.prove_chain(1);
    ASSERT_EQ(chain.values.size(), 2u);
    EXPECT_EQ(chain.values[0], 142);
    EXPECT_EQ(chain.values[1], root.alpha);
    EXPECT_EQ(chain.witnesses[0], 128);  // 2^7
    EXPECT_EQ(chain.witnesses[1], modpow(2, right.alpha_rep, 253));
    EXPECT_EQ(chain.value_reps[0], left.alpha_rep);
    EXPECT_TRUE(verify_chain(f.inst.params, default_app_hash(), 0, chain, h.accumulation()));
    EXPECT_THROW(h.prove_chain(9), error);
}

TEST(Hierarchy, SingleItemChain) {
    Fixture f(2);
    auto items = test::random_items(f.inst.params, f.rng, 1, f.cache);
    auto h = f.build(items, {1, 1});
    const ProofChain chain = h.prove_chain(items[0].key);
    EXPECT_EQ(chain.values.size(), 3u);
    EXPECT_EQ(chain.witnesses.size(), 3u);
    EXPECT_EQ(chain.witnesses[0], f.inst.params.a);
    EXPECT_TRUE(verify_chain(f.inst.params, default_app_hash(), items[0].digest, chain, h.accumulation()));
    EXPECT_TRUE(h.invariants_hold());
}

TEST(Hierarchy, BuildRejectsBadShapes) {
    Fixture f(3);
    auto items = test::random_items(f.inst.params, f.rng, 4, f.cache);
    EXPECT_THROW(f.build(items, {}), error);
    EXPECT_THROW(f.build(items, {3, 2}), error);
    EXPECT_THROW(f.build({}, {1}), error);
}

TEST(Hierarchy, ChainsVerifyExactlyForMembers) {
    Fixture f(4);
    for (unsigned c : {1u, 2u}) {
        for (std::size_t n : {5u, 64u, 256u}) {
            auto items = test::random_items(f.inst.params, f.rng, n, f.cache);
            auto h = f.build(items, uniform_branching(n, c));
            const AccumulationValue A = h.accumulation();
            std::vector<ProofChain> chains;
            for (const Item& it : items) {
                chains.push_back(h.prove_chain(it.key));
                ASSERT_TRUE(verify_chain(f.inst.params, default_app_hash(), it.digest, chains.back(), A));
                ASSERT_EQ(chains.back().values.size(), c + 1);
            }
            // A non-member reusing any member's chain fails.
            std::set<BigInt> digests;
            for (const Item& it : items) digests.insert(it.digest);
            for (int i = 0; i < 50; ++i) {
                const Item other = test::random_items(f.inst.params, f.rng, 1, f.cache)[0];
                if (digests.count(other.digest)) continue;
                ProofChain forged = chains[static_cast<std::size_t>(i) % chains.size()];
                forged.element = other.digest;
                EXPECT_FALSE(verify_chain(f.inst.params, default_app_hash(), other.digest, forged, A));
                forged.x = other.rep;
                EXPECT_FALSE(verify_chain(f.inst.params, default_app_hash(), other.digest, forged, A));
            }
        }
    }
}

TEST(Hierarchy, TamperedChainsFail) {
    Fixture f(5);
    auto items = test::random_items(f.inst.params, f.rng, 100, f.cache);
    auto h = f.build(items, {5, 4});
    const AccumulationValue A = h.accumulation();
    const ProofChain good = h.prove_chain(items[17].key);
    for (int i = 0; i < 1000; ++i) {
        ProofChain bad = good;
        const std::size_t slot = static_cast<std::size_t>(i) % bad.witnesses.size();
        bad.witnesses[slot] = random_range(f.rng, 1, f.inst.params.N - 1);
        ASSERT_FALSE(verify_chain(f.inst.params, default_app_hash(), items[17].digest, bad, A));
    }
    ProofChain top = good;
    top.values.back() += 1;
    EXPECT_FALSE(verify_chain(f.inst.params, default_app_hash(), items[17].digest, top, A));
    EXPECT_FALSE(verify_chain(f.inst.params, default_app_hash(), items[17].digest, good,
                              AccumulationValue{A.value + 1}));
    ProofChain shortened = good;
    shortened.values.pop_back();
    EXPECT_FALSE(verify_chain(f.inst.params, default_app_hash(), items[17].digest, shortened, A));
}

TEST(Hierarchy, ChainEncodingIsSizeOblivious) {
    Fixture f(6);
    std::set<std::size_t> lengths;
    for (std::size_t n : {16u, 64u, 256u, 1024u}) {
        auto items = test::random_items(f.inst.params, f.rng, n, f.cache);
        auto h = f.build(items, uniform_branching(n, 2));
        for (std::size_t i = 0; i < n; i += n / 8) {
            const ProofChain chain = h.prove_chain(items[i].key);
            const auto bytes = encode_chain(f.inst.params, chain);
            lengths.insert(bytes.size());
            EXPECT_EQ(decode_chain(f.inst.params, bytes), chain);
        }
    }
    EXPECT_EQ(lengths.size(), 1u);
    EXPECT_THROW(encode_chain(f.inst.params, ProofChain{}), error);
    EXPECT_THROW(decode_chain(f.inst.params, std::vector<std::uint8_t>{2, 0, 0}), error);
}

TEST(Hierarchy, UpdatesKeepEveryNodeConsistent) {
    Fixture f(7);
    for (unsigned c : {1u, 2u}) {
        auto items = test::random_items(f.inst.params, f.rng, 60, f.cache);
        auto h = f.build(items, uniform_branching(items.size(), c));
        std::vector<Item> live = items;
        for (int step = 0; step < 120; ++step) {
            if (f.rng() % 2 && live.size() > 1) {
                const std::size_t idx = f.rng() % live.size();
                h.erase(live[idx].key);
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
            } else {
                live.push_back(test::random_items(f.inst.params, f.rng, 1, f.cache)[0]);
                h.insert(live.back());
            }
            ASSERT_TRUE(h.invariants_hold()) << "c=" << c << " step=" << step;
            ASSERT_EQ(h.size(), live.size());
        }
        for (const Item& it : live) {
            EXPECT_TRUE(verify_chain(f.inst.params, default_app_hash(), it.digest, h.prove_chain(it.key),
                                     h.accumulation()));
        }
        EXPECT_THROW(h.erase(BigInt(1) << 200), error);
        EXPECT_THROW(h.insert(live.front()), error);
    }
}

TEST(Hierarchy, DeleteThenReinsertRestoresRoot) {
    Fixture f(8);
    auto items = test::random_items(f.inst.params, f.rng, 64, f.cache);
    auto h = f.build(items, {8});
    const BigInt before = h.accumulation().value;
    h.erase(items[10].key);
    EXPECT_NE(h.accumulation().value, before);
    h.insert(items[10]);
    EXPECT_EQ(h.accumulation().value, before);
}

TEST(Hierarchy, InsertTouchesOnlyOnePath) {
    Fixture f(9);
    auto items = test::random_items(f.inst.params, f.rng, 1000, f.cache);
    auto h = f.build(items, {10});
    h.take_update();
    h.insert(test::random_items(f.inst.params, f.rng, 1, f.cache)[0]);
    const HierarchyUpdate up = h.take_update();
    EXPECT_EQ(up.nodes.size(), 2u);  // the leaf and the root
    EXPECT_TRUE(up.removed.empty());
}

TEST(Hierarchy, UpdateCostScalesWithBranching) {
    Fixture f(10);
    for (std::size_t n : {1024u, 4096u}) {
        auto items = test::random_items(f.inst.params, f.rng, n, f.cache);
        auto h = f.build(items, uniform_branching(n, 2));
        OpCounter c;
        h.set_counter(&c);
        h.insert(test::random_items(f.inst.params, f.rng, 1, f.cache)[0]);
        const double g = std::pow(static_cast<double>(n), 1.0 / 3);
        EXPECT_LE(static_cast<double>(c.modexp_count), 8 * 3 * g) << n;
    }
}

TEST(Hierarchy, ViewTracksSource) {
    Fixture f(11);
    auto items = test::random_items(f.inst.params, f.rng, 80, f.cache);
    auto h = f.build(items, {4, 4});
    HierarchyView v;
    v.apply(h.take_update());
    std::vector<Item> live = items;
    for (int round = 0; round < 8; ++round) {
        for (int i = 0; i < 12; ++i) {
            if (f.rng() % 3 == 0 && live.size() > 1) {
                const std::size_t idx = f.rng() % live.size();
                h.erase(live[idx].key);
                live.erase(live.begin() + static_cast<std::ptrdiff_t>(idx));
            } else {
                live.push_back(test::random_items(f.inst.params, f.rng, 1, f.cache)[0]);
                h.insert(live.back());
            }
        }
        if (round == 4) h.reshape({3, 3});
        v.apply(h.take_update());
        ASSERT_EQ(v.nodes(), h.nodes());
        ASSERT_EQ(v.size(), live.size());
        for (const Item& it : live) ASSERT_TRUE(v.contains(it.key));
    }
}

TEST(Hierarchy, TextUpdateAndSnapshot) {
    Fixture f(12);
    auto items = test::random_items(f.inst.params, f.rng, 30, f.cache);
    auto h = f.build(items, {3, 2});
    const HierarchyUpdate up = h.take_update();
    std::stringstream ss;
    write_hierarchy_update(ss, "basis ab 10000 cd", up);
    std::string basis;
    EXPECT_EQ(read_hierarchy_update(ss, basis), up);
    EXPECT_EQ(basis, "basis ab 10000 cd");

    std::stringstream snap;
    write_hierarchy_snapshot(snap, h.nodes(), h.root());
    std::string first;
    std::getline(snap, first);
    EXPECT_EQ(first.rfind(std::to_string(h.root()) + " " + std::to_string(h.root()) + " ", 0), 0u);
}
