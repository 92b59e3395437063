#include <gtest/gtest.h>

#include <optional>
#include <set>

#include "accdict/protocol.hpp"
#include "test_util.hpp"

using namespace accdict;

namespace {

std::vector<BigInt> values_of(std::initializer_list<int> xs) {
    std::vector<BigInt> out;
    for (int x : xs) out.emplace_back(x);
    return out;
}

// A K = 4 instance in toy mode so the interval examples can run end to end.
struct SmallWorld {
    Instance inst;
    std::shared_ptr<const SignatureScheme> signer = make_signature_scheme("keyed-digest");
    KeyPair keys;

    explicit SmallWorld(std::uint64_t seed) {
        Rng rng(seed);
        SetupOptions opts;
        opts.toy = true;
        inst = setup(4, rng, opts);
        keys = signer->keygen(rng);
    }

    std::unique_ptr<Source> source(Scheme scheme, std::uint64_t seed = 1) const {
        SchemeConfig cfg;
        cfg.scheme = scheme;
        return std::make_unique<Source>(inst.params, inst.trapdoor, cfg, signer, keys.secret_key, seed);
    }
};

// Production-mode world with a real modulus.
struct World {
    Instance inst;
    std::shared_ptr<const SignatureScheme> signer;
    KeyPair keys;
    Rng rng;

    World(std::uint64_t seed, unsigned k = 32, std::string_view sig = "keyed-digest")
        : signer(make_signature_scheme(sig)), rng(seed) {
        inst = setup(k, rng);
        keys = signer->keygen(rng);
    }

    BigInt random_digest() {
        const BigInt top = (BigInt(1) << inst.params.k) - 1;
        for (;;) {
            BigInt d = random_bits(rng, inst.params.k);
            if (d != 0 && d != top) return d;
        }
    }
};

}  // namespace

TEST(Intervals, BuildExamples) {
    const auto s = IntervalSet::build(4, values_of({3, 9}));
    EXPECT_EQ(s.values(), values_of({3, 57, 159}));
    EXPECT_TRUE(s.tiles());
    const IntervalSet empty(4);
    EXPECT_EQ(empty.values(), values_of({15}));
    EXPECT_EQ(empty.size(), 1u);
    EXPECT_TRUE(empty.tiles());
    EXPECT_EQ(s.split(57), (std::pair<BigInt, BigInt>{3, 9}));
    EXPECT_EQ(s.join(9, 15), 159);
}

TEST(Intervals, DiffExamples) {
    const auto s = IntervalSet::build(4, values_of({3, 9}));
    const auto ins = s.diff(UpdateOp::insert, 6);
    EXPECT_EQ(ins.removed, values_of({57}));
    EXPECT_EQ(ins.added, values_of({54, 105}));  // 3|6, 6|9
    const auto del = s.diff(UpdateOp::erase, 9);
    EXPECT_EQ(del.removed, values_of({57, 159}));
    EXPECT_EQ(del.added, values_of({63}));  // 3|15

    auto t = s;
    t.apply(UpdateOp::insert, 6);
    t.apply(UpdateOp::erase, 6);
    EXPECT_EQ(t.values(), s.values());
}

TEST(Intervals, DiffErrors) {
    const auto s = IntervalSet::build(4, values_of({3, 9}));
    auto code_of = [&](UpdateOp op, int d) -> std::optional<errc> {
        try {
            s.diff(op, d);
        } catch (const error& e) {
            return e.code();
        }
        return std::nullopt;
    };
    EXPECT_EQ(code_of(UpdateOp::insert, 3), errc::duplicate);
    EXPECT_EQ(code_of(UpdateOp::erase, 4), errc::not_a_member);
    EXPECT_EQ(code_of(UpdateOp::insert, 0), errc::sentinel_digest);
    EXPECT_EQ(code_of(UpdateOp::insert, 15), errc::sentinel_digest);
    EXPECT_EQ(code_of(UpdateOp::insert, 16), errc::domain_error);
}

TEST(Intervals, TilingSurvivesRandomOps) {
    Rng rng(1);
    IntervalSet s(10);
    std::set<BigInt> model;
    for (int i = 0; i < 10000; ++i) {
        const BigInt d = 1 + static_cast<long>(rng() % 1022);
        const UpdateOp op = model.count(d) ? UpdateOp::erase : UpdateOp::insert;
        const auto delta = s.diff(op, d);
        ASSERT_EQ(delta.removed.size() + delta.added.size(), 3u);
        s.apply(op, d);
        if (op == UpdateOp::insert) model.insert(d);
        else model.erase(d);
        ASSERT_TRUE(s.tiles());
        ASSERT_EQ(s.size(), model.size() + 1);
    }
}

TEST(Signatures, SignVerifyAndBitFlips) {
    Rng rng(2);
    for (const char* name : {"keyed-digest", "ed25519"}) {
        const auto scheme = make_signature_scheme(name);
        const KeyPair kp = scheme->keygen(rng);
        const Bytes msg{1, 2, 3, 4, 5, 6, 7, 8};
        const Bytes sig = scheme->sign(kp.secret_key, msg);
        EXPECT_EQ(sig.size(), scheme->signature_size());
        EXPECT_TRUE(scheme->verify(kp.public_key, msg, sig)) << name;
        for (std::size_t bit = 0; bit < msg.size() * 8; ++bit) {
            Bytes m = msg;
            m[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            ASSERT_FALSE(scheme->verify(kp.public_key, m, sig)) << name;
        }
        for (std::size_t bit = 0; bit < sig.size() * 8; ++bit) {
            Bytes s = sig;
            s[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            ASSERT_FALSE(scheme->verify(kp.public_key, msg, s)) << name;
        }
    }
    EXPECT_THROW(make_signature_scheme("rot13"), error);
}

TEST(Signatures, Ed25519IsDeterministicPerSeed) {
    Rng a(3), b(3);
    const auto scheme = make_signature_scheme("ed25519");
    EXPECT_EQ(scheme->keygen(a).public_key, scheme->keygen(b).public_key);
}

TEST(Basis, LineRoundTrip) {
    Basis b{AccumulationValue{BigInt("123456789abcdef", 16)}, 40000, Bytes{0xde, 0xad, 0xbe, 0xef}};
    EXPECT_EQ(parse_basis_line(basis_line(b)), b);
    EXPECT_THROW(parse_basis_line("nonsense"), error);
}

TEST(Basis, MessageLayout) {
    const Instance t = toy_instance();
    const Bytes m = basis_message(t.params, AccumulationValue{208}, 0x0102);
    ASSERT_EQ(m.size(), 4u + t.params.residue_bytes() + 8u);
    EXPECT_EQ(m[3], 2);  // k
    EXPECT_EQ(m[4], 208);
    EXPECT_EQ(m[m.size() - 2], 1);
    EXPECT_EQ(m.back(), 2);
}

TEST(Protocol, FreshnessWindowAndSignature) {
    SmallWorld w(4);
    auto src = w.source(Scheme::straightforward);
    const std::vector<BigInt> X = values_of({3, 9});
    src->build(X);
    Directory dir(w.inst.params, Scheme::straightforward);
    dir.apply(src->epoch_commit(10, 10000));  // t = 100000
    const QueryResponse r = dir.answer_query(5);
    EXPECT_EQ(r.basis.t, 100000u);
    auto check = [&](const QueryResponse& resp, std::uint64_t now) {
        return user_verify(resp, 5, *w.signer, w.keys.public_key, now, 10000, w.inst.params).reason;
    };
    EXPECT_EQ(check(r, 105000), Reject::none);
    EXPECT_EQ(check(r, 100000), Reject::none);
    EXPECT_EQ(check(r, 111000), Reject::stale);
    EXPECT_EQ(check(r, 110000), Reject::stale);
    EXPECT_EQ(check(r, 99999), Reject::stale);
    QueryResponse flipped = r;
    flipped.basis.sig[0] ^= 1;
    EXPECT_EQ(check(flipped, 105000), Reject::bad_signature);
}

TEST(Protocol, SmallDictionaryQueries) {
    SmallWorld w(5);
    for (Scheme scheme : {Scheme::straightforward, Scheme::precomputed, Scheme::partitioned, Scheme::hierarchical}) {
        auto src = w.source(scheme);
        src->build(values_of({3, 9}));
        Directory dir(w.inst.params, scheme);
        dir.apply(src->epoch_commit(1, 1000));
        EXPECT_EQ(dir.interval_count(), 3u);

        const QueryResponse three = dir.answer_query(3);
        EXPECT_EQ(three.answer, Answer::member);
        EXPECT_TRUE(three.interval == 3 || three.interval == 57) << to_string(scheme);

        const QueryResponse five = dir.answer_query(5);
        EXPECT_EQ(five.answer, Answer::non_member);
        EXPECT_EQ(five.interval, 57);

        const QueryResponse fifteen = dir.answer_query(15);
        EXPECT_EQ(fifteen.answer, Answer::non_member);
        EXPECT_EQ(fifteen.interval, 159);

        const QueryResponse zero = dir.answer_query(0);
        EXPECT_EQ(zero.answer, Answer::non_member);
        EXPECT_EQ(zero.interval, 3);

        for (int d = 0; d < 16; ++d) {
            const QueryResponse r = dir.answer_query(d);
            EXPECT_EQ(r.answer == Answer::member, d == 3 || d == 9) << d;
            EXPECT_TRUE(user_verify(r, d, *w.signer, w.keys.public_key, 1000, 1000, w.inst.params))
                << to_string(scheme) << " digest " << d;
        }
    }
}

TEST(Protocol, AnswerBeforeBasisFails) {
    SmallWorld w(6);
    Directory dir(w.inst.params, Scheme::straightforward);
    try {
        dir.answer_query(5);
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::not_initialized);
    }
}

TEST(Protocol, EmptyDictionaryUsesSentinelInterval) {
    SmallWorld w(7);
    auto src = w.source(Scheme::precomputed);
    Directory dir(w.inst.params, Scheme::precomputed);
    dir.apply(src->epoch_commit(0, 1000));
    const QueryResponse r = dir.answer_query(6);
    EXPECT_EQ(r.answer, Answer::non_member);
    EXPECT_EQ(r.interval, 15);
    EXPECT_TRUE(user_verify(r, 6, *w.signer, w.keys.public_key, 10, 1000, w.inst.params));
}

TEST(Protocol, IngestRejectsSentinels) {
    World w(8, 8);
    SchemeConfig cfg;
    Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 1);
    int sentinels = 0, ok = 0;
    for (int i = 0; i < 2000; ++i) {
        const std::string s = "element-" + std::to_string(i);
        try {
            const BigInt d = src.ingest(as_bytes(s));
            EXPECT_EQ(d, default_app_hash()(as_bytes(s), 8));
            ++ok;
        } catch (const error& e) {
            EXPECT_EQ(e.code(), errc::sentinel_digest);
            ++sentinels;
        }
    }
    EXPECT_GT(sentinels, 0);  // 2 of 256 digests are reserved
    EXPECT_GT(ok, 1900);
}

TEST(Protocol, EpochCommitExamples) {
    World w(9);
    SchemeConfig cfg;
    Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 1);
    std::vector<BigInt> X;
    for (int i = 0; i < 10; ++i) X.push_back(w.random_digest());
    src.build(X);
    const UpdateInfo a = src.epoch_commit(3, 500);
    const UpdateInfo b = src.epoch_commit(4, 500);
    EXPECT_EQ(a.basis.A, b.basis.A);
    EXPECT_EQ(a.basis.t, 1500u);
    EXPECT_EQ(b.basis.t, 2000u);
    EXPECT_TRUE(w.signer->verify(w.keys.public_key, basis_message(w.inst.params, a.basis.A, a.basis.t), a.basis.sig));
    EXPECT_EQ(a.flat.added.size(), 11u);
    EXPECT_TRUE(b.flat.added.empty());
    EXPECT_THROW(src.epoch_commit(1, 0), error);

    // One removal and two additions in Y: rebuild the survivors publicly, then
    // apply insert_element for each addition.
    const BigInt d = w.random_digest();
    const auto delta = src.intervals().diff(UpdateOp::insert, d);
    src.insert_digest(d);
    const UpdateInfo c = src.epoch_commit(5, 500);
    ASSERT_EQ(c.flat.added.size(), 2u);
    ASSERT_EQ(c.flat.removed, delta.removed);

    std::vector<BigInt> remaining;
    for (const Item& it : a.flat.added) {
        if (it.key != delta.removed[0]) remaining.push_back(it.rep);
    }
    AccumulationValue expect = accumulate_public(w.inst.params, remaining);
    for (const Item& it : c.flat.added) expect = insert_element(w.inst.params, expect, it.rep);
    EXPECT_EQ(c.basis.A, expect);
}

TEST(Protocol, EpochCommitMatchesInsertElementOnPureAddition) {
    World w(10);
    SchemeConfig cfg;
    Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 1);
    src.build({});
    const AccumulationValue before = src.epoch_commit(0, 100).basis.A;
    ASSERT_EQ(src.intervals().size(), 1u);
    const BigInt d = w.random_digest();
    src.insert_digest(d);
    const UpdateInfo after = src.epoch_commit(2, 100);
    // Y goes from {0|top} to {0|d, d|top}.
    AccumulationValue expect{w.inst.params.a};
    for (const Item& it : after.flat.added) expect = insert_element(w.inst.params, expect, it.rep);
    EXPECT_EQ(after.basis.A, expect);
    EXPECT_NE(before, after.basis.A);
}

TEST(Protocol, TwoSidedCompletenessAllSchemes) {
    World w(11);
    for (Scheme scheme : {Scheme::straightforward, Scheme::precomputed, Scheme::partitioned, Scheme::hierarchical}) {
        SchemeConfig cfg;
        cfg.scheme = scheme;
        Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 2);
        std::set<BigInt> members;
        while (members.size() < 100) members.insert(w.random_digest());
        const std::vector<BigInt> X(members.begin(), members.end());
        src.build(X);
        Directory dir(w.inst.params, scheme);
        dir.apply(src.epoch_commit(7, 1000));
        for (const BigInt& d : X) {
            const QueryResponse r = dir.answer_query(d);
            ASSERT_EQ(r.answer, Answer::member);
            ASSERT_TRUE(user_verify(r, d, *w.signer, w.keys.public_key, 7500, 1000, w.inst.params));
        }
        for (int i = 0; i < 100; ++i) {
            const BigInt d = w.random_digest();
            const QueryResponse r = dir.answer_query(d);
            ASSERT_EQ(r.answer == Answer::member, members.count(d) == 1);
            ASSERT_TRUE(user_verify(r, d, *w.signer, w.keys.public_key, 7000, 1000, w.inst.params));
        }
    }
}

TEST(Protocol, DirectoryFollowsUpdatesAcrossEpochs) {
    World w(12);
    for (Scheme scheme : {Scheme::straightforward, Scheme::precomputed, Scheme::partitioned, Scheme::hierarchical}) {
        SchemeConfig cfg;
        cfg.scheme = scheme;
        Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 3);
        Directory dir(w.inst.params, scheme);
        std::set<BigInt> members;
        for (std::uint64_t epoch = 0; epoch < 12; ++epoch) {
            for (int i = 0; i < 10; ++i) {
                if (!members.empty() && w.rng() % 4 == 0) {
                    auto it = members.begin();
                    std::advance(it, static_cast<long>(w.rng() % members.size()));
                    src.erase_digest(*it);
                    members.erase(it);
                } else {
                    const BigInt d = w.random_digest();
                    if (members.insert(d).second) src.insert_digest(d);
                }
            }
            const UpdateInfo info = src.epoch_commit(epoch, 1000);
            dir.apply(decode_update(encode_update(info)));
            ASSERT_EQ(dir.interval_count(), members.size() + 1);
            const std::uint64_t now = epoch * 1000 + 1;
            for (const BigInt& d : members) {
                const QueryResponse r = dir.answer_query(d);
                ASSERT_EQ(r.answer, Answer::member);
                ASSERT_TRUE(user_verify(r, d, *w.signer, w.keys.public_key, now, 1000, w.inst.params))
                    << to_string(scheme) << " epoch " << epoch;
            }
            const BigInt probe = w.random_digest();
            const QueryResponse r = dir.answer_query(probe);
            ASSERT_TRUE(user_verify(r, probe, *w.signer, w.keys.public_key, now, 1000, w.inst.params));
        }
    }
}

TEST(Protocol, TamperedResponsesAreRejected) {
    World w(13);
    for (Scheme scheme : {Scheme::partitioned, Scheme::hierarchical}) {
        SchemeConfig cfg;
        cfg.scheme = scheme;
        Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 4);
        std::vector<BigInt> X;
        for (int i = 0; i < 40; ++i) X.push_back(w.random_digest());
        src.build(X);
        Directory dir(w.inst.params, scheme);
        dir.apply(src.epoch_commit(2, 1000));
        const QueryResponse good = dir.answer_query(X[5]);
        ASSERT_TRUE(user_verify(good, X[5], *w.signer, w.keys.public_key, 2000, 1000, w.inst.params));

        // Single-field mutations.
        std::vector<QueryResponse> bad(6, good);
        bad[0].answer = Answer::non_member;
        bad[1].interval += 1;
        bad[2].basis.t += 1;
        bad[3].basis.A.value += 1;
        bad[4].digest += 1;
        if (bad[5].witness) bad[5].witness->value += 1;
        else bad[5].chain->witnesses[0] += 1;
        for (const auto& b : bad) {
            EXPECT_FALSE(user_verify(b, X[5], *w.signer, w.keys.public_key, 2000, 1000, w.inst.params));
        }

        // Random bit flips in the serialized form.
        const Bytes bytes = encode_response(w.inst.params, good);
        int accepted = 0;
        for (int i = 0; i < 300; ++i) {
            Bytes b = bytes;
            const std::size_t bit = w.rng() % (b.size() * 8);
            b[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            try {
                const QueryResponse r = decode_response(w.inst.params, b);
                accepted += user_verify(r, X[5], *w.signer, w.keys.public_key, 2000, 1000, w.inst.params).accepted();
            } catch (const error&) {
            }
        }
        EXPECT_EQ(accepted, 0) << to_string(scheme);
    }
}

TEST(Protocol, ResponseLengthIgnoresN) {
    World w(14);
    for (Scheme scheme : {Scheme::straightforward, Scheme::partitioned, Scheme::hierarchical}) {
        std::set<std::size_t> lengths;
        for (std::size_t n : {16u, 64u, 256u}) {
            SchemeConfig cfg;
            cfg.scheme = scheme;
            Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 5);
            std::vector<BigInt> X;
            for (std::size_t i = 0; i < n; ++i) X.push_back(w.random_digest());
            src.build(X);
            Directory dir(w.inst.params, scheme);
            dir.apply(src.epoch_commit(1, 1000));
            for (int i = 0; i < 4; ++i) {
                const QueryResponse r = dir.answer_query(i % 2 ? X[static_cast<std::size_t>(i)] : w.random_digest());
                const Bytes bytes = encode_response(w.inst.params, r);
                lengths.insert(bytes.size());
                EXPECT_EQ(decode_response(w.inst.params, bytes), r);
            }
        }
        EXPECT_EQ(lengths.size(), 1u) << to_string(scheme);
    }
}

TEST(Protocol, UpdateEncodingRoundTrip) {
    World w(15);
    for (Scheme scheme : {Scheme::straightforward, Scheme::precomputed, Scheme::partitioned, Scheme::hierarchical}) {
        SchemeConfig cfg;
        cfg.scheme = scheme;
        Source src(w.inst.params, w.inst.trapdoor, cfg, w.signer, w.keys.secret_key, 6);
        std::vector<BigInt> X;
        for (int i = 0; i < 20; ++i) X.push_back(w.random_digest());
        src.build(X);
        const UpdateInfo first = src.epoch_commit(0, 100);
        EXPECT_EQ(decode_update(encode_update(first)), first);
        src.insert_digest(w.random_digest());
        src.erase_digest(X[3]);
        const UpdateInfo second = src.epoch_commit(1, 100);
        const Bytes bytes = encode_update(second);
        EXPECT_EQ(decode_update(bytes), second);
        EXPECT_THROW(decode_update(std::span<const std::uint8_t>(bytes.data(), bytes.size() - 1)), error);
    }
}

TEST(Protocol, SchemeNames) {
    for (Scheme s : {Scheme::straightforward, Scheme::precomputed, Scheme::partitioned, Scheme::hierarchical})
        EXPECT_EQ(parse_scheme(to_string(s)), s);
    EXPECT_THROW(parse_scheme("quantum"), error);
}

TEST(Protocol, ResolveRules) {
    EXPECT_EQ(resolve_p("sqrt", 1024), 32u);
    EXPECT_EQ(resolve_p("sqrt", 1), 1u);
    EXPECT_EQ(resolve_p("7", 100), 7u);
    EXPECT_EQ(resolve_p("7", 3), 3u);
    EXPECT_THROW(resolve_p("lots", 10), error);
    EXPECT_EQ(resolve_branching("c=2", 4096), (std::vector<std::size_t>{16, 16}));
    EXPECT_EQ(resolve_branching("0.5,0.25", 1u << 12), (std::vector<std::size_t>{64, 8}));
    const auto small = resolve_branching("c=2", 3);
    std::size_t prod = 1;
    for (std::size_t g : small) prod *= g;
    EXPECT_LE(prod, 3u);
    EXPECT_THROW(resolve_branching("c=0", 10), error);
}
