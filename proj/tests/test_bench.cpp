#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "accdict/bench.hpp"

using namespace accdict;

namespace {

// Drops the wall_time_us column from every CSV row.
std::string without_wall_time(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ls(line);
        std::string col;
        while (std::getline(ls, col, ',')) cols.push_back(col);
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i == 3) continue;
            out << cols[i] << ';';
        }
        out << '\n';
    }
    return out.str();
}

BenchConfig small_config() {
    BenchConfig cfg;
    cfg.k = 16;
    cfg.item_bits = 64;
    cfg.schemes = {"straightforward", "precomputed", "partitioned:sqrt", "hierarchical:c=2"};
    cfg.n_values = {16, 64};
    cfg.runs = 2;
    cfg.seed = 9;
    cfg.proof_sample = 0.5;
    return cfg;
}

}  // namespace

TEST(Bench, LogLogFit) {
    const double x[] = {1, 2, 4, 8, 16};
    double y[5];
    for (int i = 0; i < 5; ++i) y[i] = 3 * std::sqrt(x[i]);
    const ScalingFit fit = loglog_fit(x, y);
    EXPECT_NEAR(fit.slope, 0.5, 1e-12);
    EXPECT_NEAR(fit.intercept, std::log(3.0), 1e-12);
    const double one[] = {1};
    EXPECT_THROW(loglog_fit(one, one), error);
    const double zero[] = {0, 1};
    EXPECT_THROW(loglog_fit(zero, zero), error);
}

TEST(Bench, NumberFormattingIsFixed) {
    EXPECT_EQ(format_number(1.5), "1.500");
    EXPECT_EQ(format_number(0), "0.000");
    EXPECT_EQ(format_number(12345.6789), "12345.679");
}

TEST(Bench, CsvHeaderAndRows) {
    const BenchRecord rows[] = {{"precomputed", 1024, "insert", 10.25, 2048, 4096}};
    std::ostringstream out;
    write_csv(out, rows);
    EXPECT_EQ(out.str(),
              "scheme,n,operation,wall_time_us,modexp_count,modmul_count\n"
              "precomputed,1024,insert,10.250,2048.000,4096.000\n");
}

TEST(Bench, SameSeedSameCounts) {
    const BenchConfig cfg = small_config();
    Rng rng(1);
    const Instance inst = setup(cfg.k, rng);
    std::ostringstream a, b;
    const BenchResult first = run_bench(cfg, inst);
    const BenchResult second = run_bench(cfg, inst);
    write_csv(a, first.records);
    write_csv(b, second.records);
    EXPECT_EQ(without_wall_time(a.str()), without_wall_time(b.str()));
    // Three operations per (scheme, n), plus the prime representative row.
    EXPECT_EQ(first.records.size(), 4u * 2u * 3u + 1u);
    EXPECT_EQ(first.records.back().operation, "prime_rep");
    EXPECT_GT(first.proofs_checked, 0u);
    EXPECT_EQ(first.proof_failures, 0u);
    EXPECT_EQ(first.proofs_checked, second.proofs_checked);
    EXPECT_GT(first.rep_time_us, 0);
}

TEST(Bench, CountsReflectSchemeShape) {
    BenchConfig cfg = small_config();
    cfg.schemes = {"straightforward", "precomputed"};
    cfg.n_values = {32};
    Rng rng(2);
    const Instance inst = setup(cfg.k, rng);
    const BenchResult r = run_bench(cfg, inst);
    auto find = [&](const std::string& scheme, const std::string& op) {
        for (const BenchRecord& rec : r.records)
            if (rec.scheme == scheme && rec.operation == op) return rec;
        ADD_FAILURE() << scheme << "/" << op;
        return BenchRecord{};
    };
    EXPECT_EQ(find("straightforward", "insert").modexp_count, 1);
    EXPECT_EQ(find("straightforward", "query").modexp_count, 31);
    EXPECT_EQ(find("precomputed", "query").modexp_count, 0);
    EXPECT_GT(find("precomputed", "insert").modexp_count, 32);
}

TEST(Bench, RejectsBadConfig) {
    Rng rng(3);
    const Instance inst = setup(16, rng);
    BenchConfig cfg = small_config();
    cfg.runs = 0;
    EXPECT_THROW(run_bench(cfg, inst), error);
    cfg = small_config();
    cfg.schemes = {"mystery"};
    EXPECT_THROW(run_bench(cfg, inst), error);
    cfg = small_config();
    ItemPool tiny;
    EXPECT_THROW(run_bench(cfg, inst, tiny), error);
}

TEST(Bench, ItemPoolHasDistinctDigests) {
    Rng rng(4);
    const Instance inst = setup(16, rng);
    const ItemPool pool = make_item_pool(inst.params, 200, 165, rng);
    std::set<BigInt> seen;
    for (const Item& it : pool.items) {
        EXPECT_TRUE(seen.insert(it.digest).second);
        EXPECT_EQ(inst.params.rep_hash.eval(it.rep), it.digest);
    }
}
