#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "accdict/accumulator.hpp"
#include "accdict/item.hpp"

namespace accdict {

// Operations measured per run; zero skips that operation.
struct OpMix {
    unsigned insert = 1;
    unsigned erase = 1;
    unsigned query = 1;
};

struct BenchConfig {
    unsigned k = 64;
    unsigned modulus_bits = 200;
    unsigned item_bits = 165;
    // "straightforward", "precomputed", "partitioned:<p-rule>",
    // "hierarchical:<branching>" (see resolve_p / resolve_branching).
    std::vector<std::string> schemes = {"precomputed", "partitioned:sqrt"};
    std::vector<std::size_t> n_values = {1024, 4096};
    unsigned runs = 5;
    OpMix mix;
    std::uint64_t seed = 1;
    // Fraction of produced proofs re-verified.
    double proof_sample = 0.01;
};

struct BenchRecord {
    std::string scheme;
    std::size_t n = 0;
    std::string operation;
    double wall_time_us = 0;
    double modexp_count = 0;
    double modmul_count = 0;
};

struct ScalingFit {
    std::string scheme;
    std::string operation;
    double slope = 0;
    double intercept = 0;
};

struct BenchResult {
    std::vector<BenchRecord> records;
    std::vector<ScalingFit> fits;
    std::size_t reps_generated = 0;
    double rep_time_us = 0;  // mean per representative, excluded from insert timings
    std::size_t proofs_checked = 0;
    std::size_t proof_failures = 0;
};

// Items with random item_bits keys, digested to k bits, with representatives.
struct ItemPool {
    std::vector<Item> items;
    double rep_time_us = 0;
};
ItemPool make_item_pool(const PublicParams& params, std::size_t count, unsigned item_bits, Rng& rng);

// Least-squares slope and intercept of log(y) against log(x).
ScalingFit loglog_fit(std::span<const double> x, std::span<const double> y);

// Runs every scheme for every n, one record per measured operation (means over runs).
BenchResult run_bench(const BenchConfig& config, const Instance& instance, std::ostream* log = nullptr);
BenchResult run_bench(const BenchConfig& config, const Instance& instance, const ItemPool& pool,
                      std::ostream* log = nullptr);

void write_csv(std::ostream& out, std::span<const BenchRecord> records);
std::string format_number(double v);

}  // namespace accdict
