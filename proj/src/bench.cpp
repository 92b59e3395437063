#include "accdict/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <set>

#include "accdict/app_hash.hpp"
#include "accdict/hierarchical.hpp"
#include "accdict/partitioned.hpp"
#include "accdict/protocol.hpp"
#include "accdict/witness_tree.hpp"

namespace accdict {

namespace {

using clock_type = std::chrono::steady_clock;

double micros_since(clock_type::time_point start) {
    return std::chrono::duration<double, std::micro>(clock_type::now() - start).count();
}

struct Tally {
    double time_us = 0;
    double modexp = 0;
    double modmul = 0;
    unsigned count = 0;

    void add(double t, const OpCounter& c) {
        time_us += t;
        modexp += static_cast<double>(c.modexp_count);
        modmul += static_cast<double>(c.modmul_count);
        ++count;
    }
    BenchRecord record(const std::string& scheme, std::size_t n, const std::string& op) const {
        const double d = count ? count : 1;
        return BenchRecord{scheme, n, op, time_us / d, modexp / d, modmul / d};
    }
};

class ProofSampler {
public:
    ProofSampler(double fraction, std::uint64_t seed) : fraction_(fraction), rng_(seed) {}

    // Always checks the first proof of a batch, then a random fraction.
    bool pick(bool first) { return first || std::uniform_real_distribution<double>(0, 1)(rng_) < fraction_; }
    void record(bool ok) {
        ++checked;
        if (!ok) ++failures;
    }
    std::size_t checked = 0;
    std::size_t failures = 0;

private:
    double fraction_;
    Rng rng_;
};

std::pair<std::string, std::string> split_scheme(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return {spec, ""};
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

std::vector<BigInt> reps_of(std::span<const Item> items) {
    std::vector<BigInt> out;
    out.reserve(items.size());
    for (const Item& it : items) out.push_back(it.rep);
    return out;
}

}  // namespace

ItemPool make_item_pool(const PublicParams& params, std::size_t count, unsigned item_bits, Rng& rng) {
    ItemPool pool;
    RepresentativeCache cache(params.rep_hash);
    std::set<BigInt> seen;
    const std::size_t width = (item_bits + 7) / 8;
    double rep_us = 0;
    while (pool.items.size() < count) {
        const BigInt element = random_bits(rng, item_bits);
        const BigInt digest = default_app_hash()(to_bytes(element, width), params.k);
        if (!seen.insert(digest).second) continue;
        const auto start = clock_type::now();
        const BigInt rep = cache.get_or_find(digest, rng);
        rep_us += micros_since(start);
        pool.items.push_back(Item{digest, digest, rep});
    }
    pool.rep_time_us = count ? rep_us / static_cast<double>(count) : 0;
    return pool;
}

ScalingFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw error(errc::invalid_parameter, "fit needs >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0 || y[i] <= 0) throw error(errc::domain_error, "log-log fit needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = m * sxx - sx * sx;
    if (denom == 0) throw error(errc::domain_error, "degenerate fit");
    ScalingFit fit;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

void write_csv(std::ostream& out, std::span<const BenchRecord> records) {
    out << "scheme,n,operation,wall_time_us,modexp_count,modmul_count\n";
    for (const BenchRecord& r : records) {
        out << r.scheme << ',' << r.n << ',' << r.operation << ',' << format_number(r.wall_time_us) << ','
            << format_number(r.modexp_count) << ',' << format_number(r.modmul_count) << '\n';
    }
}

BenchResult run_bench(const BenchConfig& config, const Instance& instance, std::ostream* log) {
    Rng rng(config.seed);
    std::size_t max_n = 0;
    for (std::size_t n : config.n_values) max_n = std::max(max_n, n);
    const std::size_t extra = std::size_t{config.runs} * std::max(1u, config.mix.insert);
    if (log) *log << "generating " << (max_n + extra) << " representatives\n";
    const ItemPool pool = make_item_pool(instance.params, max_n + extra, config.item_bits, rng);
    return run_bench(config, instance, pool, log);
}

BenchResult run_bench(const BenchConfig& config, const Instance& instance, const ItemPool& pool, std::ostream* log) {
    const PublicParams& params = instance.params;
    const TrapdoorKey& td = instance.trapdoor;
    if (config.runs == 0) throw error(errc::invalid_parameter, "runs must be positive");
    if (config.n_values.empty()) throw error(errc::invalid_parameter, "no n values");

    BenchResult result;
    result.reps_generated = pool.items.size();
    result.rep_time_us = pool.rep_time_us;
    ProofSampler sampler(config.proof_sample, config.seed ^ 0x5eedull);
    Rng pick_rng(config.seed + 17);

    std::size_t max_n = 0;
    for (std::size_t n : config.n_values) max_n = std::max(max_n, n);
    const std::size_t inserts = std::size_t{config.runs} * config.mix.insert;
    if (pool.items.size() < max_n + inserts) throw error(errc::invalid_parameter, "item pool too small");

    for (const std::string& spec : config.schemes) {
        const auto [name, arg] = split_scheme(spec);
        const Scheme scheme = parse_scheme(name);
        for (std::size_t n : config.n_values) {
            if (n < 1) throw error(errc::invalid_parameter, "n must be positive");
            std::vector<Item> base(pool.items.begin(), pool.items.begin() + static_cast<std::ptrdiff_t>(n));
            std::vector<Item> fresh(pool.items.begin() + static_cast<std::ptrdiff_t>(max_n),
                                    pool.items.begin() + static_cast<std::ptrdiff_t>(max_n + inserts));
            Tally ins, del, qry;
            std::size_t fresh_pos = 0;
            bool first_proof = true;
            auto random_member = [&](std::size_t size) {
                return std::uniform_int_distribution<std::size_t>(0, size - 1)(pick_rng);
            };

            switch (scheme) {
            case Scheme::straightforward: {
                std::vector<BigInt> reps = reps_of(base);
                const AccumulationValue A = accumulate_trapdoor(params, td, reps);
                for (unsigned run = 0; run < config.runs; ++run) {
                    for (unsigned i = 0; i < config.mix.insert; ++i) {
                        const Item& it = fresh[fresh_pos++];
                        OpCounter c;
                        const auto start = clock_type::now();
                        const AccumulationValue A2 = insert_element(params, A, it.rep, &c);
                        ins.add(micros_since(start), c);
                        if (config.mix.erase) {
                            std::vector<BigInt> grown = reps;
                            grown.push_back(it.rep);
                            OpCounter d;
                            const auto s2 = clock_type::now();
                            const AccumulationValue back = delete_element(params, grown, it.rep, &td, &d);
                            del.add(micros_since(s2), d);
                            if (back != A) ++result.proof_failures;
                        }
                        (void)A2;
                    }
                    for (unsigned i = 0; i < config.mix.query; ++i) {
                        const std::size_t idx = random_member(n);
                        OpCounter c;
                        const auto start = clock_type::now();
                        const BigInt w = witness_direct(params, reps, idx, &c);
                        qry.add(micros_since(start), c);
                        if (sampler.pick(first_proof)) {
                            sampler.record(verify(params, base[idx].digest, base[idx].rep, w, A));
                            first_proof = false;
                        }
                    }
                }
                break;
            }
            case Scheme::precomputed: {
                std::vector<BigInt> reps = reps_of(base);
                std::vector<BigInt> witnesses = precompute_witnesses(params, td, reps);
                const AccumulationValue A = accumulate_trapdoor(params, td, reps);
                for (unsigned run = 0; run < config.runs; ++run) {
                    for (unsigned i = 0; i < config.mix.insert; ++i) {
                        const Item& it = fresh[fresh_pos++];
                        std::vector<BigInt> grown = reps;
                        grown.push_back(it.rep);
                        OpCounter c;
                        const auto start = clock_type::now();
                        insert_element(params, A, it.rep, &c);
                        std::vector<BigInt> w2 = precompute_witnesses(params, td, grown, &c);
                        ins.add(micros_since(start), c);
                        if (config.mix.erase) {
                            OpCounter d;
                            const auto s2 = clock_type::now();
                            delete_element(params, grown, it.rep, &td, &d);
                            w2 = precompute_witnesses(params, td, reps, &d);
                            del.add(micros_since(s2), d);
                        }
                    }
                    for (unsigned i = 0; i < config.mix.query; ++i) {
                        const std::size_t idx = random_member(n);
                        OpCounter c;
                        const auto start = clock_type::now();
                        const BigInt w = witnesses[idx];
                        qry.add(micros_since(start), c);
                        if (sampler.pick(first_proof)) {
                            sampler.record(verify(params, base[idx].digest, base[idx].rep, w, A));
                            first_proof = false;
                        }
                    }
                }
                break;
            }
            case Scheme::partitioned: {
                const std::size_t p = resolve_p(arg.empty() ? "sqrt" : arg, n);
                PartitionState state = PartitionState::build(params, td, base, p);
                PartitionView view;
                view.apply(state.take_update());
                for (unsigned run = 0; run < config.runs; ++run) {
                    for (unsigned i = 0; i < config.mix.insert; ++i) {
                        const Item& it = fresh[fresh_pos++];
                        OpCounter c;
                        state.set_counter(&c);
                        const auto start = clock_type::now();
                        state.insert(it);
                        ins.add(micros_since(start), c);
                        if (config.mix.erase) {
                            OpCounter d;
                            state.set_counter(&d);
                            const auto s2 = clock_type::now();
                            state.erase(it.key);
                            del.add(micros_since(s2), d);
                        }
                        state.set_counter(nullptr);
                    }
                    view.apply(state.take_update());
                    for (unsigned i = 0; i < config.mix.query; ++i) {
                        const Item& target = base[random_member(n)];
                        if (!state.contains(target.key)) continue;
                        OpCounter c;
                        const auto start = clock_type::now();
                        const Witness w = view.query_witness(params, target.key, &c);
                        qry.add(micros_since(start), c);
                        if (sampler.pick(first_proof)) {
                            sampler.record(verify(params, w.element, w.x, w.value, state.accumulation()));
                            first_proof = false;
                        }
                    }
                }
                break;
            }
            case Scheme::hierarchical: {
                RepresentativeCache cache(params.rep_hash);
                Rng rep_rng(config.seed + n);
                Hierarchy h = Hierarchy::build(params, td, base, resolve_branching(arg.empty() ? "c=2" : arg, n),
                                               cache, rep_rng);
                HierarchyView view;
                view.apply(h.take_update());
                for (unsigned run = 0; run < config.runs; ++run) {
                    for (unsigned i = 0; i < config.mix.insert; ++i) {
                        const Item& it = fresh[fresh_pos++];
                        OpCounter c;
                        h.set_counter(&c);
                        const auto start = clock_type::now();
                        h.insert(it);
                        ins.add(micros_since(start), c);
                        if (config.mix.erase) {
                            OpCounter d;
                            h.set_counter(&d);
                            const auto s2 = clock_type::now();
                            h.erase(it.key);
                            del.add(micros_since(s2), d);
                        }
                        h.set_counter(nullptr);
                    }
                    view.apply(h.take_update());
                    for (unsigned i = 0; i < config.mix.query; ++i) {
                        const Item& target = base[random_member(n)];
                        OpCounter c;
                        const auto start = clock_type::now();
                        const ProofChain chain = view.prove_chain(target.key);
                        qry.add(micros_since(start), c);
                        if (sampler.pick(first_proof)) {
                            sampler.record(
                                verify_chain(params, default_app_hash(), target.digest, chain, h.accumulation()));
                            first_proof = false;
                        }
                    }
                }
                break;
            }
            }

            const std::size_t first_record = result.records.size();
            if (config.mix.insert) result.records.push_back(ins.record(spec, n, "insert"));
            if (config.mix.insert && config.mix.erase) result.records.push_back(del.record(spec, n, "delete"));
            if (config.mix.query) result.records.push_back(qry.record(spec, n, "query"));
            if (log) {
                *log << spec << " n=" << n;
                for (std::size_t r = first_record; r < result.records.size(); ++r)
                    *log << "  " << result.records[r].operation << ": " << format_number(result.records[r].modexp_count)
                         << " modexp";
                *log << '\n';
            }
        }
    }
    result.records.push_back(BenchRecord{"all", pool.items.size(), "prime_rep", pool.rep_time_us, 0, 0});

    // Scaling exponents of modexp counts per (scheme, operation).
    std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> series;
    for (const BenchRecord& r : result.records) {
        if (r.operation == "prime_rep") continue;
        auto& s = series[{r.scheme, r.operation}];
        s.first.push_back(static_cast<double>(r.n));
        s.second.push_back(r.modexp_count);
    }
    for (const auto& [key, s] : series) {
        if (s.first.size() < 2) continue;
        if (std::any_of(s.second.begin(), s.second.end(), [](double v) { return v <= 0; })) continue;
        ScalingFit fit = loglog_fit(s.first, s.second);
        fit.scheme = key.first;
        fit.operation = key.second;
        result.fits.push_back(fit);
    }
    result.proofs_checked = sampler.checked;
    result.proof_failures += sampler.failures;
    return result;
}

}  // namespace accdict
