// accdict: setup, in-process simulation, benchmarks and standalone proof checks.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "accdict/accumulator.hpp"
#include "accdict/bench.hpp"
#include "accdict/protocol.hpp"
#include "accdict/signature.hpp"

namespace fs = std::filesystem;
using namespace accdict;

namespace {

struct Paths {
    fs::path params, trapdoor, secret, pub;
};

Paths key_paths(const fs::path& dir) {
    return {dir / "params.txt", dir / "trapdoor.txt", dir / "sign.key", dir / "sign.pub"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw error(errc::io_error, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& data, bool secret) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw error(errc::io_error, "cannot write " + p.string());
    out << data;
    out.close();
    if (secret) fs::permissions(p, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
}

PublicParams load_params(const fs::path& p, bool toy) {
    std::istringstream in(slurp(p));
    return read_params(in, toy);
}

// --trapdoor, then ACCDICT_TRAPDOOR, then the file next to the public params.
TrapdoorKey load_trapdoor(const std::string& flag, const fs::path& fallback) {
    std::string path = flag;
    if (path.empty()) {
        const char* env = std::getenv("ACCDICT_TRAPDOOR");
        path = (env && *env) ? std::string(env) : fallback.string();
    }
    std::istringstream in(slurp(path));
    return read_trapdoor(in);
}

int cmd_setup(unsigned k, bool toy, unsigned modulus_bits, std::uint64_t seed, const std::string& out_dir,
              const std::string& sig_name, bool force) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const Paths paths = key_paths(dir);
    for (const fs::path& p : {paths.params, paths.trapdoor, paths.secret, paths.pub}) {
        if (fs::exists(p) && !force) {
            std::cerr << "refusing to overwrite " << p << " (use --force)\n";
            return 2;
        }
    }
    Rng rng(seed);
    Instance inst;
    if (toy) {
        inst = toy_instance();
    } else {
        SetupOptions opts;
        opts.modulus_bits = modulus_bits;
        inst = setup(k, rng, opts);
    }
    std::ostringstream params, trapdoor;
    write_params(params, inst.params);
    write_trapdoor(trapdoor, inst.trapdoor);
    const auto signer = make_signature_scheme(sig_name);
    const KeyPair kp = signer->keygen(rng);

    write_file(paths.params, params.str(), false);
    write_file(paths.trapdoor, trapdoor.str(), true);
    write_file(paths.secret, signer->name() + " " + bytes_to_hex(kp.secret_key) + "\n", true);
    write_file(paths.pub, signer->name() + " " + bytes_to_hex(kp.public_key) + "\n", false);
    std::cout << "k=" << inst.params.k << " N bits=" << bit_length(inst.params.N) << " written to " << dir << "\n";
    return 0;
}

std::pair<std::string, Bytes> load_key(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string name, hex;
    if (!(in >> name >> hex)) throw error(errc::parse_error, "bad key file " + p.string());
    return {name, hex_to_bytes(hex)};
}

struct SimOptions {
    std::string key_dir;
    std::string trapdoor;
    bool toy = false;
    std::string scheme = "partitioned";
    std::string p_rule = "sqrt";
    std::string branching = "c=2";
    unsigned epochs = 10;
    std::uint64_t delta_ms = 10000;
    std::uint64_t seed = 1;
    unsigned inserts = 10;
    unsigned deletes = 2;
    unsigned queries = 10;
    unsigned tamper = 1;
    std::string out;
};

int cmd_simulate(const SimOptions& o) {
    const Paths paths = key_paths(o.key_dir);
    const PublicParams params = load_params(paths.params, o.toy);
    const TrapdoorKey trapdoor = load_trapdoor(o.trapdoor, paths.trapdoor);
    const auto [sig_name, secret] = load_key(paths.secret);
    const auto [pub_name, pub] = load_key(paths.pub);
    if (sig_name != pub_name) throw error(errc::key_mismatch, "signing key files disagree on the scheme");
    const auto signer = make_signature_scheme(sig_name);

    SchemeConfig cfg;
    cfg.scheme = parse_scheme(o.scheme);
    cfg.p_rule = o.p_rule;
    cfg.branching = o.branching;
    resolve_p(cfg.p_rule, 1);
    resolve_branching(cfg.branching, 1);

    Source source(params, trapdoor, cfg, signer, secret, o.seed);
    Directory directory(params, cfg.scheme);
    Rng rng(o.seed ^ 0xa5a5a5a5ull);
    source.build({});

    std::ofstream transcript_file;
    std::ostream* log = &std::cout;
    fs::path out_dir;
    if (!o.out.empty()) {
        out_dir = o.out;
        fs::create_directories(out_dir);
        transcript_file.open(out_dir / "transcript.txt");
        log = &transcript_file;
    }

    std::vector<BigInt> present;
    std::uint64_t counter = 0;
    std::size_t honest_rejects = 0, tamper_accepts = 0, honest = 0, tampered = 0;
    Bytes last_response;
    BigInt last_digest;
    std::uint64_t last_now = 0;

    for (unsigned epoch = 1; epoch <= o.epochs; ++epoch) {
        for (unsigned i = 0; i < o.inserts; ++i) {
            const std::string element = "element-" + std::to_string(counter++);
            try {
                const BigInt d = source.ingest(as_bytes(element));
                if (source.intervals().contains(d)) continue;
                source.insert_digest(d);
                present.push_back(d);
            } catch (const error& e) {
                if (e.code() != errc::sentinel_digest) throw;
                *log << "skip " << element << ": " << e.what() << "\n";
            }
        }
        for (unsigned i = 0; i < o.deletes && !present.empty(); ++i) {
            const std::size_t idx = std::uniform_int_distribution<std::size_t>(0, present.size() - 1)(rng);
            source.erase_digest(present[idx]);
            present.erase(present.begin() + static_cast<std::ptrdiff_t>(idx));
        }
        const UpdateInfo info = source.epoch_commit(epoch, o.delta_ms);
        const Bytes wire = encode_update(info);
        directory.apply(decode_update(wire));
        *log << "epoch " << epoch << " n=" << present.size() << " update_bytes=" << wire.size() << " "
             << basis_line(info.basis) << "\n";
        if (!out_dir.empty()) write_file(out_dir / "update.hex", bytes_to_hex(wire) + "\n", false);

        const std::uint64_t now = info.basis.t + o.delta_ms / 2;
        const BigInt top = (BigInt(1) << params.k) - 1;
        for (unsigned q = 0; q < o.queries; ++q) {
            BigInt d;
            if (!present.empty() && (q % 2 == 0)) {
                d = present[std::uniform_int_distribution<std::size_t>(0, present.size() - 1)(rng)];
            } else {
                d = random_range(rng, 0, top);
            }
            const QueryResponse resp = directory.answer_query(d);
            const Bytes bytes = encode_response(params, resp);
            const QueryResponse back = decode_response(params, bytes);
            const Verdict v = user_verify(back, d, *signer, pub, now, o.delta_ms, params);
            const bool truth = source.intervals().contains(d);
            const bool correct = v.accepted() && ((back.answer == Answer::member) == truth);
            ++honest;
            if (!correct) ++honest_rejects;
            *log << "  query " << to_hex(d) << " -> " << (back.answer == Answer::member ? "member" : "non-member")
                 << " " << to_string(v.reason) << " bytes=" << bytes.size() << "\n";
            last_response = bytes;
            last_digest = d;
            last_now = now;

            for (unsigned t = 0; t < o.tamper; ++t) {
                Bytes bad = bytes;
                const std::size_t bit = std::uniform_int_distribution<std::size_t>(0, bad.size() * 8 - 1)(rng);
                bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
                bool accepted = false;
                try {
                    accepted = user_verify(decode_response(params, bad), d, *signer, pub, now, o.delta_ms, params)
                                   .accepted();
                } catch (const error&) {
                    accepted = false;
                }
                ++tampered;
                if (accepted) {
                    ++tamper_accepts;
                    *log << "  TAMPERED RESPONSE ACCEPTED (bit " << bit << ")\n";
                }
            }
        }
    }
    if (!out_dir.empty() && !last_response.empty()) {
        write_file(out_dir / "response.bin", std::string(last_response.begin(), last_response.end()), false);
        write_file(out_dir / "query.txt",
                   to_hex(last_digest) + " " + std::to_string(last_now) + " " + std::to_string(o.delta_ms) + "\n",
                   false);
    }
    std::cout << "queries=" << honest << " honest_rejects=" << honest_rejects << " tampered=" << tampered
              << " tampered_accepted=" << tamper_accepts << "\n";
    return honest_rejects == 0 && tamper_accepts == 0 ? 0 : 1;
}

int cmd_verify(const std::string& key_dir, bool toy, const std::string& response_path, const std::string& digest_hex,
               std::uint64_t now, std::uint64_t delta_ms) {
    const Paths paths = key_paths(key_dir);
    const PublicParams params = load_params(paths.params, toy);
    const auto [name, pub] = load_key(paths.pub);
    const auto signer = make_signature_scheme(name);
    const std::string raw = slurp(response_path);
    const Bytes bytes(raw.begin(), raw.end());
    QueryResponse resp;
    try {
        resp = decode_response(params, bytes);
    } catch (const error& e) {
        std::cout << "reject malformed: " << e.what() << "\n";
        return 1;
    }
    const Verdict v = user_verify(resp, from_hex(digest_hex), *signer, pub, now, delta_ms, params);
    if (v.accepted()) {
        std::cout << "accept " << (resp.answer == Answer::member ? "member" : "non-member") << "\n";
        return 0;
    }
    std::cout << "reject " << to_string(v.reason) << "\n";
    return 1;
}

std::size_t parse_size_arg(const std::string& s) {
    const bool power = s.rfind("2^", 0) == 0;
    const std::string digits = power ? s.substr(2) : s;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(digits, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (used == 0 || used != digits.size() || (power && v >= 63))
        throw error(errc::invalid_parameter, "bad size '" + s + "'");
    return power ? std::size_t{1} << v : v;
}

std::vector<std::size_t> parse_n_list(const std::vector<std::string>& items) {
    std::vector<std::size_t> out;
    for (const std::string& s : items) out.push_back(parse_size_arg(s));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RSA-accumulator authenticated dictionary"};
    app.require_subcommand(1);

    // setup
    auto* setup_cmd = app.add_subcommand("setup", "generate parameters, trapdoor and signing keys");
    unsigned k = 64, modulus_bits = 0;
    bool toy = false, force = false;
    std::uint64_t seed = 1;
    std::string out_dir = "keys", sig_name = "ed25519";
    setup_cmd->add_option("--k", k, "digest bits")->check(CLI::Range(2u, 4096u));
    setup_cmd->add_flag("--toy", toy, "hand-checkable fixture (N=253, a=2, k=2)");
    setup_cmd->add_option("--modulus-bits", modulus_bits, "bits of N (default: smallest valid)");
    setup_cmd->add_option("--seed", seed);
    setup_cmd->add_option("--out", out_dir, "output directory");
    setup_cmd->add_option("--sig", sig_name)->check(CLI::IsMember({"ed25519", "keyed-digest"}));
    setup_cmd->add_flag("--force,--overwrite", force, "replace existing files");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "drive source, directory and users in-process");
    SimOptions sim;
    sim_cmd->add_option("--keys", sim.key_dir, "directory written by setup")->required();
    sim_cmd->add_option("--trapdoor", sim.trapdoor, "trapdoor file (else ACCDICT_TRAPDOOR, else <keys>/trapdoor.txt)");
    sim_cmd->add_flag("--toy", sim.toy);
    sim_cmd->add_option("--scheme", sim.scheme)
        ->check(CLI::IsMember({"straightforward", "precomputed", "partitioned", "hierarchical"}));
    sim_cmd->add_option("--p-rule", sim.p_rule, "sqrt | n | <groups>");
    sim_cmd->add_option("--branching", sim.branching, "c=<levels> | <e1>,<e2>,... | g=<g1>,<g2>,...");
    sim_cmd->add_option("--epochs", sim.epochs);
    sim_cmd->add_option("--delta-ms", sim.delta_ms)->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim.seed);
    sim_cmd->add_option("--inserts", sim.inserts, "inserts per epoch");
    sim_cmd->add_option("--deletes", sim.deletes, "deletes per epoch");
    sim_cmd->add_option("--queries", sim.queries, "queries per epoch");
    sim_cmd->add_option("--tamper", sim.tamper, "tampered probes per query");
    sim_cmd->add_option("--out", sim.out, "output directory for transcript and artifacts");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "operation-count benchmarks with log-log fits");
    BenchConfig bc;
    std::vector<std::string> n_list = {"2^10", "2^12"};
    std::string bench_keys, bench_trapdoor, csv_path, mix = "1:1:1";
    bool bench_toy = false;
    bench_cmd->add_option("--k", bc.k);
    bench_cmd->add_option("--modulus-bits", bc.modulus_bits);
    bench_cmd->add_option("--item-bits", bc.item_bits);
    bench_cmd->add_option("--scheme", bc.schemes, "e.g. precomputed, partitioned:sqrt, hierarchical:0.5,0.25")
        ->delimiter(';');
    bench_cmd->add_option("--n", n_list, "sizes, e.g. 2^10 4096")->delimiter(';');
    bench_cmd->add_option("--runs", bc.runs);
    bench_cmd->add_option("--mix", mix, "inserts:deletes:queries per run");
    bench_cmd->add_option("--seed", bc.seed);
    bench_cmd->add_option("--keys", bench_keys, "reuse parameters from setup instead of generating");
    bench_cmd->add_option("--trapdoor", bench_trapdoor);
    bench_cmd->add_flag("--toy", bench_toy);
    bench_cmd->add_option("--out", csv_path, "CSV output path");

    // verify
    auto* verify_cmd = app.add_subcommand("verify", "check a serialized query response");
    std::string v_keys, v_response, v_digest;
    std::uint64_t v_now = 0, v_delta = 10000;
    bool v_toy = false;
    verify_cmd->add_option("--keys", v_keys)->required();
    verify_cmd->add_option("--response", v_response)->required();
    verify_cmd->add_option("--digest", v_digest, "queried digest (hex)")->required();
    verify_cmd->add_option("--now", v_now, "current time in ms")->required();
    verify_cmd->add_option("--delta-ms", v_delta)->check(CLI::PositiveNumber);
    verify_cmd->add_flag("--toy", v_toy);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*setup_cmd) return cmd_setup(k, toy, modulus_bits, seed, out_dir, sig_name, force);
        if (*sim_cmd) return cmd_simulate(sim);
        if (*verify_cmd) return cmd_verify(v_keys, v_toy, v_response, v_digest, v_now, v_delta);
        if (*bench_cmd) {
            bc.n_values = parse_n_list(n_list);
            unsigned a = 0, b = 0, c = 0;
            char s1 = 0, s2 = 0;
            std::istringstream ms(mix);
            if (!(ms >> a >> s1 >> b >> s2 >> c) || s1 != ':' || s2 != ':')
                throw error(errc::invalid_parameter, "--mix expects inserts:deletes:queries");
            bc.mix = OpMix{a, b, c};
            Instance inst;
            if (!bench_keys.empty()) {
                const Paths paths = key_paths(bench_keys);
                inst.params = load_params(paths.params, bench_toy);
                inst.trapdoor = load_trapdoor(bench_trapdoor, paths.trapdoor);
                bc.k = inst.params.k;
            } else {
                Rng rng(bc.seed);
                SetupOptions opts;
                opts.modulus_bits = bc.modulus_bits;
                inst = setup(bc.k, rng, opts);
            }
            const BenchResult r = run_bench(bc, inst, &std::cerr);
            if (csv_path.empty()) {
                write_csv(std::cout, r.records);
            } else {
                std::ofstream out(csv_path);
                if (!out) throw error(errc::io_error, "cannot write " + csv_path);
                write_csv(out, r.records);
            }
            for (const ScalingFit& f : r.fits)
                std::cerr << "fit " << f.scheme << " " << f.operation << " slope=" << format_number(f.slope) << "\n";
            std::cerr << "prime representatives: " << r.reps_generated << " at " << format_number(r.rep_time_us)
                      << " us each (excluded from insert timings)\n";
            std::cerr << "proofs re-verified: " << r.proofs_checked << ", failures: " << r.proof_failures << "\n";
            return r.proof_failures == 0 ? 0 : 1;
        }
    } catch (const error& e) {
        std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
