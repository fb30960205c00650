// spinsim command-line frontend.
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spinsim/config.hpp"
#include "spinsim/device.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/perf.hpp"

using namespace spinsim;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitVerify = 3;
constexpr int kExitContract = 4;

struct Globals {
    std::string config_path;
    std::string profile;
    std::string policy;
    std::optional<std::uint64_t> seed;
    bool verify = false;
    std::string out_dir;
    std::string format = "csv";
};

struct VerifyFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig effective_config(const Globals& g) {
    RunConfig c = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
    if (!g.profile.empty()) c.profile = g.profile;
    if (!g.policy.empty()) {
        try {
            c.policy = Policy::parse(g.policy);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("--policy: ") + e.what());
        }
    }
    if (g.seed) c.seed = *g.seed;
    validate(c);
    return c;
}

TechnologyProfile profile_of(const RunConfig& c) {
    try {
        return load_named_profile(c.profile);
    } catch (const ConfigError& e) {
        throw ConfigError("field 'profile': " + std::string(e.what()));
    }
}

// Writes name into the output directory, or stdout when there is none and
// this is the primary artifact.
void emit(const Globals& g, const std::string& name, const std::string& text, bool primary) {
    if (g.out_dir.empty()) {
        if (primary) std::cout << text;
        return;
    }
    std::filesystem::create_directories(g.out_dir);
    const auto path = std::filesystem::path(g.out_dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

std::string fmt_window(const std::optional<VoltageWindow>& w) {
    if (!w) return "infeasible";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f-%.4f", w->v_min, w->v_max);
    return buf;
}

// --- gates ---------------------------------------------------------------

int cmd_gates(const Globals& g) {
    const RunConfig c = effective_config(g);
    const TechnologyProfile p = profile_of(c);
    ojson j;
    j["profile"] = p.name;
    std::ostringstream txt;
    txt << "profile " << p.name << "\n";
    txt << "gate   fan-in preset  table window      solved window     bias    truth table\n";
    std::map<std::string, double> solved_mid;
    for (const auto& d : gate_library()) {
        const auto tt = TruthTable::from_ones(d.n_inputs, d.by_ones);
        const auto solved = solve_voltage_window(tt, d.preset, d.n_inputs, p);
        if (solved) solved_mid[d.name] = solved->midpoint();
        std::optional<VoltageWindow> table;
        if (auto it = p.gate_windows.find(d.name); it != p.gate_windows.end()) table = it->second;
        std::string ok = "-";
        double bias = 0.0;
        try {
            const GateSpec spec = make_gate_spec(d.name, p);
            bias = spec.v_bias;
            bool good = true;
            for (std::uint32_t m = 0; m < (1u << d.n_inputs); ++m) {
                bool in[8];
                for (int i = 0; i < d.n_inputs; ++i) in[i] = (m >> i) & 1u;
                good &= evaluate_gate(std::span<const bool>(in, d.n_inputs), spec, p) == tt(m);
            }
            ok = good ? "ok" : "MISMATCH";
        } catch (const ConfigError&) {
            ok = "infeasible";
        }
        char line[160];
        std::snprintf(line, sizeof line, "%-6s %6d %6d  %-16s  %-16s  %.4f  %s\n", d.name.c_str(), d.n_inputs,
                      d.preset ? 1 : 0, table ? fmt_window(table).c_str() : "-", fmt_window(solved).c_str(), bias,
                      ok.c_str());
        txt << line;
        ojson x;
        x["name"] = d.name;
        x["fan_in"] = d.n_inputs;
        x["preset"] = d.preset ? 1 : 0;
        x["table_window"] = table ? ojson{table->v_min, table->v_max} : ojson(nullptr);
        x["solved_window"] = solved ? ojson{solved->v_min, solved->v_max} : ojson(nullptr);
        x["bias_v"] = bias;
        x["truth_table"] = ok;
        j["gates"].push_back(x);
    }
    const auto xor_tt = TruthTable::from_ones(2, {0, 1, 0});
    txt << "xor:\n";
    for (bool preset : {false, true}) {
        const auto a = analyze_voltage_window(xor_tt, preset, 2, p);
        txt << "  preset " << preset << ": " << (a.feasible ? "feasible" : "infeasible") << " (" << a.reason << ")\n";
        j["xor"].push_back({{"preset", preset ? 1 : 0}, {"feasible", a.feasible}, {"reason", a.reason}});
    }
    const bool ordered = solved_mid.count("inv") && solved_mid.count("nor") && solved_mid.count("maj3") &&
                         solved_mid.count("maj5") && solved_mid["inv"] > solved_mid["nor"] &&
                         solved_mid["nor"] > solved_mid["maj3"] && solved_mid["maj3"] > solved_mid["maj5"];
    txt << "window ordering inv > nor > maj3 > maj5: " << (ordered ? "yes" : "NO") << "\n";
    j["ordering_ok"] = ordered;
    emit(g, "gates.txt", txt.str(), g.format != "json");
    emit(g, "gates.json", j.dump(2) + "\n", g.format == "json");
    return 0;
}

// --- align ---------------------------------------------------------------

std::vector<EncodedString> encode_all(const std::vector<NamedSequence>& seqs) {
    std::vector<EncodedString> out;
    for (const auto& s : seqs) {
        try {
            out.push_back(encode_dna(s.seq));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("sequence '" + s.name + "': " + e.what());
        }
    }
    return out;
}

int cmd_align(const Globals& g, const std::string& ref_path, const std::string& pat_path) {
    RunConfig c = effective_config(g);
    const TechnologyProfile p = profile_of(c);
    EncodedString reference;
    std::vector<EncodedString> patterns;
    if (!ref_path.empty()) {
        auto seqs = read_sequences(ref_path);
        if (seqs.empty()) throw ConfigError("reference file " + ref_path + " holds no sequence");
        std::string all;
        for (const auto& s : seqs) all += s.seq;
        reference = encode_all({{"reference", all}})[0];
    }
    if (!pat_path.empty()) {
        patterns = encode_all(read_sequences(pat_path));
        if (patterns.empty()) throw ConfigError("pattern file " + pat_path + " holds no sequence");
        c.pattern_len = static_cast<int>(patterns[0].size());
    }
    if (ref_path.empty()) reference = generate_workload(c.reference_len, 0, 1, 0.0, c.seed).reference;
    if (pat_path.empty()) {
        if (reference.size() < static_cast<std::size_t>(c.pattern_len))
            throw ConfigError("field 'pattern_len': longer than the reference");
        patterns = sample_patterns(reference, c.patterns, c.pattern_len, c.mutation_rate, c.seed + 1).patterns;
    }
    validate(c);
    const auto run = run_dna(reference, patterns, c.dna_setup(), p);
    const auto& r = run.result;

    bool verified = false;
    if (g.verify) {
        const auto expect = software_scores(run.folded, patterns, run.schedule);
        if (expect != r.records) throw VerifyFailed("array scores differ from the software oracle");
        verified = true;
    }

    ojson j;
    j["config"] = ojson::parse(c.to_json());
    j["reference_len"] = reference.size();
    j["fragments"] = run.folded.fragment_count;
    j["arrays"] = run.folded.arrays();
    j["rounds"] = r.rounds;
    j["alignments"] = r.alignments;
    j["records"] = r.records.size();
    j["best_scores"] = best_scores(r.records, r.patterns);
    j["ledger"] = ojson::parse(r.ledger.to_json());
    j["throughput"] = ojson::parse(throughput(r.ledger, r.patterns).to_json());
    j["warnings"] = r.warnings;
    if (g.verify) j["verified"] = verified;

    emit(g, "records.csv", r.records_csv(), g.format != "json");
    emit(g, "summary.json", j.dump(2) + "\n", g.format == "json");
    emit(g, "schedule.json", run.schedule.to_json() + "\n", false);
    emit(g, "ledger.csv", r.ledger.to_csv(), false);
    if (!g.out_dir.empty())
        std::cerr << r.records.size() << " records, " << r.rounds << " rounds"
                  << (g.verify ? ", verified against the software oracle" : "") << "\n";
    return 0;
}

// --- bench ---------------------------------------------------------------

std::string generated_corpus(int words, std::uint64_t seed, std::vector<std::string>& vocab) {
    std::mt19937_64 rng(seed);
    vocab.clear();
    for (int i = 0; i < 40; ++i) {
        std::string w(3 + rng() % 6, 'a');
        for (auto& ch : w) ch = static_cast<char>('a' + rng() % 26);
        vocab.push_back(w);
    }
    std::string text;
    for (int i = 0; i < words; ++i) {
        if (i) text += (i % 12 == 0) ? '\n' : ' ';
        text += vocab[rng() % vocab.size()];
    }
    return text;
}

int cmd_bench(const Globals& g, const std::string& kernel_arg, const std::string& input, std::string query,
              std::vector<std::string> words, const std::string& key) {
    RunConfig c = effective_config(g);
    if (!kernel_arg.empty()) c.kernel = kernel_arg;
    validate(c);
    const TechnologyProfile p = profile_of(c);
    const KernelGeometry geo{c.rows, c.arrays};

    std::vector<std::string> vocab;
    std::string corpus;
    if (!input.empty()) {
        std::ifstream f(input, std::ios::binary);
        if (!f) throw ConfigError("cannot open input " + input);
        std::ostringstream ss;
        ss << f.rdbuf();
        corpus = ss.str();
        vocab = split_words(corpus);
        if (vocab.empty()) vocab.push_back("x");
    } else {
        corpus = generated_corpus(c.kernel_items, c.seed, vocab);
    }

    ojson j;
    j["kernel"] = c.kernel;
    j["profile"] = p.name;
    j["seed"] = c.seed;
    bool ok = true;
    StageLedger ledger;
    std::ostringstream csv;
    if (c.kernel == "bc") {
        std::mt19937_64 rng(c.seed);
        std::vector<std::uint32_t> v(c.kernel_items);
        for (auto& x : v) x = static_cast<std::uint32_t>(rng());
        v[0] = 0xFFFFFFFFu;
        const auto r = kernel_bitcount(v, p, geo);
        ledger = r.ledger;
        csv << "index,word,count\n";
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            csv << i << ',' << v[i] << ',' << r.counts[i] << '\n';
            total += r.counts[i];
            if (g.verify) ok &= r.counts[i] == std::popcount(v[i]);
        }
        j["items"] = v.size();
        j["total_ones"] = total;
    } else if (c.kernel == "sm") {
        if (query.empty()) query = vocab[0];
        const auto r = kernel_stringmatch(corpus, query, p, geo);
        ledger = r.ledger;
        csv << "position\n";
        for (auto pos : r.positions) csv << pos << '\n';
        j["query"] = query;
        j["matches"] = r.positions.size();
        if (g.verify) {
            std::vector<std::size_t> expect;
            for (auto pos = corpus.find(query); pos != std::string::npos; pos = corpus.find(query, pos + 1))
                expect.push_back(pos);
            ok = expect == r.positions;
        }
    } else if (c.kernel == "wc") {
        if (words.empty())
            for (std::size_t i = 0; i < std::min<std::size_t>(5, vocab.size()); ++i) words.push_back(vocab[i]);
        const auto r = kernel_wordcount(corpus, words, p, geo);
        ledger = r.ledger;
        csv << "word,count\n";
        const auto all = split_words(corpus);
        for (std::size_t i = 0; i < words.size(); ++i) {
            csv << words[i] << ',' << r.counts[i] << '\n';
            j["counts"][words[i]] = r.counts[i];
            if (g.verify) ok &= r.counts[i] == static_cast<std::uint64_t>(std::count(all.begin(), all.end(), words[i]));
        }
    } else {
        const std::vector<std::uint8_t> text(corpus.begin(), corpus.end());
        const std::vector<std::uint8_t> k(key.begin(), key.end());
        if (k.empty()) throw ConfigError("--key must not be empty");
        const auto enc = kernel_rc4(text, k, p, geo);
        ledger = enc.ledger;
        std::uint64_t digest = fnv1a(enc.output);
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(digest));
        csv << "bytes,cipher_fnv1a\n" << text.size() << ',' << hex << '\n';
        j["bytes"] = text.size();
        j["cipher_fnv1a"] = hex;
        if (g.verify) {
            const auto ks = rc4_keystream(k, text.size());
            for (std::size_t i = 0; i < text.size(); ++i) ok &= enc.output[i] == (text[i] ^ ks[i]);
            ok &= kernel_rc4(enc.output, k, p, geo).output == text;
        }
    }
    j["ledger"] = ojson::parse(ledger.to_json());
    if (!ledger.empty() && ledger.total_latency_ns() > 0) {
        j["energy_pj"] = ledger.total_energy_pj();
        j["latency_ns"] = ledger.total_latency_ns();
    }
    if (g.verify) j["verified"] = ok;
    emit(g, "bench_" + c.kernel + ".csv", csv.str(), g.format != "json");
    emit(g, "bench_" + c.kernel + ".json", j.dump(2) + "\n", g.format == "json");
    if (!ok) throw VerifyFailed(c.kernel + " results differ from the software oracle");
    return 0;
}

// --- sweep / variation ---------------------------------------------------

int cmd_sweep(const Globals& g, const std::string& axis, const std::vector<std::string>& values) {
    RunConfig c = effective_config(g);
    if (!axis.empty()) c.sweep_axis = axis;
    if (!values.empty()) c.sweep_values = values;
    validate(c);
    const auto points = sweep(c.sweep_base(), c.sweep_axis, c.sweep_values);
    ojson j;
    j["axis"] = c.sweep_axis;
    for (const auto& pt : points) j["points"].push_back({{"value", pt.value}, {"report", ojson::parse(pt.report.to_json())}});
    emit(g, "sweep.csv", sweep_csv(points), g.format != "json");
    emit(g, "sweep.json", j.dump(2) + "\n", g.format == "json");
    return 0;
}

int cmd_variation(const Globals& g, const std::vector<double>& deltas) {
    const RunConfig c = effective_config(g);
    const TechnologyProfile p = profile_of(c);
    for (double d : deltas)
        if (d < -0.5 || d > 0.5) throw ConfigError("--deltas: " + std::to_string(d) + " is outside [-0.5, 0.5]");
    const auto reports = variation_sweep(p, deltas);
    std::ostringstream csv;
    csv.precision(8);
    csv << "delta,gate,v_min,v_max\n";
    ojson j;
    j["profile"] = p.name;
    for (const auto& r : reports) {
        ojson x;
        x["delta"] = r.scenario;
        for (const auto& [name, w] : r.windows) {
            csv << r.scenario << ',' << name << ',' << w.v_min << ',' << w.v_max << '\n';
            x["windows"][name] = {w.v_min, w.v_max};
        }
        x["overlaps"] = ojson::array();
        for (const auto& [a, b] : r.overlaps) x["overlaps"].push_back({a, b});
        j["scenarios"].push_back(x);
    }
    std::ostringstream overl;
    for (const auto& r : reports)
        for (const auto& [a, b] : r.overlaps) overl << "overlap at delta " << r.scenario << ": " << a << " / " << b << "\n";
    emit(g, "variation.csv", csv.str() + overl.str(), g.format != "json");
    emit(g, "variation.json", j.dump(2) + "\n", g.format == "json");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Step-accurate simulator of a spintronic processing-in-memory array"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config_path, "run configuration (JSON)");
    app.add_option("--profile", g.profile, "near_term, long_term or a profile JSON path");
    app.add_option("--policy", g.policy, "naive, naive_opt, oracular, oracular_opt, kmer, kmer_opt");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
    app.add_flag("--verify", g.verify, "check results against the software oracle");
    app.add_option("--out-dir", g.out_dir, "directory for output files (default: primary output on stdout)");
    app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"csv", "json"}));
    app.fallthrough();

    auto* gates = app.add_subcommand("gates", "gate library, bias windows and the XOR check");

    std::string ref_path, pat_path;
    auto* align = app.add_subcommand("align", "pattern matching over a folded reference");
    align->add_option("--reference", ref_path, "reference FASTA or plain text (default: generated)");
    align->add_option("--patterns", pat_path, "patterns FASTA or one per line (default: sampled)");

    std::string kernel, input, query, key = "Key";
    std::vector<std::string> words;
    auto* bench = app.add_subcommand("bench", "bitcount, string match, rc4 or word count");
    bench->add_option("kernel", kernel, "bc, sm, rc4 or wc")->check(CLI::IsMember({"bc", "sm", "rc4", "wc"}));
    bench->add_option("--input", input, "text corpus (default: generated)");
    bench->add_option("--query", query, "search string for sm");
    bench->add_option("--words", words, "words to count for wc")->delimiter(',');
    bench->add_option("--key", key, "rc4 key");

    std::string axis;
    std::vector<std::string> values;
    auto* sw = app.add_subcommand("sweep", "throughput across pattern length, profile or rows");
    sw->add_option("--axis", axis, "pattern_length, profile or rows");
    sw->add_option("--values", values, "axis values")->delimiter(',');

    std::vector<double> deltas{-0.1, 0.0, 0.1};
    auto* var = app.add_subcommand("variation", "bias windows under critical-current variation");
    var->add_option("--deltas", deltas, "fractional i_crit shifts")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }
    if (seed_opt->count()) g.seed = seed;

    try {
        if (*gates) return cmd_gates(g);
        if (*align) return cmd_align(g, ref_path, pat_path);
        if (*bench) return cmd_bench(g, kernel, input, query, words, key);
        if (*sw) return cmd_sweep(g, axis, values);
        if (*var) return cmd_variation(g, deltas);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const VerifyFailed& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return kExitVerify;
    } catch (const ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return kExitContract;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << "\n";
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
