#include "spinsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

using nlohmann::json;

const std::vector<std::string> kKnownKeys = {
    "profile",       "rows",         "arrays",     "fragment_len",   "pattern_len", "policy",
    "output_mode",   "seed",         "reference_len", "patterns",    "mutation_rate", "k",
    "seed_positions", "schedule_cost", "kernel",   "kernel_items",   "sweep"};

template <class T>
void read(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("field '") + key + "': wrong type");
    }
}

void require(bool ok, const std::string& field, const std::string& msg) {
    if (!ok) throw ConfigError("field '" + field + "': " + msg);
}

}  // namespace

void validate(const RunConfig& c) {
    require(!c.profile.empty(), "profile", "must name a profile");
    require(c.rows >= 1 && c.rows <= 1 << 16, "rows", "must be in [1, 65536]");
    require(c.arrays >= 0, "arrays", "must be >= 0");
    require(c.pattern_len >= 1, "pattern_len", "must be positive");
    require(c.fragment_len >= c.pattern_len, "fragment_len", "must be at least pattern_len");
    require(c.reference_len >= static_cast<std::size_t>(c.pattern_len), "reference_len", "must be at least pattern_len");
    require(c.patterns >= 1, "patterns", "must be positive");
    require(c.mutation_rate >= 0.0 && c.mutation_rate <= 1.0, "mutation_rate", "must be in [0, 1]");
    require(c.k >= 1 && c.k <= 32, "k", "must be in [1, 32]");
    require(c.policy.kind != PolicyKind::kmer || c.k <= c.pattern_len, "k", "must not exceed pattern_len");
    require(!c.seed_positions.empty(), "seed_positions", "must list at least one position");
    for (int s : c.seed_positions)
        require(s >= 0 && s + c.k <= c.pattern_len, "seed_positions", "position " + std::to_string(s) + " leaves no room for a k-mer");
    require(c.schedule_cost.latency_ns_per_pattern >= 0 && c.schedule_cost.energy_pj_per_pattern >= 0, "schedule_cost",
            "costs must be >= 0");
    require(c.kernel == "bc" || c.kernel == "sm" || c.kernel == "rc4" || c.kernel == "wc", "kernel",
            "must be bc, sm, rc4 or wc");
    require(c.kernel_items >= 1, "kernel_items", "must be positive");
    require(c.sweep_axis == "pattern_length" || c.sweep_axis == "profile" || c.sweep_axis == "rows", "sweep.axis",
            "must be pattern_length, profile or rows");
    require(!c.sweep_values.empty(), "sweep.values", "must list at least one value");
}

RunConfig run_config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw ConfigError("field '" + key + "': unknown");

    RunConfig c;
    read(j, "profile", c.profile);
    read(j, "rows", c.rows);
    read(j, "arrays", c.arrays);
    read(j, "fragment_len", c.fragment_len);
    read(j, "pattern_len", c.pattern_len);
    std::string s;
    if (j.contains("policy")) {
        read(j, "policy", s);
        try {
            c.policy = Policy::parse(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("field 'policy': ") + e.what());
        }
    }
    if (j.contains("output_mode")) {
        read(j, "output_mode", s);
        try {
            c.output_mode = output_mode_from_name(s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("field 'output_mode': ") + e.what());
        }
    }
    read(j, "seed", c.seed);
    read(j, "reference_len", c.reference_len);
    read(j, "patterns", c.patterns);
    read(j, "mutation_rate", c.mutation_rate);
    read(j, "k", c.k);
    read(j, "seed_positions", c.seed_positions);
    if (j.contains("schedule_cost")) {
        const auto& sc = j["schedule_cost"];
        if (!sc.is_object()) throw ConfigError("field 'schedule_cost': must be an object");
        read(sc, "latency_ns_per_pattern", c.schedule_cost.latency_ns_per_pattern);
        read(sc, "energy_pj_per_pattern", c.schedule_cost.energy_pj_per_pattern);
    }
    read(j, "kernel", c.kernel);
    read(j, "kernel_items", c.kernel_items);
    if (j.contains("sweep")) {
        const auto& sw = j["sweep"];
        if (!sw.is_object()) throw ConfigError("field 'sweep': must be an object");
        read(sw, "axis", c.sweep_axis);
        if (sw.contains("values")) {
            c.sweep_values.clear();
            for (const auto& v : sw["values"]) c.sweep_values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        }
    }
    validate(c);
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return run_config_from_json(ss.str());
}

DnaSetup RunConfig::dna_setup() const {
    DnaSetup s;
    s.fragment_len = fragment_len;
    s.rows_per_array = rows;
    s.max_arrays = arrays;
    s.policy = policy;
    s.mode = output_mode;
    s.k = k;
    s.seed_positions = seed_positions;
    s.schedule_cost = schedule_cost;
    return s;
}

SweepBase RunConfig::sweep_base() const {
    SweepBase b;
    b.reference_len = reference_len;
    b.patterns = patterns;
    b.pattern_len = pattern_len;
    b.mutation_rate = mutation_rate;
    b.seed = seed;
    b.setup = dna_setup();
    b.profile = profile;
    return b;
}

std::string RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["profile"] = profile;
    j["rows"] = rows;
    j["arrays"] = arrays;
    j["fragment_len"] = fragment_len;
    j["pattern_len"] = pattern_len;
    j["policy"] = policy.name();
    j["output_mode"] = std::string(output_mode_name(output_mode));
    j["seed"] = seed;
    j["reference_len"] = reference_len;
    j["patterns"] = patterns;
    j["mutation_rate"] = mutation_rate;
    j["k"] = k;
    j["seed_positions"] = seed_positions;
    j["schedule_cost"] = {{"latency_ns_per_pattern", schedule_cost.latency_ns_per_pattern},
                          {"energy_pj_per_pattern", schedule_cost.energy_pj_per_pattern}};
    j["kernel"] = kernel;
    j["kernel_items"] = kernel_items;
    j["sweep"] = {{"axis", sweep_axis}, {"values", sweep_values}};
    return j.dump(2);
}

}  // namespace spinsim
