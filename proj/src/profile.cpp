#include "spinsim/profile.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spinsim/errors.hpp"

namespace spinsim {

using nlohmann::json;

double WireModel::segment_resistance_ohm() const {
    if (segment_resistance_override_ohm) return *segment_resistance_override_ohm;
    const double area_m2 = (width_nm * 1e-9) * (height_nm * 1e-9);
    return resistivity_ohm_m * (segment_length_nm * 1e-9) / area_m2;
}

double WireModel::segment_capacitance_ff() const {
    return capacitance_ff_per_um * segment_length_nm * 1e-3;
}

double TechnologyProfile::output_resistance_kohm(bool preset) const {
    if (gate_model.output_resistance == OutputResistance::mean) return 0.5 * (r_p_kohm + r_ap_kohm);
    return preset ? r_ap_kohm : r_p_kohm;
}

double TechnologyProfile::write_access_latency_ns() const {
    return write_latency_ns + periphery.row_decoder.latency_ns + periphery.mux.latency_ns;
}

double TechnologyProfile::read_access_latency_ns() const {
    return read_latency_ns + periphery.row_decoder.latency_ns + periphery.mux.latency_ns +
           periphery.sense_amplifier.latency_ns + periphery.precharge.latency_ns;
}

double TechnologyProfile::write_periphery_energy_pj() const {
    return periphery.row_decoder.energy_pj + periphery.mux.energy_pj;
}

double TechnologyProfile::read_periphery_energy_pj() const {
    return periphery.row_decoder.energy_pj + periphery.mux.energy_pj +
           periphery.sense_amplifier.energy_pj + periphery.precharge.energy_pj;
}

double TechnologyProfile::logic_step_latency_ns() const {
    return switching_latency_ns + periphery.bitline_driver.latency_ns;
}

namespace {

template <class T>
T req(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("profile: missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("profile: bad value for '") + key + "': " + e.what());
    }
}

template <class T>
T opt(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("profile: bad value for '") + key + "': " + e.what());
    }
}

PeripheryCost read_cost(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("profile: periphery missing '") + key + "'");
    const json& c = j.at(key);
    return {req<double>(c, "energy_pj"), req<double>(c, "latency_ns")};
}

json write_cost(const PeripheryCost& c) {
    return {{"energy_pj", c.energy_pj}, {"latency_ns", c.latency_ns}};
}

void validate(const TechnologyProfile& p) {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) throw ConfigError(std::string("profile: ") + what + " must be positive");
    };
    positive(p.r_p_kohm, "r_p_kohm");
    positive(p.r_ap_kohm, "r_ap_kohm");
    positive(p.i_crit_ua, "i_crit_ua");
    positive(p.switching_latency_ns, "switching_latency_ns");
    positive(p.gate_model.threshold_scale, "gate_model.threshold_scale");
    if (p.r_ap_kohm <= p.r_p_kohm) throw ConfigError("profile: r_ap_kohm must exceed r_p_kohm");
    if (p.i_crit_margin < 1.0) throw ConfigError("profile: i_crit_margin must be >= 1");
    if (p.gate_model.access_resistance_kohm < 0.0) throw ConfigError("profile: negative access resistance");
    for (const auto& [name, w] : p.gate_windows)
        if (!(w.v_min > 0.0 && w.v_min < w.v_max))
            throw ConfigError("profile: window for '" + name + "' must satisfy 0 < v_min < v_max");
}

}  // namespace

TechnologyProfile profile_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("profile: ") + e.what());
    }
    TechnologyProfile p;
    p.name = req<std::string>(j, "name");
    p.mtj_type = opt<std::string>(j, "mtj_type", "");
    p.mtj_diameter_nm = opt(j, "mtj_diameter_nm", 0.0);
    p.tmr_percent = opt(j, "tmr_percent", 0.0);
    p.ra_product = opt(j, "ra_product_ohm_um2", 0.0);
    p.r_p_kohm = req<double>(j, "r_p_kohm");
    p.r_ap_kohm = req<double>(j, "r_ap_kohm");
    p.i_crit_ua = req<double>(j, "i_crit_ua");
    p.i_crit_margin = req<double>(j, "i_crit_margin");
    p.switching_latency_ns = req<double>(j, "switching_latency_ns");
    p.write_latency_ns = req<double>(j, "write_latency_ns");
    p.write_energy_pj = req<double>(j, "write_energy_pj");
    p.read_latency_ns = req<double>(j, "read_latency_ns");
    p.read_energy_pj = req<double>(j, "read_energy_pj");

    if (j.contains("gate_windows_v")) {
        for (const auto& [name, w] : j.at("gate_windows_v").items()) {
            if (!w.is_array() || w.size() != 2) throw ConfigError("profile: window '" + name + "' must be [v_min, v_max]");
            p.gate_windows[name] = {w[0].get<double>(), w[1].get<double>()};
        }
    }
    if (j.contains("gate_model")) {
        const json& g = j.at("gate_model");
        p.gate_model.threshold_scale = opt(g, "threshold_scale", 1.0);
        const auto r = opt<std::string>(g, "output_resistance", "mean");
        if (r == "mean") p.gate_model.output_resistance = OutputResistance::mean;
        else if (r == "preset") p.gate_model.output_resistance = OutputResistance::preset;
        else throw ConfigError("profile: output_resistance must be 'mean' or 'preset'");
        p.gate_model.access_resistance_kohm = opt(g, "access_resistance_kohm", 0.0);
    }
    if (!j.contains("periphery")) throw ConfigError("profile: missing key 'periphery'");
    const json& per = j.at("periphery");
    p.periphery.row_decoder = read_cost(per, "row_decoder");
    p.periphery.mux = read_cost(per, "mux");
    p.periphery.sense_amplifier = read_cost(per, "sense_amplifier");
    p.periphery.precharge = read_cost(per, "precharge");
    p.periphery.bitline_driver = read_cost(per, "bitline_driver");

    if (j.contains("wire")) {
        const json& w = j.at("wire");
        p.wire.segment_length_nm = opt(w, "segment_length_nm", p.wire.segment_length_nm);
        p.wire.resistivity_ohm_m = opt(w, "resistivity_ohm_m", p.wire.resistivity_ohm_m);
        p.wire.width_nm = opt(w, "width_nm", p.wire.width_nm);
        p.wire.height_nm = opt(w, "height_nm", p.wire.height_nm);
        p.wire.capacitance_ff_per_um = opt(w, "capacitance_ff_per_um", p.wire.capacitance_ff_per_um);
        p.wire.bias_v = opt(w, "bias_v", p.wire.bias_v);
        p.wire.max_cells_cap = opt(w, "max_cells_cap", p.wire.max_cells_cap);
        if (w.contains("segment_resistance_ohm"))
            p.wire.segment_resistance_override_ohm = w.at("segment_resistance_ohm").get<double>();
    }
    validate(p);
    return p;
}

std::string profile_to_json_text(const TechnologyProfile& p) {
    json j;
    j["name"] = p.name;
    j["mtj_type"] = p.mtj_type;
    j["mtj_diameter_nm"] = p.mtj_diameter_nm;
    j["tmr_percent"] = p.tmr_percent;
    j["ra_product_ohm_um2"] = p.ra_product;
    j["r_p_kohm"] = p.r_p_kohm;
    j["r_ap_kohm"] = p.r_ap_kohm;
    j["i_crit_ua"] = p.i_crit_ua;
    j["i_crit_margin"] = p.i_crit_margin;
    j["switching_latency_ns"] = p.switching_latency_ns;
    j["write_latency_ns"] = p.write_latency_ns;
    j["write_energy_pj"] = p.write_energy_pj;
    j["read_latency_ns"] = p.read_latency_ns;
    j["read_energy_pj"] = p.read_energy_pj;
    json w = json::object();
    for (const auto& [name, win] : p.gate_windows) w[name] = {win.v_min, win.v_max};
    j["gate_windows_v"] = w;
    j["gate_model"] = {
        {"threshold_scale", p.gate_model.threshold_scale},
        {"output_resistance", p.gate_model.output_resistance == OutputResistance::mean ? "mean" : "preset"},
        {"access_resistance_kohm", p.gate_model.access_resistance_kohm}};
    j["periphery"] = {{"row_decoder", write_cost(p.periphery.row_decoder)},
                      {"mux", write_cost(p.periphery.mux)},
                      {"sense_amplifier", write_cost(p.periphery.sense_amplifier)},
                      {"precharge", write_cost(p.periphery.precharge)},
                      {"bitline_driver", write_cost(p.periphery.bitline_driver)}};
    json wire = {{"segment_length_nm", p.wire.segment_length_nm},
                 {"resistivity_ohm_m", p.wire.resistivity_ohm_m},
                 {"width_nm", p.wire.width_nm},
                 {"height_nm", p.wire.height_nm},
                 {"capacitance_ff_per_um", p.wire.capacitance_ff_per_um},
                 {"bias_v", p.wire.bias_v},
                 {"max_cells_cap", p.wire.max_cells_cap}};
    if (p.wire.segment_resistance_override_ohm) wire["segment_resistance_ohm"] = *p.wire.segment_resistance_override_ohm;
    j["wire"] = wire;
    return j.dump(2);
}

TechnologyProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return profile_from_json_text(ss.str());
}

std::filesystem::path config_dir() {
    if (const char* env = std::getenv("SPINSIM_CONFIG_DIR"); env && *env) return env;
    return SPINSIM_DEFAULT_CONFIG_DIR;
}

TechnologyProfile load_named_profile(const std::string& name_or_path) {
    std::filesystem::path p(name_or_path);
    if (p.has_extension() || p.has_parent_path()) return load_profile(p);
    return load_profile(config_dir() / (name_or_path + ".json"));
}

}  // namespace spinsim
