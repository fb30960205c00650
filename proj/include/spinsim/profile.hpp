#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace spinsim {

struct VoltageWindow {
    double v_min = 0.0;
    double v_max = 0.0;
    double midpoint() const { return 0.5 * (v_min + v_max); }
    bool contains(double v) const { return v >= v_min && v <= v_max; }
};

struct PeripheryCost {
    double energy_pj = 0.0;
    double latency_ns = 0.0;
};

struct PeripheryCosts {
    PeripheryCost row_decoder;
    PeripheryCost mux;
    PeripheryCost sense_amplifier;
    PeripheryCost precharge;
    // Driven once per logic step or gang preset; energy is per active row.
    PeripheryCost bitline_driver;
};

enum class OutputResistance { mean, preset };

// How the resistive-divider gate model is parameterised. threshold_scale
// multiplies i_crit to give the switching threshold of the output MTJ.
struct GateModel {
    double threshold_scale = 1.0;
    OutputResistance output_resistance = OutputResistance::mean;
    double access_resistance_kohm = 0.0;  // series resistance per cell path
};

struct WireModel {
    double segment_length_nm = 160.0;
    double resistivity_ohm_m = 2.2e-8;
    double width_nm = 40.0;
    double height_nm = 55.0;
    double capacitance_ff_per_um = 0.16;
    double bias_v = 1.0;
    int max_cells_cap = 65536;
    std::optional<double> segment_resistance_override_ohm;

    double segment_resistance_ohm() const;
    double segment_capacitance_ff() const;
};

struct TechnologyProfile {
    std::string name;
    std::string mtj_type;
    double mtj_diameter_nm = 0.0;
    double tmr_percent = 0.0;
    double ra_product = 0.0;  // ohm*um^2

    double r_p_kohm = 0.0;
    double r_ap_kohm = 0.0;
    double i_crit_ua = 0.0;
    double i_crit_margin = 1.0;
    double switching_latency_ns = 0.0;
    double write_latency_ns = 0.0;
    double write_energy_pj = 0.0;
    double read_latency_ns = 0.0;
    double read_energy_pj = 0.0;

    // Keyed by gate name: inv, copy, nor, maj3, maj5, th.
    std::map<std::string, VoltageWindow> gate_windows;
    GateModel gate_model;
    PeripheryCosts periphery;
    WireModel wire;

    double switching_threshold_ua() const { return i_crit_ua * gate_model.threshold_scale; }
    double output_resistance_kohm(bool preset) const;

    // One row access through decoder and mux (write) or decoder, mux,
    // sense amplifier and precharge (read).
    double write_access_latency_ns() const;
    double read_access_latency_ns() const;
    double write_periphery_energy_pj() const;
    double read_periphery_energy_pj() const;
    // Switching plus bitline drive: the latency of one logic step.
    double logic_step_latency_ns() const;
};

TechnologyProfile load_profile(const std::filesystem::path& path);
TechnologyProfile profile_from_json_text(const std::string& text);
std::string profile_to_json_text(const TechnologyProfile& p);

// Resolves "near_term"/"long_term" (or a path) against the config directory.
std::filesystem::path config_dir();
TechnologyProfile load_named_profile(const std::string& name_or_path);

}  // namespace spinsim
