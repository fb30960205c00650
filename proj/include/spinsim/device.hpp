#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinsim/profile.hpp"

namespace spinsim {

double mtj_resistance_kohm(bool state, const TechnologyProfile& p);

// Output-MTJ current of the single-node divider: every input MTJ ties the
// bias to the logic line, the output MTJ ties it to ground.
double gate_output_current_ua(std::span<const bool> inputs, bool output_preset, double v_bias,
                              const TechnologyProfile& p);

// Same network, inputs given only by how many of n are 1 (the current is
// symmetric in the inputs). extra_series_kohm models wire between the line
// and the output.
double current_for_ones_ua(int n_inputs, int ones, bool output_preset, double v_bias,
                           const TechnologyProfile& p, double extra_series_kohm = 0.0);

// Total resistance seen by the bias for k ones out of n.
double divider_resistance_kohm(int n_inputs, int ones, bool output_preset, const TechnologyProfile& p,
                               double extra_series_kohm = 0.0);

// Full truth table indexed by the input bitmask (bit i = input i).
struct TruthTable {
    int n_inputs = 0;
    std::vector<std::uint8_t> out;

    bool operator()(std::uint32_t mask) const { return out.at(mask) != 0; }
    bool symmetric() const;
    // Output as a function of the number of 1 inputs; requires symmetric().
    std::vector<std::uint8_t> by_ones() const;

    static TruthTable from_ones(int n_inputs, const std::vector<std::uint8_t>& by_ones);
};

struct GateSpec {
    std::string name;
    int n_inputs = 0;
    bool preset = false;
    double v_bias = 0.0;
    TruthTable truth_table;
};

// The symmetric gates the array can execute in one step. by_ones[k] is the
// output for k ones among the inputs.
struct GateDef {
    std::string name;
    int n_inputs;
    bool preset;
    std::vector<std::uint8_t> by_ones;
};

const std::vector<GateDef>& gate_library();
const GateDef& gate_def(const std::string& name);  // throws std::out_of_range

// GateSpec for a library gate biased at the midpoint of the profile window, or
// of the solved window when the profile does not list this gate.
GateSpec make_gate_spec(const std::string& name, const TechnologyProfile& p);

bool evaluate_gate(std::span<const bool> inputs, const GateSpec& spec, const TechnologyProfile& p);

// Per input count: current at a reference bias and whether the gate must
// flip its output. Kept around so a failure can be explained.
struct WindowAnalysis {
    std::vector<double> resistance_kohm;  // indexed by ones
    std::vector<std::uint8_t> must_switch;
    bool feasible = false;
    std::optional<VoltageWindow> window;
    std::string reason;
};

WindowAnalysis analyze_voltage_window(const TruthTable& tt, bool preset, int n_inputs, const TechnologyProfile& p);

// Maximal bias interval reproducing the table, or nullopt. Throws
// std::invalid_argument for a table that depends on input order.
std::optional<VoltageWindow> solve_voltage_window(const TruthTable& tt, bool preset, int n_inputs,
                                                  const TechnologyProfile& p);

struct VariationReport {
    double scenario = 0.0;  // signed fraction applied to i_crit
    std::vector<std::pair<std::string, VoltageWindow>> windows;
    std::vector<std::pair<std::string, std::string>> overlaps;
};

// Re-solves the windows of every gate named in the profile's table with
// i_crit scaled by (1 + delta). Deltas are fractions in [-0.5, 0.5].
std::vector<VariationReport> variation_sweep(const TechnologyProfile& p, const std::vector<double>& deltas);

struct RowWidthResult {
    int cells = 0;
    double delay_fraction = 0.0;
    bool capped = false;
};

RowWidthResult max_row_width(const TechnologyProfile& p, double v_bias);

}  // namespace spinsim
