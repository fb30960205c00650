#include "spinsim/device.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "spinsim/errors.hpp"

namespace spinsim {

double mtj_resistance_kohm(bool state, const TechnologyProfile& p) {
    return state ? p.r_ap_kohm : p.r_p_kohm;
}

double divider_resistance_kohm(int n_inputs, int ones, bool output_preset, const TechnologyProfile& p,
                               double extra_series_kohm) {
    const double ra = p.gate_model.access_resistance_kohm;
    const double g = (n_inputs - ones) / (p.r_p_kohm + ra) + ones / (p.r_ap_kohm + ra);
    return 1.0 / g + p.output_resistance_kohm(output_preset) + ra + extra_series_kohm;
}

double current_for_ones_ua(int n_inputs, int ones, bool output_preset, double v_bias, const TechnologyProfile& p,
                           double extra_series_kohm) {
    // V / kOhm = mA
    return 1000.0 * v_bias / divider_resistance_kohm(n_inputs, ones, output_preset, p, extra_series_kohm);
}

double gate_output_current_ua(std::span<const bool> inputs, bool output_preset, double v_bias,
                              const TechnologyProfile& p) {
    if (inputs.empty()) throw std::invalid_argument("gate_output_current: empty input list");
    if (!(v_bias > 0.0)) throw std::invalid_argument("gate_output_current: v_bias must be positive");
    const int ones = static_cast<int>(std::count(inputs.begin(), inputs.end(), true));
    return current_for_ones_ua(static_cast<int>(inputs.size()), ones, output_preset, v_bias, p);
}

bool TruthTable::symmetric() const {
    if (out.size() != (std::size_t{1} << n_inputs)) return false;
    std::vector<int> seen(n_inputs + 1, -1);
    for (std::uint32_t m = 0; m < out.size(); ++m) {
        const int k = std::popcount(m);
        if (seen[k] < 0) seen[k] = out[m];
        else if (seen[k] != out[m]) return false;
    }
    return true;
}

std::vector<std::uint8_t> TruthTable::by_ones() const {
    if (!symmetric()) throw std::invalid_argument("truth table is not symmetric in its inputs");
    std::vector<std::uint8_t> r(n_inputs + 1);
    for (std::uint32_t m = 0; m < out.size(); ++m) r[std::popcount(m)] = out[m];
    return r;
}

TruthTable TruthTable::from_ones(int n_inputs, const std::vector<std::uint8_t>& by_ones) {
    if (static_cast<int>(by_ones.size()) != n_inputs + 1) throw std::invalid_argument("by_ones size must be n+1");
    TruthTable t{n_inputs, std::vector<std::uint8_t>(std::size_t{1} << n_inputs)};
    for (std::uint32_t m = 0; m < t.out.size(); ++m) t.out[m] = by_ones[std::popcount(m)];
    return t;
}

const std::vector<GateDef>& gate_library() {
    static const std::vector<GateDef> lib = {
        {"inv", 1, false, {1, 0}},
        {"copy", 1, true, {0, 1}},
        {"nor", 2, false, {1, 0, 0}},
        {"or", 2, true, {0, 1, 1}},
        {"nand", 2, false, {1, 1, 0}},
        {"and", 2, true, {0, 0, 1}},
        {"maj3", 3, true, {0, 0, 1, 1}},
        {"maj5", 5, true, {0, 0, 0, 1, 1, 1}},
        {"th", 4, false, {1, 1, 0, 0, 0}},  // 1 when more than two inputs are 0
    };
    return lib;
}

const GateDef& gate_def(const std::string& name) {
    for (const auto& g : gate_library())
        if (g.name == name) return g;
    throw std::out_of_range("unknown gate '" + name + "'");
}

GateSpec make_gate_spec(const std::string& name, const TechnologyProfile& p) {
    const GateDef& d = gate_def(name);
    GateSpec s{d.name, d.n_inputs, d.preset, 0.0, TruthTable::from_ones(d.n_inputs, d.by_ones)};
    if (auto it = p.gate_windows.find(name); it != p.gate_windows.end()) {
        s.v_bias = it->second.midpoint();
    } else {
        auto w = solve_voltage_window(s.truth_table, s.preset, s.n_inputs, p);
        if (!w) throw ConfigError("gate '" + name + "' has no feasible bias window for profile " + p.name);
        s.v_bias = w->midpoint();
    }
    return s;
}

bool evaluate_gate(std::span<const bool> inputs, const GateSpec& spec, const TechnologyProfile& p) {
    if (static_cast<int>(inputs.size()) != spec.n_inputs)
        throw std::invalid_argument("evaluate_gate: arity mismatch for " + spec.name);
    const double i = gate_output_current_ua(inputs, spec.preset, spec.v_bias, p);
    return i > p.switching_threshold_ua() ? !spec.preset : spec.preset;
}

WindowAnalysis analyze_voltage_window(const TruthTable& tt, bool preset, int n_inputs, const TechnologyProfile& p) {
    if (tt.n_inputs != n_inputs) throw std::invalid_argument("truth table arity mismatch");
    const auto by_ones = tt.by_ones();
    WindowAnalysis a;
    for (int k = 0; k <= n_inputs; ++k) {
        a.resistance_kohm.push_back(divider_resistance_kohm(n_inputs, k, preset, p));
        a.must_switch.push_back(static_cast<std::uint8_t>(by_ones[k] != static_cast<std::uint8_t>(preset)));
    }
    // Current falls strictly with every extra 1, so a single threshold can
    // only flip the output for k < m.
    int m = 0;
    while (m <= n_inputs && a.must_switch[m]) ++m;
    for (int k = m; k <= n_inputs; ++k) {
        if (a.must_switch[k]) {
            a.reason = "switching set is not a prefix of the current ordering (k=" + std::to_string(k) +
                       " must flip but k=" + std::to_string(m) + " must not)";
            return a;
        }
    }
    if (m == 0) {
        a.reason = "output never switches";
        return a;
    }
    if (m == n_inputs + 1) {
        a.reason = "output always switches";
        return a;
    }
    const double thr_ma = p.switching_threshold_ua() / 1000.0;
    a.window = VoltageWindow{thr_ma * a.resistance_kohm[m - 1], thr_ma * a.resistance_kohm[m]};
    a.feasible = true;
    return a;
}

std::optional<VoltageWindow> solve_voltage_window(const TruthTable& tt, bool preset, int n_inputs,
                                                  const TechnologyProfile& p) {
    return analyze_voltage_window(tt, preset, n_inputs, p).window;
}

std::vector<VariationReport> variation_sweep(const TechnologyProfile& p, const std::vector<double>& deltas) {
    std::vector<VariationReport> out;
    for (double d : deltas) {
        if (d < -0.5 || d > 0.5) throw std::invalid_argument("variation delta outside +-50%");
        TechnologyProfile q = p;
        q.i_crit_ua = p.i_crit_ua * (1.0 + d);
        VariationReport r;
        r.scenario = d;
        for (const auto& [name, unused] : p.gate_windows) {
            const GateDef& g = gate_def(name);
            if (auto w = solve_voltage_window(TruthTable::from_ones(g.n_inputs, g.by_ones), g.preset, g.n_inputs, q))
                r.windows.emplace_back(name, *w);
        }
        for (std::size_t i = 0; i < r.windows.size(); ++i)
            for (std::size_t j = i + 1; j < r.windows.size(); ++j) {
                const auto& a = r.windows[i].second;
                const auto& b = r.windows[j].second;
                if (a.v_min <= b.v_max && b.v_min <= a.v_max)
                    r.overlaps.emplace_back(r.windows[i].first, r.windows[j].first);
            }
        out.push_back(std::move(r));
    }
    return out;
}

RowWidthResult max_row_width(const TechnologyProfile& p, double v_bias) {
    const bool inside = std::any_of(p.gate_windows.begin(), p.gate_windows.end(),
                                    [&](const auto& kv) { return kv.second.contains(v_bias); });
    if (!inside) throw std::invalid_argument("max_row_width: bias lies outside every gate window");

    const double seg_kohm = p.wire.segment_resistance_ohm() / 1000.0;
    const int cap = p.wire.max_cells_cap;
    const double thr = p.switching_threshold_ua();
    // Both inputs at R_P draw the most current; that is the state that has
    // to keep switching as the wire grows.
    auto current = [&](int segs) { return current_for_ones_ua(2, 0, false, v_bias, p, segs * seg_kohm); };

    RowWidthResult r;
    if (current(0) <= thr) return r;
    if (seg_kohm <= 0.0) {
        r.cells = cap;
        r.capped = true;
    } else {
        int n = 0;
        while (n < cap && current(n + 1) > thr) ++n;
        r.cells = n;
        r.capped = n >= cap;
    }
    const double r_wire_ohm = r.cells * p.wire.segment_resistance_ohm();
    const double c_wire_f = r.cells * p.wire.segment_capacitance_ff() * 1e-15;
    const double delay_ns = 0.5 * r_wire_ohm * c_wire_f * 1e9;
    r.delay_fraction = delay_ns / p.switching_latency_ns;
    return r;
}

}  // namespace spinsim
