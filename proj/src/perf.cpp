#include "spinsim/perf.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spinsim/errors.hpp"

namespace spinsim {

StageShare ShareTable::preset() const {
    const auto& m = (*this)[Stage::preset_match];
    const auto& s = (*this)[Stage::preset_score];
    return {m.energy + s.energy, m.latency + s.latency};
}

std::string ShareTable::to_csv() const {
    std::ostringstream o;
    o.precision(10);
    o << "stage,energy_share,latency_share\n";
    for (Stage s : kAllStages) o << stage_name(s) << ',' << (*this)[s].energy << ',' << (*this)[s].latency << '\n';
    return o.str();
}

ShareTable breakdown(const StageLedger& ledger) {
    if (ledger.empty()) throw std::invalid_argument("breakdown of an empty ledger");
    const double e = ledger.total_energy_pj();
    const double t = ledger.total_latency_ns();
    ShareTable st;
    for (Stage s : kAllStages) {
        auto& x = st.stages[static_cast<std::size_t>(s)];
        x.energy = e > 0 ? ledger[s].energy_pj / e : 0.0;
        x.latency = t > 0 ? ledger[s].latency_ns / t : 0.0;
    }
    return st;
}

ThroughputReport throughput(const StageLedger& ledger, double patterns_done) {
    ThroughputReport r;
    r.latency_ns = ledger.total_latency_ns();
    if (!(r.latency_ns > 0.0)) throw std::invalid_argument("throughput of a run with zero latency");
    r.patterns = patterns_done;
    r.energy_pj = ledger.total_energy_pj();
    r.match_rate = patterns_done / (r.latency_ns * 1e-9);
    r.power_mw = r.energy_pj / r.latency_ns;  // pJ/ns = mW
    r.compute_efficiency = r.power_mw > 0 ? r.match_rate / r.power_mw : 0.0;
    r.shares = breakdown(ledger);
    return r;
}

std::string ThroughputReport::to_json() const {
    nlohmann::ordered_json j;
    j["patterns"] = patterns;
    j["energy_pj"] = energy_pj;
    j["latency_ns"] = latency_ns;
    j["match_rate_per_s"] = match_rate;
    j["power_mw"] = power_mw;
    j["compute_efficiency_per_s_mw"] = compute_efficiency;
    auto& s = j["shares"];
    for (Stage st : kAllStages)
        s[std::string(stage_name(st))] = {{"energy", shares[st].energy}, {"latency", shares[st].latency}};
    return j.dump(2);
}

ThroughputReport run_point(const SweepBase& base, const TechnologyProfile& p) {
    const auto w = generate_workload(base.reference_len, base.patterns, base.pattern_len, base.mutation_rate, base.seed);
    const auto run = run_dna(w.reference, w.patterns, base.setup, p);
    return throughput(run.result.ledger, base.patterns);
}

std::vector<SweepPoint> sweep(const SweepBase& base, const std::string& axis, const std::vector<std::string>& values) {
    std::vector<SweepPoint> out;
    for (const auto& v : values) {
        SweepBase b = base;
        try {
            if (axis == "pattern_length") b.pattern_len = std::stoi(v);
            else if (axis == "rows") b.setup.rows_per_array = std::stoi(v);
            else if (axis == "profile") b.profile = v;
            else throw ConfigError("unknown sweep axis '" + axis + "'");
        } catch (const std::logic_error&) {
            throw ConfigError("sweep value '" + v + "' is not a number");
        }
        out.push_back({axis, v, run_point(b, load_named_profile(b.profile))});
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream o;
    o.precision(10);
    o << "axis,value,patterns,energy_pj,latency_ns,match_rate_per_s,power_mw,compute_efficiency,preset_energy_share,"
         "preset_latency_share\n";
    for (const auto& p : points) {
        const auto& r = p.report;
        o << p.axis << ',' << p.value << ',' << r.patterns << ',' << r.energy_pj << ',' << r.latency_ns << ','
          << r.match_rate << ',' << r.power_mw << ',' << r.compute_efficiency << ',' << r.shares.preset().energy << ','
          << r.shares.preset().latency << '\n';
    }
    return o.str();
}

BulkResult bulk_bitwise(const std::string& op, int rows, int cols, const TechnologyProfile& p, std::uint64_t seed) {
    GateKind g;
    if (op == "not") g = GateKind::inv;
    else if (op == "or") g = GateKind::or_;
    else if (op == "nand") g = GateKind::nand;
    else throw std::invalid_argument("bulk op must be not, or or nand");
    if (cols < 1) throw GeometryError("bulk vector needs at least one column");
    ArrayState st(rows, 3 * cols, p);
    std::mt19937_64 rng(seed);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < 2 * cols; ++c) st.load(r, c, rng() & 1);
    Program prog;
    for (int c = 0; c < cols; ++c) {
        prog.push_back(Micro::gang(2 * cols + c, gate_preset(g)));
        const int in[2] = {c, cols + c};
        prog.push_back(Micro::logic(g, 2 * cols + c, std::span(in, gate_arity(g))));
    }
    smc_run(prog, st, p, false);
    BulkResult b;
    b.op = op;
    b.bit_ops = static_cast<std::uint64_t>(rows) * cols;
    b.ledger = st.ledger();
    b.ops_per_second = b.bit_ops / (b.ledger.total_latency_ns() * 1e-9);
    return b;
}

}  // namespace spinsim
