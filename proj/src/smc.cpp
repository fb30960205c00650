#include <cmath>

#include "json.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/isa.hpp"

namespace spinsim {

OpLookupTable::OpLookupTable(const TechnologyProfile& p) {
    for (int i = 0; i < kGateKinds; ++i) {
        try {
            specs_[i] = make_gate_spec(std::string(gate_name(static_cast<GateKind>(i))), p);
            present_[i] = true;
        } catch (const ConfigError&) {
            present_[i] = false;  // gate not realisable on this device
        }
    }
}

const GateSpec& OpLookupTable::spec(GateKind g) const {
    const int i = static_cast<int>(g);
    if (!present_[i]) throw ContractViolation("no lookup entry for gate " + std::string(gate_name(g)));
    return specs_[i];
}

std::uint64_t Smc::cycles_for(double latency_ns) const {
    if (latency_ns <= 0.0) return 0;
    // Tolerate rounding noise right at a cycle boundary.
    return static_cast<std::uint64_t>(std::ceil(latency_ns / t_switch_ns_ - 1e-9));
}

void Smc::execute_one(const Micro& m, ArrayState& a, std::vector<std::vector<std::uint8_t>>* reads) const {
    switch (m.op) {
        case Op::phase:
            a.set_phase(m.phase_value);
            break;
        case Op::read: {
            auto bits = a.read_bits(m.row, m.cols[0], m.count);
            if (reads) reads->push_back(std::move(bits));
            break;
        }
        case Op::write:
            a.write_bits(m.row, m.cols[0], m.bits);
            break;
        case Op::preset_gang:
            a.preset_gang(m.cols[0], m.value);
            break;
        case Op::preset_row:
            if (m.row < 0) a.preset_rowwise(std::span<const int>(m.cols.data(), 1), m.value);
            else a.preset_row(m.row, m.cols[0], m.value);
            break;
        default:
            a.logic_step(table_.spec(m.gate), m.inputs(), m.out(), m.out2());
    }
}

void Smc::execute(std::span<const Micro> program, ArrayState& a, std::vector<std::vector<std::uint8_t>>* reads) const {
    for (const Micro& m : program) execute_one(m, a, reads);
}

ProgramTrace Smc::run(std::span<const Micro> program, ArrayState& a, bool record) const {
    validate_program(program, a.rows(), a.cols());
    ProgramTrace t;
    const StageLedger start = a.ledger();
    if (!record) {
        execute(program, a, &t.reads);
        t.ledger = a.ledger() - start;
        t.cycles = cycles_for(t.ledger.total_latency_ns());
        return t;
    }
    t.entries.reserve(program.size());
    for (const Micro& m : program) {
        const double e0 = a.ledger().total_energy_pj();
        const double l0 = a.ledger().total_latency_ns();
        execute_one(m, a, &t.reads);
        TraceEntry e{m, 0, a.ledger().total_energy_pj() - e0, a.ledger().total_latency_ns() - l0};
        e.cycles = cycles_for(e.latency_ns);
        t.cycles += e.cycles;
        t.entries.push_back(std::move(e));
    }
    t.ledger = a.ledger() - start;
    return t;
}

ProgramTrace smc_run(std::span<const Micro> program, ArrayState& a, const TechnologyProfile& p, bool record) {
    return Smc(p).run(program, a, record);
}

Program ProgramTrace::program() const {
    Program p;
    p.reserve(entries.size());
    for (const auto& e : entries) p.push_back(e.micro);
    return p;
}

std::string ProgramTrace::to_json() const {
    nlohmann::ordered_json j;
    j["instructions"] = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        nlohmann::ordered_json x;
        x["op"] = e.micro.op == Op::gate ? "gate." + std::string(gate_name(e.micro.gate))
                                         : std::string(op_mnemonic(e.micro.op));
        x["columns"] = std::vector<int>(e.micro.columns().begin(), e.micro.columns().end());
        if (e.micro.row >= 0) x["row"] = e.micro.row;
        x["cycles"] = e.cycles;
        x["energy_pj"] = e.energy_pj;
        x["latency_ns"] = e.latency_ns;
        j["instructions"].push_back(std::move(x));
    }
    j["cycles"] = cycles;
    j["energy_pj"] = ledger.total_energy_pj();
    j["latency_ns"] = ledger.total_latency_ns();
    return j.dump(2);
}

}  // namespace spinsim
