#include "spinsim/ledger.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace spinsim {

std::string_view stage_name(Stage s) {
    switch (s) {
        case Stage::write_patterns: return "write_patterns";
        case Stage::preset_match: return "preset_match";
        case Stage::bitline: return "bitline";
        case Stage::match_ops: return "match_ops";
        case Stage::preset_score: return "preset_score";
        case Stage::add_ops: return "add_ops";
        case Stage::score_readout: return "score_readout";
        case Stage::schedule_overhead: return "schedule_overhead";
    }
    return "?";
}

void StageLedger::add(Stage s, double energy_pj, double latency_ns, std::uint64_t ops, std::uint64_t cells) {
    auto& c = stages_[static_cast<std::size_t>(s)];
    c.energy_pj += energy_pj;
    c.latency_ns += latency_ns;
    c.ops += ops;
    c.cells += cells;
}

double StageLedger::total_energy_pj() const {
    double t = 0.0;
    for (const auto& c : stages_) t += c.energy_pj;
    return t;
}

double StageLedger::total_latency_ns() const {
    double t = 0.0;
    for (const auto& c : stages_) t += c.latency_ns;
    return t;
}

std::uint64_t StageLedger::total_ops() const {
    std::uint64_t t = 0;
    for (const auto& c : stages_) t += c.ops;
    return t;
}

bool StageLedger::empty() const {
    return std::all_of(stages_.begin(), stages_.end(), [](const StageCost& c) { return c == StageCost{}; });
}

StageLedger& StageLedger::operator+=(const StageLedger& o) {
    for (std::size_t i = 0; i < kStageCount; ++i) {
        stages_[i].energy_pj += o.stages_[i].energy_pj;
        stages_[i].latency_ns += o.stages_[i].latency_ns;
        stages_[i].ops += o.stages_[i].ops;
        stages_[i].cells += o.stages_[i].cells;
    }
    return *this;
}

StageLedger StageLedger::operator-(const StageLedger& o) const {
    StageLedger r = *this;
    for (std::size_t i = 0; i < kStageCount; ++i) {
        r.stages_[i].energy_pj -= o.stages_[i].energy_pj;
        r.stages_[i].latency_ns -= o.stages_[i].latency_ns;
        r.stages_[i].ops -= o.stages_[i].ops;
        r.stages_[i].cells -= o.stages_[i].cells;
    }
    return r;
}

StageLedger StageLedger::scaled(double factor) const {
    StageLedger r = *this;
    for (auto& c : r.stages_) {
        c.energy_pj *= factor;
        c.latency_ns *= factor;
    }
    return r;
}

StageLedger StageLedger::parallel(const StageLedger& a, const StageLedger& b) {
    StageLedger r;
    for (std::size_t i = 0; i < kStageCount; ++i) {
        r.stages_[i].energy_pj = a.stages_[i].energy_pj + b.stages_[i].energy_pj;
        r.stages_[i].latency_ns = std::max(a.stages_[i].latency_ns, b.stages_[i].latency_ns);
        r.stages_[i].ops = a.stages_[i].ops + b.stages_[i].ops;
        r.stages_[i].cells = a.stages_[i].cells + b.stages_[i].cells;
    }
    return r;
}

std::string StageLedger::to_json() const {
    nlohmann::ordered_json j;
    for (Stage s : kAllStages) {
        const auto& c = (*this)[s];
        j["stages"][std::string(stage_name(s))] = {
            {"energy_pj", c.energy_pj}, {"latency_ns", c.latency_ns}, {"ops", c.ops}, {"cells", c.cells}};
    }
    j["total_energy_pj"] = total_energy_pj();
    j["total_latency_ns"] = total_latency_ns();
    return j.dump(2);
}

std::string StageLedger::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "stage,energy_pj,latency_ns,ops,cells\n";
    for (Stage s : kAllStages) {
        const auto& c = (*this)[s];
        os << stage_name(s) << ',' << c.energy_pj << ',' << c.latency_ns << ',' << c.ops << ',' << c.cells << '\n';
    }
    return os.str();
}

}  // namespace spinsim
