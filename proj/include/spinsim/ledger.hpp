#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace spinsim {

enum class Stage : std::uint8_t {
    write_patterns,
    preset_match,
    bitline,
    match_ops,
    preset_score,
    add_ops,
    score_readout,
    schedule_overhead,
};
inline constexpr std::size_t kStageCount = 8;

std::string_view stage_name(Stage s);
inline constexpr std::array<Stage, kStageCount> kAllStages = {
    Stage::write_patterns, Stage::preset_match, Stage::bitline,      Stage::match_ops,
    Stage::preset_score,   Stage::add_ops,      Stage::score_readout, Stage::schedule_overhead};

struct StageCost {
    double energy_pj = 0.0;
    double latency_ns = 0.0;
    std::uint64_t ops = 0;
    std::uint64_t cells = 0;  // cells written, read, preset or evaluated

    bool operator==(const StageCost&) const = default;
};

class StageLedger {
public:
    void add(Stage s, double energy_pj, double latency_ns, std::uint64_t ops, std::uint64_t cells);

    const StageCost& operator[](Stage s) const { return stages_[static_cast<std::size_t>(s)]; }

    double total_energy_pj() const;
    double total_latency_ns() const;
    std::uint64_t total_ops() const;
    bool empty() const;

    // Sequential composition.
    StageLedger& operator+=(const StageLedger& o);
    friend StageLedger operator+(StageLedger a, const StageLedger& b) { return a += b; }
    StageLedger operator-(const StageLedger& o) const;
    StageLedger scaled(double factor) const;
    bool operator==(const StageLedger&) const = default;

    // Arrays running side by side: energy adds, each stage waits for the
    // slowest array.
    static StageLedger parallel(const StageLedger& a, const StageLedger& b);

    std::string to_json() const;
    std::string to_csv() const;

private:
    std::array<StageCost, kStageCount> stages_{};
};

}  // namespace spinsim
