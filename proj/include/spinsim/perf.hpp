#pragma once

#include <array>
#include <string>
#include <vector>

#include "spinsim/kernels.hpp"
#include "spinsim/ledger.hpp"

namespace spinsim {

struct StageShare {
    double energy = 0.0;
    double latency = 0.0;
};

struct ShareTable {
    std::array<StageShare, kStageCount> stages{};

    const StageShare& operator[](Stage s) const { return stages[static_cast<std::size_t>(s)]; }
    StageShare preset() const;  // match and score presets together
    std::string to_csv() const;
};

// Throws std::invalid_argument on an empty ledger.
ShareTable breakdown(const StageLedger& ledger);

struct ThroughputReport {
    double patterns = 0.0;
    double energy_pj = 0.0;
    double latency_ns = 0.0;
    double match_rate = 0.0;          // patterns per second
    double power_mw = 0.0;            // average
    double compute_efficiency = 0.0;  // patterns per second per mW
    ShareTable shares;

    std::string to_json() const;
};

// Throws std::invalid_argument on zero latency.
ThroughputReport throughput(const StageLedger& ledger, double patterns_done);

struct SweepPoint {
    std::string axis;
    std::string value;
    ThroughputReport report;
};

// One DNA workload per point, all drawn from the same seed.
struct SweepBase {
    std::size_t reference_len = 4000;
    int patterns = 8;
    int pattern_len = 100;
    double mutation_rate = 0.02;
    std::uint64_t seed = 1;
    DnaSetup setup;
    std::string profile = "near_term";
};

ThroughputReport run_point(const SweepBase& base, const TechnologyProfile& p);
// axis: pattern_length, profile or rows.
std::vector<SweepPoint> sweep(const SweepBase& base, const std::string& axis, const std::vector<std::string>& values);
std::string sweep_csv(const std::vector<SweepPoint>& points);

struct BulkResult {
    std::string op;
    std::uint64_t bit_ops = 0;
    StageLedger ledger;
    double ops_per_second = 0.0;
};

// Bitwise op over two rows x cols bit-vectors, one column per step with a
// gang preset in front. op: not, or, nand.
BulkResult bulk_bitwise(const std::string& op, int rows, int cols, const TechnologyProfile& p, std::uint64_t seed = 7);

}  // namespace spinsim
