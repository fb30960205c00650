#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinsim/kernels.hpp"
#include "spinsim/perf.hpp"

namespace spinsim {

// Everything a CLI run needs. JSON keys mirror the field names; see
// README.md for the schema.
struct RunConfig {
    std::string profile = "near_term";  // shipped name or path to a profile JSON

    // geometry
    int rows = 64;
    int arrays = 0;  // 0: as many as the data needs

    // layout
    int fragment_len = 1000;
    int pattern_len = 100;

    Policy policy;
    OutputMode output_mode = OutputMode::score_buffer;
    std::uint64_t seed = 1;

    // generated workload, used when no input files are given
    std::size_t reference_len = 8000;
    int patterns = 8;
    double mutation_rate = 0.02;

    // k-mer filter
    int k = 12;
    std::vector<int> seed_positions{0};

    ScheduleCost schedule_cost;

    // byte kernels
    std::string kernel = "bc";
    int kernel_items = 1000;

    // sweep
    std::string sweep_axis = "pattern_length";
    std::vector<std::string> sweep_values{"100", "200", "300"};

    DnaSetup dna_setup() const;
    SweepBase sweep_base() const;
    std::string to_json() const;
};

// Throws ConfigError naming the offending field.
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);
void validate(const RunConfig& c);

}  // namespace spinsim
