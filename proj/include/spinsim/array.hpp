#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spinsim/device.hpp"
#include "spinsim/ledger.hpp"
#include "spinsim/profile.hpp"

namespace spinsim {

struct ColRange {
    int begin = 0;
    int width = 0;
    int end() const { return begin + width; }
    bool contains(int c) const { return c >= begin && c < end(); }
};

// The four compartments of a row. Ranges are ordered and disjoint.
struct RegionLayout {
    ColRange fragment;
    ColRange pattern;
    ColRange score;
    ColRange scratch;

    int total_cols() const { return scratch.end(); }
    void validate(int cols, int pattern_chars) const;  // throws GeometryError
};

// Score width needed for a count of up to n.
int score_bits(int n);

enum class Phase : std::uint8_t { match, score };

struct ArrayOptions {
    bool strict_presets = true;  // refuse a logic step whose output is not preset
};

class ArrayState {
public:
    ArrayState(int rows, int cols, TechnologyProfile profile, ArrayOptions opt = {});

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const TechnologyProfile& profile() const { return profile_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::optional<RegionLayout> layout;

    bool get(int row, int col) const;
    // Initial memory contents; not charged to the ledger.
    void load(int row, int col, bool v);
    void load_bits(int row, int start_col, std::span<const std::uint8_t> bits);

    void write_bits(int row, int start_col, std::span<const std::uint8_t> bits);
    std::vector<std::uint8_t> read_bits(int row, int start_col, int n);

    void preset_gang(int col, bool value);
    // Every row written in turn, each access covering all listed columns.
    void preset_rowwise(std::span<const int> cols, bool value);
    void preset_row(int row, int col, bool value);

    // out2 >= 0 selects the fused two-output form: both outputs receive the
    // same value.
    void issue_logic(const GateSpec& spec, std::span<const int> inputs, int out, int out2 = -1);
    void complete_logic();
    bool step_in_flight() const { return pending_.active; }
    void logic_step(const GateSpec& spec, std::span<const int> inputs, int out, int out2 = -1) {
        issue_logic(spec, inputs, out, out2);
        complete_logic();
    }

    void set_phase(Phase p) { phase_ = p; }
    Phase phase() const { return phase_; }

    const StageLedger& ledger() const { return ledger_; }
    StageLedger& ledger() { return ledger_; }

    // Column-major storage: one run of 64-bit words per column, bit r of the
    // run is row r.
    std::span<const std::uint64_t> column_words(int col) const;

    // One line per row, columns packed MSB-first into hex digits.
    std::string snapshot_hex() const;
    std::vector<std::uint8_t> snapshot_binary() const;
    bool same_cells(const ArrayState& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && bits_ == o.bits_; }

private:
    void check_col(int c, const char* what) const;
    void check_row(int r, const char* what) const;
    void check_idle(const char* what) const;
    std::uint64_t* col_ptr(int c) { return bits_.data() + static_cast<std::size_t>(c) * words_; }
    const std::uint64_t* col_ptr(int c) const { return bits_.data() + static_cast<std::size_t>(c) * words_; }

    struct Pending {
        bool active = false;
        int out = -1;
        int out2 = -1;
        std::vector<std::uint64_t> result;
        double energy_pj = 0.0;
    };

    int rows_;
    int cols_;
    int words_;
    std::uint64_t tail_mask_;
    TechnologyProfile profile_;
    ArrayOptions opt_;
    std::vector<std::uint64_t> bits_;
    std::vector<std::string> warnings_;
    Phase phase_ = Phase::match;
    StageLedger ledger_;
    Pending pending_;
};

}  // namespace spinsim
