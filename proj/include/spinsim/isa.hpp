#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinsim/array.hpp"
#include "spinsim/gates.hpp"
#include "spinsim/ledger.hpp"

namespace spinsim {

enum class Op : std::uint8_t {
    read,
    write,
    preset_gang,
    preset_row,
    not_,
    copy,
    nor,
    nand,
    maj3,
    maj5,
    th4,
    gate,   // any other library gate, named by Micro::gate
    phase,  // directive: following work belongs to the match or score phase
};

std::string_view op_mnemonic(Op op);
bool is_logic(Op op);

struct Micro {
    Op op = Op::phase;
    GateKind gate = GateKind::inv;  // logic ops
    bool value = false;             // presets
    Phase phase_value = Phase::match;
    std::uint8_t n_out = 0;  // logic ops: 1, or 2 for the fused form
    std::uint8_t n_cols = 0;
    std::array<int, 7> cols{};  // logic ops: outputs first, then inputs
    int row = -1;               // -1 on preset_row: every row in turn
    int count = 0;              // read width
    std::vector<std::uint8_t> bits;  // write immediate

    std::span<const int> columns() const { return {cols.data(), n_cols}; }
    std::span<const int> inputs() const { return {cols.data() + n_out, static_cast<std::size_t>(n_cols - n_out)}; }
    int out() const { return cols[0]; }
    int out2() const { return n_out > 1 ? cols[1] : -1; }
    // Every column the micro reads or writes, whole spans for read/write.
    bool touches(int col) const;
    bool operator==(const Micro&) const = default;

    static Micro logic(GateKind g, int out, std::span<const int> inputs, int out2 = -1);
    static Micro from_step(const GateStep& s);
    static Micro gang(int col, bool value);
    static Micro row_preset(int col, bool value, int row = -1);
    static Micro write(int row, int col, std::vector<std::uint8_t> bits);
    static Micro read(int row, int col, int n);
    static Micro set_phase(Phase p);
};

using Program = std::vector<Micro>;

// Checks arity and bounds; throws ContractViolation.
void validate_program(std::span<const Micro> program, int rows, int cols);

Program assemble(const std::string& text);  // throws AsmError
std::string disassemble(std::span<const Micro> program);
std::string normalize_asm(const std::string& text);

// Bias and preset per logic gate, fixed for a profile.
class OpLookupTable {
public:
    explicit OpLookupTable(const TechnologyProfile& p);
    const GateSpec& spec(GateKind g) const;
    double v_bias(GateKind g) const { return spec(g).v_bias; }
    bool preset(GateKind g) const { return spec(g).preset; }

private:
    std::array<GateSpec, kGateKinds> specs_;
    std::array<bool, kGateKinds> present_{};
};

struct TraceEntry {
    Micro micro;
    std::uint64_t cycles = 0;
    double energy_pj = 0.0;
    double latency_ns = 0.0;
};

struct ProgramTrace {
    std::vector<TraceEntry> entries;
    std::vector<std::vector<std::uint8_t>> reads;  // one per read micro, in order
    StageLedger ledger;
    std::uint64_t cycles = 0;

    Program program() const;
    std::string to_json() const;
};

// Decodes micros through the lookup table and drives the array. The clock
// period is the switching latency.
class Smc {
public:
    explicit Smc(const TechnologyProfile& p) : table_(p), t_switch_ns_(p.switching_latency_ns) {}

    ProgramTrace run(std::span<const Micro> program, ArrayState& a, bool record = true) const;
    // No trace, no validation pass; reads are appended to reads if given.
    void execute(std::span<const Micro> program, ArrayState& a,
                 std::vector<std::vector<std::uint8_t>>* reads = nullptr) const;
    void execute_one(const Micro& m, ArrayState& a, std::vector<std::vector<std::uint8_t>>* reads) const;
    std::uint64_t cycles_for(double latency_ns) const;
    const OpLookupTable& table() const { return table_; }

private:
    OpLookupTable table_;
    double t_switch_ns_;
};

ProgramTrace smc_run(std::span<const Micro> program, ArrayState& a, const TechnologyProfile& p, bool record = true);

// --- macro instructions -----------------------------------------------

enum class MacroKind : std::uint8_t {
    write_pm,
    read_pm,
    readdir_pm,
    preset,
    preset_mask,
    nand_pm,
    nor_pm,
    xor_pm,
    add_pm,
    align_match_pm,
};

// A row/column/width coordinate; row -1 means every row.
struct IntPm {
    int row = -1;
    int col = 0;
    int width = 0;
};

struct Macro {
    MacroKind kind = MacroKind::write_pm;
    IntPm dst;
    int a_col = 0;
    int b_col = 0;
    int loc = 0;                      // align_match_pm: fragment offset in characters
    int char_bits = 2;                // align_match_pm
    bool value = false;
    bool gang = false;                // presets by column instead of row by row
    std::vector<std::uint8_t> bits;   // write data or preset mask

    static Macro write_pm(int row, int col, std::vector<std::uint8_t> bits);
    static Macro read_pm(int row, int col, int width);
    static Macro readdir_pm(IntPm v);
    static Macro preset(int col, int width, bool value, bool gang = false, int row = -1);
    static Macro preset_mask(int col, std::vector<std::uint8_t> mask, bool gang = false);
    static Macro nand_pm(int out, int a, int b, int width, bool gang = false);
    static Macro nor_pm(int out, int a, int b, int width, bool gang = false);
    static Macro xor_pm(int out, int a, int b, int width, bool gang = false);
    // Population count of columns [first, last) into the score at dst.
    static Macro add_pm(int first, int last, int dst_col, int dst_width, bool gang = false);
    static Macro align_match_pm(int loc, int char_bits = 2, bool gang = false);
};

// Where one alignment keeps its intermediate values inside the scratch
// compartment: match bits first, then per-character comparison temps, then
// the reduction tree.
struct AlignScratch {
    int match_base = 0;
    int temps_base = 0;
    int temps_per_char = 0;
    int tree_base = 0;
    int tree_limit = 0;
};
AlignScratch align_scratch(const RegionLayout& l, int pattern_chars, int char_bits);
int align_scratch_cols(int pattern_chars, int char_bits);

// Appends presets (row-serial or gang) and logic micros for a sequence.
void emit_sequence(Program& out, const GateSequence& seq, bool gang);

Program expand_macro(const Macro& m, const RegionLayout& layout, int rows, int cols);

}  // namespace spinsim
