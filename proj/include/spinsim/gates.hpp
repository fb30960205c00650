#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "spinsim/array.hpp"

namespace spinsim {

// Same order as gate_library().
enum class GateKind : std::uint8_t { inv, copy, nor, or_, nand, and_, maj3, maj5, th };
inline constexpr int kGateKinds = 9;

std::string_view gate_name(GateKind k);
GateKind gate_kind(std::string_view name);  // throws std::out_of_range
int gate_arity(GateKind k);
bool gate_preset(GateKind k);

struct GateStep {
    GateKind gate;
    std::uint8_t n_in = 0;
    std::array<int, 5> in{};
    int out = -1;
    int out2 = -1;  // fused second output

    std::span<const int> inputs() const { return {in.data(), n_in}; }
    bool preset() const { return gate_preset(gate); }
};

struct GateSequence {
    std::vector<GateStep> steps;
    // Columns that must hold a constant before the first step.
    std::vector<std::pair<int, bool>> constants;
    std::vector<int> scratch;  // columns the sequence writes, outputs included
    int adders = 0;

    void append(const GateSequence& o);
};

GateStep make_step(GateKind g, std::initializer_list<int> inputs, int out, int out2 = -1);

// NOR, COPY, TH. With fused the first two become one two-output NOR.
GateSequence xor_sequence(int in0, int in1, int s1, int s2, int out, bool fused = false);

// MAJ3 carry, INV, COPY, MAJ5 sum.
GateSequence full_adder_sequence(int in0, int in1, int cin, int s1, int s2, int sum, int cout);

// Population count of match_cols into score (LSB first). Scratch columns are
// taken consecutively from scratch_base; throws GeometryError if more than
// scratch_limit are needed.
GateSequence reduction_tree(std::span<const int> match_cols, int scratch_base, int scratch_limit, ColRange score);

int reduction_tree_adders(int n_bits);
// Scratch columns reduction_tree uses for n bits (constant-zero column
// included).
int reduction_tree_scratch(int n_bits);

// Equality of two w-bit characters: w XORs, an OR tree down to two bits and
// a final NOR. Scratch is consumed from scratch_base.
GateSequence char_match_sequence(std::span<const int> a_bits, std::span<const int> b_bits, int scratch_base, int match_col);
int char_match_scratch(int width);

// Runs a sequence straight on the array (presets row-wise or gang) without
// going through the instruction layer. Used by tests and small tools.
void run_sequence(ArrayState& a, const GateSequence& seq, bool gang_presets = true);

}  // namespace spinsim
