#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "spinsim/array.hpp"
#include "spinsim/errors.hpp"
#include "support.hpp"

using namespace spinsim;
using spinsim::test::near_term;
using spinsim::test::random_bits;

namespace {
ArrayState make(int rows, int cols, ArrayOptions opt = {}) { return ArrayState(rows, cols, near_term(), opt); }
}  // namespace

TEST(Array, WriteThenRead) {
    auto a = make(8, 16);
    const std::vector<std::uint8_t> bits = {1, 0, 1, 1};
    a.write_bits(3, 5, bits);
    EXPECT_EQ(a.read_bits(3, 5, 4), bits);
}

TEST(Array, WriteAndReadCosts) {
    const auto& p = near_term();
    auto a = make(8, 16);
    const std::vector<std::uint8_t> bits = {1, 0, 1, 1, 0};
    a.write_bits(0, 0, bits);
    const auto& w = a.ledger()[Stage::write_patterns];
    EXPECT_DOUBLE_EQ(w.energy_pj, 5 * p.write_energy_pj + p.periphery.row_decoder.energy_pj + p.periphery.mux.energy_pj);
    EXPECT_DOUBLE_EQ(w.latency_ns, p.write_latency_ns + p.periphery.row_decoder.latency_ns + p.periphery.mux.latency_ns);

    const auto before = a.ledger();
    EXPECT_TRUE(a.read_bits(0, 0, 0).empty());
    EXPECT_EQ(a.ledger(), before);
    a.read_bits(0, 0, 3);
    EXPECT_DOUBLE_EQ(a.ledger()[Stage::score_readout].energy_pj, 3 * p.read_energy_pj + p.read_periphery_energy_pj());
}

TEST(Array, OutOfBounds) {
    auto a = make(4, 4);
    const std::vector<std::uint8_t> bits = {1, 1};
    EXPECT_THROW(a.write_bits(0, 3, bits), ContractViolation);
    EXPECT_THROW(a.write_bits(4, 0, bits), ContractViolation);
    EXPECT_THROW(a.read_bits(0, 2, 3), ContractViolation);
    EXPECT_THROW(a.preset_gang(4, true), ContractViolation);
    const int cols[] = {1, 9};
    EXPECT_THROW(a.preset_rowwise(cols, true), ContractViolation);
}

TEST(Array, GangPreset) {
    const auto& p = near_term();
    auto a = make(10, 8);
    a.preset_gang(5, true);
    for (int r = 0; r < 10; ++r) EXPECT_TRUE(a.get(r, 5));
    const auto& c = a.ledger()[Stage::preset_match];
    EXPECT_DOUBLE_EQ(c.latency_ns, p.logic_step_latency_ns());

    auto b = make(10, 8);
    b.preset_row(0, 5, true);
    EXPECT_DOUBLE_EQ(c.energy_pj, 10 * b.ledger()[Stage::preset_match].energy_pj);
}

TEST(Array, RowwisePresetMatchesGangEnergy) {
    for (int rows : {1, 16, 64, 200}) {
        auto g = make(rows, 8);
        auto r = make(rows, 8);
        const int cols[] = {2, 3, 6};
        for (int c : cols) g.preset_gang(c, true);
        r.preset_rowwise(cols, true);
        EXPECT_TRUE(g.same_cells(r));
        EXPECT_DOUBLE_EQ(g.ledger()[Stage::preset_match].energy_pj, r.ledger()[Stage::preset_match].energy_pj);
        EXPECT_EQ(g.ledger()[Stage::preset_match].cells, r.ledger()[Stage::preset_match].cells);
        // One row-serial sweep per column versus one gang step per column.
        auto single = make(rows, 8);
        const int one[] = {2};
        single.preset_rowwise(one, true);
        const double ratio = single.ledger()[Stage::preset_match].latency_ns / near_term().logic_step_latency_ns();
        EXPECT_NEAR(ratio / rows, 1.0, 0.1);
    }
    auto a = make(4, 4);
    a.preset_rowwise({}, true);
    EXPECT_TRUE(a.ledger().empty());
}

TEST(Array, NorAcrossRows) {
    const auto& p = near_term();
    auto a = make(2, 4);
    a.load(0, 0, false), a.load(0, 1, false);
    a.load(1, 0, true), a.load(1, 1, false);
    a.preset_gang(2, false);
    const int in[] = {0, 1};
    a.logic_step(make_gate_spec("nor", p), in, 2);
    EXPECT_TRUE(a.get(0, 2));
    EXPECT_FALSE(a.get(1, 2));
    EXPECT_EQ(a.ledger()[Stage::match_ops].ops, 1u);
    EXPECT_DOUBLE_EQ(a.ledger()[Stage::match_ops].latency_ns + a.ledger()[Stage::bitline].latency_ns,
                     p.logic_step_latency_ns());
}

TEST(Array, RandomRowsMatchSoftware) {
    std::mt19937_64 rng(11);
    const auto& p = near_term();
    for (const char* g : {"nor", "nand", "or", "and", "maj3", "maj5", "th", "inv", "copy"}) {
        const GateSpec s = make_gate_spec(g, p);
        auto a = make(64 + 37, 12);
        for (int r = 0; r < a.rows(); ++r) a.load_bits(r, 0, random_bits(rng, 12));
        const auto before = a;
        std::vector<int> in(s.n_inputs);
        std::iota(in.begin(), in.end(), 0);
        const int out = 10;
        a.preset_gang(out, s.preset);
        a.logic_step(s, in, out);
        for (int r = 0; r < a.rows(); ++r) {
            int ones = 0;
            for (int c : in) ones += a.get(r, c);
            EXPECT_EQ(a.get(r, out), gate_def(g).by_ones[ones] != 0) << g << " row " << r;
            for (int c = 0; c < 12; ++c)
                if (c != out) EXPECT_EQ(a.get(r, c), before.get(r, c));
        }
    }
}

TEST(Array, LogicStepIsNonDestructive) {
    std::mt19937_64 rng(5);
    auto a = make(70, 9);
    for (int r = 0; r < 70; ++r) a.load_bits(r, 0, random_bits(rng, 9));
    a.preset_gang(4, true);
    const auto copy = a;
    const int in[] = {0, 2, 7};
    a.logic_step(make_gate_spec("maj3", near_term()), in, 4);
    for (int c = 0; c < 9; ++c)
        if (c != 4)
            for (int r = 0; r < 70; ++r) EXPECT_EQ(a.get(r, c), copy.get(r, c));
}

TEST(Array, RowOrderDoesNotMatter) {
    std::mt19937_64 rng(3);
    const int rows = 90;
    std::vector<std::vector<std::uint8_t>> data;
    for (int r = 0; r < rows; ++r) data.push_back(random_bits(rng, 5));
    std::vector<int> perm(rows);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    auto a = make(rows, 6), b = make(rows, 6);
    for (int r = 0; r < rows; ++r) {
        a.load_bits(r, 0, data[r]);
        b.load_bits(perm[r], 0, data[r]);
    }
    const int in[] = {0, 1, 2, 3, 4};
    for (auto* x : {&a, &b}) {
        x->preset_gang(5, true);
        x->logic_step(make_gate_spec("maj5", near_term()), in, 5);
    }
    for (int r = 0; r < rows; ++r) EXPECT_EQ(a.get(r, 5), b.get(perm[r], 5));
    EXPECT_DOUBLE_EQ(a.ledger().total_energy_pj(), b.ledger().total_energy_pj());
}

TEST(Array, PresetContract) {
    auto a = make(8, 4);
    const int in[] = {0, 1};
    a.preset_gang(2, true);  // NOR wants 0
    EXPECT_THROW(a.logic_step(make_gate_spec("nor", near_term()), in, 2), ContractViolation);
    a.preset_gang(2, false);
    a.load(5, 2, true);
    EXPECT_THROW(a.logic_step(make_gate_spec("nor", near_term()), in, 2), ContractViolation);
}

TEST(Array, PermissiveModeLetsStaleValuesThrough) {
    auto a = make(2, 4, {.strict_presets = false});
    // Row 0 inputs 11 (NOR 0), row 1 inputs 00 (NOR 1); output left at 1.
    a.load(0, 0, true), a.load(0, 1, true);
    a.preset_gang(2, true);
    const int in[] = {0, 1};
    a.logic_step(make_gate_spec("nor", near_term()), in, 2);
    EXPECT_TRUE(a.get(0, 2));  // wrong, and kept
    EXPECT_TRUE(a.get(1, 2));
}

TEST(Array, ColumnCollisions) {
    auto a = make(4, 4);
    a.preset_gang(2, false);
    const int dup[] = {0, 0};
    const int self[] = {0, 2};
    EXPECT_THROW(a.logic_step(make_gate_spec("nor", near_term()), dup, 2), ContractViolation);
    EXPECT_THROW(a.logic_step(make_gate_spec("nor", near_term()), self, 2), ContractViolation);
}

TEST(Array, OneStepAtATime) {
    auto a = make(4, 6);
    a.preset_gang(2, false);
    a.preset_gang(3, false);
    const int in[] = {0, 1};
    const GateSpec nor = make_gate_spec("nor", near_term());
    a.issue_logic(nor, in, 2);
    EXPECT_THROW(a.issue_logic(nor, in, 3), ContractViolation);
    const std::vector<std::uint8_t> bit = {1};
    EXPECT_THROW(a.write_bits(0, 5, bit), ContractViolation);
    EXPECT_THROW(a.read_bits(0, 5, 1), ContractViolation);
    a.complete_logic();
    EXPECT_THROW(a.complete_logic(), ContractViolation);
    a.issue_logic(nor, in, 3);
    a.complete_logic();
}

TEST(Array, FusedNorWritesBothOutputs) {
    auto a = make(4, 5);
    a.load(1, 0, true);
    a.preset_gang(2, false);
    a.preset_gang(3, false);
    const int in[] = {0, 1};
    a.logic_step(make_gate_spec("nor", near_term()), in, 2, 3);
    for (int r = 0; r < 4; ++r) EXPECT_EQ(a.get(r, 2), a.get(r, 3));
    EXPECT_TRUE(a.get(0, 2));
    EXPECT_FALSE(a.get(1, 2));
}

TEST(Array, WrongBiasGivesWrongAnswers) {
    GateSpec nor = make_gate_spec("nor", near_term());
    nor.v_bias = 1.0;  // inside the INV window: every row switches
    auto a = make(4, 3);
    a.load(1, 0, true);
    a.preset_gang(2, false);
    const int in[] = {0, 1};
    a.logic_step(nor, in, 2);
    EXPECT_TRUE(a.get(1, 2));
}

TEST(Array, SnapshotHex) {
    auto a = make(2, 6);
    a.load(0, 0, true);
    a.load(1, 5, true);
    EXPECT_EQ(a.snapshot_hex(), "80\n04\n");
    const auto bin = a.snapshot_binary();
    EXPECT_EQ(bin.size(), 8u + 6 * 8);
}

TEST(Array, WidthWarning) {
    EXPECT_TRUE(make(4, 100).warnings().empty());
    EXPECT_FALSE(make(4, 5000).warnings().empty());
}

TEST(Ledger, AdditiveAndParallel) {
    StageLedger a, b;
    a.add(Stage::match_ops, 2.0, 3.0, 1, 4);
    b.add(Stage::match_ops, 1.0, 5.0, 2, 4);
    b.add(Stage::add_ops, 1.0, 1.0, 1, 1);
    const auto s = a + b;
    EXPECT_DOUBLE_EQ(s[Stage::match_ops].latency_ns, 8.0);
    EXPECT_DOUBLE_EQ(s.total_energy_pj(), 4.0);
    const auto p = StageLedger::parallel(a, b);
    EXPECT_DOUBLE_EQ(p[Stage::match_ops].latency_ns, 5.0);
    EXPECT_DOUBLE_EQ(p[Stage::match_ops].energy_pj, 3.0);
    EXPECT_EQ(StageLedger::parallel(a, b), StageLedger::parallel(b, a));
    EXPECT_EQ(s - b, a);
}

TEST(Layout, Validation) {
    RegionLayout l{{0, 20}, {20, 10}, {30, 3}, {33, 40}};
    EXPECT_NO_THROW(l.validate(80, 5));
    EXPECT_THROW(l.validate(60, 5), GeometryError);
    EXPECT_THROW(l.validate(80, 8), GeometryError);
    RegionLayout bad{{0, 20}, {10, 10}, {30, 3}, {33, 4}};
    EXPECT_THROW(bad.validate(80, 5), GeometryError);
    EXPECT_EQ(score_bits(100), 7);
    EXPECT_EQ(score_bits(64), 7);
    EXPECT_EQ(score_bits(63), 6);
}
