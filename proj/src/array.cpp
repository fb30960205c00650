#include "spinsim/array.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "spinsim/errors.hpp"

namespace spinsim {

int score_bits(int n) {
    return n <= 0 ? 1 : std::bit_width(static_cast<unsigned>(n));
}

void RegionLayout::validate(int cols, int pattern_chars) const {
    const ColRange* order[] = {&fragment, &pattern, &score, &scratch};
    int prev_end = 0;
    for (const ColRange* r : order) {
        if (r->begin < prev_end || r->width < 0) throw GeometryError("layout: compartments overlap or are out of order");
        prev_end = r->end();
    }
    if (prev_end > cols)
        throw GeometryError("layout needs " + std::to_string(prev_end) + " columns, array has " + std::to_string(cols));
    if (score.width < score_bits(pattern_chars)) throw GeometryError("layout: score compartment too narrow");
}

ArrayState::ArrayState(int rows, int cols, TechnologyProfile profile, ArrayOptions opt)
    : rows_(rows), cols_(cols), words_((rows + 63) / 64), profile_(std::move(profile)), opt_(opt) {
    if (rows <= 0 || cols <= 0) throw GeometryError("array needs at least one row and one column");
    tail_mask_ = (rows % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (rows % 64)) - 1);
    bits_.assign(static_cast<std::size_t>(cols) * words_, 0);
    try {
        const auto w = max_row_width(profile_, profile_.wire.bias_v);
        if (cols > w.cells)
            warnings_.push_back("array has " + std::to_string(cols) + " columns, above the " +
                                std::to_string(w.cells) + "-cell logic-line limit of profile " + profile_.name);
    } catch (const std::invalid_argument&) {
        // wire bias not inside any window: no width limit to report
    }
}

void ArrayState::check_col(int c, const char* what) const {
    if (c < 0 || c >= cols_)
        throw ContractViolation(std::string(what) + ": column " + std::to_string(c) + " out of range");
}

void ArrayState::check_row(int r, const char* what) const {
    if (r < 0 || r >= rows_) throw ContractViolation(std::string(what) + ": row " + std::to_string(r) + " out of range");
}

void ArrayState::check_idle(const char* what) const {
    if (pending_.active) throw ContractViolation(std::string(what) + " while a logic step is in flight");
}

bool ArrayState::get(int row, int col) const {
    check_row(row, "get");
    check_col(col, "get");
    return (col_ptr(col)[row >> 6] >> (row & 63)) & 1u;
}

void ArrayState::load(int row, int col, bool v) {
    check_row(row, "load");
    check_col(col, "load");
    std::uint64_t& w = col_ptr(col)[row >> 6];
    const std::uint64_t m = std::uint64_t{1} << (row & 63);
    w = v ? (w | m) : (w & ~m);
}

void ArrayState::load_bits(int row, int start_col, std::span<const std::uint8_t> bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) load(row, start_col + static_cast<int>(i), bits[i] != 0);
}

void ArrayState::write_bits(int row, int start_col, std::span<const std::uint8_t> bits) {
    check_idle("write");
    check_row(row, "write");
    if (bits.empty()) return;
    check_col(start_col, "write");
    check_col(start_col + static_cast<int>(bits.size()) - 1, "write");
    load_bits(row, start_col, bits);
    ledger_.add(Stage::write_patterns,
                static_cast<double>(bits.size()) * profile_.write_energy_pj + profile_.write_periphery_energy_pj(),
                profile_.write_access_latency_ns(), 1, bits.size());
}

std::vector<std::uint8_t> ArrayState::read_bits(int row, int start_col, int n) {
    check_idle("read");
    check_row(row, "read");
    std::vector<std::uint8_t> out;
    if (n <= 0) return out;
    check_col(start_col, "read");
    check_col(start_col + n - 1, "read");
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(get(row, start_col + i) ? 1 : 0);
    ledger_.add(Stage::score_readout, n * profile_.read_energy_pj + profile_.read_periphery_energy_pj(),
                profile_.read_access_latency_ns(), 1, static_cast<std::uint64_t>(n));
    return out;
}

namespace {
Stage preset_stage(Phase p) { return p == Phase::match ? Stage::preset_match : Stage::preset_score; }
Stage logic_stage(Phase p) { return p == Phase::match ? Stage::match_ops : Stage::add_ops; }
}  // namespace

void ArrayState::preset_gang(int col, bool value) {
    check_idle("preset");
    check_col(col, "preset_gang");
    std::uint64_t* w = col_ptr(col);
    std::fill(w, w + words_, value ? ~std::uint64_t{0} : 0);
    w[words_ - 1] &= tail_mask_;
    ledger_.add(preset_stage(phase_), rows_ * profile_.write_energy_pj, profile_.logic_step_latency_ns(), 1,
                static_cast<std::uint64_t>(rows_));
}

void ArrayState::preset_rowwise(std::span<const int> cols, bool value) {
    check_idle("preset");
    if (cols.empty()) return;
    for (int c : cols) check_col(c, "preset_rowwise");
    for (int c : cols) {
        std::uint64_t* w = col_ptr(c);
        std::fill(w, w + words_, value ? ~std::uint64_t{0} : 0);
        w[words_ - 1] &= tail_mask_;
    }
    const auto cells = static_cast<std::uint64_t>(rows_) * cols.size();
    ledger_.add(preset_stage(phase_), static_cast<double>(cells) * profile_.write_energy_pj,
                rows_ * profile_.write_access_latency_ns(), static_cast<std::uint64_t>(rows_), cells);
}

void ArrayState::preset_row(int row, int col, bool value) {
    check_idle("preset");
    load(row, col, value);
    ledger_.add(preset_stage(phase_), profile_.write_energy_pj, profile_.write_access_latency_ns(), 1, 1);
}

void ArrayState::issue_logic(const GateSpec& spec, std::span<const int> inputs, int out, int out2) {
    if (pending_.active) throw ContractViolation("logic step issued while another is in flight");
    const int n = static_cast<int>(inputs.size());
    if (n != spec.n_inputs) throw ContractViolation("logic step: arity mismatch for " + spec.name);
    if (n < 1 || n > 7) throw ContractViolation("logic step: fan-in must be 1..7");
    check_col(out, "logic output");
    if (out2 >= 0) {
        check_col(out2, "logic output");
        if (out2 == out) throw ContractViolation("logic step: fused outputs collide");
    }
    for (int i = 0; i < n; ++i) {
        check_col(inputs[i], "logic input");
        if (inputs[i] == out || inputs[i] == out2)
            throw ContractViolation("logic step: input column " + std::to_string(inputs[i]) + " is also an output");
        for (int j = 0; j < i; ++j)
            if (inputs[j] == inputs[i]) throw ContractViolation("logic step: repeated input column");
    }
    const std::uint64_t fill = spec.preset ? ~std::uint64_t{0} : 0;
    if (opt_.strict_presets) {
        for (int oc : {out, out2}) {
            if (oc < 0) continue;
            const std::uint64_t* w = col_ptr(oc);
            for (int i = 0; i < words_; ++i) {
                const std::uint64_t lane = i == words_ - 1 ? tail_mask_ : ~std::uint64_t{0};
                if ((w[i] ^ fill) & lane) {
                    const int row = i * 64 + std::countr_zero((w[i] ^ fill) & lane);
                    throw ContractViolation("logic step " + spec.name + ": output column " + std::to_string(oc) +
                                            " not preset to " + (spec.preset ? "1" : "0") + " in row " +
                                            std::to_string(row));
                }
            }
        }
    }

    // Analog evaluation per input count; rows only differ in how many of
    // their inputs are 1.
    const double thr = profile_.switching_threshold_ua();
    std::uint64_t flips_by_k = 0;
    double energy_by_k[8] = {};
    for (int k = 0; k <= n; ++k) {
        const double i_ua = current_for_ones_ua(n, k, spec.preset, spec.v_bias, profile_);
        if (i_ua > thr) flips_by_k |= std::uint64_t{1} << k;
        // V * uA * ns = fJ
        energy_by_k[k] = spec.v_bias * profile_.i_crit_margin * i_ua * profile_.switching_latency_ns * 1e-3;
    }

    pending_.result.resize(words_);
    double energy = 0.0;
    std::uint64_t count_by_k[8] = {};
    for (int w = 0; w < words_; ++w) {
        std::uint64_t c0 = 0, c1 = 0, c2 = 0;
        for (int i = 0; i < n; ++i) {
            const std::uint64_t x = col_ptr(inputs[i])[w];
            const std::uint64_t t0 = c0 & x;
            c0 ^= x;
            const std::uint64_t t1 = c1 & t0;
            c1 ^= t0;
            c2 |= t1;
        }
        const std::uint64_t lane = w == words_ - 1 ? tail_mask_ : ~std::uint64_t{0};
        std::uint64_t flip = 0;
        for (int k = 0; k <= n; ++k) {
            const std::uint64_t m = ((k & 1) ? c0 : ~c0) & ((k & 2) ? c1 : ~c1) & ((k & 4) ? c2 : ~c2) & lane;
            count_by_k[k] += static_cast<std::uint64_t>(std::popcount(m));
            if ((flips_by_k >> k) & 1u) flip |= m;
        }
        // Output starts at the preset value; rows whose current exceeds the
        // threshold flip it. In permissive mode a stale output keeps its bit
        // unless the row switches it away from the preset.
        const std::uint64_t cur = col_ptr(out)[w];
        const std::uint64_t switched = fill ^ flip;
        pending_.result[w] = opt_.strict_presets ? (switched & lane) : (((cur & ~flip) | (switched & flip)) & lane);
    }
    for (int k = 0; k <= n; ++k) energy += static_cast<double>(count_by_k[k]) * energy_by_k[k];

    pending_.active = true;
    pending_.out = out;
    pending_.out2 = out2;
    pending_.energy_pj = energy;
}

void ArrayState::complete_logic() {
    if (!pending_.active) throw ContractViolation("complete without an issued logic step");
    std::copy(pending_.result.begin(), pending_.result.end(), col_ptr(pending_.out));
    if (pending_.out2 >= 0) std::copy(pending_.result.begin(), pending_.result.end(), col_ptr(pending_.out2));
    pending_.active = false;
    const auto rows = static_cast<std::uint64_t>(rows_);
    ledger_.add(logic_stage(phase_), pending_.energy_pj, profile_.switching_latency_ns, 1, rows);
    ledger_.add(Stage::bitline, rows_ * profile_.periphery.bitline_driver.energy_pj,
                profile_.periphery.bitline_driver.latency_ns, 1, rows);
}

std::span<const std::uint64_t> ArrayState::column_words(int col) const {
    check_col(col, "column_words");
    return {col_ptr(col), static_cast<std::size_t>(words_)};
}

std::string ArrayState::snapshot_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(static_cast<std::size_t>(rows_) * (cols_ / 4 + 2));
    for (int r = 0; r < rows_; ++r) {
        for (int c0 = 0; c0 < cols_; c0 += 4) {
            int d = 0;
            for (int c = c0; c < c0 + 4; ++c) d = (d << 1) | (c < cols_ && get(r, c) ? 1 : 0);
            s.push_back(digits[d]);
        }
        s.push_back('\n');
    }
    return s;
}

std::vector<std::uint8_t> ArrayState::snapshot_binary() const {
    std::vector<std::uint8_t> out;
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    put32(static_cast<std::uint32_t>(rows_));
    put32(static_cast<std::uint32_t>(cols_));
    for (std::uint64_t w : bits_)
        for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(w >> (8 * i)));
    return out;
}

}  // namespace spinsim
