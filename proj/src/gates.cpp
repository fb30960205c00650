#include "spinsim/gates.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {
constexpr std::string_view kNames[kGateKinds] = {"inv", "copy", "nor", "or", "nand", "and", "maj3", "maj5", "th"};
constexpr int kArity[kGateKinds] = {1, 1, 2, 2, 2, 2, 3, 5, 4};
constexpr bool kPreset[kGateKinds] = {false, true, false, true, false, true, true, true, false};
}  // namespace

std::string_view gate_name(GateKind k) { return kNames[static_cast<int>(k)]; }
int gate_arity(GateKind k) { return kArity[static_cast<int>(k)]; }
bool gate_preset(GateKind k) { return kPreset[static_cast<int>(k)]; }

GateKind gate_kind(std::string_view name) {
    for (int i = 0; i < kGateKinds; ++i)
        if (kNames[i] == name) return static_cast<GateKind>(i);
    throw std::out_of_range("unknown gate '" + std::string(name) + "'");
}

void GateSequence::append(const GateSequence& o) {
    steps.insert(steps.end(), o.steps.begin(), o.steps.end());
    constants.insert(constants.end(), o.constants.begin(), o.constants.end());
    scratch.insert(scratch.end(), o.scratch.begin(), o.scratch.end());
    adders += o.adders;
}

GateStep make_step(GateKind g, std::initializer_list<int> inputs, int out, int out2) {
    if (static_cast<int>(inputs.size()) != gate_arity(g))
        throw std::invalid_argument("gate " + std::string(gate_name(g)) + " takes " + std::to_string(gate_arity(g)) +
                                    " inputs");
    GateStep s{g, static_cast<std::uint8_t>(inputs.size()), {}, out, out2};
    std::copy(inputs.begin(), inputs.end(), s.in.begin());
    return s;
}

namespace {
void require_distinct(std::initializer_list<int> cols, const char* what) {
    std::vector<int> v(cols);
    std::sort(v.begin(), v.end());
    if (std::adjacent_find(v.begin(), v.end()) != v.end())
        throw ContractViolation(std::string(what) + ": column collision");
}
}  // namespace

GateSequence xor_sequence(int in0, int in1, int s1, int s2, int out, bool fused) {
    require_distinct({in0, in1, s1, s2, out}, "xor_sequence");
    GateSequence q;
    if (fused) {
        q.steps.push_back(make_step(GateKind::nor, {in0, in1}, s1, s2));
    } else {
        q.steps.push_back(make_step(GateKind::nor, {in0, in1}, s1));
        q.steps.push_back(make_step(GateKind::copy, {s1}, s2));
    }
    q.steps.push_back(make_step(GateKind::th, {in0, in1, s1, s2}, out));
    q.scratch = {s1, s2, out};
    return q;
}

GateSequence full_adder_sequence(int in0, int in1, int cin, int s1, int s2, int sum, int cout) {
    require_distinct({in0, in1, cin, s1, s2, sum, cout}, "full_adder_sequence");
    GateSequence q;
    q.steps.push_back(make_step(GateKind::maj3, {in0, in1, cin}, cout));
    q.steps.push_back(make_step(GateKind::inv, {cout}, s1));
    q.steps.push_back(make_step(GateKind::copy, {s1}, s2));
    q.steps.push_back(make_step(GateKind::maj5, {in0, in1, cin, s1, s2}, sum));
    q.scratch = {s1, s2, sum, cout};
    q.adders = 1;
    return q;
}

namespace {

// A partial count: its bits (LSB first) and the largest value it can hold.
struct Operand {
    std::vector<int> bits;
    int max_value = 0;
};

int slots_after(int items) {
    int s = 0;
    while (items > 1) {
        s += items / 2;
        items = items / 2 + items % 2;
    }
    return s;
}

// Level-synchronous pairing. An odd operand left over at a level is either
// carried to the next level unchanged or, when enough adders remain whose
// LSB carry-in would otherwise be a constant 0, dissolved into them: its bit
// of weight 2^j is fed to 2^j of those carry-ins.
class TreeBuilder {
public:
    TreeBuilder(int scratch_base, int scratch_limit, ColRange score, bool count_only)
        : next_(scratch_base), base_(scratch_base), limit_(scratch_limit), score_(score), count_only_(count_only) {}

    GateSequence build(std::span<const int> match_cols) {
        const int n = static_cast<int>(match_cols.size());
        if (n == 0) {
            for (int i = 0; i < score_.width; ++i) seq_.constants.emplace_back(score_.begin + i, false);
            return std::move(seq_);
        }
        if (n == 1) {
            seq_.steps.push_back(make_step(GateKind::copy, {match_cols[0]}, score_.begin));
            for (int i = 1; i < score_.width; ++i) seq_.constants.emplace_back(score_.begin + i, false);
            return std::move(seq_);
        }
        total_ = n;
        zero_ = take();
        seq_.constants.emplace_back(zero_, false);

        std::vector<Operand> items;
        for (int c : match_cols) items.push_back({{c}, 1});
        while (items.size() > 1) {
            std::vector<Operand> next;
            const bool last_level = items.size() == 2;
            for (std::size_t i = 0; i + 1 < items.size(); i += 2)
                next.push_back(add(items[i], items[i + 1], last_level));
            if (items.size() % 2 == 1) {
                Operand& odd = items.back();
                const int need = (1 << odd.bits.size()) - 1;
                if (slots_after(static_cast<int>(next.size())) - static_cast<int>(pending_.size()) >= need) {
                    for (int j = static_cast<int>(odd.bits.size()) - 1; j >= 0; --j)
                        for (int r = 0; r < (1 << j); ++r) pending_.push_back(odd.bits[j]);
                } else {
                    next.push_back(std::move(odd));
                }
            }
            items = std::move(next);
        }
        if (!pending_.empty()) throw std::logic_error("reduction tree left carry-ins unplaced");
        return std::move(seq_);
    }

private:
    int take() {
        if (next_ - base_ >= limit_)
            throw GeometryError("reduction tree needs more than " + std::to_string(limit_) + " scratch columns");
        const int c = next_++;
        if (!count_only_) seq_.scratch.push_back(c);
        return c;
    }

    Operand add(const Operand& a, const Operand& b, bool last_level) {
        int cin = zero_;
        int cin_max = 0;
        if (!pending_.empty()) {
            cin = pending_.front();
            pending_.erase(pending_.begin());
            cin_max = 1;
        }
        const int width = static_cast<int>(std::max(a.bits.size(), b.bits.size()));
        Operand r;
        // No partial count can exceed the number of match bits, which also
        // bounds the over-estimate from dissolved operands.
        r.max_value = std::min(a.max_value + b.max_value + cin_max, total_);
        const int rwidth = std::bit_width(static_cast<unsigned>(r.max_value));
        if (last_level && rwidth > score_.width) throw GeometryError("score compartment too narrow for the count");

        int carry = cin;
        for (int i = 0; i < width; ++i) {
            const int ai = i < static_cast<int>(a.bits.size()) ? a.bits[i] : zero_;
            const int bi = i < static_cast<int>(b.bits.size()) ? b.bits[i] : zero_;
            const int s1 = take();
            const int s2 = take();
            const int sum = last_level ? score_.begin + i : take();
            const int cout = (last_level && i + 1 < score_.width && i + 1 == width) ? score_.begin + i + 1 : take();
            if (!count_only_) {
                auto fa = full_adder_sequence(ai, bi, carry, s1, s2, sum, cout);
                seq_.steps.insert(seq_.steps.end(), fa.steps.begin(), fa.steps.end());
            }
            ++seq_.adders;
            r.bits.push_back(sum);
            carry = cout;
        }
        if (rwidth > width) r.bits.push_back(carry);
        if (last_level) {
            // Score bits the adder chain never produces hold 0. A carry-out
            // routed into the score that provably stays 0 still needs its
            // preset, which the step itself gives.
            for (int i = width + 1; i < score_.width; ++i) seq_.constants.emplace_back(score_.begin + i, false);
        }
        return r;
    }

    GateSequence seq_;
    std::vector<int> pending_;
    int zero_ = -1;
    int total_ = 0;
    int next_;
    int base_;
    int limit_;
    ColRange score_;
    bool count_only_;
};

}  // namespace

GateSequence reduction_tree(std::span<const int> match_cols, int scratch_base, int scratch_limit, ColRange score) {
    if (score.width < score_bits(static_cast<int>(match_cols.size())))
        throw GeometryError("score compartment narrower than the count needs");
    return TreeBuilder(scratch_base, scratch_limit, score, false).build(match_cols);
}

int reduction_tree_adders(int n_bits) {
    if (n_bits < 2) return 0;
    std::vector<int> cols(n_bits);
    return TreeBuilder(0, 1 << 30, ColRange{0, score_bits(n_bits)}, true).build(cols).adders;
}

int reduction_tree_scratch(int n_bits) {
    if (n_bits < 2) return 0;
    std::vector<int> cols(n_bits);
    for (int i = 0; i < n_bits; ++i) cols[i] = i;
    const int sb = score_bits(n_bits);
    const auto q = TreeBuilder(n_bits + sb, 1 << 30, ColRange{n_bits, sb}, false).build(cols);
    return static_cast<int>(q.scratch.size());
}

GateSequence char_match_sequence(std::span<const int> a_bits, std::span<const int> b_bits, int scratch_base,
                                 int match_col) {
    if (a_bits.size() != b_bits.size() || a_bits.empty())
        throw std::invalid_argument("char_match_sequence: operand widths differ or are empty");
    const int w = static_cast<int>(a_bits.size());
    GateSequence q;
    int next = scratch_base;
    std::vector<int> diff;
    for (int i = 0; i < w; ++i) {
        const int s1 = next++, s2 = next++, x = next++;
        q.append(xor_sequence(a_bits[i], b_bits[i], s1, s2, x));
        diff.push_back(x);
    }
    while (diff.size() > 2) {
        std::vector<int> reduced;
        for (std::size_t i = 0; i + 1 < diff.size(); i += 2) {
            const int o = next++;
            q.steps.push_back(make_step(GateKind::or_, {diff[i], diff[i + 1]}, o));
            q.scratch.push_back(o);
            reduced.push_back(o);
        }
        if (diff.size() % 2) reduced.push_back(diff.back());
        diff = std::move(reduced);
    }
    if (diff.size() == 2) q.steps.push_back(make_step(GateKind::nor, {diff[0], diff[1]}, match_col));
    else q.steps.push_back(make_step(GateKind::inv, {diff[0]}, match_col));
    q.scratch.push_back(match_col);
    return q;
}

int char_match_scratch(int width) { return 3 * width + std::max(0, width - 2); }

void run_sequence(ArrayState& a, const GateSequence& seq, bool gang_presets) {
    std::array<GateSpec, kGateKinds> specs;
    for (int i = 0; i < kGateKinds; ++i)
        specs[i] = make_gate_spec(std::string(gate_name(static_cast<GateKind>(i))), a.profile());
    auto preset = [&](int col, bool v) {
        if (gang_presets) a.preset_gang(col, v);
        else {
            const int c[1] = {col};
            a.preset_rowwise(c, v);
        }
    };
    for (const auto& [col, v] : seq.constants) preset(col, v);
    for (const GateStep& s : seq.steps) {
        preset(s.out, s.preset());
        if (s.out2 >= 0) preset(s.out2, s.preset());
        a.logic_step(specs[static_cast<int>(s.gate)], s.inputs(), s.out, s.out2);
    }
}

}  // namespace spinsim
