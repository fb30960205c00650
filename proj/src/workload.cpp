#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "spinsim/errors.hpp"
#include "spinsim/kernels.hpp"

namespace spinsim {

std::string Policy::name() const {
    std::string n = kind == PolicyKind::naive ? "naive" : kind == PolicyKind::oracular ? "oracular" : "kmer";
    return optimized ? n + "_opt" : n;
}

Policy Policy::parse(std::string_view s) {
    Policy p;
    if (s.ends_with("_opt")) {
        p.optimized = true;
        s.remove_suffix(4);
    }
    if (s == "naive") p.kind = PolicyKind::naive;
    else if (s == "oracular") p.kind = PolicyKind::oracular;
    else if (s == "kmer") p.kind = PolicyKind::kmer;
    else throw std::invalid_argument("unknown policy '" + std::string(s) + (p.optimized ? "_opt'" : "'"));
    return p;
}

std::string AlignmentResult::records_csv() const {
    std::ostringstream o;
    o << "pattern_id,row,loc,score\n";
    for (const auto& r : records) o << r.pattern_id << ',' << r.row << ',' << r.loc << ',' << r.score << '\n';
    return o.str();
}

Program alignment_program(const RegionLayout& l, int pattern_chars, int char_bits, int loc, OutputMode mode) {
    const int cols = l.total_cols();
    Program p = expand_macro(Macro::align_match_pm(loc, char_bits), l, 1, cols);
    const AlignScratch s = align_scratch(l, pattern_chars, char_bits);
    const int n = score_bits(pattern_chars);
    const ColRange slot{l.score.begin + (mode == OutputMode::store_all ? loc * n : 0), n};
    if (slot.end() > l.score.end()) throw GeometryError("score compartment has no slot for offset " + std::to_string(loc));
    std::vector<int> match(pattern_chars);
    for (int i = 0; i < pattern_chars; ++i) match[i] = s.match_base + i;
    p.push_back(Micro::set_phase(Phase::score));
    emit_sequence(p, reduction_tree(match, s.tree_base, s.tree_limit, slot), false);
    validate_program(p, 1, cols);
    return p;
}

std::uint64_t alignment_logic_steps(int pattern_chars, int char_bits) {
    const std::uint64_t per_char = char_bits == 1 ? 4 : 4 * static_cast<std::uint64_t>(char_bits) - 1;
    return pattern_chars * per_char + 4 * static_cast<std::uint64_t>(reduction_tree_adders(pattern_chars));
}

namespace {

int decode_score(std::span<const std::uint8_t> bits) {
    int v = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) v |= bits[i] << i;
    return v;
}

// One alignment program plus the operand slots that move with the offset.
class OffsetProgram {
public:
    OffsetProgram(Program base, const RegionLayout& l, int char_bits, int score_stride)
        : base_(std::move(base)), work_(base_), char_bits_(char_bits), score_stride_(score_stride) {
        for (std::size_t i = 0; i < base_.size(); ++i) {
            const Micro& m = base_[i];
            if (m.op == Op::phase || m.op == Op::read || m.op == Op::write) continue;
            for (int j = 0; j < m.n_cols; ++j) {
                if (l.fragment.contains(m.cols[j])) frag_.emplace_back(i, j);
                else if (score_stride_ && l.score.contains(m.cols[j])) score_.emplace_back(i, j);
            }
        }
    }

    const Program& at(int loc) {
        for (auto [i, j] : frag_) work_[i].cols[j] = base_[i].cols[j] + loc * char_bits_;
        for (auto [i, j] : score_) work_[i].cols[j] = base_[i].cols[j] + loc * score_stride_;
        return work_;
    }

private:
    Program base_;
    Program work_;
    int char_bits_;
    int score_stride_;
    std::vector<std::pair<std::size_t, int>> frag_;
    std::vector<std::pair<std::size_t, int>> score_;
};

void check_patterns(std::span<const EncodedString> patterns, int width) {
    if (patterns.empty()) throw ContractViolation("no patterns to align");
    for (const auto& p : patterns) {
        if (p.size() != patterns[0].size()) throw ContractViolation("patterns must share one length");
        if (p.width != width) throw ContractViolation("pattern and reference use different encodings");
    }
    if (patterns[0].size() == 0) throw ContractViolation("empty pattern");
}

}  // namespace

AlignmentResult run_alignment(const FoldedReference& ref, std::span<const EncodedString> patterns,
                              const ScheduleAssignment& schedule, const TechnologyProfile& profile,
                              const AlignmentOptions& opt) {
    const int w = ref.reference.width;
    check_patterns(patterns, w);
    const int L = static_cast<int>(patterns[0].size());
    const int F = ref.fragment_len;
    const int R = ref.rows_per_array;
    if (schedule.rows_per_array != R || schedule.arrays < ref.arrays())
        throw GeometryError("schedule geometry does not cover the folded reference");
    {
        std::vector<char> seen(patterns.size(), 0);
        for (const auto& q : schedule.queues)
            for (int p : q) seen.at(p) = 1;
        for (int p : schedule.broadcast) seen.at(p) = 1;
        for (std::size_t p = 0; p < seen.size(); ++p)
            if (!seen[p]) throw ContractViolation("pattern " + std::to_string(p) + " is not scheduled");
    }

    const RegionLayout layout = alignment_layout(F, L, w, opt.mode);
    layout.validate(layout.total_cols(), L);
    const int n = score_bits(L);
    const int locs = F - L + 1;

    Program base = alignment_program(layout, L, w, 0, opt.mode);
    if (opt.optimized) base = coalesce_presets(base, R, profile);
    OffsetProgram prog(std::move(base), layout, w, opt.mode == OutputMode::store_all ? n : 0);
    validate_program(prog.at(locs - 1), R, layout.total_cols());

    const Smc smc(profile);
    AlignmentResult res;
    res.patterns = static_cast<int>(patterns.size());
    std::vector<int> active(R);
    for (int a = 0; a < schedule.arrays; ++a) {
        ArrayState st(R, layout.total_cols(), profile);
        if (a == 0) res.warnings = st.warnings();
        for (int r = 0; r < R; ++r) {
            const int g = a * R + r;
            if (g < ref.fragment_count) st.load_bits(r, layout.fragment.begin, ref.fragment(g).bits(0, ref.fragment_length(g)));
        }
        const int qr = schedule.queue_rounds(a);
        const int rounds = schedule.rounds(a);
        for (int j = 0; j < rounds; ++j) {
            bool any = false;
            for (int r = 0; r < R; ++r) {
                const int g = a * R + r;
                int p = -1;
                if (j < qr) {
                    const auto& q = schedule.queues[g];
                    if (j < static_cast<int>(q.size())) p = q[j];
                } else {
                    p = schedule.broadcast[j - qr];
                }
                // Rows past the end of the reference have nothing to align.
                if (g >= ref.fragment_count || ref.fragment_length(g) < L) p = -1;
                active[r] = p;
                any |= p >= 0;
            }
            if (!any) continue;

            const double t0 = st.ledger().total_latency_ns();
            int written = 0;
            for (int r = 0; r < R; ++r)
                if (active[r] >= 0) {
                    st.write_bits(r, layout.pattern.begin, patterns[active[r]].bits(0, L));
                    ++written;
                }
            if (opt.charge_schedule && j < qr) {
                const double write_ns = st.ledger().total_latency_ns() - t0;
                const double sched_ns = written * opt.schedule_cost.latency_ns_per_pattern;
                st.ledger().add(Stage::schedule_overhead, written * opt.schedule_cost.energy_pj_per_pattern,
                                std::max(0.0, sched_ns - write_ns), static_cast<std::uint64_t>(written), 0);
            }

            for (int loc = 0; loc < locs; ++loc) {
                smc.execute(prog.at(loc), st);
                ++res.alignments;
                if (opt.mode != OutputMode::score_buffer) continue;
                for (int r = 0; r < R; ++r) {
                    const int g = a * R + r;
                    if (active[r] < 0 || loc > ref.fragment_length(g) - L) continue;
                    const auto bits = st.read_bits(r, layout.score.begin, n);
                    res.records.push_back({active[r], a, g, loc, decode_score(bits)});
                }
            }
            if (opt.mode == OutputMode::store_all) {
                for (int r = 0; r < R; ++r) {
                    if (active[r] < 0) continue;
                    const int g = a * R + r;
                    const auto bits = st.read_bits(r, layout.score.begin, locs * n);
                    for (int loc = 0; loc <= ref.fragment_length(g) - L; ++loc)
                        res.records.push_back(
                            {active[r], a, g, loc, decode_score(std::span(bits).subspan(loc * n, n))});
                }
            }
        }
        res.rounds = std::max(res.rounds, rounds);
        res.ledger = a == 0 ? st.ledger() : StageLedger::parallel(res.ledger, st.ledger());
    }
    std::sort(res.records.begin(), res.records.end());
    return res;
}

int match_count(const EncodedString& frag, std::size_t loc, const EncodedString& pattern) {
    int s = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) s += frag.sym[loc + i] == pattern.sym[i];
    return s;
}

std::vector<ScoreRecord> software_scores(const FoldedReference& ref, std::span<const EncodedString> patterns,
                                         const ScheduleAssignment& schedule) {
    std::vector<ScoreRecord> out;
    if (patterns.empty()) return out;
    const int L = static_cast<int>(patterns[0].size());
    for (auto [p, g] : schedule.work_items()) {
        if (g >= ref.fragment_count) continue;
        const int len = ref.fragment_length(g);
        const std::size_t b = ref.fragment_begin(g);
        for (int loc = 0; loc <= len - L; ++loc)
            out.push_back({p, g / ref.rows_per_array, g, loc, match_count(ref.reference, b + loc, patterns[p])});
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<int>> best_rows(const FoldedReference& ref, std::span<const EncodedString> patterns,
                                        bool lowest_only) {
    std::vector<std::vector<int>> out(patterns.size());
    for (std::size_t p = 0; p < patterns.size(); ++p) {
        const int L = static_cast<int>(patterns[p].size());
        int best = -1;
        for (int g = 0; g < ref.fragment_count; ++g) {
            const std::size_t b = ref.fragment_begin(g);
            for (int loc = 0; loc <= ref.fragment_length(g) - L; ++loc) {
                const int s = match_count(ref.reference, b + loc, patterns[p]);
                if (s > best) {
                    best = s;
                    out[p].assign(1, g);
                } else if (s == best && !lowest_only && out[p].back() != g) {
                    out[p].push_back(g);
                }
            }
        }
    }
    return out;
}

std::vector<int> best_scores(std::span<const ScoreRecord> records, int n_patterns) {
    std::vector<int> best(n_patterns, -1);
    for (const auto& r : records) best.at(r.pattern_id) = std::max(best.at(r.pattern_id), r.score);
    return best;
}

DnaRun run_dna(const EncodedString& reference, std::span<const EncodedString> patterns, const DnaSetup& setup,
               const TechnologyProfile& profile) {
    check_patterns(patterns, reference.width);
    const int L = static_cast<int>(patterns[0].size());
    DnaRun run;
    std::tie(run.folded, run.layout) = layout_reference(reference, setup.fragment_len, L, setup.rows_per_array, setup.mode);
    const int arrays = run.folded.arrays();
    if (setup.max_arrays > 0 && arrays > setup.max_arrays)
        throw GeometryError("reference needs " + std::to_string(arrays) + " arrays of " +
                            std::to_string(setup.rows_per_array) + " rows, geometry allows " +
                            std::to_string(setup.max_arrays));
    switch (setup.policy.kind) {
        case PolicyKind::naive:
            run.schedule = schedule_naive(static_cast<int>(patterns.size()), arrays, setup.rows_per_array);
            break;
        case PolicyKind::oracular:
            run.schedule = schedule_oracular(best_rows(run.folded, patterns), arrays, setup.rows_per_array);
            break;
        case PolicyKind::kmer: {
            if (setup.k > L) throw ConfigError("k-mer length exceeds the pattern length");
            const KmerIndex index = setup.kmer_cache_dir.empty() ? KmerIndex(run.folded, setup.k)
                                                                 : KmerIndex::cached(setup.kmer_cache_dir, run.folded, setup.k);
            run.schedule = kmer_schedule(patterns, index, run.folded, setup.seed_positions);
            break;
        }
    }
    AlignmentOptions opt;
    opt.mode = setup.mode;
    opt.optimized = setup.policy.optimized;
    opt.charge_schedule = setup.policy.kind != PolicyKind::naive;
    opt.schedule_cost = setup.schedule_cost;
    run.result = run_alignment(run.folded, patterns, run.schedule, profile, opt);
    return run;
}

}  // namespace spinsim
