#include <gtest/gtest.h>

#include <bit>
#include <random>

#include "spinsim/errors.hpp"
#include "spinsim/kernels.hpp"
#include "support.hpp"

using namespace spinsim;
using spinsim::test::near_term;

namespace {

AlignmentResult align(const FoldedReference& f, const std::vector<EncodedString>& pats, OutputMode mode = OutputMode::score_buffer,
                      bool optimized = false) {
    AlignmentOptions o;
    o.mode = mode;
    o.optimized = optimized;
    return run_alignment(f, pats, schedule_naive(static_cast<int>(pats.size()), f.arrays(), f.rows_per_array), near_term(), o);
}

std::string vocabulary_corpus(int words, std::uint64_t seed) {
    static const char* vocab[] = {"the", "a", "then", "them", "cat", "catalog", "at", "dog", "do", "tea", "teapot", "pot"};
    std::mt19937_64 rng(seed);
    std::string s;
    for (int i = 0; i < words; ++i) {
        if (i) s += (rng() % 9 == 0) ? "\n" : " ";
        s += vocab[rng() % std::size(vocab)];
    }
    return s;
}

}  // namespace

TEST(Encoding, RoundTrip) {
    const std::string s = "ACGTTGCAAC";
    EXPECT_EQ(decode_dna(encode_dna(s)), s);
    EXPECT_EQ(encode_dna("acgt"), encode_dna("ACGT"));
    EXPECT_THROW(encode_dna("ACGN"), std::invalid_argument);
    EXPECT_EQ(encode_dna("ACGT").bits(0, 4), (std::vector<std::uint8_t>{0, 0, 0, 1, 1, 0, 1, 1}));
    const std::string b = std::string("bytes\0\xff", 7);
    EXPECT_EQ(decode_bytes(encode_bytes(b)), b);
    EXPECT_EQ(encode_bytes("A").bits(0, 1), (std::vector<std::uint8_t>{0, 1, 0, 0, 0, 0, 0, 1}));
}

TEST(Encoding, Sequences) {
    const auto fa = parse_sequences(">r1 first\nACGT\nAC\n\n>r2\r\nTT\n");
    ASSERT_EQ(fa.size(), 2u);
    EXPECT_EQ(fa[0].name, "r1 first");
    EXPECT_EQ(fa[0].seq, "ACGTAC");
    EXPECT_EQ(fa[1].seq, "TT");
    const auto plain = parse_sequences("ACGT\n\n  GGA \n");
    ASSERT_EQ(plain.size(), 2u);
    EXPECT_EQ(plain[1].seq, "GGA");
    EXPECT_THROW(read_sequences("/nonexistent/x.fa"), std::runtime_error);
}

TEST(CharMatch, BaseComparison) {
    // One-character alignment: A against A, A against T.
    for (const auto& [frag, want] : {std::pair{"A", 1}, std::pair{"T", 0}, std::pair{"C", 0}, std::pair{"G", 0}}) {
        const auto [f, l] = layout_reference(encode_dna(frag), 1, 1, 1);
        const std::vector<EncodedString> pats{encode_dna("A")};
        const auto r = align(f, pats);
        ASSERT_EQ(r.records.size(), 1u);
        EXPECT_EQ(r.records[0].score, want) << frag;
    }
}

TEST(Fold, RowsAndReconstruction) {
    const auto w = generate_workload(10 * 50, 0, 1, 0.0, 1);
    const auto f = fold_reference(w.reference, 50, 0, 4);
    EXPECT_EQ(f.fragment_count, 10);
    EXPECT_EQ(f.arrays(), 3);
    EXPECT_EQ(f.reconstruct(), w.reference);
    // Shorter fragments need more rows.
    EXPECT_GT(fold_reference(w.reference, 25, 0, 4).fragment_count, f.fragment_count);
    for (int frag : {7, 13, 100, 499, 500, 600})
        for (int ov : {0, 1, 6})
            if (ov < frag) EXPECT_EQ(fold_reference(w.reference, frag, ov, 3).reconstruct(), w.reference) << frag << "/" << ov;
    EXPECT_THROW(layout_reference(w.reference, 40, 50, 4), GeometryError);
}

TEST(Align, ExactSubstringAtOffsetSeven) {
    const auto w = generate_workload(300, 0, 1, 0.0, 2);
    const auto [f, l] = layout_reference(w.reference, 60, 20, 4);
    const std::vector<EncodedString> pats{w.reference.substr(7, 20)};
    const auto r = align(f, pats);
    const auto hit = std::find_if(r.records.begin(), r.records.end(), [](const ScoreRecord& x) { return x.score == 20; });
    ASSERT_NE(hit, r.records.end());
    EXPECT_EQ(hit->row, 0);
    EXPECT_EQ(hit->loc, 7);
}

TEST(Align, SeamPatternFoundWithFullScore) {
    const auto w = generate_workload(2000, 0, 1, 0.0, 3);
    const auto [f, l] = layout_reference(w.reference, 100, 30, 8);
    // Straddles the boundary between fragment 2 and 3 of a plain cut.
    const std::size_t pos = 3 * 100 - 10;
    const std::vector<EncodedString> pats{w.reference.substr(pos, 30)};
    const auto r = align(f, pats);
    EXPECT_EQ(best_scores(r.records, 1)[0], 30);
    const auto hit = std::find_if(r.records.begin(), r.records.end(), [](const ScoreRecord& x) { return x.score == 30; });
    EXPECT_EQ(f.fragment_begin(hit->row) + hit->loc, pos);
    EXPECT_EQ(hit->row, f.owner(pos));
}

TEST(Align, HundredRandomPairsMatchOracle) {
    std::mt19937_64 rng(100);
    for (int i = 0; i < 100; ++i) {
        const int L = 1 + static_cast<int>(rng() % 12);
        const int F = L + static_cast<int>(rng() % 20);
        auto w = generate_workload(F, 1, L, 0.5, rng());
        // Unrelated pattern half of the time.
        if (i % 2) w.patterns[0] = generate_workload(L, 0, 1, 0.0, rng()).reference;
        const auto [f, l] = layout_reference(w.reference, F, L, 1);
        const auto r = align(f, w.patterns);
        ASSERT_EQ(r.records.size(), static_cast<std::size_t>(F - L + 1));
        for (const auto& rec : r.records) ASSERT_EQ(rec.score, match_count(w.reference, rec.loc, w.patterns[0])) << i;
    }
}

TEST(Align, OutputModesAgree) {
    const auto w = generate_workload(700, 3, 16, 0.1, 5);
    const auto [f, l] = layout_reference(w.reference, 64, 16, 8);
    const auto a = align(f, w.patterns, OutputMode::score_buffer);
    const auto b = align(f, w.patterns, OutputMode::store_all);
    EXPECT_EQ(a.records, b.records);
    EXPECT_NE(a.ledger, b.ledger);
    EXPECT_LT(b.ledger[Stage::score_readout].ops, a.ledger[Stage::score_readout].ops);
    EXPECT_EQ(a.ledger[Stage::match_ops], b.ledger[Stage::match_ops]);
    EXPECT_EQ(a.records, software_scores(f, w.patterns, schedule_naive(3, f.arrays(), 8)));
}

TEST(Align, StepCountLaw) {
    const auto w = generate_workload(500, 2, 12, 0.0, 6);
    const auto [f, l] = layout_reference(w.reference, 40, 12, 64);
    ASSERT_EQ(f.arrays(), 1);
    const auto r = align(f, w.patterns);
    const std::uint64_t locs = 40 - 12 + 1;
    const std::uint64_t steps = r.ledger[Stage::match_ops].ops + r.ledger[Stage::add_ops].ops;
    EXPECT_EQ(steps, r.rounds * locs * alignment_logic_steps(12, 2));
    EXPECT_EQ(r.ledger[Stage::match_ops].ops, r.rounds * locs * 12 * 7);
    EXPECT_EQ(r.ledger[Stage::add_ops].ops, r.rounds * locs * 4 * reduction_tree_adders(12));
    EXPECT_EQ(alignment_logic_steps(100, 2), 100u * 7 + 188u * 4);
    // One preset per logic step plus the constant columns of the tree.
    const auto prog = alignment_program(l, 12, 2, 0, OutputMode::score_buffer);
    const auto presets = std::count_if(prog.begin(), prog.end(), [](const Micro& m) { return m.op == Op::preset_row; });
    EXPECT_EQ(r.ledger[Stage::preset_match].cells + r.ledger[Stage::preset_score].cells,
              r.rounds * locs * static_cast<std::uint64_t>(presets) * 64);
    EXPECT_EQ(r.ledger[Stage::bitline].ops, steps);
}

TEST(Align, OptimizedMatchesUnoptimized) {
    const auto w = generate_workload(1500, 4, 20, 0.05, 8);
    const auto [f, l] = layout_reference(w.reference, 80, 20, 8);
    const auto a = align(f, w.patterns, OutputMode::score_buffer, false);
    const auto b = align(f, w.patterns, OutputMode::score_buffer, true);
    EXPECT_EQ(a.records, b.records);
    EXPECT_NEAR(a.ledger.total_energy_pj(), b.ledger.total_energy_pj(), 1e-9 * a.ledger.total_energy_pj());
    EXPECT_LT(b.ledger.total_latency_ns(), a.ledger.total_latency_ns());
}

TEST(Align, Errors) {
    const auto w = generate_workload(300, 2, 10, 0.0, 9);
    const auto [f, l] = layout_reference(w.reference, 50, 10, 4);
    const std::vector<std::vector<int>> only_first{{0}};
    const auto partial = schedule_oracular(only_first, f.arrays(), 4);
    EXPECT_THROW(run_alignment(f, w.patterns, partial, near_term(), {}), ContractViolation);
    std::vector<EncodedString> uneven{w.patterns[0], w.patterns[1].substr(0, 5)};
    EXPECT_THROW(align(f, uneven), ContractViolation);
    const auto wrong_geometry = schedule_naive(2, 1, 2);
    EXPECT_THROW(run_alignment(f, w.patterns, wrong_geometry, near_term(), {}), GeometryError);
}

TEST(Align, PoliciesAgreeOnBestScores) {
    const auto w = generate_workload(6000, 10, 40, 0.05, 10);
    DnaSetup s;
    s.fragment_len = 200;
    s.rows_per_array = 16;
    s.k = 10;
    s.seed_positions = {0, 15, 30};
    std::vector<int> best;
    for (const char* pol : {"naive", "naive_opt", "oracular", "oracular_opt", "kmer_opt"}) {
        s.policy = Policy::parse(pol);
        const auto run = run_dna(w.reference, w.patterns, s, near_term());
        EXPECT_EQ(run.result.records, software_scores(run.folded, w.patterns, run.schedule)) << pol;
        const auto b = best_scores(run.result.records, 10);
        if (best.empty()) best = b;
        EXPECT_EQ(b, best) << pol;
    }
}

TEST(Align, ArraysMergeInParallel) {
    const auto w = generate_workload(1200, 2, 10, 0.0, 11);
    const auto [f, l] = layout_reference(w.reference, 60, 10, 4);
    ASSERT_GT(f.arrays(), 1);
    const auto r = align(f, w.patterns);
    EXPECT_EQ(r.records, software_scores(f, w.patterns, schedule_naive(2, f.arrays(), 4)));
    // Same number of rounds everywhere, so latency equals one array's.
    const auto [f1, l1] = layout_reference(w.reference.substr(0, 200), 60, 10, 4);
    const auto one = align(f1, w.patterns);
    EXPECT_DOUBLE_EQ(r.ledger[Stage::match_ops].latency_ns, one.ledger[Stage::match_ops].latency_ns);
    EXPECT_GT(r.ledger[Stage::match_ops].energy_pj, one.ledger[Stage::match_ops].energy_pj);
}

TEST(Align, Deterministic) {
    const auto w1 = generate_workload(900, 3, 15, 0.1, 12);
    const auto w2 = generate_workload(900, 3, 15, 0.1, 12);
    EXPECT_EQ(w1.reference, w2.reference);
    const auto [f, l] = layout_reference(w1.reference, 60, 15, 8);
    const auto a = align(f, w1.patterns);
    const auto b = align(f, w2.patterns);
    EXPECT_EQ(a.records_csv(), b.records_csv());
    EXPECT_EQ(a.ledger.to_json(), b.ledger.to_json());
}

TEST(Workload, MutationRate) {
    const auto w = generate_workload(20000, 50, 100, 0.1, 13);
    int diff = 0;
    for (std::size_t i = 0; i < w.patterns.size(); ++i)
        diff += 100 - match_count(w.reference, w.origins[i], w.patterns[i]);
    EXPECT_NEAR(diff / 5000.0, 0.1, 0.02);
    const auto clean = generate_workload(20000, 10, 100, 0.0, 13);
    for (std::size_t i = 0; i < clean.patterns.size(); ++i)
        EXPECT_EQ(match_count(clean.reference, clean.origins[i], clean.patterns[i]), 100);
}

TEST(Bench, Bitcount) {
    std::mt19937 rng(14);
    std::vector<std::uint32_t> v{0xFFFFFFFFu, 0u, 1u, 0x80000000u};
    for (int i = 0; i < 600; ++i) v.push_back(rng());
    const auto r = kernel_bitcount(v, near_term(), {128, 0});
    ASSERT_EQ(r.counts.size(), v.size());
    EXPECT_EQ(r.counts[0], 32);
    EXPECT_EQ(r.counts[1], 0);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(r.counts[i], std::popcount(v[i]));
    EXPECT_GT(r.ledger[Stage::add_ops].ops, 0u);
}

TEST(Bench, Rc4Involution) {
    const std::string text = "Attack at dawn, and bring the spare keys to the second gate.";
    const std::vector<std::uint8_t> t(text.begin(), text.end()), key{'K', 'e', 'y'};
    const auto c = kernel_rc4(t, key, near_term(), {4, 0}, 5);
    EXPECT_NE(c.output, t);
    EXPECT_EQ(kernel_rc4(c.output, key, near_term(), {4, 0}, 5).output, t);
    // Known RC4 vector: key "Key", plaintext "Plaintext".
    const std::string pt = "Plaintext";
    const auto k2 = kernel_rc4(std::vector<std::uint8_t>(pt.begin(), pt.end()), key, near_term());
    const std::vector<std::uint8_t> want{0xBB, 0xF3, 0x16, 0xE8, 0xD9, 0x40, 0xAF, 0x0A, 0xD3};
    EXPECT_EQ(k2.output, want);
}

TEST(Bench, StringMatchAgainstScan) {
    const std::string corpus = vocabulary_corpus(10000, 15);
    for (const std::string q : {"cat", "teapot", "the", "at d"}) {
        const auto r = kernel_stringmatch(corpus, q, near_term(), {512, 0}, 64);
        std::vector<std::size_t> want;
        for (auto p = corpus.find(q); p != std::string::npos; p = corpus.find(q, p + 1)) want.push_back(p);
        EXPECT_EQ(r.positions, want) << q;
    }
}

TEST(Bench, WordCountAgainstScan) {
    const std::string corpus = vocabulary_corpus(10000, 16);
    const std::vector<std::string> words{"the", "then", "cat", "catalog", "a", "zebra"};
    const auto r = kernel_wordcount(corpus, words, near_term(), {1024, 0});
    const auto all = split_words(corpus);
    ASSERT_EQ(all.size(), 10000u);
    for (std::size_t i = 0; i < words.size(); ++i)
        EXPECT_EQ(r.counts[i], static_cast<std::uint64_t>(std::count(all.begin(), all.end(), words[i]))) << words[i];
    EXPECT_EQ(r.counts[5], 0u);
}

TEST(Bench, GeometryOverflow) {
    std::vector<std::uint32_t> v(10, 1);
    EXPECT_THROW(kernel_bitcount(v, near_term(), {0, 0}), GeometryError);
    EXPECT_THROW(kernel_stringmatch(vocabulary_corpus(2000, 1), "cat", near_term(), {4, 1}, 64), GeometryError);
}
