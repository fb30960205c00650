#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <set>

#include "spinsim/kernels.hpp"
#include "spinsim/scheduler.hpp"
#include "support.hpp"

using namespace spinsim;
using spinsim::test::near_term;
using spinsim::test::random_bits;

namespace {

int preset_micros(const Program& p) {
    return static_cast<int>(std::count_if(p.begin(), p.end(), [](const Micro& m) {
        return m.op == Op::preset_gang || m.op == Op::preset_row;
    }));
}

double preset_latency(const StageLedger& l) {
    return l[Stage::preset_match].latency_ns + l[Stage::preset_score].latency_ns;
}

}  // namespace

TEST(Coalesce, AlignmentProgramEquivalentOnRandomStates) {
    const auto l = alignment_layout(30, 10, 2, OutputMode::score_buffer);
    const Program base = alignment_program(l, 10, 2, 4, OutputMode::score_buffer);
    const int rows = 64;
    const Program opt = coalesce_presets(base, rows, near_term());
    EXPECT_EQ(preset_micros(base), preset_micros(opt));
    EXPECT_TRUE(std::none_of(opt.begin(), opt.end(), [](const Micro& m) { return m.op == Op::preset_row; }));

    std::mt19937_64 rng(50);
    for (int trial = 0; trial < 50; ++trial) {
        ArrayState a(rows, l.total_cols(), near_term());
        for (int r = 0; r < rows; ++r) a.load_bits(r, 0, random_bits(rng, l.scratch.begin));
        ArrayState b = a;
        smc_run(base, a, near_term(), false);
        smc_run(opt, b, near_term(), false);
        ASSERT_TRUE(a.same_cells(b)) << "trial " << trial;
        for (Stage s : {Stage::preset_match, Stage::preset_score}) {
            EXPECT_EQ(a.ledger()[s].cells, b.ledger()[s].cells);
            EXPECT_DOUBLE_EQ(a.ledger()[s].energy_pj, b.ledger()[s].energy_pj);
        }
        EXPECT_LT(preset_latency(b.ledger()), preset_latency(a.ledger()));
        EXPECT_LE(b.ledger().total_latency_ns(), a.ledger().total_latency_ns());
    }
}

TEST(Coalesce, PresetsHoistToTheStartOfTheirPhase) {
    const auto l = alignment_layout(12, 4, 2, OutputMode::score_buffer);
    const Program opt = coalesce_presets(alignment_program(l, 4, 2, 0, OutputMode::score_buffer), 64, near_term());
    // Scratch columns are never reused, so every preset lands right behind a
    // phase directive.
    bool after_phase = false;
    int runs = 0;
    for (const Micro& m : opt) {
        if (m.op == Op::phase) {
            after_phase = true;
            ++runs;
        } else if (m.op == Op::preset_gang) {
            EXPECT_TRUE(after_phase);
        } else {
            after_phase = false;
        }
    }
    EXPECT_EQ(runs, 2);
}

TEST(Coalesce, ReusedColumnStopsTheHoist) {
    const auto& p = near_term();
    const int a[2] = {0, 1};
    const int b[2] = {0, 2};
    Program prog{Micro::row_preset(3, false), Micro::logic(GateKind::nor, 3, a), Micro::row_preset(3, false),
                 Micro::logic(GateKind::nor, 3, b)};
    const Program opt = coalesce_presets(prog, 64, p);
    ASSERT_EQ(opt.size(), 4u);
    EXPECT_EQ(opt[0].op, Op::preset_gang);
    EXPECT_EQ(opt[2].op, Op::preset_gang);
    EXPECT_EQ(opt[3].op, Op::nor);
}

TEST(Coalesce, SlowGangStaysRowSerial) {
    const Program prog{Micro::row_preset(3, true), Micro::logic(GateKind::copy, 3, std::vector<int>{0})};
    // With one row a row-serial preset beats a full logic-step preset.
    EXPECT_EQ(coalesce_presets(prog, 1, near_term()), prog);
}

TEST(Coalesce, NoPresetsUnchanged) {
    const Program prog = assemble("write r0, c0, #101\nread r0, c0, n3\n.phase score\nread r1, c1, n2");
    EXPECT_EQ(coalesce_presets(prog, 8, near_term()), prog);
    EXPECT_TRUE(coalesce_presets({}, 8, near_term()).empty());
}

TEST(Schedule, NaiveBroadcast) {
    const auto s = schedule_naive(1, 1, 4);
    EXPECT_EQ(s.rounds(), 1);
    const auto items = s.work_items();
    ASSERT_EQ(items.size(), 4u);
    for (int r = 0; r < 4; ++r) EXPECT_EQ(items[r], std::make_pair(0, r));
    EXPECT_EQ(schedule_naive(13, 3, 512).rounds(), 13);
    EXPECT_EQ(schedule_naive(13, 1, 2).rounds(), 13);
    EXPECT_THROW(schedule_naive(0, 1, 4), std::invalid_argument);
}

TEST(Schedule, NaiveCoversEveryPairOnce) {
    const auto s = schedule_naive(5, 2, 3);
    const auto items = s.work_items();
    const std::set<std::pair<int, int>> uniq(items.begin(), items.end());
    EXPECT_EQ(uniq.size(), items.size());
    EXPECT_EQ(items.size(), 5u * 6u);
}

TEST(Schedule, OracularFollowsOracle) {
    const std::vector<std::vector<int>> oracle{{3}, {3}, {0, 5}, {1}};
    const auto s = schedule_oracular(oracle, 2, 4);
    EXPECT_EQ(s.queues[3], (std::vector<int>{0, 1}));
    EXPECT_EQ(s.queues[0], (std::vector<int>{2}));
    EXPECT_EQ(s.queues[5], (std::vector<int>{2}));
    EXPECT_EQ(s.rounds(0), 2);
    EXPECT_EQ(s.rounds(1), 1);
    EXPECT_TRUE(s.broadcast.empty());
    const std::vector<std::vector<int>> miss{{1}, {}};
    EXPECT_THROW(schedule_oracular(miss, 1, 4), std::invalid_argument);

    // Naive work is a superset.
    const auto naive = schedule_naive(4, 2, 4).work_items();
    const std::set<std::pair<int, int>> all(naive.begin(), naive.end());
    for (const auto& w : s.work_items()) EXPECT_TRUE(all.count(w));
}

TEST(Schedule, JsonExport) {
    const std::vector<std::vector<int>> oracle{{2}};
    const auto j = schedule_oracular(oracle, 1, 4).to_json();
    EXPECT_NE(j.find("\"rounds\": 1"), std::string::npos);
    EXPECT_NE(j.find("\"row\": 2"), std::string::npos);
}

TEST(Oracle, ExactSubstringNominatesItsRow) {
    const auto w = generate_workload(2000, 0, 10, 0.0, 9);
    const auto [f, l] = layout_reference(w.reference, 100, 10, 8);
    for (std::size_t pos : {0u, 57u, 91u, 500u, 1990u}) {
        const std::vector<EncodedString> pat{w.reference.substr(pos, 10)};
        const auto rows = best_rows(f, pat, false)[0];
        EXPECT_NE(std::find(rows.begin(), rows.end(), f.owner(pos)), rows.end()) << pos;
    }
}

TEST(Kmer, EveryPositionIndexedOnce) {
    const auto w = generate_workload(3000, 0, 1, 0.0, 4);
    const auto [f, l] = layout_reference(w.reference, 200, 50, 16);
    const KmerIndex idx(f, 8);
    EXPECT_EQ(idx.positions(), 3000u - 8 + 1);
    std::vector<int> seen(3000, 0);
    for (std::size_t p = 0; p + 8 <= 3000; ++p)
        for (const auto& h : idx.lookup(w.reference, p)) {
            const std::size_t at = f.fragment_begin(h.row) + h.offset;
            ASSERT_EQ(w.reference.substr(at, 8), w.reference.substr(p, 8));
            if (at == p) ++seen[p];
        }
    for (std::size_t p = 0; p + 8 <= 3000; ++p) EXPECT_EQ(seen[p], 1) << p;
}

TEST(Kmer, FullLengthKeyFindsTheTrueRows) {
    const auto w = generate_workload(5000, 20, 24, 0.0, 12);
    const auto [f, l] = layout_reference(w.reference, 120, 24, 16);
    const KmerIndex idx(f, 24);
    const std::vector<int> seeds{0};
    const auto s = kmer_schedule(w.patterns, idx, f, seeds);
    const auto truth = best_rows(f, w.patterns, false);
    for (std::size_t p = 0; p < w.patterns.size(); ++p) {
        std::vector<int> got;
        for (int r = 0; r < static_cast<int>(s.queues.size()); ++r)
            if (std::count(s.queues[r].begin(), s.queues[r].end(), static_cast<int>(p))) got.push_back(r);
        EXPECT_EQ(got, truth[p]) << p;
    }
    EXPECT_TRUE(s.broadcast.empty());
}

TEST(Kmer, RecallOnLargeReference) {
    // 1024 rows of 1000 characters; mutation-free patterns.
    const auto w = generate_workload(1024 * 901 + 99, 30, 100, 0.0, 77);
    const auto [f, l] = layout_reference(w.reference, 1000, 100, 256);
    ASSERT_EQ(f.fragment_count, 1024);
    const KmerIndex idx(f, 12);
    const std::vector<int> seeds{0};
    const auto s = kmer_schedule(w.patterns, idx, f, seeds);
    for (std::size_t p = 0; p < w.patterns.size(); ++p) {
        const int truth = f.owner(w.origins[p]);
        EXPECT_TRUE(std::count(s.queues[truth].begin(), s.queues[truth].end(), static_cast<int>(p))) << p;
    }
}

TEST(Kmer, NoHitFallsBackToBroadcast) {
    EncodedString ref = encode_dna(std::string(400, 'A'));
    const auto [f, l] = layout_reference(ref, 100, 20, 4);
    const KmerIndex idx(f, 6);
    const std::vector<EncodedString> pats{encode_dna(std::string(20, 'C')), encode_dna(std::string(20, 'A'))};
    const std::vector<int> seeds{0, 7};
    const auto s = kmer_schedule(pats, idx, f, seeds);
    EXPECT_EQ(s.broadcast, std::vector<int>{0});
    // Every row is covered for the fallback pattern.
    int covered = 0;
    for (const auto& [p, r] : s.work_items()) covered += p == 0;
    EXPECT_EQ(covered, s.total_rows());
}

TEST(Kmer, CacheRoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "spinsim_kmer_test";
    std::filesystem::remove_all(dir);
    const auto w = generate_workload(2000, 5, 30, 0.0, 5);
    const auto [f, l] = layout_reference(w.reference, 100, 30, 8);
    const auto built = KmerIndex::cached(dir.string(), f, 10);
    const auto path = dir / KmerIndex::cache_name(f.hash(), 10);
    ASSERT_TRUE(std::filesystem::exists(path));
    const auto loaded = KmerIndex::cached(dir.string(), f, 10);
    EXPECT_EQ(loaded.positions(), built.positions());
    for (std::size_t p = 0; p + 10 <= 2000; p += 7) {
        const auto a = built.lookup(w.reference, p);
        const auto b = loaded.lookup(w.reference, p);
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
    const std::vector<int> seeds{0};
    EXPECT_EQ(kmer_schedule(w.patterns, built, f, seeds).queues, kmer_schedule(w.patterns, loaded, f, seeds).queues);
    // A different k gets its own file.
    KmerIndex::cached(dir.string(), f, 11);
    EXPECT_TRUE(std::filesystem::exists(dir / KmerIndex::cache_name(f.hash(), 11)));
    std::filesystem::remove_all(dir);
}
