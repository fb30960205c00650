#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "spinsim/dna.hpp"
#include "spinsim/scheduler.hpp"

namespace spinsim {

enum class PolicyKind : std::uint8_t { naive, oracular, kmer };

struct Policy {
    PolicyKind kind = PolicyKind::naive;
    bool optimized = false;  // gang presets via coalesce_presets

    std::string name() const;
    static Policy parse(std::string_view s);  // naive, naive_opt, oracular, oracular_opt, kmer, kmer_opt
    bool operator==(const Policy&) const = default;
};

struct ScoreRecord {
    int pattern_id = 0;
    int array = 0;
    int row = 0;  // global row
    int loc = 0;  // offset within the row's fragment
    int score = 0;

    bool operator==(const ScoreRecord&) const = default;
    auto operator<=>(const ScoreRecord&) const = default;
};

struct AlignmentOptions {
    OutputMode mode = OutputMode::score_buffer;
    bool optimized = false;
    bool charge_schedule = false;  // schedule overhead stage (oracular and k-mer policies)
    ScheduleCost schedule_cost;
};

struct AlignmentResult {
    std::vector<ScoreRecord> records;
    StageLedger ledger;  // arrays merged in parallel
    int rounds = 0;      // slowest array
    std::uint64_t alignments = 0;  // (row, loc) evaluations per round, summed
    int patterns = 0;
    std::vector<std::string> warnings;

    std::string records_csv() const;
};

// The program for one alignment offset: match phase, then the reduction
// tree into the score slot for that offset. Presets are row-serial unless
// coalesced afterwards.
Program alignment_program(const RegionLayout& l, int pattern_chars, int char_bits, int loc, OutputMode mode);

// Closed form of the logic steps in one alignment.
std::uint64_t alignment_logic_steps(int pattern_chars, int char_bits);

AlignmentResult run_alignment(const FoldedReference& ref, std::span<const EncodedString> patterns,
                              const ScheduleAssignment& schedule, const TechnologyProfile& profile,
                              const AlignmentOptions& opt);

// Software sliding-window count of equal symbols.
int match_count(const EncodedString& frag, std::size_t loc, const EncodedString& pattern);
// Records the array must produce for this schedule, in the same order.
std::vector<ScoreRecord> software_scores(const FoldedReference& ref, std::span<const EncodedString> patterns,
                                         const ScheduleAssignment& schedule);
// Exhaustive search: rows holding a best-scoring alignment for each pattern.
// With lowest_only, the lowest such row.
std::vector<std::vector<int>> best_rows(const FoldedReference& ref, std::span<const EncodedString> patterns,
                                        bool lowest_only = true);
// Best score per pattern among records (-1 if none).
std::vector<int> best_scores(std::span<const ScoreRecord> records, int n_patterns);

struct DnaSetup {
    int fragment_len = 1000;
    int rows_per_array = 64;
    int max_arrays = 0;  // 0: as many as the reference needs
    Policy policy;
    OutputMode mode = OutputMode::score_buffer;
    int k = 12;
    std::vector<int> seed_positions{0};
    std::string kmer_cache_dir;  // empty: build in memory
    ScheduleCost schedule_cost;
};

struct DnaRun {
    FoldedReference folded;
    RegionLayout layout;
    ScheduleAssignment schedule;
    AlignmentResult result;
};

// Folds, schedules by policy and aligns.
DnaRun run_dna(const EncodedString& reference, std::span<const EncodedString> patterns, const DnaSetup& setup,
               const TechnologyProfile& profile);

// --- byte and word kernels ----------------------------------------------

struct KernelGeometry {
    int rows = 256;
    int arrays_limit = 0;  // 0: unlimited
};

struct BitcountResult {
    std::vector<int> counts;
    StageLedger ledger;
};
BitcountResult kernel_bitcount(std::span<const std::uint32_t> words, const TechnologyProfile& p,
                               const KernelGeometry& g = {}, bool gang = true);

struct StringMatchResult {
    std::vector<std::size_t> positions;  // every start of query in the corpus
    StageLedger ledger;
};
StringMatchResult kernel_stringmatch(std::string_view corpus, std::string_view query, const TechnologyProfile& p,
                                     const KernelGeometry& g = {}, int fragment_len = 64, bool gang = true);

struct WordCountResult {
    std::vector<std::uint64_t> counts;  // per query word
    StageLedger ledger;
};
WordCountResult kernel_wordcount(std::string_view corpus, std::span<const std::string> words,
                                 const TechnologyProfile& p, const KernelGeometry& g = {}, bool gang = true);

struct Rc4Result {
    std::vector<std::uint8_t> output;
    StageLedger ledger;
};
// XORs text with the keystream inside the array; applying it twice restores
// the text.
Rc4Result kernel_rc4(std::span<const std::uint8_t> text, std::span<const std::uint8_t> key, const TechnologyProfile& p,
                     const KernelGeometry& g = {}, int bytes_per_row = 16, bool gang = true);
std::vector<std::uint8_t> rc4_keystream(std::span<const std::uint8_t> key, std::size_t n);

std::vector<std::string> split_words(std::string_view text);

}  // namespace spinsim
