#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "spinsim/dna.hpp"
#include "spinsim/isa.hpp"

namespace spinsim {

// Turns row-serial column presets into gang presets where that is faster and
// hoists every gang preset to the earliest point in its phase at which its
// column is dead. Cell writes and the final array state are unchanged.
Program coalesce_presets(std::span<const Micro> program, int rows, const TechnologyProfile& p);

// Pattern queues per global row (array * rows_per_array + row). Broadcast
// patterns run after the queues, each one round on every row.
struct ScheduleAssignment {
    int arrays = 0;
    int rows_per_array = 0;
    std::vector<std::vector<int>> queues;
    std::vector<int> broadcast;

    int total_rows() const { return arrays * rows_per_array; }
    int queue_rounds(int array) const;
    int rounds(int array) const { return queue_rounds(array) + static_cast<int>(broadcast.size()); }
    int rounds() const;
    // Every (pattern, global row) work item.
    std::vector<std::pair<int, int>> work_items() const;
    std::string to_json() const;
};

ScheduleAssignment schedule_naive(int n_patterns, int arrays, int rows_per_array);

// oracle[p] lists the global rows nominated for pattern p.
ScheduleAssignment schedule_oracular(std::span<const std::vector<int>> oracle, int arrays, int rows_per_array);

// Cost of drawing one scheduling decision. The latency hides behind the
// pattern writes of the same round; the energy is always paid.
struct ScheduleCost {
    double latency_ns_per_pattern = 2.0;
    double energy_pj_per_pattern = 1.0;
};

// Every reference position that starts a full k-mer, keyed by the packed
// k-mer and stored as (global row, offset) of its owning fragment.
class KmerIndex {
public:
    struct Hit {
        int row;
        int offset;
        bool operator==(const Hit&) const = default;
    };

    KmerIndex() = default;
    KmerIndex(const FoldedReference& ref, int k);

    int k() const { return k_; }
    std::uint64_t reference_hash() const { return ref_hash_; }
    std::size_t positions() const { return positions_; }
    std::span<const Hit> lookup(const EncodedString& s, std::size_t pos) const;

    void save(const std::string& path) const;
    static KmerIndex load(const std::string& path);  // throws std::runtime_error
    // Reuses dir/kmer_<hash>_k<k>.bin when it matches, otherwise builds and
    // writes it.
    static KmerIndex cached(const std::string& dir, const FoldedReference& ref, int k);
    static std::string cache_name(std::uint64_t ref_hash, int k);

private:
    std::uint64_t key(const EncodedString& s, std::size_t pos) const;

    int k_ = 0;
    int width_ = 2;
    std::uint64_t ref_hash_ = 0;
    std::size_t positions_ = 0;
    std::unordered_map<std::uint64_t, std::vector<Hit>> map_;
};

// Candidate rows come from exact k-mer hits of the seed positions; patterns
// without any hit are broadcast.
ScheduleAssignment kmer_schedule(std::span<const EncodedString> patterns, const KmerIndex& index,
                                 const FoldedReference& ref, std::span<const int> seed_positions);

}  // namespace spinsim
