#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "spinsim/array.hpp"

namespace spinsim {

// A string of fixed-width symbols. DNA uses 2 bits (A=00 C=01 G=10 T=11),
// byte kernels 8.
struct EncodedString {
    std::vector<std::uint8_t> sym;
    int width = 2;

    std::size_t size() const { return sym.size(); }
    bool operator==(const EncodedString&) const = default;
    // Bits of symbols [pos, pos+n), each symbol high bit first.
    std::vector<std::uint8_t> bits(std::size_t pos, std::size_t n) const;
    EncodedString substr(std::size_t pos, std::size_t n) const;
};

EncodedString encode_dna(std::string_view s);  // throws std::invalid_argument on other letters
std::string decode_dna(const EncodedString& e);
EncodedString encode_bytes(std::string_view s);
std::string decode_bytes(const EncodedString& e);
std::string decode(const EncodedString& e);

std::uint64_t fnv1a(std::span<const std::uint8_t> data, std::uint64_t h = 0xcbf29ce484222325ULL);

struct NamedSequence {
    std::string name;
    std::string seq;
};
// FASTA if the first non-blank line starts with '>', otherwise one sequence
// per non-blank line. Throws std::runtime_error if the file cannot be read.
std::vector<NamedSequence> read_sequences(const std::string& path);
std::vector<NamedSequence> parse_sequences(std::string_view text);

// The reference cut into overlapping row fragments. Fragment r starts at
// r * stride and is fragment_len symbols long (the last one may be shorter).
struct FoldedReference {
    EncodedString reference;
    int fragment_len = 0;
    int overlap = 0;
    int stride = 0;
    int rows_per_array = 0;
    int fragment_count = 0;

    int arrays() const { return (fragment_count + rows_per_array - 1) / rows_per_array; }
    std::size_t fragment_begin(int row) const { return static_cast<std::size_t>(row) * stride; }
    int fragment_length(int row) const;
    EncodedString fragment(int row) const { return reference.substr(fragment_begin(row), fragment_length(row)); }
    // Row that evaluates an alignment starting at reference position pos.
    int owner(std::size_t pos) const;
    EncodedString reconstruct() const;
    std::uint64_t hash() const;
};

FoldedReference fold_reference(const EncodedString& ref, int fragment_len, int overlap, int rows_per_array);

enum class OutputMode : std::uint8_t { score_buffer, store_all };
std::string_view output_mode_name(OutputMode m);
OutputMode output_mode_from_name(std::string_view s);  // throws std::invalid_argument

// Compartments for one alignment row: fragment, pattern, score (one score per
// offset in store_all mode) and scratch.
RegionLayout alignment_layout(int fragment_len, int pattern_len, int char_bits, OutputMode mode);

// Folds with the seam replication an alignment of pattern_len needs
// (overlap = pattern_len - 1). Throws GeometryError when the fragment is
// shorter than the pattern.
std::pair<FoldedReference, RegionLayout> layout_reference(const EncodedString& ref, int fragment_len, int pattern_len,
                                                          int rows_per_array, OutputMode mode = OutputMode::score_buffer);

struct Workload {
    EncodedString reference;
    std::vector<EncodedString> patterns;
    std::vector<std::size_t> origins;  // where each pattern was sampled
};

// Random reference; patterns sampled uniformly from it with i.i.d.
// substitutions at mutation_rate.
Workload generate_workload(std::size_t reference_len, int n_patterns, int pattern_len, double mutation_rate,
                           std::uint64_t seed);
// Same sampling over a given reference.
Workload sample_patterns(const EncodedString& reference, int n_patterns, int pattern_len, double mutation_rate,
                         std::uint64_t seed);

}  // namespace spinsim
