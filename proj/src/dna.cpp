#include "spinsim/dna.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spinsim/errors.hpp"
#include "spinsim/isa.hpp"

namespace spinsim {

std::vector<std::uint8_t> EncodedString::bits(std::size_t pos, std::size_t n) const {
    std::vector<std::uint8_t> out;
    out.reserve(n * width);
    for (std::size_t i = pos; i < pos + n; ++i)
        for (int b = width - 1; b >= 0; --b) out.push_back((sym.at(i) >> b) & 1u);
    return out;
}

EncodedString EncodedString::substr(std::size_t pos, std::size_t n) const {
    EncodedString e;
    e.width = width;
    if (pos < sym.size()) e.sym.assign(sym.begin() + pos, sym.begin() + std::min(sym.size(), pos + n));
    return e;
}

EncodedString encode_dna(std::string_view s) {
    EncodedString e;
    e.sym.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case 'A': case 'a': e.sym.push_back(0); break;
            case 'C': case 'c': e.sym.push_back(1); break;
            case 'G': case 'g': e.sym.push_back(2); break;
            case 'T': case 't': e.sym.push_back(3); break;
            default:
                throw std::invalid_argument(std::string("not a base: '") + c + "'");
        }
    }
    return e;
}

std::string decode_dna(const EncodedString& e) {
    static constexpr char kBases[] = "ACGT";
    std::string s;
    s.reserve(e.size());
    for (auto v : e.sym) s.push_back(kBases[v & 3]);
    return s;
}

EncodedString encode_bytes(std::string_view s) {
    EncodedString e;
    e.width = 8;
    e.sym.assign(s.begin(), s.end());
    return e;
}

std::string decode_bytes(const EncodedString& e) { return std::string(e.sym.begin(), e.sym.end()); }

std::string decode(const EncodedString& e) { return e.width == 2 ? decode_dna(e) : decode_bytes(e); }

std::uint64_t fnv1a(std::span<const std::uint8_t> data, std::uint64_t h) {
    for (auto b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<NamedSequence> parse_sequences(std::string_view text) {
    std::vector<NamedSequence> out;
    std::istringstream in{std::string(text)};
    std::string line;
    bool fasta = false, first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        line = line.substr(b, line.find_last_not_of(" \t") - b + 1);
        if (first) {
            fasta = line[0] == '>';
            first = false;
        }
        if (fasta) {
            if (line[0] == '>') out.push_back({line.substr(1), ""});
            else out.back().seq += line;
        } else {
            out.push_back({"seq" + std::to_string(out.size()), line});
        }
    }
    return out;
}

std::vector<NamedSequence> read_sequences(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_sequences(ss.str());
}

int FoldedReference::fragment_length(int row) const {
    const std::size_t b = fragment_begin(row);
    if (row < 0 || row >= fragment_count || b >= reference.size()) return 0;
    return static_cast<int>(std::min<std::size_t>(fragment_len, reference.size() - b));
}

int FoldedReference::owner(std::size_t pos) const {
    return static_cast<int>(std::min<std::size_t>(pos / stride, fragment_count - 1));
}

EncodedString FoldedReference::reconstruct() const {
    EncodedString e;
    e.width = reference.width;
    for (int r = 0; r < fragment_count; ++r) {
        const auto f = fragment(r);
        // Drop the part the previous fragment already supplied.
        const std::size_t skip = e.size() - fragment_begin(r);
        e.sym.insert(e.sym.end(), f.sym.begin() + static_cast<std::ptrdiff_t>(skip), f.sym.end());
    }
    return e;
}

std::uint64_t FoldedReference::hash() const {
    // Row/offset coordinates depend on the folding, so it is part of the key.
    const std::uint32_t shape[3] = {static_cast<std::uint32_t>(reference.width), static_cast<std::uint32_t>(fragment_len),
                                    static_cast<std::uint32_t>(overlap)};
    return fnv1a(reference.sym, fnv1a({reinterpret_cast<const std::uint8_t*>(shape), sizeof shape}));
}

FoldedReference fold_reference(const EncodedString& ref, int fragment_len, int overlap, int rows_per_array) {
    if (fragment_len < 1) throw GeometryError("fragment length must be positive");
    if (overlap < 0 || overlap >= fragment_len) throw GeometryError("overlap must be in [0, fragment length)");
    if (rows_per_array < 1) throw GeometryError("rows per array must be positive");
    if (ref.size() == 0) throw GeometryError("empty reference");
    FoldedReference f;
    f.reference = ref;
    f.fragment_len = fragment_len;
    f.overlap = overlap;
    f.stride = fragment_len - overlap;
    const std::size_t n = ref.size();
    f.fragment_count = n <= static_cast<std::size_t>(fragment_len)
                           ? 1
                           : static_cast<int>(1 + (n - fragment_len + f.stride - 1) / f.stride);
    f.rows_per_array = rows_per_array;
    return f;
}

std::string_view output_mode_name(OutputMode m) { return m == OutputMode::store_all ? "store_all" : "score_buffer"; }

OutputMode output_mode_from_name(std::string_view s) {
    if (s == "store_all") return OutputMode::store_all;
    if (s == "score_buffer") return OutputMode::score_buffer;
    throw std::invalid_argument("unknown output mode '" + std::string(s) + "'");
}

RegionLayout alignment_layout(int fragment_len, int pattern_len, int char_bits, OutputMode mode) {
    if (pattern_len < 1) throw GeometryError("pattern length must be positive");
    if (fragment_len < pattern_len)
        throw GeometryError("fragment of " + std::to_string(fragment_len) + " characters is shorter than the " +
                            std::to_string(pattern_len) + "-character pattern");
    const int n = score_bits(pattern_len);
    const int offsets = mode == OutputMode::store_all ? fragment_len - pattern_len + 1 : 1;
    RegionLayout l;
    l.fragment = {0, fragment_len * char_bits};
    l.pattern = {l.fragment.end(), pattern_len * char_bits};
    l.score = {l.pattern.end(), offsets * n};
    l.scratch = {l.score.end(), align_scratch_cols(pattern_len, char_bits)};
    return l;
}

std::pair<FoldedReference, RegionLayout> layout_reference(const EncodedString& ref, int fragment_len, int pattern_len,
                                                          int rows_per_array, OutputMode mode) {
    auto layout = alignment_layout(fragment_len, pattern_len, ref.width, mode);
    return {fold_reference(ref, fragment_len, pattern_len - 1, rows_per_array), layout};
}

namespace {

void sample_into(Workload& w, int n_patterns, int pattern_len, double mutation_rate, std::mt19937_64& rng) {
    const std::size_t n = w.reference.size();
    if (pattern_len < 1 || static_cast<std::size_t>(pattern_len) > n)
        throw std::invalid_argument("pattern length must be in [1, reference length]");
    if (mutation_rate < 0.0 || mutation_rate > 1.0) throw std::invalid_argument("mutation rate must be in [0, 1]");
    const int alphabet = w.reference.width == 2 ? 4 : 256;
    std::uniform_int_distribution<std::size_t> start(0, n - pattern_len);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int i = 0; i < n_patterns; ++i) {
        const std::size_t o = start(rng);
        auto p = w.reference.substr(o, pattern_len);
        for (auto& s : p.sym)
            if (coin(rng) < mutation_rate) s = static_cast<std::uint8_t>((s + 1 + rng() % (alphabet - 1)) % alphabet);
        w.origins.push_back(o);
        w.patterns.push_back(std::move(p));
    }
}

}  // namespace

Workload generate_workload(std::size_t reference_len, int n_patterns, int pattern_len, double mutation_rate,
                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Workload w;
    w.reference.sym.resize(reference_len);
    for (auto& s : w.reference.sym) s = static_cast<std::uint8_t>(rng() & 3);
    sample_into(w, n_patterns, pattern_len, mutation_rate, rng);
    return w;
}

Workload sample_patterns(const EncodedString& reference, int n_patterns, int pattern_len, double mutation_rate,
                         std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Workload w;
    w.reference = reference;
    sample_into(w, n_patterns, pattern_len, mutation_rate, rng);
    return w;
}

}  // namespace spinsim
