#include <algorithm>
#include <cctype>

#include "spinsim/errors.hpp"
#include "spinsim/kernels.hpp"

namespace spinsim {

namespace {

// Batches spread round-robin over the arrays; each array runs its batches
// back to back and the arrays run side by side.
class ArrayPool {
public:
    explicit ArrayPool(int limit) : limit_(limit) {}

    void add(int batch, const StageLedger& l) {
        const std::size_t a = limit_ > 0 ? static_cast<std::size_t>(batch % limit_) : static_cast<std::size_t>(batch);
        if (per_array_.size() <= a) per_array_.resize(a + 1);
        per_array_[a] += l;
    }

    StageLedger merged() const {
        StageLedger out;
        for (std::size_t i = 0; i < per_array_.size(); ++i)
            out = i == 0 ? per_array_[i] : StageLedger::parallel(out, per_array_[i]);
        return out;
    }

private:
    int limit_;
    std::vector<StageLedger> per_array_;
};

std::vector<std::uint8_t> byte_bits(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> out;
    out.reserve(bytes.size() * 8);
    for (auto b : bytes)
        for (int i = 7; i >= 0; --i) out.push_back((b >> i) & 1u);
    return out;
}

void check_rows(const KernelGeometry& g) {
    if (g.rows < 1) throw GeometryError("kernel geometry needs at least one row");
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

BitcountResult kernel_bitcount(std::span<const std::uint32_t> words, const TechnologyProfile& p,
                               const KernelGeometry& g, bool gang) {
    check_rows(g);
    BitcountResult res;
    res.counts.reserve(words.size());
    const int n = score_bits(32);
    RegionLayout l;
    l.fragment = {0, 32};
    l.pattern = {32, 0};
    l.score = {32, n};
    l.scratch = {32 + n, reduction_tree_scratch(32)};
    const int cols = l.total_cols();
    Program prog = expand_macro(Macro::add_pm(0, 32, l.score.begin, n, gang), l, g.rows, cols);
    const Smc smc(p);
    ArrayPool pool(g.arrays_limit);
    for (std::size_t b = 0, batch = 0; b < words.size(); b += g.rows, ++batch) {
        ArrayState st(g.rows, cols, p);
        const std::size_t m = std::min<std::size_t>(g.rows, words.size() - b);
        for (std::size_t r = 0; r < m; ++r) {
            std::uint8_t bytes[4];
            for (int i = 0; i < 4; ++i) bytes[i] = static_cast<std::uint8_t>(words[b + r] >> (24 - 8 * i));
            st.write_bits(static_cast<int>(r), 0, byte_bits(bytes));
        }
        smc.execute(prog, st);
        for (std::size_t r = 0; r < m; ++r) {
            const auto bits = st.read_bits(static_cast<int>(r), l.score.begin, n);
            int v = 0;
            for (int i = 0; i < n; ++i) v |= bits[i] << i;
            res.counts.push_back(v);
        }
        pool.add(static_cast<int>(batch), st.ledger());
    }
    res.ledger = pool.merged();
    return res;
}

StringMatchResult kernel_stringmatch(std::string_view corpus, std::string_view query, const TechnologyProfile& p,
                                     const KernelGeometry& g, int fragment_len, bool gang) {
    check_rows(g);
    if (query.empty()) throw ContractViolation("empty search string");
    StringMatchResult res;
    if (corpus.size() < query.size()) return res;
    const EncodedString q = encode_bytes(query);
    const auto folded = fold_reference(encode_bytes(corpus), fragment_len, static_cast<int>(q.size()) - 1, g.rows);
    if (g.arrays_limit > 0 && folded.arrays() > g.arrays_limit)
        throw GeometryError("corpus needs " + std::to_string(folded.arrays()) + " arrays");
    const auto sched = schedule_naive(1, folded.arrays(), g.rows);
    AlignmentOptions opt;
    opt.optimized = gang;
    const std::vector<EncodedString> pats{q};
    auto r = run_alignment(folded, pats, sched, p, opt);
    for (const auto& rec : r.records)
        if (rec.score == static_cast<int>(q.size())) res.positions.push_back(folded.fragment_begin(rec.row) + rec.loc);
    std::sort(res.positions.begin(), res.positions.end());
    res.ledger = r.ledger;
    return res;
}

WordCountResult kernel_wordcount(std::string_view corpus, std::span<const std::string> words,
                                 const TechnologyProfile& p, const KernelGeometry& g, bool gang) {
    check_rows(g);
    WordCountResult res;
    res.counts.assign(words.size(), 0);
    const auto corpus_words = split_words(corpus);
    if (words.empty() || corpus_words.empty()) return res;
    std::size_t width = 0;
    for (const auto& w : words) {
        if (w.empty()) throw ContractViolation("empty query word");
        width = std::max(width, w.size());
    }
    // One NUL past the longest query so a longer corpus word never matches.
    ++width;
    auto pad = [&](std::string_view s) {
        std::string x(s.substr(0, width));
        x.resize(width, '\0');
        return x;
    };
    // Each row holds one corpus word; the rows form a fold without overlap.
    std::string packed;
    packed.reserve(corpus_words.size() * width);
    for (const auto& w : corpus_words) packed += pad(w);
    FoldedReference f;
    f.reference = encode_bytes(packed);
    f.fragment_len = static_cast<int>(width);
    f.stride = static_cast<int>(width);
    f.rows_per_array = g.rows;
    f.fragment_count = static_cast<int>(corpus_words.size());
    if (g.arrays_limit > 0 && f.arrays() > g.arrays_limit)
        throw GeometryError("corpus needs " + std::to_string(f.arrays()) + " arrays");
    std::vector<EncodedString> pats;
    for (const auto& w : words) pats.push_back(encode_bytes(pad(w)));
    AlignmentOptions opt;
    opt.optimized = gang;
    auto r = run_alignment(f, pats, schedule_naive(static_cast<int>(pats.size()), f.arrays(), g.rows), p, opt);
    for (const auto& rec : r.records)
        if (rec.score == static_cast<int>(width)) ++res.counts[rec.pattern_id];
    res.ledger = r.ledger;
    return res;
}

std::vector<std::uint8_t> rc4_keystream(std::span<const std::uint8_t> key, std::size_t n) {
    if (key.empty() || key.size() > 256) throw std::invalid_argument("rc4 key must be 1..256 bytes");
    std::uint8_t s[256];
    for (int i = 0; i < 256; ++i) s[i] = static_cast<std::uint8_t>(i);
    for (int i = 0, j = 0; i < 256; ++i) {
        j = (j + s[i] + key[i % key.size()]) & 0xff;
        std::swap(s[i], s[j]);
    }
    std::vector<std::uint8_t> out(n);
    int i = 0, j = 0;
    for (auto& o : out) {
        i = (i + 1) & 0xff;
        j = (j + s[i]) & 0xff;
        std::swap(s[i], s[j]);
        o = s[(s[i] + s[j]) & 0xff];
    }
    return out;
}

Rc4Result kernel_rc4(std::span<const std::uint8_t> text, std::span<const std::uint8_t> key, const TechnologyProfile& p,
                     const KernelGeometry& g, int bytes_per_row, bool gang) {
    check_rows(g);
    if (bytes_per_row < 1) throw GeometryError("rc4 needs at least one byte per row");
    Rc4Result res;
    const auto ks = rc4_keystream(key, text.size());
    const int w = bytes_per_row * 8;
    RegionLayout l;
    l.fragment = {0, w};      // text
    l.pattern = {w, w};       // keystream
    l.score = {2 * w, w};     // result
    l.scratch = {3 * w, 2};
    const int cols = l.total_cols();
    const Program prog = expand_macro(Macro::xor_pm(l.score.begin, 0, w, w, gang), l, g.rows, cols);
    const Smc smc(p);
    ArrayPool pool(g.arrays_limit);
    const std::size_t per_batch = static_cast<std::size_t>(g.rows) * bytes_per_row;
    res.output.reserve(text.size());
    for (std::size_t b = 0, batch = 0; b < text.size(); b += per_batch, ++batch) {
        ArrayState st(g.rows, cols, p);
        std::vector<std::size_t> lens;
        for (int r = 0; r < g.rows; ++r) {
            const std::size_t off = b + static_cast<std::size_t>(r) * bytes_per_row;
            if (off >= text.size()) break;
            const std::size_t len = std::min<std::size_t>(bytes_per_row, text.size() - off);
            st.write_bits(r, 0, byte_bits(text.subspan(off, len)));
            st.write_bits(r, w, byte_bits(std::span(ks).subspan(off, len)));
            lens.push_back(len);
        }
        smc.execute(prog, st);
        for (std::size_t r = 0; r < lens.size(); ++r) {
            const auto bits = st.read_bits(static_cast<int>(r), l.score.begin, static_cast<int>(lens[r] * 8));
            for (std::size_t i = 0; i < lens[r]; ++i) {
                std::uint8_t v = 0;
                for (int k = 0; k < 8; ++k) v = static_cast<std::uint8_t>((v << 1) | bits[i * 8 + k]);
                res.output.push_back(v);
            }
        }
        pool.add(static_cast<int>(batch), st.ledger());
    }
    res.ledger = pool.merged();
    return res;
}

}  // namespace spinsim
