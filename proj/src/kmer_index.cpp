#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>

#include "spinsim/scheduler.hpp"

namespace spinsim {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'K', 'M', 'E', 'R', '0', '1'};

template <class T>
void put(std::ostream& o, T v) {
    o.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& i) {
    T v{};
    if (!i.read(reinterpret_cast<char*>(&v), sizeof v)) throw std::runtime_error("k-mer cache truncated");
    return v;
}

}  // namespace

KmerIndex::KmerIndex(const FoldedReference& ref, int k)
    : k_(k), width_(ref.reference.width), ref_hash_(ref.hash()) {
    if (k < 1 || k * width_ > 64) throw std::invalid_argument("k-mer length must be in [1, " + std::to_string(64 / width_) + "]");
    const auto& s = ref.reference;
    if (s.size() < static_cast<std::size_t>(k)) return;
    for (std::size_t p = 0; p + k <= s.size(); ++p) {
        const int row = ref.owner(p);
        map_[key(s, p)].push_back({row, static_cast<int>(p - ref.fragment_begin(row))});
        ++positions_;
    }
}

std::uint64_t KmerIndex::key(const EncodedString& s, std::size_t pos) const {
    std::uint64_t v = 0;
    for (int i = 0; i < k_; ++i) v = (v << width_) | s.sym[pos + i];
    return v;
}

std::span<const KmerIndex::Hit> KmerIndex::lookup(const EncodedString& s, std::size_t pos) const {
    if (s.width != width_) throw std::invalid_argument("k-mer lookup: symbol width differs from the index");
    if (pos + k_ > s.size()) return {};
    const auto it = map_.find(key(s, pos));
    if (it == map_.end()) return {};
    return it->second;
}

std::string KmerIndex::cache_name(std::uint64_t ref_hash, int k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "kmer_%016llx_k%d.bin", static_cast<unsigned long long>(ref_hash), k);
    return buf;
}

void KmerIndex::save(const std::string& path) const {
    std::ofstream o(path, std::ios::binary | std::ios::trunc);
    if (!o) throw std::runtime_error("cannot write " + path);
    o.write(kMagic, sizeof kMagic);
    put<std::int32_t>(o, k_);
    put<std::int32_t>(o, width_);
    put<std::uint64_t>(o, ref_hash_);
    put<std::uint64_t>(o, positions_);
    put<std::uint64_t>(o, map_.size());
    // Sorted so the file is byte-identical across runs.
    std::map<std::uint64_t, const std::vector<Hit>*> sorted;
    for (const auto& [key, hits] : map_) sorted.emplace(key, &hits);
    for (const auto& [key, hits] : sorted) {
        put<std::uint64_t>(o, key);
        put<std::uint32_t>(o, static_cast<std::uint32_t>(hits->size()));
        for (const auto& h : *hits) {
            put<std::int32_t>(o, h.row);
            put<std::int32_t>(o, h.offset);
        }
    }
    if (!o) throw std::runtime_error("cannot write " + path);
}

KmerIndex KmerIndex::load(const std::string& path) {
    std::ifstream i(path, std::ios::binary);
    if (!i) throw std::runtime_error("cannot open " + path);
    char magic[sizeof kMagic];
    if (!i.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw std::runtime_error(path + " is not a k-mer cache");
    KmerIndex x;
    x.k_ = get<std::int32_t>(i);
    x.width_ = get<std::int32_t>(i);
    x.ref_hash_ = get<std::uint64_t>(i);
    x.positions_ = get<std::uint64_t>(i);
    const auto keys = get<std::uint64_t>(i);
    x.map_.reserve(keys);
    for (std::uint64_t n = 0; n < keys; ++n) {
        const auto key = get<std::uint64_t>(i);
        auto& hits = x.map_[key];
        hits.resize(get<std::uint32_t>(i));
        for (auto& h : hits) {
            h.row = get<std::int32_t>(i);
            h.offset = get<std::int32_t>(i);
        }
    }
    return x;
}

KmerIndex KmerIndex::cached(const std::string& dir, const FoldedReference& ref, int k) {
    const auto path = (std::filesystem::path(dir) / cache_name(ref.hash(), k)).string();
    if (std::filesystem::exists(path)) {
        try {
            auto x = load(path);
            if (x.k_ == k && x.ref_hash_ == ref.hash()) return x;
        } catch (const std::runtime_error&) {
            // stale or damaged cache: rebuild below
        }
    }
    KmerIndex x(ref, k);
    std::filesystem::create_directories(dir);
    x.save(path);
    return x;
}

}  // namespace spinsim
