#include "spinsim/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace spinsim {

Program coalesce_presets(std::span<const Micro> program, int rows, const TechnologyProfile& p) {
    const bool to_gang = p.logic_step_latency_ns() < rows * p.write_access_latency_ns();

    int max_col = 0;
    for (const Micro& m : program) {
        for (int c : m.columns()) max_col = std::max(max_col, c);
        if (m.op == Op::write) max_col = std::max(max_col, m.cols[0] + static_cast<int>(m.bits.size()));
        if (m.op == Op::read) max_col = std::max(max_col, m.cols[0] + m.count);
    }

    // Micros that stay put are anchors; a gang preset is attached behind the
    // last anchor that touched its column (or the phase directive opening
    // its block). attached[0] holds presets placed before every anchor.
    std::vector<Micro> anchors;
    std::vector<std::vector<Micro>> attached(1);
    std::vector<int> last_touch(max_col + 1, -1);
    int block_start = -1;
    for (const Micro& m : program) {
        Micro x = m;
        if (x.op == Op::preset_row && x.row < 0 && to_gang) x = Micro::gang(x.cols[0], x.value);
        if (x.op == Op::preset_gang) {
            const int c = x.cols[0];
            const int slot = std::max(block_start, last_touch[c]);
            attached[slot + 1].push_back(x);
            last_touch[c] = slot;
            continue;
        }
        anchors.push_back(x);
        attached.emplace_back();
        const int k = static_cast<int>(anchors.size()) - 1;
        if (x.op == Op::phase) {
            block_start = k;
        } else if (x.op == Op::write || x.op == Op::read) {
            const int n = x.op == Op::write ? static_cast<int>(x.bits.size()) : x.count;
            for (int c = x.cols[0]; c < x.cols[0] + n; ++c) last_touch[c] = k;
        } else {
            for (int c : x.columns()) last_touch[c] = k;
        }
    }

    Program out;
    out.reserve(program.size());
    out.insert(out.end(), attached[0].begin(), attached[0].end());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        out.push_back(std::move(anchors[i]));
        out.insert(out.end(), attached[i + 1].begin(), attached[i + 1].end());
    }
    return out;
}

int ScheduleAssignment::queue_rounds(int array) const {
    std::size_t n = 0;
    for (int r = array * rows_per_array; r < (array + 1) * rows_per_array && r < static_cast<int>(queues.size()); ++r)
        n = std::max(n, queues[r].size());
    return static_cast<int>(n);
}

int ScheduleAssignment::rounds() const {
    int n = 0;
    for (int a = 0; a < arrays; ++a) n = std::max(n, rounds(a));
    return n;
}

std::vector<std::pair<int, int>> ScheduleAssignment::work_items() const {
    std::vector<std::pair<int, int>> w;
    for (int r = 0; r < static_cast<int>(queues.size()); ++r)
        for (int p : queues[r]) w.emplace_back(p, r);
    for (int p : broadcast)
        for (int r = 0; r < total_rows(); ++r) w.emplace_back(p, r);
    return w;
}

std::string ScheduleAssignment::to_json() const {
    nlohmann::ordered_json j;
    j["arrays"] = arrays;
    j["rows_per_array"] = rows_per_array;
    j["rounds"] = rounds();
    j["broadcast"] = broadcast;
    auto& q = j["queues"] = nlohmann::ordered_json::array();
    for (int r = 0; r < static_cast<int>(queues.size()); ++r) {
        if (queues[r].empty()) continue;
        q.push_back({{"array", r / rows_per_array}, {"row", r % rows_per_array}, {"patterns", queues[r]}});
    }
    return j.dump(2);
}

ScheduleAssignment schedule_naive(int n_patterns, int arrays, int rows_per_array) {
    if (n_patterns < 1) throw std::invalid_argument("schedule_naive: empty pattern pool");
    if (arrays < 1 || rows_per_array < 1) throw std::invalid_argument("schedule_naive: empty geometry");
    ScheduleAssignment s;
    s.arrays = arrays;
    s.rows_per_array = rows_per_array;
    s.queues.resize(static_cast<std::size_t>(arrays) * rows_per_array);
    for (int p = 0; p < n_patterns; ++p) s.broadcast.push_back(p);
    return s;
}

ScheduleAssignment schedule_oracular(std::span<const std::vector<int>> oracle, int arrays, int rows_per_array) {
    if (oracle.empty()) throw std::invalid_argument("schedule_oracular: empty pattern pool");
    if (arrays < 1 || rows_per_array < 1) throw std::invalid_argument("schedule_oracular: empty geometry");
    ScheduleAssignment s;
    s.arrays = arrays;
    s.rows_per_array = rows_per_array;
    s.queues.resize(static_cast<std::size_t>(arrays) * rows_per_array);
    for (int p = 0; p < static_cast<int>(oracle.size()); ++p) {
        if (oracle[p].empty()) throw std::invalid_argument("schedule_oracular: no row for pattern " + std::to_string(p));
        std::vector<int> rows = oracle[p];
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        for (int r : rows) {
            if (r < 0 || r >= s.total_rows())
                throw std::invalid_argument("schedule_oracular: row " + std::to_string(r) + " outside the geometry");
            s.queues[r].push_back(p);
        }
    }
    return s;
}

ScheduleAssignment kmer_schedule(std::span<const EncodedString> patterns, const KmerIndex& index,
                                 const FoldedReference& ref, std::span<const int> seed_positions) {
    ScheduleAssignment s;
    s.arrays = ref.arrays();
    s.rows_per_array = ref.rows_per_array;
    s.queues.resize(static_cast<std::size_t>(s.total_rows()));
    const std::size_t n = ref.reference.size();
    for (int p = 0; p < static_cast<int>(patterns.size()); ++p) {
        const auto& pat = patterns[p];
        std::vector<int> rows;
        for (int seed : seed_positions) {
            if (seed < 0 || seed + index.k() > static_cast<int>(pat.size())) continue;
            for (const auto& h : index.lookup(pat, seed)) {
                const std::size_t hit = ref.fragment_begin(h.row) + h.offset;
                if (hit < static_cast<std::size_t>(seed)) continue;
                const std::size_t start = hit - seed;
                if (start + pat.size() > n) continue;
                rows.push_back(ref.owner(start));
            }
        }
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        if (rows.empty()) s.broadcast.push_back(p);
        for (int r : rows) s.queues[r].push_back(p);
    }
    return s;
}

}  // namespace spinsim
