#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "allocate.hpp"
#include "circuit.hpp"

namespace scsynth {

// Two stabilizers can run together only when their trees claim different
// bridge qubits; shared data leaves are fine.
inline bool compatible_trees(const bridge_tree& a, const bridge_tree& b) {
    std::set<point, point_yx_less> mine;
    for (const point& p : a.bridge_nodes()) mine.insert(p);
    for (const point& p : b.bridge_nodes())
        if (mine.count(p)) return false;
    return true;
}

// One scheduled stabilizer measurement.  The entry owns its candidate trees
// so refinement can swap to a conflict-free alternative when it migrates.
struct schedule_entry {
    int id = 0;
    char stab_type = 'X';
    std::vector<bridge_tree> candidates;
    int chosen = 0;
    std::optional<flag_spec> flag;

    const bridge_tree& tree() const { return candidates[static_cast<size_t>(chosen)]; }

    // standalone circuit depth; a flag widens a weight-2 data window to four
    // slots and gives a bare Z syndrome its two H layers back
    int exec() const {
        int d = measure_depth(stab_type, tree());
        if (flag) {
            d += 2;
            if (stab_type == 'Z' && tree().bridge_count() == 1) d += 2;
        }
        return d;
    }
};

struct measurement_schedule {
    std::vector<std::vector<schedule_entry>> partitions;
    // data qubits of the hosting layout; flag spots must avoid them
    std::set<point, point_yx_less> data_pts;
};

inline int exec_time(const std::vector<schedule_entry>& partition) {
    int t = 0;
    for (const auto& e : partition) t = std::max(t, e.exec());
    return t;
}

inline int total_cycle_time(const measurement_schedule& s) {
    int t = 0;
    for (const auto& p : s.partitions) t += exec_time(p);
    return t;
}

namespace detail {

inline bool entry_fits(const schedule_entry& e, const std::vector<schedule_entry>& part) {
    for (const auto& other : part)
        if (!compatible_trees(e.tree(), other.tree())) return false;
    return true;
}

// Sorted (spot, host) pairs adjacent to the tree's bridge qubits.
inline std::vector<std::pair<point, point>> flag_spots(const device_graph& g,
                                                       const bridge_tree& t) {
    std::vector<std::pair<point, point>> spots;
    for (const point& h : t.bridge_nodes())
        for (int nb : g.neighbors(*g.at(h))) spots.push_back({g.pos(nb), h});
    std::sort(spots.begin(), spots.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return yx_less(a.first, b.first);
        return yx_less(a.second, b.second);
    });
    return spots;
}

// Attaches flags to every weight-2 entry, processing entries in id order.  A
// spot is legal when it is not a data qubit and not claimed by the same
// partition (bridge qubits or earlier flags).  Entries without a legal spot
// run unflagged.
inline void attach_flags(const device_graph& g, measurement_schedule& s) {
    std::vector<std::set<point, point_yx_less>> claimed(s.partitions.size());
    for (size_t pi = 0; pi < s.partitions.size(); ++pi)
        for (const auto& e : s.partitions[pi])
            for (const point& p : e.tree().bridge_nodes()) claimed[pi].insert(p);

    std::vector<std::pair<int, size_t>> order;  // (entry id, partition)
    for (size_t pi = 0; pi < s.partitions.size(); ++pi)
        for (const auto& e : s.partitions[pi]) order.push_back({e.id, pi});
    std::sort(order.begin(), order.end());

    for (const auto& [id, pi] : order) {
        for (auto& e : s.partitions[pi]) {
            if (e.id != id) continue;
            e.flag.reset();
            if (e.tree().data.size() != 2) break;
            for (const auto& [spot, host] : flag_spots(g, e.tree())) {
                if (s.data_pts.count(spot) || claimed[pi].count(spot)) continue;
                e.flag = flag_spec{spot, host};
                claimed[pi].insert(spot);
                break;
            }
            break;
        }
    }
}

}  // namespace detail

// Greedy typed grouping: each stabilizer joins the first partition of its own
// type whose trees it does not conflict with.  Conflict-free layouts collapse
// to one X and one Z partition.  Partitions are ordered by execution time,
// longest first, then flags are attached.
inline measurement_schedule init_schedule(const device_graph& g,
                                          std::vector<schedule_entry> entries,
                                          std::set<point, point_yx_less> data_pts) {
    measurement_schedule s;
    s.data_pts = std::move(data_pts);
    std::vector<char> part_type;
    for (auto& e : entries) {
        bool placed = false;
        for (size_t pi = 0; pi < s.partitions.size() && !placed; ++pi) {
            if (part_type[pi] != e.stab_type) continue;
            if (detail::entry_fits(e, s.partitions[pi])) {
                s.partitions[pi].push_back(std::move(e));
                placed = true;
            }
        }
        if (!placed) {
            part_type.push_back(e.stab_type);
            s.partitions.push_back({std::move(e)});
        }
    }
    detail::attach_flags(g, s);
    std::stable_sort(s.partitions.begin(), s.partitions.end(),
                     [](const auto& a, const auto& b) { return exec_time(a) > exec_time(b); });
    return s;
}

inline measurement_schedule init_schedule(const device_graph& g, const data_layout& layout) {
    std::vector<schedule_entry> entries;
    for (size_t i = 0; i < layout.rects.size(); ++i) {
        const auto& r = layout.rects[i];
        schedule_entry e;
        e.id = static_cast<int>(i);
        e.stab_type = r.stab_type;
        e.candidates = r.candidates;
        e.chosen = r.tree_index;
        entries.push_back(std::move(e));
    }
    std::set<point, point_yx_less> data;
    for (const auto& r : layout.rects)
        for (const point& p : r.data_pts) data.insert(p);
    return init_schedule(g, std::move(entries), std::move(data));
}

namespace detail {

// Swaps the entry onto its first conflict-free candidate tree, if any.
inline void reselect_tree(schedule_entry& e, const std::vector<schedule_entry>& part) {
    if (entry_fits(e, part)) return;
    for (size_t ci = 0; ci < e.candidates.size(); ++ci) {
        if (static_cast<int>(ci) == e.chosen) continue;
        schedule_entry probe = e;
        probe.chosen = static_cast<int>(ci);
        if (entry_fits(probe, part)) {
            e.chosen = static_cast<int>(ci);
            return;
        }
    }
}

inline std::vector<std::vector<int>> membership(const measurement_schedule& s) {
    std::vector<std::vector<int>> m;
    for (const auto& p : s.partitions) {
        std::vector<int> ids;
        for (const auto& e : p) ids.push_back(e.id);
        std::sort(ids.begin(), ids.end());
        m.push_back(std::move(ids));
    }
    return m;
}

}  // namespace detail

// Iterative refinement between the two longest partitions.  Each iteration
// pulls the longest entry of S2 into S1 and cascades conflicting entries back
// and forth through a swap list, alternating destinations up to k times.  An
// iteration that meets an entry larger than the incomer, or that cannot place
// everything within k alternations, is rolled back and refinement stops.
// Flags are ignored while refining and reattached afterwards; if the
// reassembled schedule is no better than the input, the input stands.
inline void refine(const device_graph& g, measurement_schedule& s, int k = 4) {
    if (s.partitions.size() < 2) return;
    measurement_schedule incoming = s;

    for (auto& p : s.partitions)
        for (auto& e : p) e.flag.reset();

    // indices of the two longest partitions; S1 is the longer one
    auto two_longest = [&]() {
        size_t i1 = 0;
        for (size_t i = 1; i < s.partitions.size(); ++i)
            if (exec_time(s.partitions[i]) > exec_time(s.partitions[i1])) i1 = i;
        size_t i2 = i1 == 0 ? 1 : 0;
        for (size_t i = 0; i < s.partitions.size(); ++i) {
            if (i == i1) continue;
            if (exec_time(s.partitions[i]) > exec_time(s.partitions[i2])) i2 = i;
        }
        return std::pair<size_t, size_t>{i1, i2};
    };

    auto [i1, i2] = two_longest();
    std::set<std::vector<std::vector<int>>> seen;
    int cap = 0;
    for (const auto& p : s.partitions) cap += static_cast<int>(p.size());
    cap = 2 * cap + 4;

    for (int iter = 0; iter < cap; ++iter) {
        auto& s1 = s.partitions[i1];
        auto& s2 = s.partitions[i2];
        if (s2.empty()) break;
        if (!seen.insert(detail::membership(s)).second) break;

        auto before1 = s1;
        auto before2 = s2;

        // longest entry of S2 seeds the swap list
        size_t ri = 0;
        for (size_t i = 1; i < s2.size(); ++i)
            if (s2[i].exec() > s2[ri].exec()) ri = i;
        std::vector<schedule_entry> batch{s2[ri]};
        s2.erase(s2.begin() + static_cast<long>(ri));

        bool terminated = false;
        for (int i = 0; i < k && !batch.empty() && !terminated; ++i) {
            auto& dst = i % 2 == 0 ? s1 : s2;
            std::vector<schedule_entry> next;
            for (auto& r : batch) {
                detail::reselect_tree(r, dst);
                int rexec = r.exec();
                dst.push_back(std::move(r));
                const schedule_entry& moved = dst.back();
                // scan residents by descending exec; evict the incompatible
                std::vector<size_t> order(dst.size() - 1);
                for (size_t j = 0; j < order.size(); ++j) order[j] = j;
                std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                    if (dst[a].exec() != dst[b].exec()) return dst[a].exec() > dst[b].exec();
                    return dst[a].id < dst[b].id;
                });
                std::set<size_t> evict;
                for (size_t j : order) {
                    if (compatible_trees(dst[j].tree(), moved.tree())) continue;
                    if (dst[j].exec() > rexec) {
                        terminated = true;
                        break;
                    }
                    evict.insert(j);
                }
                if (terminated) break;
                for (auto it = evict.rbegin(); it != evict.rend(); ++it) {
                    next.push_back(std::move(dst[*it]));
                    dst.erase(dst.begin() + static_cast<long>(*it));
                }
            }
            batch = std::move(next);
        }

        if (terminated || !batch.empty()) {
            s1 = std::move(before1);
            s2 = std::move(before2);
            break;
        }
    }

    // drop emptied partitions, restore order, reattach flags
    std::vector<std::vector<schedule_entry>> kept;
    for (auto& p : s.partitions)
        if (!p.empty()) kept.push_back(std::move(p));
    s.partitions = std::move(kept);
    for (auto& p : s.partitions)
        std::sort(p.begin(), p.end(),
                  [](const schedule_entry& a, const schedule_entry& b) { return a.id < b.id; });
    detail::attach_flags(g, s);
    std::stable_sort(s.partitions.begin(), s.partitions.end(),
                     [](const auto& a, const auto& b) { return exec_time(a) > exec_time(b); });

    if (total_cycle_time(s) > total_cycle_time(incoming)) s = std::move(incoming);
}

// Every stabilizer's gates inside one partition, layer-packed: each member
// keeps its standalone circuit and is shifted right as a whole until no layer
// touches a busy qubit.  Shifting preserves hook protection and every
// symplectic property of the member circuits.
struct partition_block {
    std::vector<std::vector<gate>> layers;
    std::vector<std::pair<int, std::vector<int>>> tree_meas;  // entry id -> bridge ids
    std::vector<std::pair<int, int>> flag_meas;               // entry id -> flag id
};

inline partition_block merge_partition(const device_graph& g,
                                       const std::vector<schedule_entry>& part) {
    partition_block blk;
    std::vector<std::set<int>> busy;

    for (const auto& e : part) {
        measurement_circuit c = gen_measurement_circuit(g, e.stab_type, e.tree(), e.flag);
        std::vector<std::vector<int>> touch(c.layers.size());
        for (size_t li = 0; li < c.layers.size(); ++li)
            for (const auto& gt : c.layers[li]) {
                touch[li].push_back(gt.q0);
                if (gt.kind == gate_kind::cnot) touch[li].push_back(gt.q1);
            }

        size_t start = 0;
        for (;; ++start) {
            bool clear = true;
            for (size_t li = 0; clear && li < touch.size(); ++li) {
                if (start + li >= busy.size()) break;
                for (int q : touch[li])
                    if (busy[start + li].count(q)) {
                        clear = false;
                        break;
                    }
            }
            if (clear) break;
        }

        if (busy.size() < start + c.layers.size()) {
            busy.resize(start + c.layers.size());
            blk.layers.resize(start + c.layers.size());
        }
        for (size_t li = 0; li < c.layers.size(); ++li) {
            for (int q : touch[li]) busy[start + li].insert(q);
            auto& dst = blk.layers[start + li];
            dst.insert(dst.end(), c.layers[li].begin(), c.layers[li].end());
        }

        std::vector<int> meas;
        for (const point& p : e.tree().bridge_nodes())
            meas.push_back(detail::qubit_id(g, p, "tree qubit"));
        blk.tree_meas.push_back({e.id, meas});
        if (e.flag) blk.flag_meas.push_back({e.id, detail::qubit_id(g, e.flag->flag, "flag qubit")});
    }

    for (auto& layer : blk.layers)
        std::sort(layer.begin(), layer.end(), [](const gate& a, const gate& b) {
            if (a.q0 != b.q0) return a.q0 < b.q0;
            return a.q1 < b.q1;
        });
    return blk;
}

inline std::string schedule_to_string(const device_graph& g, const measurement_schedule& s) {
    std::string out;
    bool first = true;
    for (const auto& part : s.partitions) {
        if (part.empty()) continue;
        partition_block blk = merge_partition(g, part);
        for (const auto& layer : blk.layers) {
            if (!first) out += "TICK\n";
            first = false;
            for (const auto& gt : layer) {
                switch (gt.kind) {
                    case gate_kind::reset: out += "R " + std::to_string(gt.q0) + "\n"; break;
                    case gate_kind::hadamard: out += "H " + std::to_string(gt.q0) + "\n"; break;
                    case gate_kind::cnot:
                        out += "CX " + std::to_string(gt.q0) + " " + std::to_string(gt.q1) + "\n";
                        break;
                    case gate_kind::measure: out += "M " + std::to_string(gt.q0) + "\n"; break;
                }
            }
        }
    }
    return out;
}

inline nlohmann::ordered_json schedule_to_json(const measurement_schedule& s) {
    nlohmann::ordered_json j;
    j["partitions"] = nlohmann::ordered_json::array();
    for (const auto& part : s.partitions) {
        nlohmann::ordered_json jp = nlohmann::ordered_json::array();
        for (const auto& e : part) {
            nlohmann::ordered_json je;
            je["id"] = e.id;
            je["type"] = std::string(1, e.stab_type);
            je["tree"] = nlohmann::ordered_json::array();
            for (const point& p : e.tree().bridge_nodes())
                je["tree"].push_back({{"x", p.x}, {"y", p.y}});
            je["exec"] = e.exec();
            if (e.flag) {
                je["flag"] = {{"x", e.flag->flag.x}, {"y", e.flag->flag.y}};
                je["flag_host"] = {{"x", e.flag->host.x}, {"y", e.flag->host.y}};
            }
            jp.push_back(std::move(je));
        }
        j["partitions"].push_back(std::move(jp));
    }
    j["total_cycle_time"] = total_cycle_time(s);
    return j;
}

// Qubits a schedule touches beyond the layout itself: flag spots.
inline std::set<point, point_yx_less> flag_points(const measurement_schedule& s) {
    std::set<point, point_yx_less> pts;
    for (const auto& part : s.partitions)
        for (const auto& e : part)
            if (e.flag) pts.insert(e.flag->flag);
    return pts;
}

}  // namespace scsynth
