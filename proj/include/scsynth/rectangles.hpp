#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "scsynth/device.hpp"
#include "scsynth/errors.hpp"
#include "scsynth/geometry.hpp"

namespace scsynth {

enum class allocation_mode { pair3, center4 };

inline std::string to_string(allocation_mode m) {
    return m == allocation_mode::pair3 ? "pair3" : "center4";
}

inline allocation_mode allocation_mode_from_string(const std::string& s) {
    if (s == "pair3") return allocation_mode::pair3;
    if (s == "center4") return allocation_mode::center4;
    throw parse_error("unknown allocation mode '" + s + "' (expected pair3 or center4)");
}

struct bridge_rectangle {
    std::vector<int> anchors;  // primary anchor first
    rect bounds;

    std::vector<int> contained_qubits(const device_graph& g) const {
        std::vector<int> out;
        for (const auto& q : g.qubits)
            if (bounds.contains(q.pos())) out.push_back(q.id);
        return out;
    }
};

// Qubits of degree >= 3, top-left first.
inline std::vector<int> high_degree_nodes(const device_graph& g) {
    std::vector<int> ids;
    for (const auto& q : g.qubits)
        if (g.degree(q.id) >= 3) ids.push_back(q.id);
    std::sort(ids.begin(), ids.end(),
              [&](int a, int b) { return yx_less(g.pos(a), g.pos(b)); });
    return ids;
}

inline std::vector<int> bfs_distances(const device_graph& g, int src) {
    std::vector<int> dist(static_cast<size_t>(g.size()), -1);
    std::queue<int> q;
    dist[static_cast<size_t>(src)] = 0;
    q.push(src);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int w : g.neighbors(v)) {
            if (dist[static_cast<size_t>(w)] < 0) {
                dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(v)] + 1;
                q.push(w);
            }
        }
    }
    return dist;
}

// Minimal rectangle holding the primary anchor's closed neighborhood plus the
// partner anchor. Bounding the partner's neighborhood as well would make
// separately anchored rectangles around one hub qubit overlap unavoidably.
inline bridge_rectangle make_pair_rectangle(const device_graph& g, int anchor, int partner) {
    std::vector<point> pts{g.pos(anchor), g.pos(partner)};
    for (int n : g.neighbors(anchor)) pts.push_back(g.pos(n));
    return bridge_rectangle{{anchor, partner}, bounds_of(pts.begin(), pts.end())};
}

inline bridge_rectangle make_single_rectangle(const device_graph& g, int anchor) {
    std::vector<point> pts{g.pos(anchor)};
    for (int n : g.neighbors(anchor)) pts.push_back(g.pos(n));
    return bridge_rectangle{{anchor}, bounds_of(pts.begin(), pts.end())};
}

inline std::vector<bridge_rectangle> build_bridge_rectangles(const device_graph& g,
                                                             allocation_mode mode) {
    std::vector<int> high = high_degree_nodes(g);
    if (high.empty())
        throw infeasible_error("device '" + g.name + "': no qubits of degree >= 3");
    std::vector<bridge_rectangle> out;
    for (int a : high) {
        if (g.degree(a) >= 4) {
            out.push_back(make_single_rectangle(g, a));
            continue;
        }
        if (mode == allocation_mode::center4) continue;
        // degree-3 anchor: pair with the closest other high-degree node
        std::vector<int> dist = bfs_distances(g, a);
        int best = -1;
        for (int b : high) {
            if (b == a || dist[static_cast<size_t>(b)] < 0) continue;
            if (best < 0 || dist[static_cast<size_t>(b)] < dist[static_cast<size_t>(best)])
                best = b;
        }
        if (best < 0) continue;
        out.push_back(make_pair_rectangle(g, a, best));
    }
    // drop later duplicates with identical bounds
    std::vector<bridge_rectangle> dedup;
    for (auto& r : out) {
        bool seen = false;
        for (const auto& kept : dedup) seen = seen || kept.bounds == r.bounds;
        if (!seen) dedup.push_back(std::move(r));
    }
    if (dedup.empty())
        throw infeasible_error("device '" + g.name + "': no bridge rectangles in " +
                               to_string(mode) + " mode");
    return dedup;
}

// Zero shared area; touching along a boundary line is fine, identity is not.
inline bool compatible(const bridge_rectangle& r1, const bridge_rectangle& r2) {
    if (r1.bounds == r2.bounds) return false;
    long long w = std::max(0, std::min(r1.bounds.x1, r2.bounds.x1) -
                                  std::max(r1.bounds.x0, r2.bounds.x0));
    long long h = std::max(0, std::min(r1.bounds.y1, r2.bounds.y1) -
                                  std::max(r1.bounds.y0, r2.bounds.y0));
    return w * h == 0;
}

// Boundary placement rule for a data qubit wedged to the right of a rectangle
// above and a rectangle below: x at least the larger right edge, y between the
// upper rectangle's bottom edge and the lower rectangle's top edge.
inline std::vector<int> boundary_data_candidates(const device_graph& g,
                                                 const bridge_rectangle& above,
                                                 const bridge_rectangle& below) {
    int min_x = std::max(above.bounds.x1, below.bounds.x1);
    int y_lo = above.bounds.y1;
    int y_hi = below.bounds.y0;
    std::vector<int> out;
    for (const auto& q : g.qubits)
        if (q.x >= min_x && q.y >= y_lo && q.y <= y_hi) out.push_back(q.id);
    std::sort(out.begin(), out.end(),
              [&](int a, int b) { return yx_less(g.pos(a), g.pos(b)); });
    return out;
}

}  // namespace scsynth
