#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scsynth/device.hpp"
#include "scsynth/errors.hpp"
#include "scsynth/geometry.hpp"

namespace scsynth {

// Search region of one stabilizer: the closed rectangle, its own data qubits
// (usable as path endpoints only), and foreign qubits that may not be touched.
struct stab_region {
    rect bounds;
    std::vector<point> data;
    std::unordered_set<point> blocked;

    bool is_data(const point& p) const {
        return std::find(data.begin(), data.end(), p) != data.end();
    }
};

using tree_edge = std::pair<point, point>;

inline tree_edge make_tree_edge(point a, point b) {
    return yx_less(a, b) ? tree_edge{a, b} : tree_edge{b, a};
}

struct bridge_tree {
    std::vector<point> nodes;       // sorted (y,x), data included
    std::vector<tree_edge> edges;   // normalized, sorted
    std::vector<point> data;        // leaves, sorted (y,x)
    point syndrome{};

    int edge_count() const { return static_cast<int>(edges.size()); }

    std::vector<point> bridge_nodes() const {
        std::vector<point> out;
        for (const auto& n : nodes)
            if (std::find(data.begin(), data.end(), n) == data.end()) out.push_back(n);
        return out;
    }

    int bridge_count() const { return static_cast<int>(nodes.size() - data.size()); }

    std::vector<point> tree_neighbors(const point& p) const {
        std::vector<point> out;
        for (const auto& [a, b] : edges) {
            if (a == p) out.push_back(b);
            if (b == p) out.push_back(a);
        }
        std::sort(out.begin(), out.end(), point_yx_less{});
        return out;
    }

    friend bool operator==(const bridge_tree& a, const bridge_tree& b) {
        return a.edges == b.edges && a.data == b.data;
    }
};

namespace detail {

// Region-restricted adjacency; neighbor lists sorted (y,x) for determinism.
struct region_graph {
    std::vector<point> nodes;  // sorted (y,x)
    std::map<point, std::vector<point>, point_yx_less> adj;
    const stab_region* region = nullptr;

    bool usable(const point& p) const { return adj.count(p) != 0; }
};

inline region_graph build_region_graph(const device_graph& g, const stab_region& region) {
    region_graph rg;
    rg.region = &region;
    for (const auto& q : g.qubits) {
        point p = q.pos();
        if (!region.bounds.contains(p) || region.blocked.count(p)) continue;
        rg.nodes.push_back(p);
        rg.adj[p] = {};
    }
    std::sort(rg.nodes.begin(), rg.nodes.end(), point_yx_less{});
    for (const auto& p : rg.nodes) {
        auto id = g.at(p);
        std::vector<point> nb;
        for (int w : g.neighbors(*id)) {
            point pw = g.pos(w);
            if (rg.adj.count(pw)) nb.push_back(pw);
        }
        std::sort(nb.begin(), nb.end(), point_yx_less{});
        rg.adj[p] = std::move(nb);
    }
    return rg;
}

// BFS with data qubits as sinks: a path may start or end on a data qubit but
// never run through one. Parent choice is deterministic (FIFO + sorted lists).
inline std::map<point, point, point_yx_less> bfs_parents(const region_graph& rg,
                                                         const point& src) {
    std::map<point, point, point_yx_less> parent;
    if (!rg.usable(src)) return parent;
    std::deque<point> queue{src};
    parent.emplace(src, src);
    while (!queue.empty()) {
        point v = queue.front();
        queue.pop_front();
        if (v != src && rg.region->is_data(v)) continue;
        for (const point& w : rg.adj.at(v)) {
            if (parent.count(w)) continue;
            parent.emplace(w, v);
            queue.push_back(w);
        }
    }
    return parent;
}

inline std::optional<std::vector<point>> bfs_path(const region_graph& rg, const point& src,
                                                  const point& dst) {
    auto parent = bfs_parents(rg, src);
    if (!parent.count(dst)) return std::nullopt;
    std::vector<point> path{dst};
    while (path.back() != src) path.push_back(parent.at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
}

// Drop dangling non-data leaves; a stray root or connector stub is never part
// of a minimal tree.
inline void trim_tree(std::set<tree_edge>& edges, const stab_region& region) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<point, int, point_yx_less> deg;
        for (const auto& [a, b] : edges) {
            deg[a]++;
            deg[b]++;
        }
        for (auto it = edges.begin(); it != edges.end();) {
            const auto& [a, b] = *it;
            if ((deg[a] == 1 && !region.is_data(a)) || (deg[b] == 1 && !region.is_data(b))) {
                it = edges.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
    }
}

inline std::optional<bridge_tree> tree_from_edges(std::set<tree_edge> edges,
                                                  const stab_region& region) {
    trim_tree(edges, region);
    if (edges.empty()) return std::nullopt;
    std::set<point, point_yx_less> node_set;
    for (const auto& [a, b] : edges) {
        node_set.insert(a);
        node_set.insert(b);
    }
    // must be a tree containing every data qubit as a leaf
    if (edges.size() + 1 != node_set.size()) return std::nullopt;
    std::map<point, int, point_yx_less> deg;
    for (const auto& [a, b] : edges) {
        deg[a]++;
        deg[b]++;
    }
    for (const auto& d : region.data) {
        if (!node_set.count(d)) return std::nullopt;
        if (deg[d] != 1) return std::nullopt;
    }
    // at least one bridge qubit must exist to host the syndrome
    bool has_bridge = false;
    for (const auto& n : node_set)
        if (!region.is_data(n)) {
            has_bridge = true;
            break;
        }
    if (!has_bridge) return std::nullopt;
    bridge_tree t;
    t.nodes.assign(node_set.begin(), node_set.end());
    t.edges.assign(edges.begin(), edges.end());
    t.data = region.data;
    std::sort(t.data.begin(), t.data.end(), point_yx_less{});
    return t;
}

inline point tree_center(const bridge_tree& t, const stab_region& region) {
    std::map<point, std::vector<point>, point_yx_less> adj;
    for (const auto& [a, b] : t.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    point best{};
    int best_ecc = std::numeric_limits<int>::max();
    bool found = false;
    for (const auto& n : t.nodes) {
        if (region.is_data(n)) continue;
        // BFS inside the tree
        std::map<point, int, point_yx_less> dist;
        std::deque<point> queue{n};
        dist[n] = 0;
        int ecc = 0;
        while (!queue.empty()) {
            point v = queue.front();
            queue.pop_front();
            ecc = std::max(ecc, dist[v]);
            for (const point& w : adj[v])
                if (!dist.count(w) && w != n) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
        }
        if (!found || ecc < best_ecc || (ecc == best_ecc && yx_less(n, best))) {
            best = n;
            best_ecc = ecc;
            found = true;
        }
    }
    return best;
}

inline void keep_minimal(std::vector<bridge_tree>& trees) {
    if (trees.empty()) return;
    int best = std::numeric_limits<int>::max();
    for (const auto& t : trees) best = std::min(best, t.edge_count());
    std::vector<bridge_tree> out;
    for (auto& t : trees)
        if (t.edge_count() == best) out.push_back(std::move(t));
    trees = std::move(out);
}

inline void dedup_and_sort(std::vector<bridge_tree>& trees) {
    std::sort(trees.begin(), trees.end(), [](const bridge_tree& a, const bridge_tree& b) {
        auto key = [](const bridge_tree& t) {
            std::vector<std::array<int, 2>> k;
            for (const auto& n : t.nodes) k.push_back({n.y, n.x});
            return k;
        };
        auto ka = key(a), kb = key(b);
        if (ka != kb) return ka < kb;
        return a.edges < b.edges;
    });
    trees.erase(std::unique(trees.begin(), trees.end()), trees.end());
}

constexpr int candidate_cap = 32;

}  // namespace detail

namespace detail {

inline std::optional<bridge_tree> star_tree_in(const region_graph& rg,
                                               const stab_region& region, const point& root) {
    if (!rg.usable(root) || region.is_data(root)) return std::nullopt;
    auto parent = bfs_parents(rg, root);
    std::set<tree_edge> edges;
    for (const auto& d : region.data) {
        if (!parent.count(d)) return std::nullopt;
        point v = d;
        while (v != root) {
            point p = parent.at(v);
            edges.insert(make_tree_edge(v, p));
            v = p;
        }
    }
    auto t = tree_from_edges(std::move(edges), region);
    if (t) t->syndrome = tree_center(*t, region);
    return t;
}

}  // namespace detail

// Star method: for one root, the union of canonical shortest root->data paths.
inline std::optional<bridge_tree> star_tree_from(const device_graph& g,
                                                 const stab_region& region, const point& root) {
    detail::region_graph rg = detail::build_region_graph(g, region);
    return detail::star_tree_in(rg, region, root);
}

inline std::vector<bridge_tree> star_trees(const device_graph& g, const stab_region& region) {
    detail::region_graph rg = detail::build_region_graph(g, region);
    std::vector<bridge_tree> out;
    for (const auto& root : rg.nodes) {
        if (region.is_data(root)) continue;
        auto t = detail::star_tree_in(rg, region, root);
        if (t) out.push_back(std::move(*t));
    }
    if (out.empty())
        throw infeasible_error("no star bridge tree spans the data qubits in this rectangle");
    detail::keep_minimal(out);
    detail::dedup_and_sort(out);
    if (out.size() > detail::candidate_cap) out.resize(detail::candidate_cap);
    for (auto& t : out) t.syndrome = detail::tree_center(t, region);
    return out;
}

// Branching method: pair the data qubits, connect each pair with a shortest
// path, then connect the two paths with a shortest bridge-to-bridge connector.
inline std::vector<bridge_tree> branching_trees(const device_graph& g,
                                                const stab_region& region) {
    detail::region_graph rg = detail::build_region_graph(g, region);
    std::vector<point> d = region.data;
    std::sort(d.begin(), d.end(), point_yx_less{});
    std::vector<bridge_tree> out;

    if (d.size() == 2) {
        // degenerate branching: the pair path itself
        auto path = detail::bfs_path(rg, d[0], d[1]);
        if (path) {
            std::set<tree_edge> edges;
            for (size_t i = 0; i + 1 < path->size(); ++i)
                edges.insert(make_tree_edge((*path)[i], (*path)[i + 1]));
            auto t = detail::tree_from_edges(std::move(edges), region);
            if (t) {
                t->syndrome = detail::tree_center(*t, region);
                out.push_back(std::move(*t));
            }
        }
        if (out.empty())
            throw infeasible_error("weight-2 data qubits are disconnected in this rectangle");
        return out;
    }
    if (d.size() != 4)
        throw validation_error("branching method expects 2 or 4 data qubits");

    const std::array<std::array<int, 4>, 3> pairings{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    int best_len = std::numeric_limits<int>::max();
    std::vector<std::pair<std::vector<point>, std::vector<point>>> best_paths;
    for (const auto& pr : pairings) {
        auto p1 = detail::bfs_path(rg, d[static_cast<size_t>(pr[0])],
                                   d[static_cast<size_t>(pr[1])]);
        auto p2 = detail::bfs_path(rg, d[static_cast<size_t>(pr[2])],
                                   d[static_cast<size_t>(pr[3])]);
        if (!p1 || !p2) continue;
        int len = static_cast<int>(p1->size() + p2->size()) - 2;
        if (len < best_len) {
            best_len = len;
            best_paths.clear();
        }
        if (len == best_len) best_paths.emplace_back(std::move(*p1), std::move(*p2));
    }
    for (const auto& [path1, path2] : best_paths) {
        std::set<tree_edge> edges;
        for (size_t i = 0; i + 1 < path1.size(); ++i)
            edges.insert(make_tree_edge(path1[i], path1[i + 1]));
        for (size_t i = 0; i + 1 < path2.size(); ++i)
            edges.insert(make_tree_edge(path2[i], path2[i + 1]));

        // shortest connector between the two paths' bridge nodes
        std::set<point, point_yx_less> sources, targets;
        for (const auto& p : path1)
            if (!region.is_data(p)) sources.insert(p);
        for (const auto& p : path2)
            if (!region.is_data(p)) targets.insert(p);
        if (sources.empty() || targets.empty()) continue;

        bool touching = false;
        for (const auto& s : sources) touching = touching || targets.count(s);
        if (!touching) {
            // multi-source BFS from path1 toward path2, bridge nodes only
            std::map<point, point, point_yx_less> parent;
            std::deque<point> queue;
            for (const auto& s : sources) {
                parent.emplace(s, s);
                queue.push_back(s);
            }
            std::optional<point> hit;
            while (!queue.empty() && !hit) {
                point v = queue.front();
                queue.pop_front();
                for (const point& w : rg.adj.at(v)) {
                    if (region.is_data(w) || parent.count(w)) continue;
                    parent.emplace(w, v);
                    if (targets.count(w)) {
                        hit = w;
                        break;
                    }
                    queue.push_back(w);
                }
            }
            if (!hit) continue;
            point v = *hit;
            while (!sources.count(v)) {
                point p = parent.at(v);
                edges.insert(make_tree_edge(v, p));
                v = p;
            }
        }

        // the union can carry a cycle when the connector closes one; keep a
        // spanning tree chosen by BFS from the smallest node
        std::map<point, std::vector<point>, point_yx_less> uadj;
        for (const auto& [a, b] : edges) {
            uadj[a].push_back(b);
            uadj[b].push_back(a);
        }
        for (auto& [p, nb] : uadj) std::sort(nb.begin(), nb.end(), point_yx_less{});
        std::set<tree_edge> tree_edges;
        std::set<point, point_yx_less> visited;
        std::deque<point> queue;
        point start = uadj.begin()->first;
        for (const auto& [p, nb] : uadj)
            if (!region.is_data(p)) {
                start = p;
                break;
            }
        visited.insert(start);
        queue.push_back(start);
        while (!queue.empty()) {
            point v = queue.front();
            queue.pop_front();
            if (v != start && region.is_data(v)) continue;
            for (const point& w : uadj[v]) {
                if (visited.count(w)) continue;
                visited.insert(w);
                tree_edges.insert(make_tree_edge(v, w));
                queue.push_back(w);
            }
        }
        if (visited.size() != uadj.size()) continue;

        auto t = detail::tree_from_edges(std::move(tree_edges), region);
        if (t) {
            t->syndrome = detail::tree_center(*t, region);
            out.push_back(std::move(*t));
        }
    }
    if (out.empty())
        throw infeasible_error("no branching bridge tree spans the data qubits");
    detail::keep_minimal(out);
    detail::dedup_and_sort(out);
    if (out.size() > detail::candidate_cap) out.resize(detail::candidate_cap);
    return out;
}

inline std::vector<bridge_tree> find_bridge_trees(const device_graph& g,
                                                  const stab_region& region) {
    std::vector<bridge_tree> all;
    try {
        auto s = star_trees(g, region);
        all.insert(all.end(), s.begin(), s.end());
    } catch (const infeasible_error&) {
    }
    try {
        auto b = branching_trees(g, region);
        all.insert(all.end(), b.begin(), b.end());
    } catch (const infeasible_error&) {
    }
    if (all.empty())
        throw infeasible_error("no bridge tree spans the data qubits in this rectangle");
    detail::keep_minimal(all);
    detail::dedup_and_sort(all);
    if (all.size() > detail::candidate_cap) all.resize(detail::candidate_cap);
    for (auto& t : all) t.syndrome = detail::tree_center(t, region);
    return all;
}

// Exact minimum Steiner tree size via the Dreyfus-Wagner dynamic program on
// the bridge subgraph, with each data qubit contributing one pendant edge to
// any of its in-region neighbors. Exact for any region with <= 8 data qubits.
inline int steiner_oracle(const device_graph& g, const stab_region& region) {
    detail::region_graph rg = detail::build_region_graph(g, region);
    std::vector<point> bridge_pts;
    for (const auto& p : rg.nodes)
        if (!region.is_data(p)) bridge_pts.push_back(p);
    int n = static_cast<int>(bridge_pts.size());
    if (n == 0) throw infeasible_error("rectangle has no bridge qubits");
    if (region.data.size() > 8)
        throw validation_error("steiner oracle supports at most 8 data qubits");
    std::map<point, int, point_yx_less> idx;
    for (int i = 0; i < n; ++i) idx[bridge_pts[static_cast<size_t>(i)]] = i;

    int t = static_cast<int>(region.data.size());
    const int inf = std::numeric_limits<int>::max() / 4;
    std::vector<std::vector<int>> dp(static_cast<size_t>(1 << t),
                                     std::vector<int>(static_cast<size_t>(n), inf));
    for (int i = 0; i < t; ++i) {
        bool any = false;
        for (const point& nb : rg.adj.at(region.data[static_cast<size_t>(i)])) {
            if (region.is_data(nb)) continue;
            dp[static_cast<size_t>(1 << i)][static_cast<size_t>(idx[nb])] = 1;
            any = true;
        }
        if (!any)
            throw infeasible_error("data qubit has no usable neighbor inside the rectangle");
    }

    for (int mask = 1; mask < (1 << t); ++mask) {
        auto& cur = dp[static_cast<size_t>(mask)];
        for (int sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
            if (sub < (mask ^ sub)) continue;  // each split once
            const auto& a = dp[static_cast<size_t>(sub)];
            const auto& b = dp[static_cast<size_t>(mask ^ sub)];
            for (int v = 0; v < n; ++v)
                cur[static_cast<size_t>(v)] = std::min(
                    cur[static_cast<size_t>(v)],
                    a[static_cast<size_t>(v)] + b[static_cast<size_t>(v)]);
        }
        // unit-weight Dijkstra pass over the bridge subgraph
        std::set<std::pair<int, int>> pq;
        for (int v = 0; v < n; ++v)
            if (cur[static_cast<size_t>(v)] < inf) pq.insert({cur[static_cast<size_t>(v)], v});
        while (!pq.empty()) {
            auto [dv, v] = *pq.begin();
            pq.erase(pq.begin());
            if (dv > cur[static_cast<size_t>(v)]) continue;
            for (const point& w : rg.adj.at(bridge_pts[static_cast<size_t>(v)])) {
                if (region.is_data(w)) continue;
                int wi = idx[w];
                if (dv + 1 < cur[static_cast<size_t>(wi)]) {
                    cur[static_cast<size_t>(wi)] = dv + 1;
                    pq.insert({dv + 1, wi});
                }
            }
        }
    }

    int best = inf;
    for (int v = 0; v < n; ++v)
        best = std::min(best, dp[static_cast<size_t>((1 << t) - 1)][static_cast<size_t>(v)]);
    if (best >= inf)
        throw infeasible_error("data qubits are disconnected inside the rectangle");
    return best;
}

// Proposition 1: a weight-4 bridge tree needs one branch node of tree-degree 4
// or two of tree-degree 3.
inline bool prop1_holds(const bridge_tree& t) {
    if (t.data.size() != 4) return true;
    std::map<point, int, point_yx_less> deg;
    for (const auto& [a, b] : t.edges) {
        deg[a]++;
        deg[b]++;
    }
    int deg4 = 0, deg3 = 0;
    for (const auto& [p, d] : deg) {
        if (d >= 4) ++deg4;
        else if (d == 3) ++deg3;
    }
    return deg4 >= 1 || deg3 >= 2;
}

// Necessary condition from Proposition 1, checked on the region instead of a
// concrete tree: some bridge qubit must be able to host degree 4, or two must
// host degree 3, counting region-internal adjacency.
inline bool prop1_region_ok(const device_graph& g, const stab_region& region) {
    if (region.data.size() != 4) return true;
    detail::region_graph rg = detail::build_region_graph(g, region);
    int deg4 = 0, deg3 = 0;
    for (const auto& p : rg.nodes) {
        if (region.is_data(p)) continue;
        size_t d = rg.adj.at(p).size();
        if (d >= 4) ++deg4;
        else if (d == 3) ++deg3;
    }
    return deg4 >= 1 || deg3 >= 2;
}

// Entangling schedule of the bridge qubits: CNOTs cascade outward from the
// syndrome qubit, one child at a time per parent.  Edges toward data qubits
// are not part of the cascade.  span is the number of cascade layers.
struct cascade_plan {
    std::map<tree_edge, int> layer;
    // same edges oriented away from the syndrome, in layer order
    std::vector<std::pair<point, point>> flow;
    int span = 0;
};

inline cascade_plan cascade_layers(const bridge_tree& t) {
    std::map<point, std::vector<point>, point_yx_less> adj;
    for (const auto& [a, b] : t.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::set<point, point_yx_less> data_set(t.data.begin(), t.data.end(), point_yx_less{});
    cascade_plan plan;
    // DFS from the syndrome; children ordered by (x, y) so layers are stable
    std::vector<std::pair<point, int>> stack{{t.syndrome, 0}};
    std::set<point, point_yx_less> seen{t.syndrome};
    while (!stack.empty()) {
        auto [u, lu] = stack.back();
        stack.pop_back();
        std::vector<point> kids;
        for (const point& v : adj[u])
            if (!seen.count(v) && !data_set.count(v)) kids.push_back(v);
        std::sort(kids.begin(), kids.end(), xy_less);
        int slot = lu;
        for (const point& v : kids) {
            ++slot;
            plan.layer[make_tree_edge(u, v)] = slot;
            plan.flow.push_back({u, v});
            plan.span = std::max(plan.span, slot);
            seen.insert(v);
            stack.push_back({v, slot});
        }
    }
    std::sort(plan.flow.begin(), plan.flow.end(),
              [&](const auto& a, const auto& b) {
                  int la = plan.layer.at(make_tree_edge(a.first, a.second));
                  int lb = plan.layer.at(make_tree_edge(b.first, b.second));
                  if (la != lb) return la < lb;
                  return yx_less(a.second, b.second);
              });
    return plan;
}

// Circuit depth of one stabilizer measurement.  X-type syndromes need basis
// changes; Z-type trees of more than one bridge carry them on the extra
// bridge qubits, a bare Z syndrome skips both layers.  Flag qubits do not add
// depth: their CNOTs sit in the unused data slots.
inline int measure_depth(char stab_type, const bridge_tree& t) {
    int span = cascade_layers(t).span;
    int base = (t.data.size() == 4 ? 8 : 6) + 2 * span;
    if (stab_type == 'Z' && t.bridge_count() == 1) base -= 2;
    return base;
}

// Proposition 2 bound: half the sum of pairwise in-region data distances.
inline double prop2_bound(const device_graph& g, const stab_region& region) {
    detail::region_graph rg = detail::build_region_graph(g, region);
    double total = 0;
    for (size_t i = 0; i < region.data.size(); ++i) {
        auto parent = detail::bfs_parents(rg, region.data[i]);
        for (size_t j = i + 1; j < region.data.size(); ++j) {
            point dst = region.data[j];
            if (!parent.count(dst)) return std::numeric_limits<double>::infinity();
            int len = 0;
            point v = dst;
            while (v != region.data[i]) {
                v = parent.at(v);
                ++len;
            }
            total += len;
        }
    }
    return total / 2.0;
}

}  // namespace scsynth
