#pragma once

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsynth/bridge.hpp"
#include "scsynth/device.hpp"
#include "scsynth/errors.hpp"
#include "scsynth/geometry.hpp"
#include "scsynth/rectangles.hpp"

namespace scsynth {

// One stabilizer of a distance-d rotated surface code placed on the device.
// Boundary stabilizers are weight 2 and carry the virtual plaquette position:
// row -1 (top), row d-1 (bottom), col -1 (left) or col d-1 (right).
struct syndrome_rect {
    int row = 0;
    int col = 0;
    char stab_type = 'X';
    bridge_rectangle base;                 // anchors inside the search bounds
    std::vector<point> data_pts;           // sorted (y,x)
    std::map<char, int> roles;             // 'a'..'d' -> qubit id; weight-2 uses 'b','c'
    stab_region region;
    std::vector<bridge_tree> candidates;   // minimal trees, deterministic order
    int tree_index = 0;

    int weight() const { return static_cast<int>(data_pts.size()); }
    bool boundary() const { return weight() == 2; }

    const bridge_tree& tree() const {
        return candidates[static_cast<size_t>(tree_index)];
    }
};

struct data_layout {
    std::string device;
    int distance = 0;
    allocation_mode mode = allocation_mode::pair3;
    std::map<std::pair<int, int>, int> data_map;  // (row, col) -> qubit id
    std::vector<syndrome_rect> rects;             // row-major by (row, col)

    // data qubits plus every chosen tree node, sorted (y,x)
    std::vector<point> used_points() const {
        std::set<point, point_yx_less> used;
        for (const auto& r : rects) {
            for (const auto& p : r.data_pts) used.insert(p);
            for (const auto& n : r.tree().nodes) used.insert(n);
        }
        return {used.begin(), used.end()};
    }
};

namespace detail {

struct stab_site {
    int row = 0;
    int col = 0;
    int weight = 4;
    char type = 'X';
};

// Plaquette grid of the rotated code in row-major order. Interior plaquettes
// are X-type when row+col is even; boundary pairs alternate so that every
// data row and column ends in exactly one weight-2 stabilizer.
inline std::vector<stab_site> stabilizer_sites(int d) {
    std::vector<stab_site> out;
    for (int c = 0; c < d - 1; ++c)
        if (c % 2 == 1) out.push_back({-1, c, 2, 'X'});
    for (int r = 0; r < d - 1; ++r) {
        if (r % 2 == 0) out.push_back({r, -1, 2, 'Z'});
        for (int c = 0; c < d - 1; ++c)
            out.push_back({r, c, 4, (r + c) % 2 == 0 ? 'X' : 'Z'});
        if (r % 2 == 1) out.push_back({r, d - 1, 2, 'Z'});
    }
    for (int c = 0; c < d - 1; ++c)
        if (c % 2 == 0) out.push_back({d - 1, c, 2, 'X'});
    return out;
}

// Logical data coordinates covered by one stabilizer site.
inline std::vector<std::pair<int, int>> site_data(const stab_site& s, int d) {
    if (s.weight == 4)
        return {{s.row, s.col}, {s.row, s.col + 1}, {s.row + 1, s.col}, {s.row + 1, s.col + 1}};
    if (s.row == -1) return {{0, s.col}, {0, s.col + 1}};
    if (s.row == d - 1) return {{d - 1, s.col}, {d - 1, s.col + 1}};
    if (s.col == -1) return {{s.row, 0}, {s.row + 1, 0}};
    return {{s.row, d - 1}, {s.row + 1, d - 1}};
}

// CNOT slot roles. a is the first corner in (y,x) order, d the last, b the
// leftmost of the middle two. Weight-2 stabilizers use the middle slots only.
inline std::map<char, point> role_points(std::vector<point> q) {
    std::sort(q.begin(), q.end(), point_yx_less{});
    std::map<char, point> roles;
    if (q.size() == 2) {
        roles['b'] = q[0];
        roles['c'] = q[1];
        return roles;
    }
    roles['a'] = q[0];
    roles['d'] = q[3];
    if (q[1].x <= q[2].x) {
        roles['b'] = q[1];
        roles['c'] = q[2];
    } else {
        roles['b'] = q[2];
        roles['c'] = q[1];
    }
    return roles;
}

struct step_family {
    point u;  // column step
    point v;  // row step
};

// Candidate lattice generators. pair3 codes sit on axis-aligned sublattices,
// center4 codes on diagonal ones so that every plaquette has a central anchor.
inline std::vector<step_family> step_families(allocation_mode mode) {
    static const std::vector<point> axis{{2, 0}, {4, 0}, {6, 0}, {0, 2}, {0, 4}, {0, 6}};
    static const std::vector<point> diag{{2, 2}, {-2, 2}, {2, -2}};
    std::vector<point> steps;
    if (mode == allocation_mode::pair3) {
        steps = axis;
        steps.insert(steps.end(), diag.begin(), diag.end());
    } else {
        steps = diag;
    }
    std::vector<step_family> out;
    for (const point& u : steps)
        for (const point& v : steps) {
            long cross = static_cast<long>(u.x) * v.y - static_cast<long>(u.y) * v.x;
            if (cross != 0) out.push_back({u, v});
        }
    return out;
}

inline rect device_bbox(const device_graph& g) {
    rect r{g.qubits[0].x, g.qubits[0].y, g.qubits[0].x, g.qubits[0].y};
    for (const auto& q : g.qubits) r.grow_to(q.pos());
    return r;
}

inline rect clip(const rect& r, const rect& to) {
    return rect{std::max(r.x0, to.x0), std::max(r.y0, to.y0), std::min(r.x1, to.x1),
                std::min(r.y1, to.y1)};
}

inline stab_region make_region(const rect& bounds, const std::vector<point>& own,
                               const std::set<point, point_yx_less>& all_data) {
    stab_region region;
    region.bounds = bounds;
    region.data = own;
    std::sort(region.data.begin(), region.data.end(), point_yx_less{});
    for (const auto& p : all_data)
        if (bounds.contains(p) && !region.is_data(p)) region.blocked.insert(p);
    return region;
}

// Fast reject before the tree search: some in-bounds node must be neither
// data nor blocked.
inline bool has_free_node(const device_graph& g, const stab_region& region) {
    for (int x = region.bounds.x0; x <= region.bounds.x1; ++x)
        for (int y = region.bounds.y0; y <= region.bounds.y1; ++y) {
            point p{x, y};
            if (!g.has(p)) continue;
            if (region.is_data(p) || region.blocked.count(p)) continue;
            return true;
        }
    return false;
}

inline int fresh_nodes(const bridge_tree& t, const std::set<point, point_yx_less>& used) {
    int fresh = 0;
    for (const auto& n : t.nodes)
        if (!used.count(n)) ++fresh;
    return fresh;
}

// center4 trees must branch 4 ways out of one anchor of device degree >= 4.
inline bool is_center_star(const device_graph& g, const bridge_tree& t) {
    std::map<point, int, point_yx_less> deg;
    for (const auto& [a, b] : t.edges) {
        deg[a]++;
        deg[b]++;
    }
    for (const auto& [p, dg] : deg)
        if (dg == 4 && g.degree(*g.at(p)) >= 4) return true;
    return false;
}

struct w2_choice {
    rect bounds;
    std::vector<bridge_tree> candidates;
    int tree_index = 0;
};

// Weight-2 stabilizers search outward from the data pair: the pair's bounding
// box expanded by up to four steps per side, clipped to the device. Smallest
// tree wins; ties prefer nodes no earlier stabilizer uses, then the tightest
// expansion.
inline std::optional<w2_choice> w2_search(const device_graph& g, const std::vector<point>& own,
                                          const std::set<point, point_yx_less>& all_data,
                                          const std::set<point, point_yx_less>& used,
                                          const rect& dev_bounds) {
    rect pair_box = bounds_of(own.begin(), own.end());
    std::set<std::array<int, 4>> seen;
    std::optional<w2_choice> best;
    std::array<long, 4> best_key{};
    for (int total = 0; total <= 16; ++total)
        for (int dt = 0; dt <= 4; ++dt)
            for (int dl = 0; dl <= 4; ++dl)
                for (int db = 0; db <= 4 && dt + dl + db <= total; ++db) {
                    int dr = total - dt - dl - db;
                    if (dr < 0 || dr > 4) continue;
                    rect r = clip(pair_box.expanded(dl, dt, dr, db), dev_bounds);
                    if (!seen.insert({r.x0, r.y0, r.x1, r.y1}).second) continue;
                    stab_region region = make_region(r, own, all_data);
                    std::vector<bridge_tree> trees;
                    try {
                        trees = find_bridge_trees(g, region);
                    } catch (const infeasible_error&) {
                        continue;
                    }
                    int pick = 0;
                    int pick_fresh = -1;
                    for (size_t i = 0; i < trees.size(); ++i) {
                        int f = fresh_nodes(trees[i], used);
                        if (f > pick_fresh) {
                            pick_fresh = f;
                            pick = static_cast<int>(i);
                        }
                    }
                    std::array<long, 4> key{trees[static_cast<size_t>(pick)].edge_count(),
                                            -pick_fresh, total,
                                            ((dt * 5L + dl) * 5 + db) * 5 + dr};
                    if (!best || key < best_key) {
                        best = w2_choice{r, std::move(trees), pick};
                        best_key = key;
                    }
                }
    return best;
}

struct placement_failure {
    int progress = -1;  // sites validated before failing; -1 means no attempt
    int row = 0;
    int col = 0;
    std::string reason;
};

struct placement {
    point u, v, seed;
    std::map<std::pair<int, int>, int> data_map;
    std::vector<syndrome_rect> rects;
    // score, smaller is better: used qubits maximized first, then conflicts,
    // X-type depth, tree spread, cell skew
    std::array<long, 13> score{};
};

inline bridge_rectangle base_of(const device_graph& g, const rect& bounds) {
    bridge_rectangle base;
    base.bounds = bounds;
    for (int id : high_degree_nodes(g))
        if (bounds.contains(g.qubits[static_cast<size_t>(id)].pos())) base.anchors.push_back(id);
    return base;
}

inline std::optional<placement> try_place(const device_graph& g, int d, allocation_mode mode,
                                          const step_family& f, const point& seed,
                                          placement_failure& fail) {
    auto note = [&](int progress, int row, int col, const std::string& why) {
        if (progress > fail.progress) fail = {progress, row, col, why};
    };

    placement pl;
    pl.u = f.u;
    pl.v = f.v;
    pl.seed = seed;
    std::set<point, point_yx_less> data_set;
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
            point p{seed.x + c * f.u.x + r * f.v.x, seed.y + c * f.u.y + r * f.v.y};
            if (!g.has(p) || data_set.count(p)) {
                note(0, r, c, "no device qubit available for this data position");
                return std::nullopt;
            }
            data_set.insert(p);
            pl.data_map[{r, c}] = *g.at(p);
        }

    rect dev_bounds = device_bbox(g);
    std::set<point, point_yx_less> used = data_set;
    auto sites = stabilizer_sites(d);
    pl.rects.resize(sites.size());
    int done = 0;
    // interior rectangles claim their trees first so that boundary pairs can
    // see which qubits are still free
    for (int pass = 0; pass < 2; ++pass) {
        for (size_t si = 0; si < sites.size(); ++si) {
            const auto& s = sites[si];
            if ((pass == 0) != (s.weight == 4)) continue;
            syndrome_rect sr;
            sr.row = s.row;
            sr.col = s.col;
            sr.stab_type = s.type;
            for (const auto& [lr, lc] : site_data(s, d)) {
                int id = pl.data_map.at({lr, lc});
                sr.data_pts.push_back(g.qubits[static_cast<size_t>(id)].pos());
            }
            std::sort(sr.data_pts.begin(), sr.data_pts.end(), point_yx_less{});
            for (const auto& [role, p] : role_points(sr.data_pts)) sr.roles[role] = *g.at(p);

            if (s.weight == 4) {
                stab_region region = make_region(
                    bounds_of(sr.data_pts.begin(), sr.data_pts.end()), sr.data_pts, data_set);
                if (!has_free_node(g, region)) {
                    note(1 + done, s.row, s.col, "rectangle has no bridge qubits");
                    return std::nullopt;
                }
                try {
                    sr.candidates = find_bridge_trees(g, region);
                } catch (const infeasible_error& e) {
                    note(1 + done, s.row, s.col, e.what());
                    return std::nullopt;
                }
                if (mode == allocation_mode::center4) {
                    std::vector<bridge_tree> stars;
                    for (auto& t : sr.candidates)
                        if (is_center_star(g, t)) stars.push_back(std::move(t));
                    if (stars.empty()) {
                        note(1 + done, s.row, s.col, "no central anchor of degree 4");
                        return std::nullopt;
                    }
                    sr.candidates = std::move(stars);
                }
                sr.region = std::move(region);
                sr.tree_index = 0;
            } else {
                auto choice = w2_search(g, sr.data_pts, data_set, used, dev_bounds);
                if (!choice) {
                    note(1 + done, s.row, s.col, "no bridge tree reaches the boundary pair");
                    return std::nullopt;
                }
                sr.region = make_region(choice->bounds, sr.data_pts, data_set);
                sr.candidates = std::move(choice->candidates);
                sr.tree_index = choice->tree_index;
            }
            sr.base = base_of(g, sr.region.bounds);
            for (const auto& n : sr.tree().nodes) used.insert(n);
            pl.rects[si] = std::move(sr);
            ++done;
        }
    }

    // same-type regions may touch on lines but never overlap in area
    for (size_t i = 0; i < pl.rects.size(); ++i)
        for (size_t j = i + 1; j < pl.rects.size(); ++j) {
            if (pl.rects[i].stab_type != pl.rects[j].stab_type) continue;
            auto ov = intersect(pl.rects[i].region.bounds, pl.rects[j].region.bounds);
            if (ov.area() > 0) {
                note(1 + done, pl.rects[i].row, pl.rects[i].col,
                     "same-type rectangles overlap");
                return std::nullopt;
            }
        }

    long conflicts = 0;
    for (size_t i = 0; i < pl.rects.size(); ++i)
        for (size_t j = i + 1; j < pl.rects.size(); ++j) {
            if (pl.rects[i].stab_type != pl.rects[j].stab_type) continue;
            const auto& a = pl.rects[i].tree();
            const auto& b = pl.rects[j].tree();
            bool share = false;
            for (const auto& n : a.bridge_nodes())
                if (std::find(b.nodes.begin(), b.nodes.end(), n) != b.nodes.end()) share = true;
            if (share) ++conflicts;
        }

    long x_depth = 0;
    long max_edges = 0;
    for (const auto& r : pl.rects) {
        if (r.stab_type == 'X') x_depth += measure_depth('X', r.tree());
        max_edges = std::max(max_edges, static_cast<long>(r.tree().edge_count()));
    }
    long cross = std::abs(static_cast<long>(f.u.x) * f.v.y - static_cast<long>(f.u.y) * f.v.x);
    long vlen = static_cast<long>(f.v.x) * f.v.x + static_cast<long>(f.v.y) * f.v.y;
    long ulen = static_cast<long>(f.u.x) * f.u.x + static_cast<long>(f.u.y) * f.u.y;
    pl.score = {-static_cast<long>(used.size()),
                conflicts,
                x_depth,
                max_edges,
                cross,
                vlen,
                ulen,
                seed.y,
                seed.x,
                f.u.x,
                f.u.y,
                f.v.x,
                f.v.y};
    return pl;
}

}  // namespace detail

// Place a distance-d rotated surface code on the device: data qubits on a
// regular sublattice, one bridge rectangle per stabilizer. Among all valid
// placements the one recruiting the most device qubits wins.
inline data_layout allocate_data_qubits(const device_graph& g, int distance,
                                        allocation_mode mode) {
    if (distance < 3 || distance % 2 == 0)
        throw validation_error("distance must be an odd number >= 3");
    if (g.size() == 0) throw infeasible_error("device has no qubits");
    if (mode == allocation_mode::center4) {
        bool anchor = false;
        for (const auto& q : g.qubits) anchor = anchor || g.degree(q.id) >= 4;
        if (!anchor)
            throw infeasible_error(
                "center4 allocation needs a degree-4 anchor; the device has none");
    }

    std::vector<point> seeds;
    for (const auto& q : g.qubits) seeds.push_back(q.pos());
    std::sort(seeds.begin(), seeds.end(), point_yx_less{});

    detail::placement_failure fail;
    std::optional<detail::placement> best;
    for (const auto& f : detail::step_families(mode))
        for (const auto& seed : seeds) {
            auto pl = detail::try_place(g, distance, mode, f, seed, fail);
            if (pl && (!best || pl->score < best->score)) best = std::move(pl);
        }
    if (!best) {
        std::string where = "(" + std::to_string(fail.row) + ", " + std::to_string(fail.col) + ")";
        std::string why = fail.progress < 0 ? "no data sublattice fits the device"
                                            : fail.reason;
        throw infeasible_error("no placement satisfies logical position " + where + " on " +
                               g.name + ": " + why);
    }

    data_layout layout;
    layout.device = g.name;
    layout.distance = distance;
    layout.mode = mode;
    layout.data_map = std::move(best->data_map);
    layout.rects = std::move(best->rects);
    return layout;
}

struct feasibility_entry {
    int row = 0;
    int col = 0;
    bool ok = true;
    std::string reason;
};

struct feasibility_report {
    std::vector<feasibility_entry> entries;
    bool ok = true;
};

// Per-rectangle connectivity audit of an existing layout.
inline feasibility_report feasibility_check(const device_graph& g, const data_layout& layout) {
    feasibility_report report;
    for (const auto& r : layout.rects) {
        feasibility_entry e;
        e.row = r.row;
        e.col = r.col;
        if (r.weight() == 4 && !prop1_region_ok(g, r.region)) {
            e.ok = false;
            e.reason = "needs one degree-4 bridge qubit or two of degree 3";
        } else if (r.candidates.empty()) {
            e.ok = false;
            e.reason = "no bridge tree spans the data qubits";
        } else if (!prop1_holds(r.tree())) {
            e.ok = false;
            e.reason = "chosen tree lacks the required branch qubits";
        }
        report.ok = report.ok && e.ok;
        report.entries.push_back(std::move(e));
    }
    return report;
}

inline nlohmann::ordered_json layout_to_json(const device_graph& g, const data_layout& layout) {
    nlohmann::ordered_json j;
    j["device"] = layout.device;
    j["distance"] = layout.distance;
    j["mode"] = to_string(layout.mode);
    j["data"] = nlohmann::ordered_json::array();
    for (const auto& [rc, id] : layout.data_map) {
        nlohmann::ordered_json jd;
        jd["row"] = rc.first;
        jd["col"] = rc.second;
        jd["qubit"] = id;
        j["data"].push_back(std::move(jd));
    }
    j["stabilizers"] = nlohmann::ordered_json::array();
    for (const auto& r : layout.rects) {
        nlohmann::ordered_json js;
        js["row"] = r.row;
        js["col"] = r.col;
        js["type"] = std::string(1, r.stab_type);
        js["weight"] = r.weight();
        js["bounds"] = {r.region.bounds.x0, r.region.bounds.y0, r.region.bounds.x1,
                        r.region.bounds.y1};
        js["data"] = nlohmann::ordered_json::array();
        for (const auto& p : r.data_pts) js["data"].push_back(*g.at(p));
        js["roles"] = nlohmann::ordered_json::object();
        for (const auto& [role, id] : r.roles) js["roles"][std::string(1, role)] = id;
        js["tree_index"] = r.tree_index;
        js["tree"] = nlohmann::ordered_json::object();
        js["tree"]["nodes"] = nlohmann::ordered_json::array();
        for (const auto& n : r.tree().nodes) js["tree"]["nodes"].push_back({n.x, n.y});
        js["tree"]["edges"] = nlohmann::ordered_json::array();
        for (const auto& [a, b] : r.tree().edges)
            js["tree"]["edges"].push_back({a.x, a.y, b.x, b.y});
        js["tree"]["syndrome"] = {r.tree().syndrome.x, r.tree().syndrome.y};
        j["stabilizers"].push_back(std::move(js));
    }
    return j;
}

inline std::string layout_to_string(const device_graph& g, const data_layout& layout) {
    return layout_to_json(g, layout).dump(2) + "\n";
}

// Rebuild a layout from its serialized form. Regions and candidate trees are
// recomputed from the stored bounds; the stored tree must reappear.
inline data_layout layout_from_json(const device_graph& g, const nlohmann::json& j) {
    data_layout layout;
    try {
        layout.device = j.at("device").get<std::string>();
        layout.distance = j.at("distance").get<int>();
        layout.mode = allocation_mode_from_string(j.at("mode").get<std::string>());
        std::set<point, point_yx_less> data_set;
        for (const auto& jd : j.at("data")) {
            int id = jd.at("qubit").get<int>();
            layout.data_map[{jd.at("row").get<int>(), jd.at("col").get<int>()}] = id;
            data_set.insert(g.qubits.at(static_cast<size_t>(id)).pos());
        }
        for (const auto& js : j.at("stabilizers")) {
            syndrome_rect r;
            r.row = js.at("row").get<int>();
            r.col = js.at("col").get<int>();
            r.stab_type = js.at("type").get<std::string>().at(0);
            for (const auto& jid : js.at("data"))
                r.data_pts.push_back(g.qubits.at(jid.get<size_t>()).pos());
            std::sort(r.data_pts.begin(), r.data_pts.end(), point_yx_less{});
            for (const auto& [key, val] : js.at("roles").items())
                r.roles[key.at(0)] = val.get<int>();
            auto jb = js.at("bounds");
            rect bounds{jb.at(0).get<int>(), jb.at(1).get<int>(), jb.at(2).get<int>(),
                        jb.at(3).get<int>()};
            r.region = detail::make_region(bounds, r.data_pts, data_set);
            r.candidates = find_bridge_trees(g, r.region);
            if (layout.mode == allocation_mode::center4 && r.data_pts.size() == 4) {
                std::vector<bridge_tree> stars;
                for (auto& t : r.candidates)
                    if (detail::is_center_star(g, t)) stars.push_back(std::move(t));
                r.candidates = std::move(stars);
            }
            r.tree_index = js.at("tree_index").get<int>();
            if (r.tree_index < 0 || r.tree_index >= static_cast<int>(r.candidates.size()))
                throw parse_error("stabilizer tree index out of range");
            r.base = detail::base_of(g, bounds);
            layout.rects.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("bad layout JSON: ") + e.what());
    }
    return layout;
}

}  // namespace scsynth
