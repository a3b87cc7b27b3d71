#pragma once

// Hand-built device graphs exercising corner cases that the regular lattice
// generators cannot reach: irregular hub layouts, rectangles with competing
// tree routes, and regions that violate the branching feasibility condition.

#include <scsynth/bridge.hpp>
#include <scsynth/device.hpp>

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace fixtures {

using scsynth::device_graph;
using scsynth::point;
using scsynth::qubit;

inline device_graph make_device(std::string name,
                                const std::vector<std::pair<int, point>>& named,
                                const std::vector<point>& rest,
                                const std::vector<std::pair<point, point>>& edges) {
    device_graph g;
    g.name = std::move(name);
    std::map<int, point> by_id;
    std::set<int> taken;
    for (const auto& [id, p] : named) {
        by_id[id] = p;
        taken.insert(id);
    }
    std::vector<point> free_pts = rest;
    std::sort(free_pts.begin(), free_pts.end(), scsynth::point_yx_less{});
    int next = 0;
    for (const auto& p : free_pts) {
        while (taken.count(next)) ++next;
        by_id[next] = p;
        taken.insert(next);
    }
    std::map<point, int, scsynth::point_yx_less> id_of;
    for (const auto& [id, p] : by_id) {
        g.qubits.push_back(qubit{id, p.x, p.y});
        id_of[p] = id;
    }
    for (const auto& [a, b] : edges) g.edges.push_back({id_of.at(a), id_of.at(b)});
    g.finalize();
    g.validate();
    return g;
}

// 24-qubit irregular device with seven hub qubits. Degree-3 hubs at ids
// 2, 4, 13, 18, 21 pair with their nearest hub; ids 10 and 12 have degree 4
// and anchor their own rectangles. A single qubit (id 14) sits in the strip
// to the right of the hub cluster between two vertically stacked rectangles.
inline device_graph hub_cluster_device() {
    std::vector<std::pair<int, point>> named = {
        {2, {0, 4}},   {4, {2, 0}},  {10, {4, 4}}, {12, {4, 2}},
        {13, {10, 6}}, {14, {8, 4}}, {18, {6, 8}}, {21, {12, 8}},
    };
    std::vector<point> rest = {
        {0, 0}, {0, 2}, {0, 6}, {2, 2}, {2, 4},  {4, 0},  {6, 2},  {6, 4},
        {4, 6}, {4, 8}, {6, 10}, {8, 8}, {8, 6}, {10, 8}, {12, 6}, {12, 10},
    };
    std::vector<std::pair<point, point>> edges = {
        // hub id 2 at (0,4)
        {{0, 4}, {0, 2}}, {{0, 4}, {0, 6}}, {{0, 4}, {2, 4}},
        // hub id 4 at (2,0)
        {{2, 0}, {0, 0}}, {{2, 0}, {4, 0}}, {{2, 0}, {2, 2}},
        // hub id 10 at (4,4)
        {{4, 4}, {2, 4}}, {{4, 4}, {6, 4}}, {{4, 4}, {4, 2}}, {{4, 4}, {4, 6}},
        // hub id 12 at (4,2)
        {{4, 2}, {4, 0}}, {{4, 2}, {2, 2}}, {{4, 2}, {6, 2}},
        // hub id 13 at (10,6)
        {{10, 6}, {8, 6}}, {{10, 6}, {12, 6}}, {{10, 6}, {10, 8}},
        // hub id 18 at (6,8)
        {{6, 8}, {4, 8}}, {{6, 8}, {8, 8}}, {{6, 8}, {6, 10}},
        // hub id 21 at (12,8)
        {{12, 8}, {12, 6}}, {{12, 8}, {10, 8}}, {{12, 8}, {12, 10}},
        // connective tissue; id 14 links the hub cluster to the right wing
        {{0, 0}, {0, 2}}, {{4, 6}, {4, 8}}, {{6, 4}, {8, 4}}, {{8, 4}, {8, 6}},
    };
    return make_device("hub_cluster", named, rest, edges);
}

// Rectangle whose four data qubits admit two distinct routes for the fourth
// leaf: a direct star from the middle column and a detour along the x=6
// spine. The best star root and the best branching merge to the same 8-edge
// tree; the naive star rooted at (4,4) costs 10.
inline device_graph two_route_rectangle_device() {
    std::vector<std::pair<int, point>> named;
    std::vector<point> rest = {
        {4, 2}, {8, 2}, {4, 8}, {8, 8},          // data corners
        {4, 4}, {4, 6}, {6, 4}, {8, 4}, {8, 6},  // direct routes
        {6, 2}, {6, 8}, {6, 6},                  // spine detour
    };
    std::vector<std::pair<point, point>> edges = {
        {{4, 2}, {4, 4}}, {{4, 4}, {4, 6}}, {{4, 6}, {4, 8}},
        {{8, 2}, {8, 4}}, {{8, 4}, {8, 6}}, {{8, 6}, {8, 8}},
        {{4, 4}, {6, 4}}, {{6, 4}, {8, 4}},
        {{4, 4}, {6, 2}}, {{6, 2}, {6, 8}}, {{6, 8}, {6, 6}}, {{6, 6}, {8, 8}},
    };
    return make_device("two_route_rectangle", named, rest, edges);
}

inline scsynth::stab_region two_route_region() {
    scsynth::stab_region r;
    r.bounds = {2, 2, 8, 8};
    r.data = {{4, 2}, {8, 2}, {4, 8}, {8, 8}};
    return r;
}

// Plus-shaped rectangle: a single center serves all four data qubits, so the
// 4-edge star is already optimal and branching rediscovers it.
inline device_graph plus_rectangle_device() {
    std::vector<point> rest = {{2, 0}, {0, 2}, {4, 2}, {2, 4}, {2, 2}};
    std::vector<std::pair<point, point>> edges = {
        {{2, 2}, {2, 0}}, {{2, 2}, {0, 2}}, {{2, 2}, {4, 2}}, {{2, 2}, {2, 4}},
    };
    return make_device("plus_rectangle", {}, rest, edges);
}

inline scsynth::stab_region plus_region() {
    scsynth::stab_region r;
    r.bounds = {0, 0, 4, 4};
    r.data = {{2, 0}, {0, 2}, {4, 2}, {2, 4}};
    return r;
}

// Region where no spanning tree exists: the only route to the (0,4) corner
// passes through another data qubit, and the interior qubit tops out at
// degree 3, violating the degree condition for 4-leaf trees.
inline device_graph blocked_corner_device() {
    std::vector<point> rest = {{0, 0}, {4, 0}, {0, 4}, {4, 4}, {2, 2}, {0, 2}};
    std::vector<std::pair<point, point>> edges = {
        {{2, 2}, {0, 0}}, {{2, 2}, {4, 4}}, {{2, 2}, {4, 0}},
        {{0, 4}, {0, 2}}, {{0, 2}, {0, 0}},
    };
    return make_device("blocked_corner", {}, rest, edges);
}

inline scsynth::stab_region blocked_corner_region() {
    scsynth::stab_region r;
    r.bounds = {0, 0, 4, 4};
    r.data = {{0, 0}, {4, 0}, {0, 4}, {4, 4}};
    return r;
}

}  // namespace fixtures
