#pragma once

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsynth/errors.hpp"
#include "scsynth/geometry.hpp"

namespace scsynth {

struct qubit {
    int id = 0;
    int x = 0;
    int y = 0;

    point pos() const { return point{x, y}; }
};

// Coupling graph of a device, embedded in the plane. Qubit ids are dense
// 0..n-1, coordinates are unique, edges are unordered pairs of distinct ids.
struct device_graph {
    std::string name;
    std::vector<qubit> qubits;
    std::vector<std::pair<int, int>> edges;

    std::vector<std::vector<int>> adj;
    std::unordered_map<point, int> by_coord;

    int size() const { return static_cast<int>(qubits.size()); }

    point pos(int id) const { return qubits[static_cast<size_t>(id)].pos(); }

    std::optional<int> at(const point& p) const {
        auto it = by_coord.find(p);
        if (it == by_coord.end()) return std::nullopt;
        return it->second;
    }

    bool has(const point& p) const { return by_coord.count(p) != 0; }

    int degree(int id) const { return static_cast<int>(adj[static_cast<size_t>(id)].size()); }

    const std::vector<int>& neighbors(int id) const { return adj[static_cast<size_t>(id)]; }

    void finalize() {
        std::sort(qubits.begin(), qubits.end(),
                  [](const qubit& a, const qubit& b) { return a.id < b.id; });
        for (auto& e : edges)
            if (e.first > e.second) std::swap(e.first, e.second);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        adj.assign(qubits.size(), {});
        by_coord.clear();
        for (const auto& q : qubits) by_coord[q.pos()] = q.id;
        for (const auto& [a, b] : edges) {
            // out-of-range endpoints are reported by validate(), not here
            if (a < 0 || b < 0 || a >= size() || b >= size()) continue;
            adj[static_cast<size_t>(a)].push_back(b);
            adj[static_cast<size_t>(b)].push_back(a);
        }
        for (auto& nb : adj) std::sort(nb.begin(), nb.end());
    }

    void validate() const {
        if (qubits.empty()) throw validation_error("device '" + name + "': no qubits");
        for (int i = 0; i < size(); ++i) {
            if (qubits[static_cast<size_t>(i)].id != i)
                throw validation_error("device '" + name + "': qubit ids not dense at " +
                                       std::to_string(i));
        }
        if (by_coord.size() != qubits.size())
            throw validation_error("device '" + name + "': duplicate qubit coordinates");
        for (size_t i = 0; i < edges.size(); ++i) {
            auto [a, b] = edges[i];
            if (a == b) throw validation_error("device '" + name + "': self-loop on qubit " +
                                               std::to_string(a));
            if (a < 0 || b < 0 || a >= size() || b >= size())
                throw validation_error("device '" + name + "': edge endpoint out of range");
            if (i > 0 && edges[i] == edges[i - 1])
                throw validation_error("device '" + name + "': duplicate edge");
        }
        std::vector<char> seen(qubits.size(), 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        size_t reached = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : neighbors(v)) {
                if (!seen[static_cast<size_t>(w)]) {
                    seen[static_cast<size_t>(w)] = 1;
                    ++reached;
                    stack.push_back(w);
                }
            }
        }
        if (reached != qubits.size())
            throw validation_error("device '" + name + "': graph is not connected");
    }
};

// rows x cols grid, spacing 2, nearest-neighbor coupling.
inline device_graph gen_square(int rows, int cols) {
    if (rows < 1 || cols < 1) throw validation_error("gen_square: rows and cols must be >= 1");
    device_graph g;
    g.name = "square_" + std::to_string(rows) + "x" + std::to_string(cols);
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i)
            g.qubits.push_back(qubit{j * cols + i, 2 * i, 2 * j});
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < cols; ++i) {
            int id = j * cols + i;
            if (i + 1 < cols) g.edges.emplace_back(id, id + 1);
            if (j + 1 < rows) g.edges.emplace_back(id, id + cols);
        }
    }
    g.finalize();
    g.validate();
    return g;
}

// Brick-wall hexagonal lattice on a rows x cols grid: every horizontal edge,
// vertical edges only where column+row parity is even, so max degree is 3.
inline device_graph gen_hexagon(int rows, int cols) {
    if (rows < 2 || cols < 3) throw validation_error("gen_hexagon: need rows >= 2 and cols >= 3");
    device_graph g;
    g.name = "hexagon_" + std::to_string(rows) + "x" + std::to_string(cols);
    for (int j = 0; j < rows; ++j)
        for (int i = 0; i < cols; ++i)
            g.qubits.push_back(qubit{j * cols + i, 2 * i, 2 * j});
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < cols; ++i) {
            int id = j * cols + i;
            if (i + 1 < cols) g.edges.emplace_back(id, id + 1);
            if (j + 1 < rows && (i + j) % 2 == 0) g.edges.emplace_back(id, id + cols);
        }
    }
    g.finalize();
    g.validate();
    return g;
}

// Heavy variant: subdivide every edge with a midpoint qubit.
inline device_graph gen_heavy(const device_graph& base) {
    device_graph g;
    g.name = "heavy_" + base.name;
    g.qubits = base.qubits;
    int next_id = base.size();
    for (const auto& [a, b] : base.edges) {
        point pa = base.pos(a);
        point pb = base.pos(b);
        if ((pa.x + pb.x) % 2 != 0 || (pa.y + pb.y) % 2 != 0)
            throw validation_error("gen_heavy: edge midpoint not on integer grid");
        point mid{(pa.x + pb.x) / 2, (pa.y + pb.y) / 2};
        if (base.has(mid))
            throw validation_error("gen_heavy: midpoint collides with existing qubit");
        int m = next_id++;
        g.qubits.push_back(qubit{m, mid.x, mid.y});
        g.edges.emplace_back(a, m);
        g.edges.emplace_back(m, b);
    }
    g.finalize();
    g.validate();
    return g;
}

inline nlohmann::ordered_json device_to_json(const device_graph& g) {
    nlohmann::ordered_json j;
    j["name"] = g.name;
    j["qubits"] = nlohmann::ordered_json::array();
    for (const auto& q : g.qubits) {
        nlohmann::ordered_json jq;
        jq["id"] = q.id;
        jq["x"] = q.x;
        jq["y"] = q.y;
        j["qubits"].push_back(jq);
    }
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [a, b] : g.edges) j["edges"].push_back({a, b});
    return j;
}

inline std::string device_to_string(const device_graph& g) {
    return device_to_json(g).dump(2) + "\n";
}

inline void save_device(const device_graph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    out << device_to_string(g);
}

inline device_graph device_from_json(const nlohmann::json& j, const std::string& context) {
    device_graph g;
    try {
        g.name = j.at("name").get<std::string>();
        for (const auto& jq : j.at("qubits"))
            g.qubits.push_back(qubit{jq.at("id").get<int>(), jq.at("x").get<int>(),
                                     jq.at("y").get<int>()});
        for (const auto& je : j.at("edges")) {
            if (!je.is_array() || je.size() != 2)
                throw parse_error(context + ": edge entries must be [a, b] pairs");
            g.edges.emplace_back(je[0].get<int>(), je[1].get<int>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(context + ": " + e.what());
    }
    g.finalize();
    g.validate();
    return g;
}

inline device_graph load_device(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open device file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error("device file '" + path + "': " + e.what());
    }
    return device_from_json(j, "device file '" + path + "'");
}

}  // namespace scsynth
