#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bridge.hpp"
#include "device.hpp"
#include "errors.hpp"
#include "geometry.hpp"

namespace scsynth {

enum class gate_kind { reset, hadamard, cnot, measure };

// q1 is only meaningful for cnot gates: q0 is the control, q1 the target.
struct gate {
    gate_kind kind = gate_kind::reset;
    int q0 = -1;
    int q1 = -1;

    bool operator==(const gate&) const = default;
};

// Optional flag qubit wrapped around one tree node.  The two flag CNOTs sit
// on the outer slots of the data window, so they add gates but no depth.
struct flag_spec {
    point flag;
    point host;
};

struct measurement_circuit {
    char stab_type = 'X';
    bridge_tree tree;
    std::optional<flag_spec> flag;
    std::vector<std::vector<gate>> layers;

    int depth() const { return static_cast<int>(layers.size()); }

    int cnot_count() const {
        int n = 0;
        for (const auto& layer : layers)
            for (const auto& g : layer)
                if (g.kind == gate_kind::cnot) ++n;
        return n;
    }
};

struct circuit_metrics {
    int cnot_count = 0;
    int depth = 0;
    int bridge_qubit_count = 0;
};

inline circuit_metrics metrics(const measurement_circuit& c) {
    return {c.cnot_count(), c.depth(), c.tree.bridge_count()};
}

namespace detail {

inline int qubit_id(const device_graph& g, const point& p, const char* what) {
    auto id = g.at(p);
    if (!id)
        throw validation_error(std::string(what) + " (" + std::to_string(p.x) + ", " +
                               std::to_string(p.y) + ") is not a device qubit");
    return *id;
}

// Data window order: corners in raster order with the middle pair sorted by x.
// A weight-2 stabilizer occupies the two middle slots when a flag widens the
// window to four, otherwise its own two-slot window.
inline std::vector<point> window_order(std::vector<point> data) {
    std::sort(data.begin(), data.end(), yx_less);
    if (data.size() == 4 && data[2].x < data[1].x) std::swap(data[1], data[2]);
    return data;
}

inline std::map<point, point, point_yx_less> host_of_data(const bridge_tree& t) {
    std::set<point, point_yx_less> data_set(t.data.begin(), t.data.end(), point_yx_less{});
    std::map<point, point, point_yx_less> host;
    for (const auto& [a, b] : t.edges) {
        if (data_set.count(a)) host[a] = b;
        if (data_set.count(b)) host[b] = a;
    }
    return host;
}

}  // namespace detail

// Builds the measurement circuit for one stabilizer.  Layer plan, with S the
// cascade span:
//   0                reset every tree qubit and the flag
//   1                H layer: the syndrome qubit for X type; for Z type the
//                    non-syndrome bridge qubits (X-basis flags), if any
//   2 .. 1+S         forward cascade, one tree level per layer
//   2+S .. 1+S+w'    data window (w' = 4 unless a bare weight-2 pair)
//   ...              mirrored reverse cascade, H layer, measure everything
// X-type cascades point away from the syndrome and couple tree->data; Z-type
// cascades point toward the syndrome and couple data->tree.  A bare Z
// syndrome (b = 1, no flag) needs neither H layer.
inline measurement_circuit gen_measurement_circuit(const device_graph& g, char stab_type,
                                                   const bridge_tree& tree,
                                                   std::optional<flag_spec> flag = std::nullopt) {
    size_t w = tree.data.size();
    if (stab_type != 'X' && stab_type != 'Z')
        throw validation_error(std::string("unsupported stabilizer type '") + stab_type + "'");
    if (w != 2 && w != 4)
        throw validation_error("unsupported stabilizer weight " + std::to_string(w));
    if (flag && w != 2)
        throw validation_error("flag wraps need the free outer data slots of a weight-2 pair");

    measurement_circuit c;
    c.stab_type = stab_type;
    c.tree = tree;
    c.flag = flag;

    cascade_plan plan = cascade_layers(tree);
    std::vector<point> bridges = tree.bridge_nodes();
    int b = static_cast<int>(bridges.size());
    bool has_h = stab_type == 'X' || b >= 2 || flag.has_value();
    int slots = (w == 4 || flag) ? 4 : 2;
    int window = 1 + (has_h ? 1 : 0) + plan.span;  // first data-window layer
    int depth = window + slots + plan.span + (has_h ? 1 : 0) + 1;
    c.layers.resize(static_cast<size_t>(depth));

    auto id = [&](const point& p) { return detail::qubit_id(g, p, "tree qubit"); };
    auto put = [&](int layer, gate gt) { c.layers[static_cast<size_t>(layer)].push_back(gt); };

    for (const point& p : bridges) put(0, {gate_kind::reset, id(p), -1});
    if (flag) put(0, {gate_kind::reset, id(flag->flag), -1});

    if (has_h) {
        int front = 1;
        int back = window + slots + plan.span;
        if (stab_type == 'X') {
            put(front, {gate_kind::hadamard, id(tree.syndrome), -1});
            put(back, {gate_kind::hadamard, id(tree.syndrome), -1});
        } else {
            for (const point& p : bridges)
                if (p != tree.syndrome) {
                    put(front, {gate_kind::hadamard, id(p), -1});
                    put(back, {gate_kind::hadamard, id(p), -1});
                }
            if (flag) {
                put(front, {gate_kind::hadamard, id(flag->flag), -1});
                put(back, {gate_kind::hadamard, id(flag->flag), -1});
            }
        }
    }

    for (const auto& [parent, child] : plan.flow) {
        int k = plan.layer.at(make_tree_edge(parent, child));
        int fwd = window - plan.span - 1 + k;
        int rev = window + slots + plan.span - k;
        int ctl = stab_type == 'X' ? id(parent) : id(child);
        int tgt = stab_type == 'X' ? id(child) : id(parent);
        put(fwd, {gate_kind::cnot, ctl, tgt});
        put(rev, {gate_kind::cnot, ctl, tgt});
    }

    auto host = detail::host_of_data(tree);
    std::vector<point> order = detail::window_order(tree.data);
    int base = (w == 2 && slots == 4) ? 1 : 0;
    for (size_t i = 0; i < order.size(); ++i) {
        const point& d = order[i];
        int hid = id(host.at(d));
        int did = detail::qubit_id(g, d, "data qubit");
        int layer = window + base + static_cast<int>(i);
        if (stab_type == 'X')
            put(layer, {gate_kind::cnot, hid, did});
        else
            put(layer, {gate_kind::cnot, did, hid});
    }
    if (flag) {
        int fid = id(flag->flag);
        int hid = id(flag->host);
        int ctl = stab_type == 'X' ? hid : fid;
        int tgt = stab_type == 'X' ? fid : hid;
        put(window, {gate_kind::cnot, ctl, tgt});
        put(window + 3, {gate_kind::cnot, ctl, tgt});
    }

    for (const point& p : bridges) put(depth - 1, {gate_kind::measure, id(p), -1});
    if (flag) put(depth - 1, {gate_kind::measure, id(flag->flag), -1});

    for (auto& layer : c.layers)
        std::sort(layer.begin(), layer.end(), [](const gate& a, const gate& b) {
            if (a.q0 != b.q0) return a.q0 < b.q0;
            return a.q1 < b.q1;
        });
    return c;
}

// One qubit may carry at most one gate per layer.
inline void check_layer_exclusion(const measurement_circuit& c) {
    for (size_t li = 0; li < c.layers.size(); ++li) {
        std::set<int> busy;
        for (const auto& gt : c.layers[li]) {
            if (!busy.insert(gt.q0).second)
                throw validation_error("qubit " + std::to_string(gt.q0) + " used twice in layer " +
                                       std::to_string(li));
            if (gt.kind == gate_kind::cnot && !busy.insert(gt.q1).second)
                throw validation_error("qubit " + std::to_string(gt.q1) + " used twice in layer " +
                                       std::to_string(li));
        }
    }
}

inline std::string circuit_to_string(const measurement_circuit& c) {
    std::ostringstream out;
    for (size_t li = 0; li < c.layers.size(); ++li) {
        if (li) out << "TICK\n";
        for (const auto& gt : c.layers[li]) {
            switch (gt.kind) {
                case gate_kind::reset: out << "R " << gt.q0 << "\n"; break;
                case gate_kind::hadamard: out << "H " << gt.q0 << "\n"; break;
                case gate_kind::cnot: out << "CX " << gt.q0 << " " << gt.q1 << "\n"; break;
                case gate_kind::measure: out << "M " << gt.q0 << "\n"; break;
            }
        }
    }
    return out.str();
}

struct verify_report {
    bool ok = true;
    std::string detail;
};

namespace detail {

// x/z frame pair per qubit id.
struct pauli_frame {
    std::map<int, std::pair<bool, bool>> bits;

    std::pair<bool, bool>& at(int q) { return bits[q]; }
};

// Propagates the frame and returns measurement flips keyed by qubit id.
inline std::map<int, bool> propagate(const measurement_circuit& c, pauli_frame f) {
    std::map<int, bool> outcome;
    for (const auto& layer : c.layers) {
        for (const auto& gt : layer) {
            switch (gt.kind) {
                case gate_kind::reset: f.at(gt.q0) = {false, false}; break;
                case gate_kind::hadamard: {
                    auto& [x, z] = f.at(gt.q0);
                    std::swap(x, z);
                    break;
                }
                case gate_kind::cnot: {
                    auto& [xc, zc] = f.at(gt.q0);
                    auto& [xt, zt] = f.at(gt.q1);
                    xt = xt != xc;
                    zc = zc != zt;
                    break;
                }
                case gate_kind::measure: outcome[gt.q0] = f.at(gt.q0).first; break;
            }
        }
    }
    return outcome;
}

}  // namespace detail

// Symplectic check of one circuit against its Pauli string: every
// single-qubit Pauli injected on a data qubit before the circuit must flip
// the syndrome parity exactly when it anticommutes with the stabilizer, data
// injections must never trip the flag, and the clean frame reads all zeros.
// stab maps each data qubit to 'X' or 'Z'.
inline verify_report verify_stabilizer(const device_graph& g, const measurement_circuit& c,
                                       const std::map<point, char, point_yx_less>& stab) {
    std::vector<int> tree_ids;
    for (const point& p : c.tree.bridge_nodes())
        tree_ids.push_back(detail::qubit_id(g, p, "tree qubit"));
    int flag_id = c.flag ? detail::qubit_id(g, c.flag->flag, "flag qubit") : -1;

    auto parity_of = [&](const std::map<int, bool>& outcome) {
        bool parity = false;
        for (int q : tree_ids) parity = parity != outcome.at(q);
        return parity;
    };

    auto clean = detail::propagate(c, {});
    for (const auto& [q, flip] : clean)
        if (flip)
            return {false, "clean frame flips measurement on qubit " + std::to_string(q)};

    for (const point& d : c.tree.data) {
        auto it = stab.find(d);
        if (it == stab.end())
            return {false,
                    "stabilizer string misses data qubit (" + std::to_string(d.x) + ", " +
                        std::to_string(d.y) + ")"};
        int did = detail::qubit_id(g, d, "data qubit");
        for (char e : {'X', 'Y', 'Z'}) {
            detail::pauli_frame f;
            if (e != 'Z') f.at(did).first = true;
            if (e != 'X') f.at(did).second = true;
            auto outcome = detail::propagate(c, f);
            bool flip = parity_of(outcome);
            bool expect = e != it->second;
            if (flip != expect)
                return {false, std::string("injecting ") + e + " on data qubit (" +
                                   std::to_string(d.x) + ", " + std::to_string(d.y) +
                                   ") flipped parity " + (flip ? "1" : "0") + ", expected " +
                                   (expect ? "1" : "0")};
            if (flag_id >= 0 && outcome.at(flag_id))
                return {false, std::string("injecting ") + e + " on data qubit (" +
                                   std::to_string(d.x) + ", " + std::to_string(d.y) +
                                   ") tripped the flag"};
        }
    }
    return {};
}

// Convenience form: the Pauli string implied by the circuit's own type.
inline verify_report verify_stabilizer(const device_graph& g, const measurement_circuit& c) {
    std::map<point, char, point_yx_less> stab;
    for (const point& d : c.tree.data) stab[d] = c.stab_type;
    return verify_stabilizer(g, c, stab);
}

}  // namespace scsynth
