#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "schedule.hpp"

namespace scsynth {

// Circuit-level noise: depolarizing after 1q/2q gates, Pauli-X flip on reset
// and measurement, and a per-layer idle channel on untouched qubits.
struct noise_model {
    double p_gate = 0.0;
    double p_idle = 0.0002;
};

namespace detail {

inline void validate_noise(const noise_model& nm) {
    if (nm.p_gate < 0.0 || nm.p_gate > 1.0 || nm.p_idle < 0.0 || nm.p_idle > 1.0)
        throw validation_error("noise probabilities must lie in [0, 1]");
}

}  // namespace detail

enum class detector_kind : uint8_t { syndrome_z, syndrome_x, check };

// Parity of the listed measurement bits; deterministic zero without noise.
struct detector_def {
    detector_kind kind = detector_kind::check;
    std::vector<int> bits;
};

struct detector_model {
    std::vector<detector_def> detectors;
    std::vector<int> observable_bits;  // final-readout bits over the logical support

    int syndrome_count() const {
        int n = 0;
        for (const auto& d : detectors)
            if (d.kind != detector_kind::check) ++n;
        return n;
    }
};

// One memory experiment: the scheduled cycle unrolled over several rounds,
// followed by a perfect data readout.  Measurement bits number in traversal
// order; the final readout bits follow all round bits.
struct cycle_circuit {
    int n_qubits = 0;
    int rounds = 0;
    int distance = 0;
    int bits_per_round = 0;
    std::vector<std::vector<gate>> layers;
    std::vector<std::vector<int>> idle;      // per layer: untouched cycle qubits
    std::vector<int> meas_layer_prefix;      // bits produced before each layer
    std::vector<int> final_data;             // data qubit ids, row-major
    detector_model det;

    int n_meas() const {
        return rounds * bits_per_round + static_cast<int>(final_data.size());
    }
};

inline cycle_circuit build_cycle_circuit(const device_graph& g, const data_layout& layout,
                                         const measurement_schedule& s, int rounds) {
    if (rounds < 1) throw validation_error("cycle circuit needs at least one round");
    cycle_circuit c;
    c.rounds = rounds;
    c.distance = layout.distance;
    c.n_qubits = static_cast<int>(g.qubits.size());

    std::vector<partition_block> blocks;
    for (const auto& part : s.partitions) blocks.push_back(merge_partition(g, part));

    // bit order inside one round: partitions in order, measure gates in
    // layer-traversal order
    std::vector<std::vector<int>> block_meas;
    std::vector<int> block_offset;
    for (const auto& b : blocks) {
        block_offset.push_back(c.bits_per_round);
        std::vector<int> order;
        for (const auto& layer : b.layers)
            for (const auto& gt : layer)
                if (gt.kind == gate_kind::measure) order.push_back(gt.q0);
        c.bits_per_round += static_cast<int>(order.size());
        block_meas.push_back(std::move(order));
    }

    for (int r = 0; r < rounds; ++r)
        for (const auto& b : blocks)
            for (const auto& layer : b.layers) c.layers.push_back(layer);

    c.meas_layer_prefix.assign(c.layers.size() + 1, 0);
    for (size_t li = 0; li < c.layers.size(); ++li) {
        int n = 0;
        for (const auto& gt : c.layers[li])
            if (gt.kind == gate_kind::measure) ++n;
        c.meas_layer_prefix[li + 1] = c.meas_layer_prefix[li] + n;
    }

    std::set<int> universe;
    for (const auto& layer : c.layers)
        for (const auto& gt : layer) {
            universe.insert(gt.q0);
            if (gt.kind == gate_kind::cnot) universe.insert(gt.q1);
        }
    c.idle.resize(c.layers.size());
    for (size_t li = 0; li < c.layers.size(); ++li) {
        std::set<int> touched;
        for (const auto& gt : c.layers[li]) {
            touched.insert(gt.q0);
            if (gt.kind == gate_kind::cnot) touched.insert(gt.q1);
        }
        for (int q : universe)
            if (!touched.count(q)) c.idle[li].push_back(q);
    }

    // perfect readout of the data grid, row-major
    std::map<int, int> final_pos;
    for (const auto& [rc, q] : layout.data_map) {
        final_pos[q] = static_cast<int>(c.final_data.size());
        c.final_data.push_back(q);
    }
    auto final_bit = [&](int q) { return rounds * c.bits_per_round + final_pos.at(q); };

    // Z stabilizers check against the |0..0> start and the final readout; X
    // stabilizers only compare consecutive rounds.  Every non-root bridge or
    // flag bit is a standalone zero-reference check.
    struct entry_bits {
        char type = 'X';
        int root_pos = 0;
        std::vector<int> check_pos;
        std::vector<int> support;  // data qubit ids
    };
    std::vector<entry_bits> meta;
    for (size_t pi = 0; pi < s.partitions.size(); ++pi) {
        for (const auto& e : s.partitions[pi]) {
            entry_bits eb;
            eb.type = e.stab_type;
            int root = detail::qubit_id(g, e.tree().syndrome, "tree root");
            const auto& order = block_meas[pi];
            for (const point& p : e.tree().bridge_nodes()) {
                int q = detail::qubit_id(g, p, "tree qubit");
                auto it = std::find(order.begin(), order.end(), q);
                int pos = block_offset[pi] + static_cast<int>(it - order.begin());
                if (q == root)
                    eb.root_pos = pos;
                else
                    eb.check_pos.push_back(pos);
            }
            if (e.flag) {
                int q = detail::qubit_id(g, e.flag->flag, "flag qubit");
                auto it = std::find(order.begin(), order.end(), q);
                eb.check_pos.push_back(block_offset[pi] + static_cast<int>(it - order.begin()));
            }
            for (const point& p : e.tree().data)
                eb.support.push_back(detail::qubit_id(g, p, "data qubit"));
            meta.push_back(std::move(eb));
        }
    }

    auto round_bit = [&](int r, int pos) { return r * c.bits_per_round + pos; };
    for (const auto& eb : meta) {
        detector_kind k =
            eb.type == 'Z' ? detector_kind::syndrome_z : detector_kind::syndrome_x;
        if (eb.type == 'Z') c.det.detectors.push_back({k, {round_bit(0, eb.root_pos)}});
        for (int r = 1; r < rounds; ++r)
            c.det.detectors.push_back(
                {k, {round_bit(r - 1, eb.root_pos), round_bit(r, eb.root_pos)}});
        if (eb.type == 'Z') {
            std::vector<int> bits = {round_bit(rounds - 1, eb.root_pos)};
            for (int q : eb.support) bits.push_back(final_bit(q));
            std::sort(bits.begin(), bits.end());
            c.det.detectors.push_back({k, std::move(bits)});
        }
    }
    for (const auto& eb : meta)
        for (int r = 0; r < rounds; ++r)
            for (int pos : eb.check_pos)
                c.det.detectors.push_back({detector_kind::check, {round_bit(r, pos)}});

    for (const auto& [rc, q] : layout.data_map)
        if (rc.first == 0) c.det.observable_bits.push_back(final_bit(q));
    return c;
}

// One sampled fault outcome in detector space.
struct fault_signature {
    std::vector<int> dets;
    bool logical = false;
};

// A noisy location; on a hit one variant is drawn uniformly.
struct fault_site {
    std::vector<fault_signature> variants;
};

struct fault_class {
    std::vector<int> dets;
    bool logical = false;
    double prob = 0.0;
};

struct decoding_edge {
    int u = 0;
    int v = 0;  // n_det means the boundary
    double prob = 0.0;
    double weight = 0.0;
    bool logical = false;
};

struct decoding_graph {
    int n_det = 0;
    double p_gate = 0.0;
    double p_idle = 0.0;
    std::vector<decoding_edge> edges;
    std::vector<fault_class> classes;        // merged full-variant signatures
    std::vector<fault_class> undetectable;   // logical flips with no detector
    std::vector<fault_site> gate_sites;
    std::vector<fault_site> idle_sites;
};

namespace detail {

struct fault_frame {
    std::vector<uint8_t> fx, fz;
};

// Measurement bits toggled by injecting the listed Paulis after `layer`.
// Codes: 1 = X, 2 = Z, 3 = Y.  Bits come out ascending.
inline void propagate_injection(const cycle_circuit& c, int layer,
                                const std::pair<int, int>* paulis, int np, fault_frame& ws,
                                std::vector<int>& out) {
    out.clear();
    ws.fx.assign(static_cast<size_t>(c.n_qubits), 0);
    ws.fz.assign(static_cast<size_t>(c.n_qubits), 0);
    for (int i = 0; i < np; ++i) {
        if (paulis[i].second & 1) ws.fx[static_cast<size_t>(paulis[i].first)] ^= 1;
        if (paulis[i].second & 2) ws.fz[static_cast<size_t>(paulis[i].first)] ^= 1;
    }
    int mi = c.meas_layer_prefix[static_cast<size_t>(layer) + 1];
    for (size_t li = static_cast<size_t>(layer) + 1; li < c.layers.size(); ++li)
        for (const auto& gt : c.layers[li]) {
            auto q0 = static_cast<size_t>(gt.q0);
            switch (gt.kind) {
                case gate_kind::hadamard: std::swap(ws.fx[q0], ws.fz[q0]); break;
                case gate_kind::cnot: {
                    auto q1 = static_cast<size_t>(gt.q1);
                    ws.fx[q1] ^= ws.fx[q0];
                    ws.fz[q0] ^= ws.fz[q1];
                    break;
                }
                case gate_kind::reset:
                    ws.fx[q0] = 0;
                    ws.fz[q0] = 0;
                    break;
                case gate_kind::measure:
                    if (ws.fx[q0]) out.push_back(mi);
                    ++mi;
                    break;
            }
        }
    for (size_t i = 0; i < c.final_data.size(); ++i)
        if (ws.fx[static_cast<size_t>(c.final_data[i])])
            out.push_back(c.rounds * c.bits_per_round + static_cast<int>(i));
}

// Maps toggled measurement bits onto flipped detectors and the observable.
struct signature_resolver {
    std::vector<std::vector<int>> bit_dets;
    std::vector<uint8_t> bit_obs;
    std::vector<uint8_t> acc;
    std::vector<int> dirty;

    explicit signature_resolver(const cycle_circuit& c) {
        bit_dets.resize(static_cast<size_t>(c.n_meas()));
        bit_obs.assign(static_cast<size_t>(c.n_meas()), 0);
        for (size_t di = 0; di < c.det.detectors.size(); ++di)
            for (int b : c.det.detectors[di].bits)
                bit_dets[static_cast<size_t>(b)].push_back(static_cast<int>(di));
        for (int b : c.det.observable_bits) bit_obs[static_cast<size_t>(b)] = 1;
        acc.assign(c.det.detectors.size(), 0);
    }

    fault_signature resolve(const std::vector<int>& bits) {
        fault_signature sig;
        for (int b : bits) {
            for (int d : bit_dets[static_cast<size_t>(b)]) {
                if (!acc[static_cast<size_t>(d)]) dirty.push_back(d);
                acc[static_cast<size_t>(d)] ^= 1;
            }
            sig.logical = sig.logical != (bit_obs[static_cast<size_t>(b)] != 0);
        }
        for (int d : dirty)
            if (acc[static_cast<size_t>(d)]) sig.dets.push_back(d);
        for (int d : dirty) acc[static_cast<size_t>(d)] = 0;
        dirty.clear();
        std::sort(sig.dets.begin(), sig.dets.end());
        return sig;
    }
};

inline void xor_bits(std::vector<int>& into, const std::vector<int>& other) {
    std::vector<int> merged;
    std::set_symmetric_difference(into.begin(), into.end(), other.begin(), other.end(),
                                  std::back_inserter(merged));
    into = std::move(merged);
}

}  // namespace detail

// Walks every noisy location, propagates each fault variant, merges identical
// signatures, and decomposes them into matchable two-endpoint edges.  Variants
// split into per-qubit X/Z components whose signatures become the edges; any
// component still touching more than two detectors falls back to chained
// pairs grouped by detector kind.
inline decoding_graph enumerate_faults(const cycle_circuit& c, const noise_model& nm) {
    detail::validate_noise(nm);
    decoding_graph gr;
    gr.n_det = static_cast<int>(c.det.detectors.size());
    gr.p_gate = nm.p_gate;
    gr.p_idle = nm.p_idle;

    detail::fault_frame ws;
    detail::signature_resolver res(c);
    std::vector<int> bits;

    // component bit lists, keyed by (layer, qubit, X|Z)
    std::unordered_map<uint64_t, std::vector<int>> comp_bits;
    auto component = [&](int layer, int q, int code) -> const std::vector<int>& {
        uint64_t key = ((static_cast<uint64_t>(layer) * static_cast<uint64_t>(c.n_qubits) +
                         static_cast<uint64_t>(q)) << 1) |
                       static_cast<uint64_t>(code == 2);
        auto it = comp_bits.find(key);
        if (it != comp_bits.end()) return it->second;
        std::pair<int, int> p{q, code};
        detail::propagate_injection(c, layer, &p, 1, ws, bits);
        return comp_bits.emplace(key, bits).first->second;
    };

    std::map<std::pair<std::vector<int>, bool>, double> class_probs;
    std::map<std::tuple<int, int, bool>, double> edge_probs;
    auto add_edge_prob = [&](int u, int v, bool logical, double p) {
        if (u > v) std::swap(u, v);
        double& slot = edge_probs[{u, v, logical}];
        slot = slot * (1.0 - p) + p * (1.0 - slot);
    };

    // splits a component signature into at most two-endpoint pieces; the
    // component's logical effect rides on its first piece
    auto emit_component = [&](const fault_signature& sig, double p) {
        if (sig.dets.empty()) {
            if (sig.logical) {
                auto& u = gr.undetectable.emplace_back();
                u.logical = true;
                u.prob = p;
            }
            return;
        }
        if (sig.dets.size() == 1) {
            add_edge_prob(sig.dets[0], gr.n_det, sig.logical, p);
            return;
        }
        if (sig.dets.size() == 2) {
            add_edge_prob(sig.dets[0], sig.dets[1], sig.logical, p);
            return;
        }
        std::array<std::vector<int>, 3> fam;
        for (int d : sig.dets)
            fam[static_cast<size_t>(c.det.detectors[static_cast<size_t>(d)].kind)].push_back(d);
        std::vector<int> leftover;
        bool first = true;
        for (auto& f : fam) {
            size_t i = 0;
            for (; i + 1 < f.size(); i += 2) {
                add_edge_prob(f[i], f[i + 1], first && sig.logical, p);
                first = false;
            }
            if (i < f.size()) leftover.push_back(f[i]);
        }
        for (size_t i = 0; i + 1 < leftover.size(); i += 2) {
            add_edge_prob(leftover[i], leftover[i + 1], first && sig.logical, p);
            first = false;
        }
        if (leftover.size() % 2) {
            add_edge_prob(leftover.back(), gr.n_det, first && sig.logical, p);
            first = false;
        }
    };

    auto add_variant = [&](fault_site& site, const std::vector<int>& vbits, double pv) {
        fault_signature sig = res.resolve(vbits);
        auto key = std::make_pair(sig.dets, sig.logical);
        class_probs[key] = class_probs[key] * (1.0 - pv) + pv * (1.0 - class_probs[key]);
        site.variants.push_back(std::move(sig));
    };

    // codes: 0 = I, 1 = X, 2 = Z, 3 = Y; a variant is one code per qubit
    auto depol_site = [&](int layer, const std::vector<int>& qubits, double p_site) {
        fault_site site;
        bool two = qubits.size() == 2;
        double pv = p_site / (two ? 15 : 3);
        auto fold = [&](std::vector<int>& vbits, int q, int code) {
            for (int part : {1, 2})
                if (code & part) {
                    const auto& cb = component(layer, q, part);
                    detail::xor_bits(vbits, cb);
                    emit_component(res.resolve(cb), pv);
                }
        };
        for (int code0 = two ? 0 : 1; code0 < 4; ++code0)
            for (int code1 = two ? 0 : 3; code1 < 4; ++code1) {
                if (two && code0 == 0 && code1 == 0) continue;
                std::vector<int> vbits;
                fold(vbits, qubits[0], code0);
                if (two) fold(vbits, qubits[1], code1);
                add_variant(site, vbits, pv);
                if (!two) break;
            }
        return site;
    };

    for (size_t li = 0; li < c.layers.size(); ++li) {
        int mi = c.meas_layer_prefix[li];
        for (const auto& gt : c.layers[li]) {
            switch (gt.kind) {
                case gate_kind::hadamard:
                    gr.gate_sites.push_back(
                        depol_site(static_cast<int>(li), {gt.q0}, nm.p_gate));
                    break;
                case gate_kind::cnot:
                    gr.gate_sites.push_back(
                        depol_site(static_cast<int>(li), {gt.q0, gt.q1}, nm.p_gate));
                    break;
                case gate_kind::reset: {
                    fault_site site;
                    const auto& cb = component(static_cast<int>(li), gt.q0, 1);
                    emit_component(res.resolve(cb), nm.p_gate);
                    add_variant(site, cb, nm.p_gate);
                    gr.gate_sites.push_back(std::move(site));
                    break;
                }
                case gate_kind::measure: {
                    fault_site site;
                    std::vector<int> vbits = {mi};
                    emit_component(res.resolve(vbits), nm.p_gate);
                    add_variant(site, vbits, nm.p_gate);
                    gr.gate_sites.push_back(std::move(site));
                    ++mi;
                    break;
                }
            }
        }
        for (int q : c.idle[li])
            gr.idle_sites.push_back(depol_site(static_cast<int>(li), {q}, nm.p_idle));
    }

    for (auto& [key, p] : class_probs) {
        if (p <= 0.0) continue;
        fault_class fc;
        fc.dets = key.first;
        fc.logical = key.second;
        fc.prob = p;
        gr.classes.push_back(std::move(fc));
    }
    for (auto& [key, p] : edge_probs) {
        if (p <= 0.0) continue;
        decoding_edge e;
        e.u = std::get<0>(key);
        e.v = std::get<1>(key);
        e.logical = std::get<2>(key);
        e.prob = p;
        double pc = std::min(std::max(p, 1e-15), 0.49);
        e.weight = std::log((1.0 - pc) / pc);
        gr.edges.push_back(e);
    }
    return gr;
}

// Minimum-weight matching over the decoding graph: exact search up to 14
// defects, nearest-pair sweep beyond.  Pairwise distances and path logical
// parities come from per-node Dijkstra runs.
struct matcher {
    int n = 0;  // detector count; node n is the boundary
    std::vector<double> dist;
    std::vector<uint8_t> par;

    explicit matcher(const decoding_graph& gr) : n(gr.n_det) {
        int nn = n + 1;
        const double inf = std::numeric_limits<double>::infinity();
        dist.assign(static_cast<size_t>(nn) * nn, inf);
        par.assign(static_cast<size_t>(nn) * nn, 0);

        std::vector<std::vector<std::tuple<int, double, uint8_t>>> adj(nn);
        for (const auto& e : gr.edges) {
            adj[static_cast<size_t>(e.u)].push_back({e.v, e.weight, e.logical ? 1 : 0});
            adj[static_cast<size_t>(e.v)].push_back({e.u, e.weight, e.logical ? 1 : 0});
        }
        using state = std::tuple<double, int, uint8_t>;  // ordered pops keep ties stable
        for (int src = 0; src < nn; ++src) {
            auto* drow = &dist[static_cast<size_t>(src) * nn];
            auto* prow = &par[static_cast<size_t>(src) * nn];
            std::vector<uint8_t> done(static_cast<size_t>(nn), 0);
            std::priority_queue<state, std::vector<state>, std::greater<state>> pq;
            drow[src] = 0.0;
            pq.push({0.0, src, 0});
            while (!pq.empty()) {
                auto [d, u, pr] = pq.top();
                pq.pop();
                if (done[static_cast<size_t>(u)]) continue;
                done[static_cast<size_t>(u)] = 1;
                drow[u] = d;
                prow[u] = pr;
                for (const auto& [v, w, lg] : adj[static_cast<size_t>(u)]) {
                    if (done[static_cast<size_t>(v)]) continue;
                    if (d + w < drow[v]) {
                        drow[v] = d + w;
                        pq.push({d + w, v, static_cast<uint8_t>(pr ^ lg)});
                    }
                }
            }
        }
    }

    double pair_dist(int a, int b) const {
        return dist[static_cast<size_t>(a) * (n + 1) + static_cast<size_t>(b)];
    }
    uint8_t pair_par(int a, int b) const {
        return par[static_cast<size_t>(a) * (n + 1) + static_cast<size_t>(b)];
    }

    bool decode(const std::vector<int>& defects) const {
        size_t k = defects.size();
        if (k == 0) return false;
        if (k <= 14) return decode_exact(defects);
        return decode_greedy(defects);
    }

  private:
    bool decode_exact(const std::vector<int>& defects) const {
        size_t k = defects.size();
        size_t full = size_t{1} << k;
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> dp(full, inf);
        std::vector<uint8_t> dpp(full, 0);
        dp[0] = 0.0;
        for (size_t mask = 1; mask < full; ++mask) {
            size_t i = 0;
            while (!(mask & (size_t{1} << i))) ++i;
            size_t rest = mask ^ (size_t{1} << i);
            double best = dp[rest] + pair_dist(defects[i], n);
            uint8_t bpar = dpp[rest] ^ pair_par(defects[i], n);
            for (size_t j = i + 1; j < k; ++j) {
                if (!(mask & (size_t{1} << j))) continue;
                size_t r2 = rest ^ (size_t{1} << j);
                double cand = dp[r2] + pair_dist(defects[i], defects[j]);
                if (cand < best) {
                    best = cand;
                    bpar = dpp[r2] ^ pair_par(defects[i], defects[j]);
                }
            }
            dp[mask] = best;
            dpp[mask] = bpar;
        }
        return dpp[full - 1] != 0;
    }

    bool decode_greedy(const std::vector<int>& defects) const {
        size_t k = defects.size();
        std::vector<std::tuple<double, int, int>> cand;  // (weight, i, j) with j==-1 boundary
        for (size_t i = 0; i < k; ++i) {
            cand.push_back({pair_dist(defects[i], n), static_cast<int>(i), -1});
            for (size_t j = i + 1; j < k; ++j)
                cand.push_back(
                    {pair_dist(defects[i], defects[j]), static_cast<int>(i), static_cast<int>(j)});
        }
        std::sort(cand.begin(), cand.end());
        std::vector<uint8_t> used(k, 0);
        bool parity = false;
        for (const auto& [w, i, j] : cand) {
            if (used[static_cast<size_t>(i)]) continue;
            if (j >= 0 && used[static_cast<size_t>(j)]) continue;
            used[static_cast<size_t>(i)] = 1;
            if (j >= 0) {
                used[static_cast<size_t>(j)] = 1;
                parity = parity != (pair_par(defects[static_cast<size_t>(i)],
                                             defects[static_cast<size_t>(j)]) != 0);
            } else {
                parity = parity != (pair_par(defects[static_cast<size_t>(i)], n) != 0);
            }
        }
        return parity;
    }
};

struct shot_result {
    long long shots = 0;
    long long errors = 0;
    double rate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

inline std::pair<double, double> wilson_ci(long long errors, long long shots, double z = 1.96) {
    double nn = static_cast<double>(shots);
    double ph = static_cast<double>(errors) / nn;
    double z2 = z * z;
    double den = 1.0 + z2 / nn;
    double center = (ph + z2 / (2.0 * nn)) / den;
    double half = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn)) / den;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// Monte-Carlo logical error rate: sample fault sites geometrically per shot,
// accumulate their detector signatures, decode, and compare the predicted
// observable flip with the sampled one.  Shots draw independent counter-based
// streams so results do not depend on evaluation order.
inline shot_result run_shots(const cycle_circuit& c, const noise_model& nm, long long shots,
                             uint64_t seed) {
    if (shots < 1) throw validation_error("shot count must be positive");
    detail::validate_noise(nm);
    decoding_graph gr = enumerate_faults(c, nm);
    matcher m(gr);

    std::vector<uint8_t> acc(static_cast<size_t>(gr.n_det), 0);
    std::vector<int> dirty;
    shot_result out;
    out.shots = shots;

    for (long long shot = 0; shot < shots; ++shot) {
        std::mt19937_64 eng(mix_seed(seed, static_cast<uint64_t>(shot)));
        bool obs = false;
        auto sample_stream = [&](const std::vector<fault_site>& sites, double p) {
            if (p <= 0.0 || sites.empty()) return;
            long long i = geometric_skip(eng, p);
            while (i < static_cast<long long>(sites.size())) {
                const auto& site = sites[static_cast<size_t>(i)];
                size_t vi = site.variants.size() > 1
                                ? static_cast<size_t>(eng() % site.variants.size())
                                : 0;
                const auto& sig = site.variants[vi];
                for (int d : sig.dets) {
                    if (!acc[static_cast<size_t>(d)]) dirty.push_back(d);
                    acc[static_cast<size_t>(d)] ^= 1;
                }
                obs = obs != sig.logical;
                i += 1 + geometric_skip(eng, p);
            }
        };
        sample_stream(gr.gate_sites, nm.p_gate);
        sample_stream(gr.idle_sites, nm.p_idle);

        std::vector<int> defects;
        for (int d : dirty)
            if (acc[static_cast<size_t>(d)]) defects.push_back(d);
        for (int d : dirty) acc[static_cast<size_t>(d)] = 0;
        dirty.clear();
        std::sort(defects.begin(), defects.end());
        defects.erase(std::unique(defects.begin(), defects.end()), defects.end());

        bool predicted = m.decode(defects);
        if (predicted != obs) ++out.errors;
    }
    out.rate = static_cast<double>(out.errors) / static_cast<double>(out.shots);
    auto [lo, hi] = wilson_ci(out.errors, out.shots);
    out.ci_low = lo;
    out.ci_high = hi;
    return out;
}

struct error_curve {
    std::vector<double> p;
    std::vector<double> rate;
    std::vector<double> lo;
    std::vector<double> hi;
};

struct threshold_estimate {
    bool crossed = false;
    double p_cross = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

namespace detail {

// First sign change of log(a) - log(b) along the sweep, interpolated in logs.
inline std::optional<double> log_crossing(const std::vector<double>& p,
                                          const std::vector<double>& a,
                                          const std::vector<double>& b) {
    auto clamp = [](double r) { return std::max(r, 1e-12); };
    for (size_t i = 0; i + 1 < p.size(); ++i) {
        double f0 = std::log(clamp(a[i])) - std::log(clamp(b[i]));
        double f1 = std::log(clamp(a[i + 1])) - std::log(clamp(b[i + 1]));
        if (f0 <= 0.0 && f1 > 0.0) {
            if (f1 == f0) return p[i];
            double x0 = std::log(p[i]), x1 = std::log(p[i + 1]);
            return std::exp(x0 + (0.0 - f0) * (x1 - x0) / (f1 - f0));
        }
    }
    return std::nullopt;
}

}  // namespace detail

// Crossing of the low- and high-distance logical error curves; the confidence
// band re-runs the crossing with each curve pushed to its binomial bounds.
inline threshold_estimate estimate_threshold(const error_curve& low_d,
                                             const error_curve& high_d) {
    if (low_d.p.size() < 2 || low_d.p.size() != high_d.p.size())
        throw validation_error("threshold estimate needs two aligned sweeps");
    for (size_t i = 0; i < low_d.p.size(); ++i)
        if (std::abs(low_d.p[i] - high_d.p[i]) > 1e-12 * std::max(1.0, low_d.p[i]))
            throw validation_error("threshold sweeps must share the p grid");

    threshold_estimate est;
    auto central = detail::log_crossing(low_d.p, high_d.rate, low_d.rate);
    if (!central) return est;
    est.crossed = true;
    est.p_cross = *central;
    auto early = detail::log_crossing(low_d.p, high_d.hi, low_d.lo);
    auto late = detail::log_crossing(low_d.p, high_d.lo, low_d.hi);
    est.ci_low = early.value_or(low_d.p.front());
    est.ci_high = late.value_or(low_d.p.back());
    if (est.ci_low > est.ci_high) std::swap(est.ci_low, est.ci_high);
    return est;
}

}  // namespace scsynth
