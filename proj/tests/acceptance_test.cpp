// End-to-end acceptance gate.  Each numbered check prints exactly one
// PASS/FAIL line with the measured values next to the pinned targets, so a
// reader can see how far off a failing build is without rerunning anything.
// The process always exits 0: a FAIL line is a recorded result, not a crash.

#include <scsynth/allocate.hpp>
#include <scsynth/bridge.hpp>
#include <scsynth/circuit.hpp>
#include <scsynth/device.hpp>
#include <scsynth/driver.hpp>
#include <scsynth/schedule.hpp>
#include <scsynth/sim.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"

using namespace scsynth;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct check_result {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

// Synthesized configurations are shared across checks; the first access pays
// for the synthesis, so the structural check below must run first to time it.
struct synth_cache {
    std::map<std::string, synth_result> by_key;

    const synth_result& get(arch_kind arch, allocation_mode mode, int distance) {
        std::string key =
            to_string(arch) + "/" + to_string(mode) + "/" + std::to_string(distance);
        auto it = by_key.find(key);
        if (it != by_key.end()) return it->second;
        return by_key.emplace(key, synth(arch, distance, mode)).first->second;
    }
};

// ---- check 1: structural invariants per architecture and distance ----------

check_result check_structural(synth_cache& cache) {
    const double limit = 10.0;
    double worst = 0.0;
    int configs = 0;
    for (arch_kind arch :
         {arch_kind::square, arch_kind::hexagon, arch_kind::heavy_square,
          arch_kind::heavy_hexagon}) {
        for (int d : {3, 5}) {
            auto t0 = std::chrono::steady_clock::now();
            const synth_result& r = cache.get(arch, allocation_mode::pair3, d);
            if (r.report.data_qubits != d * d)
                return {false, to_string(arch) + " d" + std::to_string(d) + ": " +
                                   std::to_string(r.report.data_qubits) + " data qubits, want " +
                                   std::to_string(d * d)};
            if (static_cast<int>(r.layout.rects.size()) != d * d - 1)
                return {false, to_string(arch) + " d" + std::to_string(d) + ": " +
                                   std::to_string(r.layout.rects.size()) +
                                   " stabilizers, want " + std::to_string(d * d - 1)};
            if (!feasibility_check(r.g, r.layout).ok)
                return {false, to_string(arch) + " d" + std::to_string(d) +
                                   ": layout fails the branching feasibility check"};
            int verified = 0;
            for (const auto& part : r.sched.partitions)
                for (const auto& e : part) {
                    if (!prop1_holds(e.tree()))
                        return {false, to_string(arch) + " d" + std::to_string(d) +
                                           ": stabilizer " + std::to_string(e.id) +
                                           " tree violates the degree condition"};
                    auto mc = gen_measurement_circuit(r.g, e.stab_type, e.tree(), e.flag);
                    if (!verify_stabilizer(r.g, mc).ok)
                        return {false, to_string(arch) + " d" + std::to_string(d) +
                                           ": stabilizer " + std::to_string(e.id) +
                                           " circuit fails verification"};
                    ++verified;
                }
            if (verified != d * d - 1)
                return {false, to_string(arch) + " d" + std::to_string(d) + ": schedule holds " +
                                   std::to_string(verified) + " entries, want " +
                                   std::to_string(d * d - 1)};
            double dt = seconds_since(t0);
            worst = std::max(worst, dt);
            if (dt >= limit)
                return {false, to_string(arch) + " d" + std::to_string(d) + " took " +
                                   fmt("%.1f", dt) + "s (limit 10s)"};
            ++configs;
        }
    }
    return {true, std::to_string(configs) +
                      " configs: d^2 data qubits, d^2-1 verified stabilizers each, slowest " +
                      fmt("%.2f", worst) + "s (limit 10s/config)"};
}

// ---- check 2: distance-5 qubit totals against the reference counts ---------

check_result check_qubit_totals(synth_cache& cache) {
    const synthesis_report& sq = cache.get(arch_kind::square, allocation_mode::pair3, 5).report;
    const synthesis_report& sq4 =
        cache.get(arch_kind::square, allocation_mode::center4, 5).report;
    const synthesis_report& hsq =
        cache.get(arch_kind::heavy_square, allocation_mode::pair3, 5).report;
    const synthesis_report& hhex =
        cache.get(arch_kind::heavy_hexagon, allocation_mode::pair3, 5).report;

    bool sq_ok = sq.total_qubits == 45 && sq.data_qubits == 25 && sq.bridge_qubits == 20 &&
                 sq.unused_pct == 0.0;
    bool sq4_ok = sq4.total_qubits == 57;
    bool hsq_ok = std::abs(hsq.total_qubits - 79) <= 6;
    bool hhex_ok = std::abs(hhex.total_qubits - 133) <= 10;

    std::ostringstream os;
    os << "square " << sq.total_qubits << " (" << sq.data_qubits << "/" << sq.bridge_qubits
       << "/0) want 45 (25/20/0)" << (sq_ok ? "" : " MISS") << "; square-4 " << sq4.total_qubits
       << " want 57" << (sq4_ok ? "" : " MISS") << "; heavy-square " << hsq.total_qubits
       << " want 79+-6" << (hsq_ok ? "" : " MISS") << "; heavy-hexagon " << hhex.total_qubits
       << " want 133+-10" << (hhex_ok ? "" : " MISS");
    return {sq_ok && sq4_ok && hsq_ok && hhex_ok, os.str()};
}

// ---- check 3: distance-5 four-data X-stabilizer averages and cycle times ---

check_result check_stab_metrics(synth_cache& cache) {
    struct row {
        arch_kind arch;
        allocation_mode mode;
        double bridge, cnot, depth;
        int cycle;
        double tol_bridge, tol_cnot, tol_depth, tol_cycle;
    };
    const double inf = std::numeric_limits<double>::infinity();
    const std::vector<row> rows = {
        {arch_kind::square, allocation_mode::pair3, 2, 6, 10, 20, 0, 0, 0, 0},
        {arch_kind::square, allocation_mode::center4, 1, 4, 8, 8, 0, 0, 0, 0},
        {arch_kind::heavy_square, allocation_mode::pair3, 3, 8, 12, 24, 0, 0, 0, 0},
        {arch_kind::hexagon, allocation_mode::pair3, 4, 10, 13, 26, 1, 1, 1, 1},
        // depth and cycle time unpinned for heavy-hexagon
        {arch_kind::heavy_hexagon, allocation_mode::pair3, 7, 19, 0, 0, 1, 3, inf, inf},
    };
    bool all_ok = true;
    std::ostringstream os;
    for (const row& r : rows) {
        const synthesis_report& rep = cache.get(r.arch, r.mode, 5).report;
        bool ok = std::abs(rep.avg_bridge - r.bridge) <= r.tol_bridge + 1e-9 &&
                  std::abs(rep.avg_cnot - r.cnot) <= r.tol_cnot + 1e-9 &&
                  std::abs(rep.avg_depth - r.depth) <= r.tol_depth &&
                  std::abs(rep.total_cycle - r.cycle) <= r.tol_cycle;
        all_ok = all_ok && ok;
        if (&r != &rows.front()) os << "; ";
        os << to_string(r.arch) << (r.mode == allocation_mode::center4 ? "-4" : "") << " ("
           << fmt("%g", rep.avg_bridge) << "," << fmt("%g", rep.avg_cnot) << ","
           << fmt("%g", rep.avg_depth) << ",tot " << rep.total_cycle << ")"
           << (ok ? "" : " MISS");
    }
    os << "; targets sq(2,6,10,20) sq4(1,4,8,8) hsq(3,8,12,24) hex(4,10,13,26)+-1 "
          "hhex(bridge 7+-1, cnot 19+-3)";
    return {all_ok, os.str()};
}

// ---- check 4: tree cost bound over random rectangles ------------------------

check_result check_tree_bound() {
    struct arch_case {
        const char* name;
        device_graph g;
        int xmax, ymax;
    };
    std::vector<arch_case> cases;
    cases.push_back({"square", gen_square(9, 9), 16, 16});
    cases.push_back({"hexagon", gen_hexagon(7, 16), 30, 12});
    cases.push_back({"heavy-square", gen_heavy(gen_square(7, 7)), 12, 12});
    cases.push_back({"heavy-hexagon", gen_heavy(gen_hexagon(5, 12)), 22, 8});

    int checked = 0, trees_total = 0, violations = 0;
    for (auto& c : cases) {
        std::mt19937 rng(20240601);
        std::uniform_int_distribution<int> px(0, c.xmax / 2 - 1), py(0, c.ymax / 2 - 1),
            ps(0, 2);
        for (int trial = 0; trial < 1200; ++trial) {
            int x0 = 2 * px(rng), y0 = 2 * py(rng);
            int w = 2 + 2 * ps(rng), h = 2 + 2 * ps(rng);
            int x1 = std::min(x0 + w, c.xmax), y1 = std::min(y0 + h, c.ymax);
            if (x1 - x0 < 2 || y1 - y0 < 2) continue;
            stab_region region;
            region.bounds = rect{x0, y0, x1, y1};
            region.data = {{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}};
            double bound = prop2_bound(c.g, region);
            std::vector<bridge_tree> trees;
            try {
                trees = branching_trees(c.g, region);
            } catch (const infeasible_error&) {
                continue;
            }
            if (trees.empty()) continue;
            for (const auto& t : trees)
                if (t.edge_count() > bound) ++violations;
            trees_total += static_cast<int>(trees.size());
            ++checked;
        }
    }
    std::ostringstream os;
    os << checked << " rectangles (need >=1000) across 4 architectures, " << trees_total
       << " trees, " << violations << " cost-bound violations";
    return {checked >= 1000 && violations == 0, os.str()};
}

// ---- check 5: every layout tree matches the exact Steiner minimum -----------

check_result check_steiner_optimal(synth_cache& cache) {
    struct cfg {
        arch_kind arch;
        allocation_mode mode;
        int d;
    };
    std::vector<cfg> cfgs;
    for (arch_kind arch :
         {arch_kind::square, arch_kind::hexagon, arch_kind::heavy_square,
          arch_kind::heavy_hexagon})
        for (int d : {3, 5}) cfgs.push_back({arch, allocation_mode::pair3, d});
    for (arch_kind arch : {arch_kind::square, arch_kind::heavy_square})
        for (int d : {3, 5}) cfgs.push_back({arch, allocation_mode::center4, d});

    auto t0 = std::chrono::steady_clock::now();
    int rects = 0, mismatches = 0;
    for (const cfg& c : cfgs) {
        const synth_result& r = cache.get(c.arch, c.mode, c.d);
        for (const auto& rc : r.layout.rects) {
            int oracle = steiner_oracle(r.g, rc.region);
            for (const auto& cand : rc.candidates)
                if (static_cast<int>(cand.edge_count()) != oracle) ++mismatches;
            ++rects;
        }
    }
    double dt = seconds_since(t0);
    std::ostringstream os;
    os << rects << " rectangles over " << cfgs.size() << " layouts, " << mismatches
       << " size mismatches vs exhaustive Steiner search, " << fmt("%.1f", dt)
       << "s (limit 60s)";
    return {mismatches == 0 && dt < 60.0, os.str()};
}

// ---- check 6: refinement walkthrough and monotonicity -----------------------

// Tree from raw edges; every endpoint not listed as data becomes a bridge.
bridge_tree fixture_tree(point syndrome, std::vector<tree_edge> raw_edges,
                         std::vector<point> data) {
    bridge_tree t;
    t.syndrome = syndrome;
    std::set<point, point_yx_less> nodes;
    for (auto& [a, b] : raw_edges) {
        nodes.insert(a);
        nodes.insert(b);
        t.edges.push_back(make_tree_edge(a, b));
    }
    std::sort(t.edges.begin(), t.edges.end());
    t.nodes.assign(nodes.begin(), nodes.end());
    std::sort(data.begin(), data.end(), point_yx_less{});
    t.data = std::move(data);
    return t;
}

schedule_entry make_entry(int id, char type, std::vector<bridge_tree> cands) {
    schedule_entry e;
    e.id = id;
    e.stab_type = type;
    e.candidates = std::move(cands);
    return e;
}

std::vector<std::set<int>> partition_ids(const measurement_schedule& s) {
    std::vector<std::set<int>> out;
    for (const auto& p : s.partitions) {
        std::set<int> ids;
        for (const auto& e : p) ids.insert(e.id);
        out.push_back(std::move(ids));
    }
    return out;
}

// Six stabilizers whose refinement walks the full swap cascade: the largest
// entry of the shorter set migrates, evicts a conflicting mid-size entry,
// which in turn evicts a small entry that lands back in the first partition
// on its alternate tree.
check_result check_scheduler() {
    std::vector<point> pts = {
        {0, 0}, {0, 4}, {4, 0}, {4, 4}, {0, 2}, {2, 2}, {4, 2},
        {8, 0}, {8, 4}, {10, 0}, {10, 4}, {8, 2}, {10, 2},
        {16, 0}, {16, 4}, {14, 0}, {12, 0}, {16, 2}, {14, 2},
        {12, 6}, {16, 6}, {14, 8}, {12, 4}, {14, 6}, {14, 4},
        {10, -2}, {12, -2}, {16, -2}, {18, -2}, {13, -5},
        {22, 0}, {22, 4}, {20, 2}, {24, 2}, {22, 2},
    };
    std::vector<std::pair<point, point>> edges = {
        {{0, 2}, {0, 0}},    {{0, 2}, {0, 4}},    {{0, 2}, {2, 2}},   {{2, 2}, {4, 2}},
        {{4, 2}, {4, 0}},    {{4, 2}, {4, 4}},    {{8, 2}, {8, 0}},   {{8, 2}, {8, 4}},
        {{8, 2}, {10, 2}},   {{10, 2}, {10, 0}},  {{10, 2}, {10, 4}}, {{16, 2}, {16, 0}},
        {{16, 2}, {16, 4}},  {{16, 2}, {14, 2}},  {{14, 2}, {14, 0}}, {{14, 2}, {12, 0}},
        {{14, 6}, {12, 6}},  {{14, 6}, {16, 6}},  {{14, 6}, {14, 8}}, {{14, 6}, {14, 4}},
        {{14, 4}, {12, 4}},  {{14, 4}, {14, 2}},  {{10, 2}, {16, 2}}, {{10, 2}, {10, -2}},
        {{10, 2}, {12, -2}}, {{16, 2}, {16, -2}}, {{16, 2}, {18, -2}},
        {{13, -5}, {10, -2}}, {{13, -5}, {12, -2}}, {{13, -5}, {16, -2}}, {{13, -5}, {18, -2}},
        {{22, 2}, {22, 0}},  {{22, 2}, {22, 4}},  {{22, 2}, {20, 2}}, {{22, 2}, {24, 2}},
        {{4, 4}, {8, 4}},    {{10, 0}, {12, 0}},  {{16, 0}, {22, 0}},
    };
    device_graph wg = fixtures::make_device("walkthrough", {}, pts, edges);

    bridge_tree r1 = fixture_tree(
        {0, 2},
        {{{0, 2}, {0, 0}}, {{0, 2}, {0, 4}}, {{0, 2}, {2, 2}}, {{2, 2}, {4, 2}},
         {{4, 2}, {4, 0}}, {{4, 2}, {4, 4}}},
        {{0, 0}, {0, 4}, {4, 0}, {4, 4}});
    bridge_tree r2 = fixture_tree(
        {14, 6},
        {{{14, 6}, {12, 6}}, {{14, 6}, {16, 6}}, {{14, 6}, {14, 8}}, {{14, 6}, {14, 4}},
         {{14, 4}, {12, 4}}, {{14, 4}, {14, 2}}},
        {{12, 6}, {16, 6}, {14, 8}, {12, 4}});
    bridge_tree r3 = fixture_tree(
        {22, 2},
        {{{22, 2}, {22, 0}}, {{22, 2}, {22, 4}}, {{22, 2}, {20, 2}}, {{22, 2}, {24, 2}}},
        {{22, 0}, {22, 4}, {20, 2}, {24, 2}});
    bridge_tree r4 = fixture_tree(
        {16, 2},
        {{{16, 2}, {16, 0}}, {{16, 2}, {16, 4}}, {{16, 2}, {14, 2}}, {{14, 2}, {14, 0}},
         {{14, 2}, {12, 0}}},
        {{16, 0}, {16, 4}, {14, 0}, {12, 0}});
    bridge_tree r5 = fixture_tree(
        {8, 2},
        {{{8, 2}, {8, 0}}, {{8, 2}, {8, 4}}, {{8, 2}, {10, 2}}, {{10, 2}, {10, 0}},
         {{10, 2}, {10, 4}}},
        {{8, 0}, {8, 4}, {10, 0}, {10, 4}});
    bridge_tree r6 = fixture_tree(
        {10, 2},
        {{{10, 2}, {16, 2}}, {{10, 2}, {10, -2}}, {{10, 2}, {12, -2}}, {{16, 2}, {16, -2}},
         {{16, 2}, {18, -2}}},
        {{10, -2}, {12, -2}, {16, -2}, {18, -2}});
    bridge_tree r6_alt = fixture_tree(
        {13, -5},
        {{{13, -5}, {10, -2}}, {{13, -5}, {12, -2}}, {{13, -5}, {16, -2}}, {{13, -5}, {18, -2}}},
        {{10, -2}, {12, -2}, {16, -2}, {18, -2}});

    std::vector<schedule_entry> entries;
    entries.push_back(make_entry(0, 'X', {r1}));
    entries.push_back(make_entry(1, 'Z', {r2}));
    entries.push_back(make_entry(2, 'Z', {r3}));
    entries.push_back(make_entry(3, 'X', {r4}));
    entries.push_back(make_entry(4, 'X', {r5}));
    entries.push_back(make_entry(5, 'Z', {r6, r6_alt}));
    std::set<point, point_yx_less> wdata;
    for (const auto& e : entries)
        for (const point& d : e.candidates[0].data) wdata.insert(d);

    measurement_schedule ws = init_schedule(wg, entries, wdata);
    refine(wg, ws);
    auto parts = partition_ids(ws);
    bool walkthrough_ok =
        parts == std::vector<std::set<int>>{{0, 1, 4, 5}, {2, 3}} && total_cycle_time(ws) == 22;

    // random instances: overlapping rectangles on a shared device, foreign
    // data blocked, so refinement has real conflicts to untangle
    device_graph g = gen_square(9, 9);
    std::mt19937 rng(31100);
    std::uniform_int_distribution<int> px(0, 7), py(0, 7), ps(0, 2);
    int instances = 0, regressions = 0, attempts = 0;
    while (instances < 200 && attempts < 1000) {
        ++attempts;
        int want = 4 + static_cast<int>(rng() % 6);
        std::vector<stab_region> regions;
        std::vector<char> types;
        for (int i = 0; i < want; ++i) {
            int x0 = 2 * px(rng), y0 = 2 * py(rng);
            int w = 2 + 2 * ps(rng), h = 2 + 2 * ps(rng);
            int x1 = std::min(x0 + w, 16), y1 = std::min(y0 + h, 16);
            if (x1 - x0 < 2 || y1 - y0 < 2) continue;
            stab_region region;
            region.bounds = rect{x0, y0, x1, y1};
            region.data = {{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}};
            regions.push_back(std::move(region));
            types.push_back((rng() & 1) ? 'Z' : 'X');
        }
        for (size_t i = 0; i < regions.size(); ++i)
            for (size_t j = 0; j < regions.size(); ++j) {
                if (i == j) continue;
                for (const point& p : regions[j].data)
                    if (!regions[i].is_data(p)) regions[i].blocked.insert(p);
            }
        std::vector<schedule_entry> inst;
        std::set<point, point_yx_less> data;
        for (size_t i = 0; i < regions.size(); ++i) {
            std::vector<bridge_tree> cands;
            try {
                cands = find_bridge_trees(g, regions[i]);
            } catch (const infeasible_error&) {
                continue;
            }
            int id = static_cast<int>(inst.size());
            inst.push_back(make_entry(id, types[i], std::move(cands)));
            for (const point& p : inst.back().candidates[0].data) data.insert(p);
        }
        if (inst.size() < 2) continue;
        measurement_schedule s = init_schedule(g, std::move(inst), std::move(data));
        int before = total_cycle_time(s);
        refine(g, s);
        if (total_cycle_time(s) > before) ++regressions;
        ++instances;
    }

    std::ostringstream os;
    os << "walkthrough partitions " << (walkthrough_ok ? "{0,1,4,5}/{2,3} as pinned" : "WRONG")
       << "; " << instances << " random instances (need 200), " << regressions
       << " cycle-time regressions across refinement";
    return {walkthrough_ok && instances == 200 && regressions == 0, os.str()};
}

// ---- check 7: exhaustive single-fault decoding at distance 3 ----------------

check_result check_single_fault(synth_cache& cache) {
    const synth_result& r = cache.get(arch_kind::square, allocation_mode::pair3, 3);
    auto t0 = std::chrono::steady_clock::now();
    noise_model nm;
    nm.p_gate = 1e-3;
    long long variants_total = 0, failures = 0;
    std::vector<long long> per_rounds;
    for (int rounds : {1, 3}) {
        cycle_circuit c = build_cycle_circuit(r.g, r.layout, r.sched, rounds);
        decoding_graph gr = enumerate_faults(c, nm);
        matcher m(gr);
        long long variants = 0;
        auto decode_all = [&](const std::vector<fault_site>& sites) {
            for (const auto& fs : sites)
                for (const auto& v : fs.variants) {
                    ++variants;
                    if (m.decode(v.dets) != v.logical) ++failures;
                }
        };
        decode_all(gr.gate_sites);
        decode_all(gr.idle_sites);
        per_rounds.push_back(variants);
        variants_total += variants;
    }
    double dt = seconds_since(t0);
    std::ostringstream os;
    os << "square d3: " << per_rounds[0] << " single-fault variants over one cycle plus "
       << per_rounds[1] << " over three, " << failures << " decoding failures, "
       << fmt("%.1f", dt) << "s (limit 120s)";
    return {failures == 0 && dt < 120.0, os.str()};
}

// ---- check 8: logical error rates, curve crossings, threshold ordering ------

error_curve sweep_curve(const synth_result& r, const std::vector<double>& ps, int shots,
                        uint64_t seed) {
    error_curve c;
    cycle_circuit cc = build_cycle_circuit(r.g, r.layout, r.sched, r.layout.distance);
    for (double p : ps) {
        noise_model nm;
        nm.p_gate = p;
        shot_result sr = run_shots(cc, nm, shots, seed);
        c.p.push_back(p);
        c.rate.push_back(sr.rate);
        c.lo.push_back(sr.ci_low);
        c.hi.push_back(sr.ci_high);
    }
    return c;
}

// Ordering value of a distance-3/5 curve pair: the interpolated crossing if
// there is one, else 0 when d5 is worse at every grid point (crossing below
// the grid) and +inf when d5 is better everywhere (crossing above it).
double threshold_value(const threshold_estimate& t, const error_curve& lo,
                       const error_curve& hi) {
    if (t.crossed) return t.p_cross;
    bool d5_worse_everywhere = true;
    for (size_t i = 0; i < lo.p.size(); ++i)
        if (hi.rate[i] <= lo.rate[i]) d5_worse_everywhere = false;
    return d5_worse_everywhere ? 0.0 : std::numeric_limits<double>::infinity();
}

check_result check_error_rates(synth_cache& cache) {
    auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> grid = {1e-3, 1.8e-3, 3.2e-3, 5.6e-3, 1e-2, 1.8e-2, 3e-2};

    const synth_result& sq3 = cache.get(arch_kind::square, allocation_mode::pair3, 3);
    const synth_result& sq5 = cache.get(arch_kind::square, allocation_mode::pair3, 5);

    // low-noise separation at p_gate = 1e-4
    noise_model nm_lo;
    nm_lo.p_gate = 1e-4;
    shot_result r3 = run_shots(build_cycle_circuit(sq3.g, sq3.layout, sq3.sched, 3), nm_lo,
                               10000, 11);
    shot_result r5 = run_shots(build_cycle_circuit(sq5.g, sq5.layout, sq5.sched, 5), nm_lo,
                               10000, 12);
    bool ok_a = r5.rate < r3.rate && r5.ci_high < r3.ci_low;

    // crossing and threshold estimate on the square architecture
    error_curve sq_lo = sweep_curve(sq3, grid, 4000, 101);
    error_curve sq_hi = sweep_curve(sq5, grid, 4000, 202);
    threshold_estimate t_sq = estimate_threshold(sq_lo, sq_hi);
    bool ok_b = t_sq.crossed && t_sq.p_cross >= 1e-3 && t_sq.p_cross <= 3e-2;
    bool ok_c = t_sq.crossed && t_sq.p_cross >= 0.002 && t_sq.p_cross <= 0.013;

    // threshold ordering across architectures
    error_curve sq4_lo =
        sweep_curve(cache.get(arch_kind::square, allocation_mode::center4, 3), grid, 4000, 101);
    error_curve sq4_hi =
        sweep_curve(cache.get(arch_kind::square, allocation_mode::center4, 5), grid, 4000, 202);
    threshold_estimate t_sq4 = estimate_threshold(sq4_lo, sq4_hi);
    error_curve hsq4_lo = sweep_curve(
        cache.get(arch_kind::heavy_square, allocation_mode::center4, 3), grid, 4000, 101);
    error_curve hsq4_hi = sweep_curve(
        cache.get(arch_kind::heavy_square, allocation_mode::center4, 5), grid, 4000, 202);
    threshold_estimate t_hsq4 = estimate_threshold(hsq4_lo, hsq4_hi);
    error_curve hhex_lo = sweep_curve(
        cache.get(arch_kind::heavy_hexagon, allocation_mode::pair3, 3), grid, 2000, 101);
    error_curve hhex_hi = sweep_curve(
        cache.get(arch_kind::heavy_hexagon, allocation_mode::pair3, 5), grid, 2000, 202);
    threshold_estimate t_hhex = estimate_threshold(hhex_lo, hhex_hi);

    double v_sq = threshold_value(t_sq, sq_lo, sq_hi);
    double v_sq4 = threshold_value(t_sq4, sq4_lo, sq4_hi);
    double v_hsq4 = threshold_value(t_hsq4, hsq4_lo, hsq4_hi);
    double v_hhex = threshold_value(t_hhex, hhex_lo, hhex_hi);
    bool ok_d = v_sq4 > v_hsq4 && v_sq > v_hhex;

    double dt = seconds_since(t0);
    bool ok_e = dt < 1800.0;

    std::ostringstream os;
    os << "a) p=1e-4: d3 " << fmt("%.5f", r3.rate) << " [" << fmt("%.5f", r3.ci_low) << ","
       << fmt("%.5f", r3.ci_high) << "] vs d5 " << fmt("%.5f", r5.rate) << " ["
       << fmt("%.5f", r5.ci_low) << "," << fmt("%.5f", r5.ci_high) << "] CI-separated "
       << (ok_a ? "yes" : "no MISS") << "; b) square crossing " << fmt("%.5g", t_sq.p_cross)
       << " in [0.001,0.03] " << (ok_b ? "yes" : "no MISS") << "; c) threshold "
       << fmt("%.5g", t_sq.p_cross) << " in [0.002,0.013] " << (ok_c ? "yes" : "no MISS")
       << "; d) square-4 " << fmt("%.4g", v_sq4) << " > heavy-square-4 " << fmt("%.4g", v_hsq4)
       << " and square " << fmt("%.4g", v_sq) << " > heavy-hexagon " << fmt("%.4g", v_hhex)
       << " " << (ok_d ? "yes" : "no MISS") << "; e) " << fmt("%.0f", dt) << "s (limit 1800s)";
    return {ok_a && ok_b && ok_c && ok_d && ok_e, os.str()};
}

// ---- check 9: determinism of synthesis and seeded simulation ----------------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

check_result check_determinism(synth_cache& cache) {
    std::string a = synth_to_json(synth(arch_kind::square, 5, allocation_mode::pair3)).dump(2);
    std::string b = synth_to_json(synth(arch_kind::square, 5, allocation_mode::pair3)).dump(2);
    bool synth_ok = a == b;

    const synth_result& sq3 = cache.get(arch_kind::square, allocation_mode::pair3, 3);
    cycle_circuit c = build_cycle_circuit(sq3.g, sq3.layout, sq3.sched, 3);
    noise_model nm;
    nm.p_gate = 1e-3;
    shot_result s1 = run_shots(c, nm, 2000, 7);
    shot_result s2 = run_shots(c, nm, 2000, 7);
    bool sim_ok = s1.errors == s2.errors;

    // exercise the installed command-line binary when it sits next to us
    std::string cli_note = "; cli binary not found, library-level check only";
    if (std::filesystem::exists("scsynth")) {
        int rc = 0;
        rc |= std::system("./scsynth synth --arch square --distance 5 --out acc_synth_a.json");
        rc |= std::system("./scsynth synth --arch square --distance 5 --out acc_synth_b.json");
        rc |= std::system(
            "./scsynth simulate --arch square --distance 3 --p-gate 0.001 --shots 2000 "
            "--seed 7 > acc_sim_a.txt");
        rc |= std::system(
            "./scsynth simulate --arch square --distance 3 --p-gate 0.001 --shots 2000 "
            "--seed 7 > acc_sim_b.txt");
        bool cli_ok = rc == 0 && slurp("acc_synth_a.json") == slurp("acc_synth_b.json") &&
                      !slurp("acc_sim_a.txt").empty() &&
                      slurp("acc_sim_a.txt") == slurp("acc_sim_b.txt");
        for (const char* f : {"acc_synth_a.json", "acc_synth_b.json", "acc_sim_a.txt",
                              "acc_sim_b.txt"})
            std::filesystem::remove(f);
        synth_ok = synth_ok && cli_ok;
        cli_note = cli_ok ? "; cli outputs byte-identical" : "; cli outputs DIFFER";
    }

    std::ostringstream os;
    os << "synthesis JSON " << (a == b ? "byte-identical" : "DIFFERS") << "; seed-7 counts "
       << s1.errors << " == " << s2.errors << (sim_ok ? "" : " MISS") << cli_note;
    return {synth_ok && sim_ok, os.str()};
}

}  // namespace

int main() {
    synth_cache cache;
    struct named_check {
        int id;
        check_result (*fn)(synth_cache&);
    };
    std::vector<named_check> checks = {
        {1, check_structural},   {2, check_qubit_totals}, {3, check_stab_metrics},
        {4, [](synth_cache&) { return check_tree_bound(); }},
        {5, check_steiner_optimal},
        {6, [](synth_cache&) { return check_scheduler(); }},
        {7, check_single_fault}, {8, check_error_rates},  {9, check_determinism},
    };
    int passed = 0;
    for (const auto& c : checks) {
        check_result r;
        try {
            r = c.fn(cache);
        } catch (const std::exception& e) {
            r = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s - %s\n", c.id, r.pass ? "PASS" : "FAIL",
                    r.detail.c_str());
        std::fflush(stdout);
        if (r.pass) ++passed;
    }
    std::printf("acceptance: %d/%zu criteria pass\n", passed, checks.size());
    return 0;
}
