#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsynth/allocate.hpp"
#include "scsynth/device.hpp"
#include "scsynth/errors.hpp"
#include "scsynth/schedule.hpp"
#include "scsynth/sim.hpp"

namespace scsynth {

enum class arch_kind { square, hexagon, heavy_square, heavy_hexagon };

inline std::string to_string(arch_kind a) {
    switch (a) {
        case arch_kind::square: return "square";
        case arch_kind::hexagon: return "hexagon";
        case arch_kind::heavy_square: return "heavy-square";
        default: return "heavy-hexagon";
    }
}

inline arch_kind parse_arch(const std::string& s) {
    if (s == "square") return arch_kind::square;
    if (s == "hexagon") return arch_kind::hexagon;
    if (s == "heavy-square") return arch_kind::heavy_square;
    if (s == "heavy-hexagon") return arch_kind::heavy_hexagon;
    throw parse_error("unknown architecture '" + s +
                      "' (expected square, hexagon, heavy-square or heavy-hexagon)");
}

inline allocation_mode parse_mode(const std::string& s) {
    if (s == "pair3") return allocation_mode::pair3;
    if (s == "center4") return allocation_mode::center4;
    throw parse_error("unknown allocation mode '" + s + "' (expected pair3 or center4)");
}

struct patch_shape {
    int rows = 0;
    int cols = 0;
};

// Smallest patch that can hold the data embedding: data qubits sit on a fixed
// sub-grid per architecture (square pair3 strides 2 columns and 4 rows of
// device points; center4 strides 2 in both; hexagon repeats its brick period
// every 4 columns; heavy lattices stride on the base grid before subdivision).
inline patch_shape min_patch_shape(arch_kind arch, allocation_mode mode, int distance) {
    int d = distance;
    switch (arch) {
        case arch_kind::square:
            return mode == allocation_mode::pair3 ? patch_shape{2 * d - 1, d}
                                                  : patch_shape{2 * d - 1, 2 * d - 1};
        case arch_kind::hexagon: return {d, 4 * (d - 1)};
        case arch_kind::heavy_square:
            return mode == allocation_mode::pair3 ? patch_shape{d + 1, d}
                                                  : patch_shape{2 * d - 1, 2 * d - 1};
        default: return {d, 2 * d};
    }
}

inline device_graph gen_patch(arch_kind arch, int rows, int cols) {
    switch (arch) {
        case arch_kind::square: return gen_square(rows, cols);
        case arch_kind::hexagon: return gen_hexagon(rows, cols);
        case arch_kind::heavy_square: return gen_heavy(gen_square(rows, cols));
        default: return gen_heavy(gen_hexagon(rows, cols));
    }
}

// Per-stabilizer cost of the final schedule.  cnots counts the data window
// plus the internal tree merge, so it equals w + 2(b-1) for unflagged
// stabilizers and gains 2 when a flag is wrapped around the window.
struct stab_metrics {
    int id = 0;
    char stab_type = 'X';
    int weight = 0;
    int bridges = 0;
    int cnots = 0;
    int depth = 0;
};

struct synthesis_report {
    std::string arch;
    allocation_mode mode = allocation_mode::pair3;
    int distance = 0;
    int rows = 0;
    int cols = 0;
    int device_qubits = 0;
    std::vector<stab_metrics> stabilizers;
    // Averages cover the weight-4 X-type stabilizers; boundary pairs run
    // shorter circuits and would skew the bulk figures they summarize.
    double avg_bridge = 0.0;
    double avg_cnot = 0.0;
    double avg_depth = 0.0;
    int total_cycle = 0;
    int data_qubits = 0;
    int bridge_qubits = 0;  // every non-data qubit the cycle touches, flags included
    int total_qubits = 0;
    double data_pct = 0.0;
    double bridge_pct = 0.0;
    double unused_pct = 0.0;
};

struct synth_result {
    device_graph g;
    data_layout layout;
    measurement_schedule sched;
    synthesis_report report;
};

namespace detail {

inline synthesis_report build_report(const synth_result& r) {
    synthesis_report rep;
    rep.arch = r.g.name.substr(0, r.g.name.find('_'));
    rep.mode = r.layout.mode;
    rep.distance = r.layout.distance;
    rep.device_qubits = static_cast<int>(r.g.qubits.size());

    std::set<point, point_yx_less> used;
    for (const auto& [rc, id] : r.layout.data_map) used.insert(r.g.pos(id));
    rep.data_qubits = static_cast<int>(used.size());

    std::vector<stab_metrics> ms;
    for (const auto& part : r.sched.partitions) {
        for (const auto& e : part) {
            stab_metrics m;
            m.id = e.id;
            m.stab_type = e.stab_type;
            m.weight = static_cast<int>(e.tree().data.size());
            m.bridges = static_cast<int>(e.tree().bridge_nodes().size());
            m.cnots = m.weight + 2 * (m.bridges - 1) + (e.flag ? 2 : 0);
            m.depth = e.exec();
            ms.push_back(m);
            for (const point& p : e.tree().bridge_nodes()) used.insert(p);
            if (e.flag) used.insert(e.flag->flag);
        }
    }
    std::sort(ms.begin(), ms.end(),
              [](const stab_metrics& a, const stab_metrics& b) { return a.id < b.id; });
    rep.stabilizers = std::move(ms);

    long sb = 0, sc = 0, sd = 0, nx = 0;
    for (const auto& m : rep.stabilizers) {
        if (m.stab_type != 'X' || m.weight != 4) continue;
        sb += m.bridges;
        sc += m.cnots;
        sd += m.depth;
        ++nx;
    }
    if (nx > 0) {
        rep.avg_bridge = double(sb) / double(nx);
        rep.avg_cnot = double(sc) / double(nx);
        rep.avg_depth = double(sd) / double(nx);
    }
    rep.total_cycle = total_cycle_time(r.sched);
    rep.total_qubits = static_cast<int>(used.size());
    rep.bridge_qubits = rep.total_qubits - rep.data_qubits;
    if (rep.total_qubits > 0) {
        rep.data_pct = 100.0 * rep.data_qubits / rep.total_qubits;
        rep.bridge_pct = 100.0 * rep.bridge_qubits / rep.total_qubits;
        rep.unused_pct = 0.0;
    }
    return rep;
}

}  // namespace detail

// Grows the patch from the analytic minimum, alternating row and column
// increments, until the whole pipeline succeeds.  The growth cap keeps the
// search bounded on architectures that can never host the requested mode.
inline synth_result synth(arch_kind arch, int distance, allocation_mode mode) {
    patch_shape s = min_patch_shape(arch, mode, distance);
    std::string last_err;
    for (int step = 0; step <= 2 * distance + 6; ++step) {
        try {
            synth_result r;
            r.g = gen_patch(arch, s.rows, s.cols);
            r.layout = allocate_data_qubits(r.g, distance, mode);
            r.sched = init_schedule(r.g, r.layout);
            refine(r.g, r.sched);
            r.report = detail::build_report(r);
            r.report.arch = to_string(arch);
            r.report.rows = s.rows;
            r.report.cols = s.cols;
            return r;
        } catch (const std::exception& e) {
            last_err = e.what();
        }
        if (step % 2 == 0)
            ++s.rows;
        else
            ++s.cols;
    }
    throw infeasible_error("synth " + to_string(arch) + " d=" + std::to_string(distance) + " " +
                           to_string(mode) + ": no feasible patch up to " +
                           std::to_string(s.rows) + "x" + std::to_string(s.cols) + " (" +
                           last_err + ")");
}

inline nlohmann::ordered_json report_to_json(const synthesis_report& r) {
    nlohmann::ordered_json j;
    j["arch"] = r.arch;
    j["mode"] = to_string(r.mode);
    j["distance"] = r.distance;
    j["patch"] = {{"rows", r.rows}, {"cols", r.cols}, {"device_qubits", r.device_qubits}};
    j["stabilizers"] = nlohmann::ordered_json::array();
    for (const auto& m : r.stabilizers)
        j["stabilizers"].push_back({{"id", m.id},
                                    {"type", std::string(1, m.stab_type)},
                                    {"weight", m.weight},
                                    {"bridges", m.bridges},
                                    {"cnots", m.cnots},
                                    {"depth", m.depth}});
    j["x_stabilizer_averages"] = {
        {"bridges", r.avg_bridge}, {"cnots", r.avg_cnot}, {"depth", r.avg_depth}};
    j["total_cycle_time"] = r.total_cycle;
    j["qubit_utilization"] = {{"data", r.data_qubits},       {"bridge", r.bridge_qubits},
                              {"total", r.total_qubits},     {"data_pct", r.data_pct},
                              {"bridge_pct", r.bridge_pct},  {"unused_pct", r.unused_pct}};
    return j;
}

inline std::string report_to_text(const synthesis_report& r) {
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%s %s d=%d  patch %dx%d (%d device qubits)\n",
                  r.arch.c_str(), to_string(r.mode).c_str(), r.distance, r.rows, r.cols,
                  r.device_qubits);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "x-stabilizer averages: bridges %.2f  cnots %.2f  depth %.2f\n", r.avg_bridge,
                  r.avg_cnot, r.avg_depth);
    out += buf;
    std::snprintf(buf, sizeof(buf), "total cycle time: %d\n", r.total_cycle);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "qubits: %d total = %d data (%.1f%%) + %d bridge/flag (%.1f%%), %.1f%% unused\n",
                  r.total_qubits, r.data_qubits, r.data_pct, r.bridge_qubits, r.bridge_pct,
                  r.unused_pct);
    out += buf;
    return out;
}

inline nlohmann::ordered_json synth_to_json(const synth_result& r) {
    nlohmann::ordered_json j;
    j["report"] = report_to_json(r.report);
    j["device"] = device_to_json(r.g);
    j["layout"] = layout_to_json(r.g, r.layout);
    j["schedule"] = schedule_to_json(r.sched);
    return j;
}

struct sweep_config {
    std::vector<double> p_gate;
    long long shots = 10000;
    uint64_t seed = 1;
    int rounds = 0;  // 0 means one round per code distance
};

struct sweep_task {
    arch_kind arch = arch_kind::square;
    allocation_mode mode = allocation_mode::pair3;
    int distance = 3;
};

struct sweep_row {
    std::string arch;
    std::string mode;
    int distance = 0;
    double p_gate = 0.0;
    long long shots = 0;
    long long logical_errors = 0;  // -1 when the point failed
    double rate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

// One row per (task, p) pair, tasks outermost, p in config order.  Points run
// concurrently; each writes only its own slot, so the output order is fixed.
inline std::vector<sweep_row> run_sweep(const std::vector<sweep_task>& tasks,
                                        const sweep_config& cfg) {
    struct prepared {
        cycle_circuit cycle;
        std::string arch;
        std::string mode;
        int distance = 0;
    };
    std::vector<prepared> prep;
    for (const auto& t : tasks) {
        synth_result r = synth(t.arch, t.distance, t.mode);
        int rounds = cfg.rounds > 0 ? cfg.rounds : t.distance;
        prep.push_back({build_cycle_circuit(r.g, r.layout, r.sched, rounds), to_string(t.arch),
                        to_string(t.mode), t.distance});
    }

    std::vector<sweep_row> rows(prep.size() * cfg.p_gate.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
            const prepared& pr = prep[i / cfg.p_gate.size()];
            double p = cfg.p_gate[i % cfg.p_gate.size()];
            sweep_row row;
            row.arch = pr.arch;
            row.mode = pr.mode;
            row.distance = pr.distance;
            row.p_gate = p;
            try {
                noise_model nm;
                nm.p_gate = p;
                shot_result sr = run_shots(pr.cycle, nm, cfg.shots, cfg.seed);
                row.shots = sr.shots;
                row.logical_errors = sr.errors;
                row.rate = sr.rate;
                row.ci_low = sr.ci_low;
                row.ci_high = sr.ci_high;
            } catch (const std::exception&) {
                row.logical_errors = -1;
            }
            rows[i] = std::move(row);
        }
    };
    unsigned hw = std::thread::hardware_concurrency();
    size_t n_threads = std::min<size_t>(rows.size(), hw > 0 ? hw : 1);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

inline std::string sweep_to_csv(const std::vector<sweep_row>& rows) {
    std::string out = "arch,mode,distance,p_gate,shots,logical_errors,rate,ci_low,ci_high\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%g,%lld,%lld,%.8g,%.8g,%.8g\n", r.arch.c_str(),
                      r.mode.c_str(), r.distance, r.p_gate, r.shots, r.logical_errors, r.rate,
                      r.ci_low, r.ci_high);
        out += buf;
    }
    return out;
}

// Log-log polyline chart of rate vs p_gate, one curve per (arch, mode, d).
// Zero-rate points have no log position and are dropped from their curve.
inline std::string sweep_to_svg(const std::vector<sweep_row>& rows) {
    const double width = 640, height = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::vector<std::pair<std::string, std::vector<const sweep_row*>>> curves;
    for (const auto& r : rows) {
        if (r.logical_errors < 0 || r.rate <= 0.0 || r.p_gate <= 0.0) continue;
        std::string key = r.arch + " " + r.mode + " d=" + std::to_string(r.distance);
        auto it = std::find_if(curves.begin(), curves.end(),
                               [&](const auto& c) { return c.first == key; });
        if (it == curves.end()) {
            curves.push_back({key, {}});
            it = curves.end() - 1;
        }
        it->second.push_back(&r);
    }

    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool any = false;
    for (const auto& [key, pts] : curves)
        for (const sweep_row* r : pts) {
            double lx = std::log10(r->p_gate), ly = std::log10(r->rate);
            if (!any) {
                x0 = x1 = lx;
                y0 = y1 = ly;
                any = true;
            }
            x0 = std::min(x0, lx);
            x1 = std::max(x1, lx);
            y0 = std::min(y0, ly);
            y1 = std::max(y1, ly);
        }
    if (x1 - x0 < 1e-9) x1 = x0 + 1;
    if (y1 - y0 < 1e-9) y1 = y0 + 1;

    auto sx = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * (width - ml - mr); };
    auto sy = [&](double ly) { return height - mb - (ly - y0) / (y1 - y0) * (height - mt - mb); };

    char buf[512];
    std::string out;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\">\n",
                  width, height);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" "
                  "stroke=\"black\"/>\n",
                  ml, mt, width - ml - mr, height - mt - mb);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%g\" y=\"%g\" font-size=\"13\">log10 p_gate</text>\n",
                  width / 2 - 40, height - 12);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"14\" y=\"%g\" font-size=\"13\" transform=\"rotate(-90 14 %g)\">"
                  "log10 logical rate</text>\n",
                  height / 2 + 50, height / 2 + 50);
    out += buf;
    for (int t = static_cast<int>(std::ceil(x0)); t <= static_cast<int>(std::floor(x1)); ++t) {
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"middle\">%d"
                      "</text>\n",
                      sx(t), height - mb + 16, t);
        out += buf;
    }
    for (int t = static_cast<int>(std::ceil(y0)); t <= static_cast<int>(std::floor(y1)); ++t) {
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%g\" y=\"%g\" font-size=\"11\" text-anchor=\"end\">%d</text>\n",
                      ml - 6, sy(t) + 4, t);
        out += buf;
    }
    size_t ci = 0;
    for (const auto& [key, pts] : curves) {
        const char* color = palette[ci % (sizeof(palette) / sizeof(palette[0]))];
        std::string poly;
        for (const sweep_row* r : pts) {
            std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", sx(std::log10(r->p_gate)),
                          sy(std::log10(r->rate)));
            poly += buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\"/>"
                      "\n",
                      poly.c_str(), color);
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%g\" y=\"%g\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                      ml + 10.0, mt + 16.0 + 16.0 * ci, color, key.c_str());
        out += buf;
        ++ci;
    }
    out += "</svg>\n";
    return out;
}

}  // namespace scsynth
