#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scsynth/driver.hpp"

using namespace scsynth;

namespace {

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
    f << text;
}

std::vector<int> parse_distances(const std::string& s) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stoi(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw parse_error("empty distance list");
    return out;
}

std::vector<double> parse_p_list(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stod(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"surface code synthesis toolchain"};
    app.require_subcommand(1);

    std::string arch = "square", mode = "pair3", out, svg_out, p_list;
    std::string distances = "3";
    int distance = 3, rows = 0, cols = 0, rounds = 0;
    long long shots = 10000;
    uint64_t seed = 1;
    double p_gate = 1e-3, p_idle = 2e-4;

    auto add_synth_flags = [&](CLI::App* cmd) {
        cmd->add_option("--arch", arch, "square, hexagon, heavy-square or heavy-hexagon");
        cmd->add_option("--distance", distance, "code distance (odd, >= 3)");
        cmd->add_option("--mode", mode, "allocation mode: pair3 or center4");
    };

    CLI::App* arch_cmd = app.add_subcommand("arch", "architecture graph commands");
    arch_cmd->require_subcommand(1);
    CLI::App* arch_gen = arch_cmd->add_subcommand("gen", "generate a device graph as JSON");
    arch_gen->add_option("--arch", arch, "square, hexagon, heavy-square or heavy-hexagon");
    arch_gen->add_option("--rows", rows, "grid rows")->required();
    arch_gen->add_option("--cols", cols, "grid cols")->required();
    arch_gen->add_option("--out", out, "output path (default stdout)");

    CLI::App* synth_cmd = app.add_subcommand("synth", "run the full synthesis pipeline");
    add_synth_flags(synth_cmd);
    synth_cmd->add_option("--out", out, "output path for the JSON bundle (default stdout)");

    CLI::App* report_cmd = app.add_subcommand("report", "synthesize and print summary metrics");
    add_synth_flags(report_cmd);

    CLI::App* export_cmd = app.add_subcommand("export-circuit",
                                              "synthesize and export the cycle as circuit text");
    add_synth_flags(export_cmd);
    export_cmd->add_option("--out", out, "output path (default stdout)");

    CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo logical error rate");
    add_synth_flags(sim_cmd);
    sim_cmd->add_option("--p-gate", p_gate, "depolarizing gate error probability");
    sim_cmd->add_option("--p-idle", p_idle, "per-layer idle error probability");
    sim_cmd->add_option("--shots", shots, "number of shots");
    sim_cmd->add_option("--seed", seed, "RNG seed");
    sim_cmd->add_option("--rounds", rounds, "measurement rounds (default: distance)");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "rate-vs-p sweep, CSV and SVG output");
    sweep_cmd->add_option("--arch", arch, "square, hexagon, heavy-square or heavy-hexagon");
    sweep_cmd->add_option("--mode", mode, "allocation mode: pair3 or center4");
    sweep_cmd->add_option("--distances", distances, "comma-separated code distances");
    sweep_cmd->add_option("--p-list", p_list, "comma-separated gate error probabilities")
        ->required();
    sweep_cmd->add_option("--shots", shots, "shots per point");
    sweep_cmd->add_option("--seed", seed, "RNG seed");
    sweep_cmd->add_option("--rounds", rounds, "measurement rounds (default: distance)");
    sweep_cmd->add_option("--out", out, "CSV output path (default stdout)");
    sweep_cmd->add_option("--svg", svg_out, "optional SVG chart output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (arch_gen->parsed()) {
            device_graph g = gen_patch(parse_arch(arch), rows, cols);
            write_out(out, device_to_json(g).dump(2) + "\n");
        } else if (synth_cmd->parsed()) {
            synth_result r = synth(parse_arch(arch), distance, parse_mode(mode));
            write_out(out, synth_to_json(r).dump(2) + "\n");
        } else if (report_cmd->parsed()) {
            synth_result r = synth(parse_arch(arch), distance, parse_mode(mode));
            std::cout << report_to_text(r.report);
        } else if (export_cmd->parsed()) {
            synth_result r = synth(parse_arch(arch), distance, parse_mode(mode));
            write_out(out, schedule_to_string(r.g, r.sched));
        } else if (sim_cmd->parsed()) {
            synth_result r = synth(parse_arch(arch), distance, parse_mode(mode));
            int rnds = rounds > 0 ? rounds : distance;
            cycle_circuit c = build_cycle_circuit(r.g, r.layout, r.sched, rnds);
            noise_model nm;
            nm.p_gate = p_gate;
            nm.p_idle = p_idle;
            shot_result res = run_shots(c, nm, shots, seed);
            std::printf("arch=%s mode=%s distance=%d p_gate=%g shots=%lld logical_errors=%lld "
                        "rate=%.8g ci=[%.8g,%.8g]\n",
                        arch.c_str(), mode.c_str(), distance, p_gate, (long long)res.shots,
                        (long long)res.errors, res.rate, res.ci_low, res.ci_high);
        } else if (sweep_cmd->parsed()) {
            std::vector<sweep_task> tasks;
            for (int d : parse_distances(distances))
                tasks.push_back({parse_arch(arch), parse_mode(mode), d});
            sweep_config cfg;
            cfg.p_gate = parse_p_list(p_list);
            cfg.shots = shots;
            cfg.seed = seed;
            cfg.rounds = rounds;
            std::vector<sweep_row> rows_out = run_sweep(tasks, cfg);
            write_out(out, sweep_to_csv(rows_out));
            if (!svg_out.empty()) write_out(svg_out, sweep_to_svg(rows_out));
        }
    } catch (const infeasible_error& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
