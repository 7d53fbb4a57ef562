// SPDX-License-Identifier: Apache-2.0
//
// far-ee: physics probe, single optimization runs, sweeps and figure presets.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "faree/baselines.hpp"
#include "faree/config.hpp"
#include "faree/em_propagation.hpp"
#include "faree/harness.hpp"
#include "faree/optimizer.hpp"

using namespace faree;
using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

ScenarioConfig load_config(const std::string& path) {
    return path.empty() ? table_one_config() : config_from_json(read_json(path));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fluid-antenna relay energy-efficiency toolkit"};
    app.require_subcommand(1);

    // physics
    auto* physics = app.add_subcommand("physics", "Attenuation and phase through the blockage");
    std::string phys_config;
    double ref_distance = 0.3, fa_distance = 0.3;
    std::optional<double> sigma, eps_r, mu_r, wavelength;
    physics->add_option("--config", phys_config, "scenario JSON (medium keys)");
    physics->add_option("--sigma", sigma, "conductivity (S/m)");
    physics->add_option("--eps-r", eps_r, "relative permittivity");
    physics->add_option("--mu-r", mu_r, "relative permeability");
    physics->add_option("--wavelength", wavelength, "carrier wavelength (m)");
    physics->add_option("--ref-distance", ref_distance, "reference-point distance |o_b - o_u| (m)");
    physics->add_option("--fa-distance", fa_distance, "antenna-pair distance |b_p - u_q| (m)");

    // optimize
    auto* optimize = app.add_subcommand("optimize", "Run one scheme on one seed");
    std::string opt_config, scheme_name_arg = "far", trace_path;
    std::uint64_t seed = 0;
    std::string curvature = "geometric", majorant = "pairwise", corner = "argmax";
    optimize->add_option("--config", opt_config, "scenario JSON (defaults to the reference scenario)");
    optimize->add_option("--scheme", scheme_name_arg, "far, sris or afr")->check(CLI::IsMember({"far", "sris", "afr"}));
    optimize->add_option("--seed", seed, "random seed");
    optimize->add_option("--trace", trace_path, "write the per-stage trace CSV here");
    optimize->add_option("--curvature", curvature, "geometric or paper")->check(CLI::IsMember({"geometric", "paper"}));
    optimize->add_option("--majorant", majorant, "pairwise or rayleigh")->check(CLI::IsMember({"pairwise", "rayleigh"}));
    optimize->add_option("--corner", corner, "argmax or paper")->check(CLI::IsMember({"argmax", "paper"}));

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a sweep spec and write the CSV table");
    std::string spec_path, sweep_out;
    sweep_cmd->add_option("--spec", spec_path, "sweep spec JSON")->required();
    sweep_cmd->add_option("--out", sweep_out, "CSV path (overrides the sweep spec; stdout when both are empty)");

    // figures
    auto* figures = app.add_subcommand("figures", "Run a figure preset and emit CSV plus SVG");
    std::string preset_name, out_dir = ".";
    int seed_count = 0;
    figures->add_option("--preset", preset_name, "fig3 .. fig9, or all")->required();
    figures->add_option("--out", out_dir, "output directory");
    figures->add_option("--seeds", seed_count, "number of seeds (default 20)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*physics) {
            ScenarioConfig c = load_config(phys_config);
            if (sigma) c.medium.conductivity = *sigma;
            if (eps_r) c.medium.relative_permittivity = *eps_r;
            if (mu_r) c.medium.relative_permeability = *mu_r;
            if (wavelength) c.medium.carrier_wavelength = *wavelength;
            const PropagationConstants k = propagation_constants(c.medium);
            const AttenuationPhase ap = attenuation_and_phase(k, ref_distance, fa_distance);
            json out = {{"angular_frequency", k.angular_frequency}, {"loss_angle", k.loss_angle},
                        {"c1", k.c1},
                        {"c1_hat", k.c1_hat},
                        {"attenuation_rate", k.attenuation_rate},
                        {"alpha", ap.alpha},
                        {"theta", ap.theta}};
            std::cout << out.dump(2) << "\n";
            return 0;
        }
        if (*optimize) {
            const ScenarioConfig c = load_config(opt_config);
            OptimizerOptions o;
            o.curvature = curvature == "paper" ? CurvatureMode::paper : CurvatureMode::geometric;
            o.majorant = majorant == "rayleigh" ? MajorantMode::rayleigh : MajorantMode::pairwise;
            o.corner = corner == "paper" ? CornerRule::paper : CornerRule::argmax;
            const Scheme s = parse_scheme(scheme_name_arg);
            const OptimizerState st = run_scheme(c, seed, s, o);
            if (!trace_path.empty()) write_file(trace_path, st.trace_csv());
            std::cout << "scenario_hash," << config_hash(c) << "\n";
            std::cout << "scheme," << scheme_name(s) << "\nseed," << seed << "\n";
            std::cout << "feasible," << st.feasible << "\nconverged," << st.converged
                      << "\nouter_iterations," << st.outer_iterations << "\n";
            if (!st.diagnostics.empty()) std::cout << "diagnostics," << st.diagnostics << "\n";
            std::cout << LinkReport::csv_header() << "\n" << st.report.csv_row() << "\n";
            return st.feasible ? 0 : 2;
        }
        if (*sweep_cmd) {
            SweepSpec spec = sweep_spec_from_json(read_json(spec_path));
            if (!sweep_out.empty()) spec.output = sweep_out;
            const SweepResult r = sweep(spec);
            const std::string csv = sweep_csv(r);
            if (spec.output.empty()) {
                std::cout << csv;
            } else {
                write_file(spec.output, csv);
                write_file(spec.output + ".timing.csv", timing_csv(r));
            }
            return r.all_completed() ? 0 : 1;
        }
        if (*figures) {
            std::vector<std::string> names =
                preset_name == "all" ? preset_names() : std::vector<std::string>{preset_name};
            std::filesystem::create_directories(out_dir);
            bool ok = true;
            for (const auto& n : names) {
                FigurePreset p = figure_preset(n);
                if (seed_count > 0) {
                    p.spec.seeds.clear();
                    for (int i = 0; i < seed_count; ++i) p.spec.seeds.push_back(static_cast<std::uint64_t>(i));
                }
                const std::string base = (std::filesystem::path(out_dir) / n).string();
                std::string csv;
                if (p.convergence) {
                    csv = convergence_csv(p);
                } else {
                    const SweepResult r = sweep(p.spec);
                    ok = ok && r.all_completed();
                    csv = sweep_csv(r);
                    write_file(base + ".timing.csv", timing_csv(r));
                }
                write_file(base + ".csv", csv);
                write_file(base + ".svg", emit_figure(csv, p));
                std::cerr << "wrote " << base << ".csv and " << base << ".svg\n";
            }
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
