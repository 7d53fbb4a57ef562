// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "faree/harness.hpp"
#include "faree/units.hpp"

using namespace faree;

namespace {

// Hand-built sweep with fixed numbers, so the figure output does not depend on the optimizer.
SweepResult synthetic_sweep() {
    SweepResult r;
    r.axis = Axis::min_rate;
    const double values[] = {0.5e6, 1.0e6, 1.5e6};
    const Scheme schemes[] = {Scheme::far, Scheme::sris, Scheme::afr};
    const double base[] = {4.0e7, 1.6e7, 2.1e7};
    for (int v = 0; v < 3; ++v) {
        for (int s = 0; s < 3; ++s) {
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                RunRecord rec;
                rec.scenario_hash = "00000000deadbeef";
                rec.seed = seed;
                rec.scheme = schemes[s];
                rec.axis_value = values[v];
                rec.feasible = !(v == 2 && s == 1 && seed == 2);
                rec.converged = rec.feasible;
                rec.ee = rec.feasible ? base[s] * (1.0 - 0.1 * v) * (1.0 + 0.01 * static_cast<double>(seed)) : 0.0;
                rec.sum_rate = rec.ee * 0.5;
                rec.total_power = 0.5;
                rec.outer_iterations = 3;
                r.runs.push_back(rec);
            }
        }
    }
    return r;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int count_lines_with_prefix(const std::string& text, const std::string& prefix) {
    std::istringstream is(text);
    std::string line;
    int n = 0;
    while (std::getline(is, line))
        if (line.rfind(prefix, 0) == 0) ++n;
    return n;
}

}  // namespace

TEST_CASE("axis names round-trip") {
    for (Axis a : {Axis::min_rate, Axis::snr, Axis::bandwidth, Axis::user_distance, Axis::noise_bs,
                   Axis::faru_count})
        CHECK(parse_axis(axis_name(a)) == a);
    CHECK_THROWS_AS(parse_axis("nope"), std::invalid_argument);
}

TEST_CASE("apply_axis sets the swept quantity") {
    const ScenarioConfig c = table_one_config();
    CHECK(apply_axis(c, Axis::min_rate, 2e6).min_rate == 2e6);
    CHECK(apply_axis(c, Axis::bandwidth, 20e6).bandwidth == 20e6);
    CHECK(apply_axis(c, Axis::faru_count, 6.0).num_far_antennas == 6);
    const ScenarioConfig d = apply_axis(c, Axis::user_distance, 120.0);
    CHECK(d.users.center(0) == 0.0);
    CHECK(d.users.center(1) == 120.0);
    const ScenarioConfig n = apply_axis(c, Axis::noise_bs, -110.0);
    CHECK(n.noise_bs() == doctest::Approx(1e-14).epsilon(1e-12));
    // Average SNR: P_max times the reference gain over the BS noise.
    const ScenarioConfig s = apply_axis(c, Axis::snr, 10.0);
    CHECK(s.max_power * snr_reference_gain(s) / s.noise_bs() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("sweep spec parsing") {
    const auto j = nlohmann::json::parse(R"({"axis": "bandwidth", "values": [5e6, 1e7],
        "schemes": ["far", "afr"], "seeds": {"count": 3, "first": 4}, "output": "x.csv",
        "scenario": {"num_users": 2}})");
    const SweepSpec s = sweep_spec_from_json(j);
    CHECK(s.axis == Axis::bandwidth);
    CHECK(s.values == std::vector<double>{5e6, 1e7});
    CHECK(s.schemes == std::vector<Scheme>{Scheme::far, Scheme::afr});
    CHECK(s.seeds == std::vector<std::uint64_t>{4, 5, 6});
    CHECK(s.output == "x.csv");
    CHECK(s.base.num_users == 2);

    const SweepSpec d = sweep_spec_from_json(nlohmann::json::parse(R"({"axis": "min_rate", "values": [1e6]})"));
    CHECK(d.seeds.size() == 20);
    CHECK(d.schemes.size() == 3);

    CHECK_THROWS_AS(sweep_spec_from_json(nlohmann::json::parse(R"({"axis": "min_rate", "values": []})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_spec_from_json(nlohmann::json::parse(R"({"axis": "bandwidth", "values": [0]})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(sweep_spec_from_json(nlohmann::json::parse(R"({"axis": "faru_count", "values": [2.5]})")),
                    std::invalid_argument);
    CHECK_THROWS(sweep_spec_from_json(
        nlohmann::json::parse(R"({"axis": "min_rate", "values": [1e6], "scenario": {"bogus": 1}})")));
}

TEST_CASE("scenario files: dBm conversion, unknown keys and hashing") {
    const ScenarioConfig c = config_from_json(nlohmann::json::parse(R"({"max_power_dbm": 10, "noise_bs_dbm": -100})"));
    CHECK(c.max_power == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(c.noise_bs() == doctest::Approx(1e-13).epsilon(1e-12));
    CHECK_THROWS(config_from_json(nlohmann::json::parse(R"({"not_a_key": 1})")));

    const ScenarioConfig t = table_one_config();
    CHECK(config_hash(t) == config_hash(table_one_config()));
    CHECK(config_hash(t).size() == 16);
    ScenarioConfig u = t;
    u.min_rate *= 2.0;
    CHECK(config_hash(u) != config_hash(t));
}

TEST_CASE("single-seed sweep matches run_scenario") {
    SweepSpec s;
    s.axis = Axis::min_rate;
    s.values = {1e6};
    s.schemes = {Scheme::far};
    s.seeds = {3};
    const SweepResult r = sweep(s, 1);
    REQUIRE(r.runs.size() == 1);
    const RunRecord direct = run_scenario(apply_axis(s.base, Axis::min_rate, 1e6), Scheme::far, 3, {}, 1e6);
    CHECK(r.runs[0].ee == direct.ee);
    CHECK(r.runs[0].sum_rate == direct.sum_rate);
    CHECK(r.runs[0].scenario_hash == direct.scenario_hash);
    CHECK(r.runs[0].ee_trace == direct.ee_trace);
    CHECK(r.median_ee(1e6, Scheme::far) == direct.ee);
}

TEST_CASE("sweep CSV is byte-identical across runs and worker counts") {
    SweepSpec s;
    s.axis = Axis::min_rate;
    s.values = {0.5e6, 1e6};
    s.schemes = {Scheme::far, Scheme::afr};
    s.seeds = {0, 1};
    const std::string a = sweep_csv(sweep(s, 1));
    const std::string b = sweep_csv(sweep(s, 3));
    CHECK(a == b);
    CHECK(a.rfind("# far-ee sweep csv v1\n" + sweep_csv_header() + "\n", 0) == 0);
    CHECK(count_lines_with_prefix(a, "run,") == 8);
    CHECK(count_lines_with_prefix(a, "median,") == 4);
    CHECK(count_lines_with_prefix(a, "mean,") == 4);
}

TEST_CASE("infeasible rate floor is flagged, not crashed") {
    ScenarioConfig c = table_one_config();
    c.min_rate = 1e9;
    const RunRecord r = run_scenario(c, Scheme::far, 0);
    CHECK(r.error.empty());
    CHECK_FALSE(r.feasible);
    CHECK(r.ee == 0.0);
    SweepResult sr;
    sr.runs.push_back(r);
    CHECK(sr.median_ee(0.0, Scheme::far) == 0.0);
    const std::string csv = sweep_csv(sr);
    CHECK(csv.find("median,") != std::string::npos);
}

TEST_CASE("aggregates skip infeasible seeds") {
    const SweepResult r = synthetic_sweep();
    // Two feasible SRIS seeds at 1.5 Mbps: median is their mean.
    const double expect = 1.6e7 * 0.8 * (1.0 + 1.01) / 2.0;
    CHECK(r.median_ee(1.5e6, Scheme::sris) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(r.median_ee(1.0e6, Scheme::far) == doctest::Approx(4.0e7 * 0.9 * 1.01).epsilon(1e-14));
    const std::string csv = sweep_csv(r);
    CHECK(csv.find("median,00000000deadbeef,min_rate,1500000,sris,,2,2,") != std::string::npos);
}

TEST_CASE("figure presets") {
    CHECK(preset_names().size() == 7);
    for (const auto& n : preset_names()) {
        const FigurePreset p = figure_preset(n);
        CHECK(p.name == n);
        CHECK_FALSE(p.x_label.empty());
        CHECK_NOTHROW(p.spec.validate());
    }
    const FigurePreset f5 = figure_preset("fig5");
    CHECK(f5.x_label == "average SNR (dB)");
    CHECK(f5.y_label == "EE (bit/J)");
    CHECK(f5.spec.axis == Axis::snr);
    CHECK(figure_preset("fig3").convergence);
    CHECK(figure_preset("fig3").x_label == "outer iteration");
    CHECK(figure_preset("fig9").spec.axis == Axis::faru_count);
    CHECK_THROWS_AS(figure_preset("fig10"), std::invalid_argument);
}

TEST_CASE("emit_figure rejects bad input") {
    const FigurePreset f4 = figure_preset("fig4");
    CHECK_THROWS_AS(emit_figure("", f4), std::invalid_argument);
    CHECK_THROWS_AS(emit_figure("# far-ee sweep csv v1\n" + sweep_csv_header() + "\n", f4), std::invalid_argument);
    CHECK_THROWS_AS(emit_figure("a,b,c\n1,2,3\n", f4), std::invalid_argument);
    // A convergence table handed to a sweep preset, and the reverse.
    const std::string trace = "# far-ee convergence csv v1\nseries,outer_iter,ee\nR_min=1 Mbps,0,1e7\n";
    CHECK_THROWS_AS(emit_figure(trace, f4), std::invalid_argument);
    CHECK_NOTHROW(emit_figure(trace, figure_preset("fig3")));
    CHECK_THROWS_AS(emit_figure(sweep_csv(synthetic_sweep()), figure_preset("fig3")), std::invalid_argument);
    // Sweep over another axis.
    CHECK_THROWS_AS(emit_figure(sweep_csv(synthetic_sweep()), figure_preset("fig6")), std::invalid_argument);
}

TEST_CASE("figure output matches the frozen SVG") {
    const std::string svg = emit_figure(sweep_csv(synthetic_sweep()), figure_preset("fig4"));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("R_min (Mbps)") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    const std::string path = std::string(FAREE_FIXTURE_DIR) + "/fig4_synthetic.svg";
    if (std::getenv("FAREE_UPDATE_GOLDEN")) {
        std::ofstream(path, std::ios::binary) << svg;
    }
    const std::string golden = read_text(path);
    REQUIRE_FALSE(golden.empty());
    CHECK(svg == golden);
}

TEST_CASE("timing lives apart from the deterministic table") {
    const SweepResult r = synthetic_sweep();
    const std::string csv = sweep_csv(r);
    CHECK(csv.find("wall_time") == std::string::npos);
    const std::string t = timing_csv(r);
    CHECK(t.rfind("axis_value,scheme,seed,wall_time,error\n", 0) == 0);
    CHECK(count_lines_with_prefix(t, "1500000,") == 9);
}

TEST_CASE("worker count honours the environment") {
    setenv("FAREE_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    setenv("FAREE_WORKERS", "0", 1);
    CHECK(worker_count() >= 1);
    unsetenv("FAREE_WORKERS");
}
