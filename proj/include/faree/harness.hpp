// SPDX-License-Identifier: Apache-2.0
//
// Seeded runs, parameter sweeps and the figure presets.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "faree/config.hpp"
#include "faree/link_metrics.hpp"
#include "faree/optimizer.hpp"

namespace faree {

enum class Axis { min_rate, snr, bandwidth, user_distance, noise_bs, faru_count };
std::string axis_name(Axis a);
Axis parse_axis(const std::string& name);

/// Axis units as stored in sweep files and CSV: bit/s, dB, Hz, m, dBm (whole band), count.
struct SweepSpec {
    ScenarioConfig base = table_one_config();
    Axis axis = Axis::min_rate;
    std::vector<double> values;
    std::vector<Scheme> schemes{Scheme::far, Scheme::sris, Scheme::afr};
    std::vector<std::uint64_t> seeds;
    std::string output;  // CSV path, empty for none
    OptimizerOptions options;

    void validate() const;
};

/// {"axis": ..., "values": [...], "schemes": [...], "seeds": [...] or {"count": n}, "output": ...,
///  "scenario": {scenario keys}}. Seeds default to 0..19.
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

/// Average-SNR reference gain beta0 * beta for the config: pathloss at the initial placement
/// from the user-region center, mean shadowing.
double snr_reference_gain(const ScenarioConfig& config);

/// Copy of the config with the axis set to value.
ScenarioConfig apply_axis(const ScenarioConfig& config, Axis axis, double value);

struct RunRecord {
    std::string scenario_hash;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::far;
    double axis_value = 0.0;
    bool feasible = false;
    bool converged = false;
    double ee = 0.0;           // bit/J
    double sum_rate = 0.0;     // bit/s
    double total_power = 0.0;  // W
    int outer_iterations = 0;
    double wall_time = 0.0;    // s, kept out of the deterministic CSV
    std::string error;         // non-empty when the run threw
    std::vector<double> ee_trace;
};

RunRecord run_scenario(const ScenarioConfig& config, Scheme scheme, std::uint64_t seed,
                       const OptimizerOptions& options = {}, double axis_value = 0.0);

struct SweepResult {
    Axis axis = Axis::min_rate;
    std::vector<RunRecord> runs;  // ordered by (value, scheme, seed) as in the sweep spec

    /// Median EE over the feasible seeds of one (value, scheme) cell; 0 when none is feasible.
    double median_ee(double value, Scheme scheme) const;
    bool all_completed() const;
};

/// Worker count from FAREE_WORKERS, else the hardware concurrency.
int worker_count();

SweepResult sweep(const SweepSpec& spec, int workers = 0);

/// Versioned CSV. One "run" row per cell and one "median" and one "mean" row per
/// (value, scheme) over its feasible seeds.
std::string sweep_csv(const SweepResult& result);
std::string sweep_csv_header();
/// Wall times, which are not reproducible and so live apart from the main table.
std::string timing_csv(const SweepResult& result);

// Figures ------------------------------------------------------------------------

struct FigurePreset {
    std::string name;
    std::string title;
    std::string x_label;
    std::string y_label;
    double x_display_scale = 1.0;  // axis value * scale is plotted
    bool convergence = false;      // EE versus outer iteration, one series per R_min
    SweepSpec spec;
};

std::vector<std::string> preset_names();
FigurePreset figure_preset(const std::string& name);

/// Convergence table for the trace preset: series,outer_iter,ee (median across seeds).
std::string convergence_csv(const FigurePreset& preset, int workers = 0);

/// SVG line chart from a sweep CSV (median rows, one series per scheme) or a convergence CSV.
/// Throws std::invalid_argument on an empty table or a schema that does not match the preset.
std::string emit_figure(const std::string& csv, const FigurePreset& preset);

}  // namespace faree
