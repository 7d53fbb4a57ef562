// SPDX-License-Identifier: Apache-2.0
//
// Energy-efficiency maximization: large-scale reference placement, alternating
// antenna-position updates, Dinkelbach power/beamforming and the outer loop.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "faree/channel.hpp"
#include "faree/config.hpp"
#include "faree/convex/program.hpp"
#include "faree/em_propagation.hpp"
#include "faree/geometry.hpp"
#include "faree/link_metrics.hpp"
#include "faree/surrogates.hpp"

namespace faree {

enum class CornerRule {
    argmax,  // best of the four feasible corners under the true objective
    paper,   // literal (L - C, Y0, H - C)
};

struct OptimizerOptions {
    CurvatureMode curvature = CurvatureMode::geometric;
    MajorantMode majorant = MajorantMode::pairwise;
    CornerRule corner = CornerRule::argmax;
    bool large_scale = true;
    bool positions = true;
    int max_outer = 15;
    double outer_tolerance = 1e-3;  // relative EE change
    int position_sca_iters = 30;
    double position_tolerance = 1e-4;
    int multistarts = 3;   // anchor plus the best points of a coarse grid
    int start_grid = 5;    // grid per axis used to seed the extra starts
    int power_sca_iters = 20;
    double power_tolerance = 1e-4;
    int dinkelbach_iters = 30;
    double dinkelbach_eps = 1e-6;
    /// Duality-gap target for the convex restrictions; candidates are re-scored on the true
    /// problem anyway, so the restrictions need not be solved to full precision.
    double subproblem_tolerance = 1e-6;
    /// Re-solve MMSE receivers at every anchor of the antenna-position SCA. The fixed-receiver
    /// surrogate still minorizes the receiver-optimized rate, so each step stays monotone.
    bool refresh_receivers = true;
};

/// Everything fixed for one run: constants, random draw and scheme.
struct Problem {
    ScenarioConfig config;
    PropagationConstants consts;
    ScenarioDraw draw;
    Scheme scheme = Scheme::far;
    std::uint64_t seed = 0;
    OptimizerOptions options;

    /// Channel for a placement, with the scheme's relay coupling.
    ChannelRealization channels(const Placement& placement) const;
};

Problem make_problem(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme = Scheme::far,
                     const OptimizerOptions& options = {});

/// Sum of log2(1 + SINR) and whether every rate floor holds.
struct Evaluation {
    ChannelRealization channels;
    Eigen::VectorXd sinr;
    double spectral_sum = 0.0;  // bit/s/Hz
    double ee = 0.0;            // bit/J
    bool rates_ok = false;
};

Evaluation evaluate(const Problem& problem, const Placement& placement, const ControlState& control);

/// SINR threshold matching the minimum rate.
double sinr_floor(const ScenarioConfig& config);

// Antenna sides ---------------------------------------------------------------

enum class Side { users, faru, farb, bs };
std::string side_name(Side s);
int side_count(const ScenarioConfig& config, Side s);

Eigen::Vector2d antenna_position(const Placement& p, Side s, int index);
void set_antenna_position(Placement& p, Side s, int index, const Eigen::Vector2d& xz);
PlanarRegion antenna_region(const ScenarioConfig& config, const Placement& p, Side s, int index);

/// Cross-gains z_ji(x) = w_j^H H h_i and noise gains ||w_j^H H||^2 written as phase sums
/// of the in-plane position of one antenna, with the rest of the system frozen.
struct SideModel {
    PhasorContext ctx;
    std::vector<std::vector<PhasorSum>> z;         // [beamformer j][user i]
    std::vector<double> noise_const;               // per j
    std::vector<std::vector<PhasorSum>> noise_parts;  // per j, |.|^2 summed

    double noise(int j, const Eigen::Vector2d& x) const;
};

SideModel build_side_model(const Problem& problem, const Placement& placement, const ControlState& control,
                           const ChannelRealization& ch, Side side, int index);

struct PositionResult {
    Placement placement;
    ControlState control;  // receivers may be refreshed along with the positions
    double objective_before = 0.0;  // bit/s/Hz
    double objective_after = 0.0;
    int sca_iterations = 0;
    bool moved = false;
};

/// Moves one antenna by multi-start SCA on its convex restriction. Commits only
/// true-feasible, non-decreasing states.
PositionResult optimize_antenna(const Problem& problem, const Placement& placement, const ControlState& control,
                                Side side, int index);

/// Sequential pass over every antenna of a side in index order.
PositionResult optimize_side(const Problem& problem, const Placement& placement, const ControlState& control,
                             Side side);

/// Reference points o_b (corner rule) and o_u (SCA on pathloss surrogates).
PositionResult optimize_large_scale(const Problem& problem, const Placement& placement,
                                    const ControlState& control);

// Power and beamforming ---------------------------------------------------------

/// MRC columns H h_k / |H h_k|.
Eigen::MatrixXcd mrc_beamformers(const ChannelRealization& ch);
/// MMSE columns for the given powers, unit norm.
Eigen::MatrixXcd mmse_beamformers(const ChannelRealization& ch, const Eigen::VectorXd& p,
                                  const ScenarioConfig& config);
/// Rotates each column so that w_k^H H h_k is real and non-negative.
void rotate_beamformers(Eigen::MatrixXcd& omega, const ChannelRealization& ch);

/// MMSE receivers with fixed-point power control toward the rate floors.
/// Returns false when the floors cannot be met.
bool restore_feasibility(const Problem& problem, const ChannelRealization& ch, ControlState& control);

struct PowerResult {
    ControlState control;
    double ee_before = 0.0;
    double ee_after = 0.0;
    int dinkelbach_updates = 0;
    int sca_solves = 0;
    std::vector<double> s_trace;
};

/// Dinkelbach over SCA restrictions of the power/beamforming problem. Requires a feasible start.
PowerResult optimize_power_beamforming(const Problem& problem, const Placement& placement,
                                       const ControlState& control);

// Outer loop -------------------------------------------------------------------

struct TraceRow {
    int outer_iter = 0;
    std::string stage;
    double ee = 0.0;
    double sum_rate = 0.0;
    double total_power = 0.0;
    double worst_violation = 0.0;
};

struct OptimizerState {
    Placement placement;
    ControlState control;
    ChannelRealization channels;
    LinkReport report;
    std::vector<double> ee_trace;  // one entry per outer iteration, first entry is the start
    std::vector<TraceRow> trace;   // one entry per stage
    int outer_iterations = 0;
    bool feasible = false;
    bool converged = false;
    std::string diagnostics;

    static std::string trace_csv_header();  // outer_iter,stage,EE,sum_rate,total_power,worst_violation
    std::string trace_csv() const;
};

/// Initial state: centered grids, p = P_max / 2, MRC receivers, restored if a floor fails.
OptimizerState initial_state(const Problem& problem);

OptimizerState optimize_ee(const Problem& problem);
OptimizerState optimize_ee(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme = Scheme::far,
                           const OptimizerOptions& options = {});

}  // namespace faree
