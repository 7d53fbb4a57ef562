// SPDX-License-Identifier: Apache-2.0
//
// Rician channel synthesis for the user -> FAR-U and FAR-B -> BS links.
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>

#include "faree/config.hpp"
#include "faree/em_propagation.hpp"
#include "faree/geometry.hpp"

namespace faree {

struct FadingDraw {
    Eigen::VectorXd mu_k;       // K shadowing multipliers
    double mu_0 = 1.0;
    Eigen::MatrixXcd hhat;      // M x K, column k is the NLoS part of h_k
    Eigen::MatrixXcd Hhat0;     // N x M
};

/// Everything random about one seed: user drops, angles and fading.
/// Shared by all schemes so comparisons are paired.
struct ScenarioDraw {
    Matrix3X user_refs;
    AngleSet angles;
    FadingDraw fading;
};

ScenarioDraw draw_scenario(const ScenarioConfig& config, std::uint64_t seed);

struct ChannelRealization {
    Eigen::VectorXd beta_k;
    double beta_0 = 0.0;
    Eigen::MatrixXcd h;    // M x K
    Eigen::MatrixXcd H0;   // N x M
    ThroughMatrix theta;   // relay coupling between faces
    Eigen::MatrixXcd H;    // N x M, H0 * theta
};

/// LoS and NLoS weights sqrt(K/(K+1)), sqrt(1/(K+1)); an infinite factor gives pure LoS.
std::pair<double, double> rician_weights(double k_factor);

Eigen::Vector3d user_aod(const AngleSet& a, int k);
Eigen::Vector3d faru_aoa(const AngleSet& a, int k);
Eigen::Vector3d farb_aod(const AngleSet& a);
Eigen::Vector3d bs_aoa(const AngleSet& a);

Eigen::VectorXcd synthesize_user_channel(const ScenarioConfig& config, const Placement& placement,
                                         const AngleSet& angles, const FadingDraw& draw, int k);

Eigen::MatrixXcd synthesize_far_bs_channel(const ScenarioConfig& config, const Placement& placement,
                                           const AngleSet& angles, const FadingDraw& draw);

double user_beta(const ScenarioConfig& config, const Placement& placement, const FadingDraw& draw, int k);
double far_bs_beta(const ScenarioConfig& config, const Eigen::Vector3d& o_b, const FadingDraw& draw);

ChannelRealization synthesize(const ScenarioConfig& config, const PropagationConstants& consts,
                              const Placement& placement, const ScenarioDraw& scenario);

}  // namespace faree
