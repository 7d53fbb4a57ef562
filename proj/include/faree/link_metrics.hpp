// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "faree/channel.hpp"
#include "faree/config.hpp"
#include "faree/geometry.hpp"

namespace faree {

enum class Scheme { far, sris, afr };

std::string scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct ControlState {
    Eigen::VectorXd p;       // K transmit powers, W
    Eigen::MatrixXcd omega;  // N x K receive beamformers, columns have norm <= 1
};

/// |w_k^H H h_i|^2 for every (k, i) and ||w_k^H H||^2 for every k.
struct EffectiveGains {
    Eigen::MatrixXd cross;  // K x K, row k = beamformer, column i = user
    Eigen::VectorXd noise;  // K
};

EffectiveGains effective_gains(const ControlState& control, const ChannelRealization& ch);

double sinr(int k, const ControlState& control, const ChannelRealization& ch, const ScenarioConfig& config);
Eigen::VectorXd all_sinr(const ControlState& control, const ChannelRealization& ch, const ScenarioConfig& config);
Eigen::VectorXd sinr_from_gains(const EffectiveGains& g, const Eigen::VectorXd& p, const ChannelRealization& ch,
                                const ScenarioConfig& config);

/// Static power of the BS plus the relaying hardware of the given scheme.
double circuit_power(const ScenarioConfig& config, Scheme scheme);

/// Sum of rates (bit/s) over the total consumed power (W).
double energy_efficiency(const Eigen::VectorXd& rates, const Eigen::VectorXd& p, double circuit);

struct LinkReport {
    Eigen::VectorXd sinr;
    Eigen::VectorXd rates;  // bit/s
    double sum_rate = 0.0;
    double total_power = 0.0;
    double ee = 0.0;
    bool feasible = true;
    /// Families: rate (relative to R_min), power (W), beam_norm, then the placement families (m).
    std::vector<ConstraintEntry> violations;
    double worst_violation() const;

    static std::string csv_header();  // sum_rate,total_power,ee,feasible,worst_violation,sinr_1..sinr_K
    std::string csv_row() const;
};

/// Rates, powers and EE without any constraint evaluation.
LinkReport evaluate_link(const ControlState& control, const ChannelRealization& ch, const ScenarioConfig& config,
                         Scheme scheme);

/// Evaluates every constraint of the joint problem with tolerance tol.
LinkReport check_solution(const Placement& placement, const ControlState& control, const ChannelRealization& ch,
                          const ScenarioConfig& config, Scheme scheme, double tol = 1e-6);

}  // namespace faree
