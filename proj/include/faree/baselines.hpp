// SPDX-License-Identifier: Apache-2.0
//
// Comparator schemes: an energy-splitting transmissive surface (SRIS) and a
// fixed-antenna amplify-and-forward relay (AFR).
#pragma once

#include <cstdint>

#include "faree/channel.hpp"
#include "faree/config.hpp"
#include "faree/optimizer.hpp"

namespace faree {

/// Co-phasing angles of the transmissive elements against the LoS cascade,
/// weighted by the user pathloss.
Eigen::VectorXd sris_cophase_angles(const ScenarioConfig& config, const Placement& placement,
                                    const AngleSet& angles, const Eigen::VectorXd& beta_k);

/// sqrt(rho_t) diag(exp(j phi)); random phases when the config asks for them.
ThroughMatrix sris_through_matrix(const ScenarioConfig& config, const Placement& placement, const AngleSet& angles,
                                  const Eigen::VectorXd& beta_k, std::uint64_t seed);

/// Options that freeze every position and keep only power/beamforming.
OptimizerOptions baseline_options(OptimizerOptions base = {});

OptimizerState evaluate_sris(const ScenarioConfig& config, std::uint64_t seed, const OptimizerOptions& options = {});
OptimizerState evaluate_afr(const ScenarioConfig& config, std::uint64_t seed, const OptimizerOptions& options = {});

/// Dispatch by scheme; FAR runs the full optimizer.
OptimizerState run_scheme(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme,
                          const OptimizerOptions& options = {});

}  // namespace faree
