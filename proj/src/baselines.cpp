// SPDX-License-Identifier: Apache-2.0
#include "faree/baselines.hpp"

#include <cmath>
#include <random>

#include "faree/rng.hpp"
#include "faree/units.hpp"

namespace faree {

Eigen::VectorXd sris_cophase_angles(const ScenarioConfig& config, const Placement& placement,
                                    const AngleSet& angles, const Eigen::VectorXd& beta_k) {
    const double lam = config.wavelength();
    const int M = config.num_far_antennas;
    const Eigen::VectorXcd rho_b = steering_vector(placement.B, placement.o_b, farb_aod(angles), lam);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(M);
    for (int k = 0; k < config.num_users; ++k) {
        const Eigen::VectorXcd rho_u = steering_vector(placement.U, placement.o_u, faru_aoa(angles, k), lam);
        const std::complex<double> rho_t =
            phase_difference(placement.T.col(k), placement.user_refs.col(k), user_aod(angles, k), lam);
        acc += beta_k(k) * (rho_b.conjugate().cwiseProduct(rho_u) * std::conj(rho_t));
    }
    Eigen::VectorXd phi(M);
    for (int m = 0; m < M; ++m) phi(m) = -std::arg(acc(m));
    return phi;
}

ThroughMatrix sris_through_matrix(const ScenarioConfig& config, const Placement& placement, const AngleSet& angles,
                                  const Eigen::VectorXd& beta_k, std::uint64_t seed) {
    const int M = config.num_far_antennas;
    Eigen::VectorXd phi(M);
    if (config.sris_random_phases) {
        auto g = make_stream(seed, kStreamSrisPhases);
        std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
        for (int m = 0; m < M; ++m) phi(m) = u(g);
    } else {
        phi = sris_cophase_angles(config, placement, angles, beta_k);
    }
    ThroughMatrix t;
    t.alpha = 1.0;
    t.forwarding_gain = 1.0;
    t.entries = Eigen::MatrixXcd::Zero(M, M);
    const double amp = std::sqrt(config.sris_transmission);
    for (int m = 0; m < M; ++m) t.entries(m, m) = std::polar(amp, phi(m));
    return t;
}

OptimizerOptions baseline_options(OptimizerOptions base) {
    base.large_scale = false;
    base.positions = false;
    return base;
}

OptimizerState evaluate_sris(const ScenarioConfig& config, std::uint64_t seed, const OptimizerOptions& options) {
    return optimize_ee(config, seed, Scheme::sris, baseline_options(options));
}

OptimizerState evaluate_afr(const ScenarioConfig& config, std::uint64_t seed, const OptimizerOptions& options) {
    return optimize_ee(config, seed, Scheme::afr, baseline_options(options));
}

OptimizerState run_scheme(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme,
                          const OptimizerOptions& options) {
    switch (scheme) {
        case Scheme::sris: return evaluate_sris(config, seed, options);
        case Scheme::afr: return evaluate_afr(config, seed, options);
        case Scheme::far: break;
    }
    return optimize_ee(config, seed, Scheme::far, options);
}

}  // namespace faree
