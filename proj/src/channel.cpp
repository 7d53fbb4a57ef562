// SPDX-License-Identifier: Apache-2.0
#include "faree/channel.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "faree/rng.hpp"
#include "faree/units.hpp"

namespace faree {

namespace {

std::complex<double> complex_normal(std::mt19937_64& g, std::normal_distribution<double>& n) {
    const double s = std::sqrt(0.5);
    const double re = n(g);
    const double im = n(g);
    return {s * re, s * im};
}

}  // namespace

ScenarioDraw draw_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    const int K = config.num_users;
    const int M = config.num_far_antennas;
    const int N = config.num_bs_antennas;
    ScenarioDraw out;

    {
        auto g = make_stream(seed, kStreamUserDrops);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        out.user_refs.resize(3, K);
        for (int k = 0; k < K; ++k) {
            double x = 0.0;
            double y = 0.0;
            if (config.users.shape == UserRegionShape::disc) {
                const double r = config.users.radius * std::sqrt(u(g));
                const double phi = 2.0 * kPi * u(g);
                x = config.users.center(0) + r * std::cos(phi);
                y = config.users.center(1) + r * std::sin(phi);
            } else {
                x = config.users.center(0) + (u(g) - 0.5) * config.users.width;
                y = config.users.center(1) + (u(g) - 0.5) * config.users.depth;
            }
            out.user_refs.col(k) = Eigen::Vector3d(x, y, 0.0);
        }
    }
    {
        auto g = make_stream(seed, kStreamAngles);
        std::uniform_real_distribution<double> a(0.0, kPi);
        auto& an = out.angles;
        an.user_aod_elevation.resize(K);
        an.user_aod_azimuth.resize(K);
        an.faru_aoa_elevation.resize(K);
        an.faru_aoa_azimuth.resize(K);
        for (int k = 0; k < K; ++k) {
            an.user_aod_elevation(k) = a(g);
            an.user_aod_azimuth(k) = a(g);
            an.faru_aoa_elevation(k) = a(g);
            an.faru_aoa_azimuth(k) = a(g);
        }
        an.farb_aod_elevation = a(g);
        an.farb_aod_azimuth = a(g);
        an.bs_aoa_elevation = a(g);
        an.bs_aoa_azimuth = a(g);
    }
    {
        auto g = make_stream(seed, kStreamShadowing);
        std::gamma_distribution<double> gd(config.gamma_shape, config.gamma_scale);
        out.fading.mu_k.resize(K);
        for (int k = 0; k < K; ++k) out.fading.mu_k(k) = gd(g);
        out.fading.mu_0 = gd(g);
    }
    // One stream per user column and per FAR-B column so that a larger M or N
    // extends, rather than reshuffles, the draw.
    out.fading.hhat.resize(M, K);
    for (int k = 0; k < K; ++k) {
        auto g = make_stream(seed, kStreamUserNlos, static_cast<std::uint64_t>(k));
        std::normal_distribution<double> n(0.0, 1.0);
        for (int m = 0; m < M; ++m) out.fading.hhat(m, k) = complex_normal(g, n);
    }
    out.fading.Hhat0.resize(N, M);
    for (int m = 0; m < M; ++m) {
        auto g = make_stream(seed, kStreamBsNlos, static_cast<std::uint64_t>(m));
        std::normal_distribution<double> n(0.0, 1.0);
        for (int r = 0; r < N; ++r) out.fading.Hhat0(r, m) = complex_normal(g, n);
    }
    return out;
}

std::pair<double, double> rician_weights(double k_factor) {
    if (std::isinf(k_factor)) return {1.0, 0.0};
    return {std::sqrt(k_factor / (k_factor + 1.0)), std::sqrt(1.0 / (k_factor + 1.0))};
}

Eigen::Vector3d user_aod(const AngleSet& a, int k) {
    return wave_vector(a.user_aod_elevation(k), a.user_aod_azimuth(k));
}
Eigen::Vector3d faru_aoa(const AngleSet& a, int k) {
    return wave_vector(a.faru_aoa_elevation(k), a.faru_aoa_azimuth(k));
}
Eigen::Vector3d farb_aod(const AngleSet& a) { return wave_vector(a.farb_aod_elevation, a.farb_aod_azimuth); }
Eigen::Vector3d bs_aoa(const AngleSet& a) { return wave_vector(a.bs_aoa_elevation, a.bs_aoa_azimuth); }

Eigen::VectorXcd synthesize_user_channel(const ScenarioConfig& config, const Placement& placement,
                                         const AngleSet& angles, const FadingDraw& draw, int k) {
    const double lam = config.wavelength();
    const auto [a1, n1] = rician_weights(config.rician_k1);
    const Eigen::VectorXcd rho_u = steering_vector(placement.U, placement.o_u, faru_aoa(angles, k), lam);
    const std::complex<double> rho_t =
        phase_difference(placement.T.col(k), placement.user_refs.col(k), user_aod(angles, k), lam);
    return a1 * rho_u * std::conj(rho_t) + n1 * draw.hhat.col(k);
}

Eigen::MatrixXcd synthesize_far_bs_channel(const ScenarioConfig& config, const Placement& placement,
                                           const AngleSet& angles, const FadingDraw& draw) {
    const double lam = config.wavelength();
    const auto [a0, n0] = rician_weights(config.rician_k0);
    const Eigen::VectorXcd rho_r = steering_vector(placement.R, Eigen::Vector3d::Zero(), bs_aoa(angles), lam);
    const Eigen::VectorXcd rho_b = steering_vector(placement.B, placement.o_b, farb_aod(angles), lam);
    return a0 * rho_r * rho_b.adjoint() + n0 * draw.Hhat0;
}

double user_beta(const ScenarioConfig& config, const Placement& placement, const FadingDraw& draw, int k) {
    return pathloss((placement.T.col(k) - placement.o_u).norm(), draw.mu_k(k), config.pathloss_exponent);
}

double far_bs_beta(const ScenarioConfig& config, const Eigen::Vector3d& o_b, const FadingDraw& draw) {
    const double mu = config.beta0_squared ? draw.mu_0 * draw.mu_0 : draw.mu_0;
    return pathloss(o_b.norm(), mu, config.pathloss_exponent);
}

ChannelRealization synthesize(const ScenarioConfig& config, const PropagationConstants& consts,
                              const Placement& placement, const ScenarioDraw& scenario) {
    const int K = config.num_users;
    ChannelRealization ch;
    ch.beta_k.resize(K);
    ch.h.resize(config.num_far_antennas, K);
    for (int k = 0; k < K; ++k) {
        ch.beta_k(k) = user_beta(config, placement, scenario.fading, k);
        ch.h.col(k) = synthesize_user_channel(config, placement, scenario.angles, scenario.fading, k);
    }
    ch.beta_0 = far_bs_beta(config, placement.o_b, scenario.fading);
    ch.H0 = synthesize_far_bs_channel(config, placement, scenario.angles, scenario.fading);
    ch.theta = through_matrix(consts, placement.U, placement.B, (placement.o_b - placement.o_u).norm(),
                              config.attenuation);
    ch.H = ch.H0 * ch.theta.entries;
    return ch;
}

}  // namespace faree
