// SPDX-License-Identifier: Apache-2.0
#include "faree/link_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace faree {

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::far: return "far";
        case Scheme::sris: return "sris";
        case Scheme::afr: return "afr";
    }
    return "far";
}

Scheme parse_scheme(const std::string& name) {
    if (name == "far" || name == "FAR") return Scheme::far;
    if (name == "sris" || name == "SRIS") return Scheme::sris;
    if (name == "afr" || name == "AFR") return Scheme::afr;
    throw std::invalid_argument("unknown scheme: " + name);
}

EffectiveGains effective_gains(const ControlState& control, const ChannelRealization& ch) {
    EffectiveGains g;
    // Row k of W^H H: the combined relay-to-BS response seen by beamformer k.
    const Eigen::MatrixXcd WH = control.omega.adjoint() * ch.H;  // K x M
    g.noise = WH.rowwise().squaredNorm();
    g.cross = (WH * ch.h).cwiseAbs2();  // K x K
    return g;
}

Eigen::VectorXd sinr_from_gains(const EffectiveGains& g, const Eigen::VectorXd& p, const ChannelRealization& ch,
                                const ScenarioConfig& config) {
    const Eigen::Index K = p.size();
    Eigen::VectorXd out(K);
    const double b0 = ch.beta_0;
    for (Eigen::Index k = 0; k < K; ++k) {
        double interference = 0.0;
        for (Eigen::Index i = 0; i < K; ++i) {
            if (i != k) interference += p(i) * b0 * ch.beta_k(i) * g.cross(k, i);
        }
        const double denom = config.noise_bs() + b0 * config.noise_faru * g.noise(k) + interference;
        out(k) = p(k) * b0 * ch.beta_k(k) * g.cross(k, k) / denom;
    }
    return out;
}

Eigen::VectorXd all_sinr(const ControlState& control, const ChannelRealization& ch, const ScenarioConfig& config) {
    return sinr_from_gains(effective_gains(control, ch), control.p, ch, config);
}

double sinr(int k, const ControlState& control, const ChannelRealization& ch, const ScenarioConfig& config) {
    return all_sinr(control, ch, config)(k);
}

double circuit_power(const ScenarioConfig& config, Scheme scheme) {
    const double two_m = 2.0 * config.num_far_antennas;
    switch (scheme) {
        case Scheme::far: return config.power_bs + config.power_far;
        case Scheme::sris: return config.power_bs + two_m * config.power_sris_element;
        case Scheme::afr: return config.power_bs + two_m * config.power_afr_antenna;
    }
    return config.power_bs + config.power_far;
}

double energy_efficiency(const Eigen::VectorXd& rates, const Eigen::VectorXd& p, double circuit) {
    return rates.sum() / (p.sum() + circuit);
}

double LinkReport::worst_violation() const {
    double w = 0.0;
    for (const auto& e : violations) w = std::max(w, e.violation);
    return w;
}

std::string LinkReport::csv_header() { return "sum_rate,total_power,ee,feasible,worst_violation,sinr"; }

std::string LinkReport::csv_row() const {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << num(sum_rate) << ',' << num(total_power) << ',' << num(ee) << ',' << (feasible ? 1 : 0) << ','
       << num(worst_violation()) << ',';
    for (Eigen::Index k = 0; k < sinr.size(); ++k) os << (k ? ";" : "") << num(sinr(k));
    return os.str();
}

LinkReport evaluate_link(const ControlState& control, const ChannelRealization& ch, const ScenarioConfig& config,
                         Scheme scheme) {
    LinkReport r;
    r.sinr = all_sinr(control, ch, config);
    r.rates = config.bandwidth * (1.0 + r.sinr.array()).log2().matrix();
    r.sum_rate = r.rates.sum();
    r.total_power = control.p.sum() + circuit_power(config, scheme);
    r.ee = r.sum_rate / r.total_power;
    return r;
}

LinkReport check_solution(const Placement& placement, const ControlState& control, const ChannelRealization& ch,
                          const ScenarioConfig& config, Scheme scheme, double tol) {
    LinkReport r = evaluate_link(control, ch, config, scheme);
    ConstraintEntry rate{"rate", true, 0.0};
    const double scale = std::max(config.min_rate, 1.0);
    for (Eigen::Index k = 0; k < r.rates.size(); ++k) {
        rate.violation = std::max(rate.violation, (config.min_rate - r.rates(k)) / scale);
    }
    ConstraintEntry power{"power", true, 0.0};
    for (Eigen::Index k = 0; k < control.p.size(); ++k) {
        power.violation = std::max(power.violation, -control.p(k));
        power.violation = std::max(power.violation, control.p(k) - config.max_power);
    }
    ConstraintEntry beam{"beam_norm", true, 0.0};
    for (Eigen::Index k = 0; k < control.omega.cols(); ++k) {
        beam.violation = std::max(beam.violation, control.omega.col(k).norm() - 1.0);
    }
    for (auto* e : {&rate, &power, &beam}) {
        e->satisfied = e->violation <= tol;
        r.violations.push_back(*e);
    }
    for (auto e : validate_placement(placement, config).entries) {
        e.satisfied = e.violation <= tol;
        r.violations.push_back(e);
    }
    r.feasible = r.worst_violation() <= tol;
    return r;
}

}  // namespace faree
