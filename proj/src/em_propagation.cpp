// SPDX-License-Identifier: Apache-2.0
#include "faree/em_propagation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "faree/units.hpp"

namespace faree {

void MediumParams::validate() const {
    if (!(conductivity >= 0.0)) throw std::domain_error("conductivity must be >= 0");
    if (!(relative_permittivity > 0.0)) throw std::domain_error("relative permittivity must be > 0");
    if (!(relative_permeability > 0.0)) throw std::domain_error("relative permeability must be > 0");
    if (!(carrier_wavelength > 0.0)) throw std::domain_error("carrier wavelength must be > 0");
}

PropagationConstants propagation_constants(const MediumParams& medium) {
    medium.validate();
    const double eps = medium.relative_permittivity * kVacuumPermittivity;
    const double mu = medium.relative_permeability * kVacuumPermeability;

    PropagationConstants out;
    out.angular_frequency = 2.0 * kPi * kSpeedOfLight / medium.carrier_wavelength;
    out.loss_angle = std::atan(medium.conductivity / (out.angular_frequency * eps));
    out.c1 = out.angular_frequency * std::sqrt(mu * eps);
    // sec^{1/2}(gamma) scales both the phase and attenuation constants.
    const double sec_sqrt = 1.0 / std::sqrt(std::cos(out.loss_angle));
    out.c1_hat = out.c1 * sec_sqrt * std::cos(0.5 * out.loss_angle);
    out.attenuation_rate = out.c1 * sec_sqrt * std::sin(0.5 * out.loss_angle);
    return out;
}

AttenuationPhase attenuation_and_phase(const PropagationConstants& consts, double ref_distance,
                                       double fa_distance) {
    if (!(ref_distance > 0.0) || !(fa_distance > 0.0)) {
        throw std::domain_error("attenuation_and_phase: distances must be positive (got ref=" +
                                std::to_string(ref_distance) + ", fa=" + std::to_string(fa_distance) + ")");
    }
    return {std::exp(-consts.attenuation_rate * ref_distance), consts.c1_hat * fa_distance};
}

ThroughMatrix through_matrix(const PropagationConstants& consts, const Matrix3X& faru_positions,
                             const Matrix3X& farb_positions, double ref_distance, AttenuationModel model) {
    if (faru_positions.cols() != farb_positions.cols()) {
        throw std::invalid_argument("through_matrix: FAR-U has " + std::to_string(faru_positions.cols()) +
                                    " antennas but FAR-B has " + std::to_string(farb_positions.cols()));
    }
    const Eigen::Index m = faru_positions.cols();
    ThroughMatrix out;
    out.alpha = std::exp(-consts.attenuation_rate * ref_distance);
    out.forwarding_gain = 1.0 / std::sqrt(out.alpha);
    out.entries.resize(m, m);
    const double gain2 = out.forwarding_gain * out.forwarding_gain;
    for (Eigen::Index p = 0; p < m; ++p) {
        for (Eigen::Index q = 0; q < m; ++q) {
            const double d = (farb_positions.col(p) - faru_positions.col(q)).norm();
            const double phase = consts.c1_hat * d;
            double amplitude = 1.0;
            if (model == AttenuationModel::per_pair) {
                amplitude = std::exp(-consts.attenuation_rate * d) * gain2;
            }
            out.entries(p, q) = std::polar(amplitude, -phase);
        }
    }
    return out;
}

}  // namespace faree
