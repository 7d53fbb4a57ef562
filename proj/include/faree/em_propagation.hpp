// SPDX-License-Identifier: Apache-2.0
//
// Plane-wave propagation through the lossy isotropic medium embedded in the
// blockage, and the blockage-through matrix seen between the two antenna faces
// of the relay.
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace faree {

using Matrix3X = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Material constants of the medium inside the blockage.
struct MediumParams {
    double conductivity = 1e-14;         // S/m
    double relative_permittivity = 4.0;  // eps / eps_vacuum
    double relative_permeability = 1.0;  // mu / mu_vacuum
    double carrier_wavelength = 0.3;     // m

    void validate() const;
};

struct PropagationConstants {
    double angular_frequency = 0.0;  // rad/s
    double loss_angle = 0.0;         // rad, arctan(sigma / (omega eps))
    double c1 = 0.0;                 // rad/m, omega sqrt(mu eps)
    double c1_hat = 0.0;             // rad/m, phase constant of the lossy medium
    double attenuation_rate = 0.0;   // 1/m
};

struct AttenuationPhase {
    double alpha = 1.0;  // amplitude ratio in (0, 1]
    double theta = 0.0;  // rad, unwrapped
};

/// How the amplitude term of each antenna pair is modelled.
enum class AttenuationModel {
    reference_distance,  // one alpha from the reference-point distance, cancelled by forwarding
    per_pair,            // alpha_pq from the true pair distance; forwarding still uses the reference alpha
};

struct ThroughMatrix {
    Eigen::MatrixXcd entries;     // rows: FAR-B antennas, columns: FAR-U antennas
    double alpha = 1.0;           // reference attenuation
    double forwarding_gain = 1.0; // diagonal of both forwarding matrices, alpha^{-1/2}
};

PropagationConstants propagation_constants(const MediumParams& medium);

/// Amplitude ratio over ref_distance and phase accumulated over fa_distance.
/// Throws std::domain_error for non-positive distances.
AttenuationPhase attenuation_and_phase(const PropagationConstants& consts, double ref_distance,
                                       double fa_distance);

/// Blockage-through matrix between FAR-U positions (columns) and FAR-B positions (rows).
/// ref_distance is |o_b - o_u|; it only enters the attenuation.
ThroughMatrix through_matrix(const PropagationConstants& consts, const Matrix3X& faru_positions,
                             const Matrix3X& farb_positions, double ref_distance,
                             AttenuationModel model = AttenuationModel::reference_distance);

}  // namespace faree
