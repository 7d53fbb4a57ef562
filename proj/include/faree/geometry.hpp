// SPDX-License-Identifier: Apache-2.0
//
// Spatial state: reference points, antenna position matrices, movable regions,
// steering phases and pathloss.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "faree/config.hpp"
#include "faree/em_propagation.hpp"

namespace faree {

/// An axis-aligned square region in a plane of constant y.
/// In-plane coordinates are (x, z).
struct PlanarRegion {
    Eigen::Vector2d lo = Eigen::Vector2d::Zero();
    Eigen::Vector2d hi = Eigen::Vector2d::Zero();
    double y = 0.0;

    Eigen::Vector3d lift(const Eigen::Vector2d& xz) const { return {xz(0), y, xz(1)}; }
    static Eigen::Vector2d project(const Eigen::Vector3d& p) { return {p(0), p(2)}; }
    Eigen::Vector2d center() const { return 0.5 * (lo + hi); }
    /// Largest distance by which an in-plane point leaves the box (0 inside).
    double violation(const Eigen::Vector2d& xz) const;
    Eigen::Vector2d clamp(const Eigen::Vector2d& xz) const;
};

struct Placement {
    Eigen::Vector3d o_u = Eigen::Vector3d::Zero();
    Eigen::Vector3d o_b = Eigen::Vector3d::Zero();
    Matrix3X user_refs;  // o_k, fixed per drop
    Matrix3X T;          // K user antennas
    Matrix3X U;          // M FAR-U antennas
    Matrix3X B;          // M FAR-B antennas
    Matrix3X R;          // N BS antennas
};

struct AngleSet {
    Eigen::VectorXd user_aod_elevation, user_aod_azimuth;  // per user, at the user antenna
    Eigen::VectorXd faru_aoa_elevation, faru_aoa_azimuth;  // per user, at the FAR-U
    double farb_aod_elevation = 0.0, farb_aod_azimuth = 0.0;
    double bs_aoa_elevation = 0.0, bs_aoa_azimuth = 0.0;
};

Eigen::Vector3d wave_vector(double elevation, double azimuth);

std::complex<double> phase_difference(const Eigen::Vector3d& position, const Eigen::Vector3d& reference,
                                      const Eigen::Vector3d& kappa, double wavelength);

Eigen::VectorXcd steering_vector(const Matrix3X& positions, const Eigen::Vector3d& reference,
                                 const Eigen::Vector3d& kappa, double wavelength);

/// beta = mu / D^l.
double pathloss(double distance, double mu, double exponent);

// Regions -------------------------------------------------------------------

PlanarRegion faru_region(const ScenarioConfig& c, const Eigen::Vector3d& o_u);
PlanarRegion farb_region(const ScenarioConfig& c, const Eigen::Vector3d& o_b);
PlanarRegion user_region(const ScenarioConfig& c, const Eigen::Vector3d& o_k);
PlanarRegion bs_region(const ScenarioConfig& c);
/// Feasible box for the in-plane coordinates of o_u and o_b.
PlanarRegion reference_box(const ScenarioConfig& c, double y);

Eigen::Vector3d faru_reference(const ScenarioConfig& c, double x, double z);
Eigen::Vector3d farb_reference(const ScenarioConfig& c, double x, double z);

/// n antennas on a d_min-spaced square sub-grid centered in the region.
Matrix3X centered_grid(const PlanarRegion& region, int count, double spacing);

/// Initial placement: reference points at the centers of their feasible boxes,
/// antennas on centered grids.
Placement initial_placement(const ScenarioConfig& c, const Matrix3X& user_refs);

/// Moves o_u (and U rigidly with it).
void translate_faru(Placement& p, const Eigen::Vector3d& new_o_u);
void translate_farb(Placement& p, const Eigen::Vector3d& new_o_b);

struct ConstraintEntry {
    std::string name;
    bool satisfied = true;
    double violation = 0.0;
};

struct PlacementReport {
    std::vector<ConstraintEntry> entries;  // user_region, faru_region, farb_region, bs_region,
                                           // faru_spacing, farb_spacing, bs_spacing, o_u_box, o_b_box
    double worst_violation() const;
    bool feasible(double tol = 1e-6) const { return worst_violation() <= tol; }
};

PlacementReport validate_placement(const Placement& p, const ScenarioConfig& c);

/// Smallest pairwise distance minus d_min over the columns (positive when satisfied).
double spacing_slack(const Matrix3X& positions, double min_spacing);

}  // namespace faree
