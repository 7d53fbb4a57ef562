// SPDX-License-Identifier: Apache-2.0
#include "faree/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "faree/units.hpp"

namespace faree {

double PlanarRegion::violation(const Eigen::Vector2d& xz) const {
    double v = 0.0;
    for (int i = 0; i < 2; ++i) {
        v = std::max(v, lo(i) - xz(i));
        v = std::max(v, xz(i) - hi(i));
    }
    return v;
}

Eigen::Vector2d PlanarRegion::clamp(const Eigen::Vector2d& xz) const {
    return xz.cwiseMax(lo).cwiseMin(hi);
}

Eigen::Vector3d wave_vector(double elevation, double azimuth) {
    if (!(elevation >= 0.0 && elevation <= kPi) || !(azimuth >= 0.0 && azimuth <= kPi)) {
        throw std::domain_error("wave_vector: angles must lie in [0, pi]");
    }
    return {std::sin(elevation) * std::cos(azimuth), std::cos(elevation), std::sin(elevation) * std::sin(azimuth)};
}

std::complex<double> phase_difference(const Eigen::Vector3d& position, const Eigen::Vector3d& reference,
                                      const Eigen::Vector3d& kappa, double wavelength) {
    return std::polar(1.0, 2.0 * kPi / wavelength * kappa.dot(position - reference));
}

Eigen::VectorXcd steering_vector(const Matrix3X& positions, const Eigen::Vector3d& reference,
                                 const Eigen::Vector3d& kappa, double wavelength) {
    Eigen::VectorXcd out(positions.cols());
    for (Eigen::Index i = 0; i < positions.cols(); ++i) {
        out(i) = phase_difference(positions.col(i), reference, kappa, wavelength);
    }
    return out;
}

double pathloss(double distance, double mu, double exponent) {
    if (!(distance > 0.0)) throw std::domain_error("pathloss: distance must be positive");
    return mu / std::pow(distance, exponent);
}

PlanarRegion faru_region(const ScenarioConfig& c, const Eigen::Vector3d& o_u) {
    PlanarRegion r;
    r.lo = {o_u(0), o_u(2)};
    r.hi = r.lo + Eigen::Vector2d::Constant(c.region_size);
    r.y = c.far_bs_distance + c.blockage_width;
    return r;
}

PlanarRegion farb_region(const ScenarioConfig& c, const Eigen::Vector3d& o_b) {
    PlanarRegion r;
    r.lo = {o_b(0), o_b(2)};
    r.hi = r.lo + Eigen::Vector2d::Constant(c.region_size);
    r.y = c.far_bs_distance;
    return r;
}

PlanarRegion user_region(const ScenarioConfig& c, const Eigen::Vector3d& o_k) {
    PlanarRegion r;
    r.lo = {o_k(0), o_k(2)};
    r.hi = r.lo + Eigen::Vector2d::Constant(c.region_size);
    r.y = o_k(1);
    return r;
}

PlanarRegion bs_region(const ScenarioConfig& c) {
    PlanarRegion r;
    r.hi = Eigen::Vector2d::Constant(c.region_size);
    return r;
}

PlanarRegion reference_box(const ScenarioConfig& c, double y) {
    PlanarRegion r;
    r.hi = {c.blockage_length - c.region_size, c.blockage_height - c.region_size};
    r.y = y;
    return r;
}

Eigen::Vector3d faru_reference(const ScenarioConfig& c, double x, double z) {
    return {x, c.far_bs_distance + c.blockage_width, z};
}

Eigen::Vector3d farb_reference(const ScenarioConfig& c, double x, double z) {
    return {x, c.far_bs_distance, z};
}

Matrix3X centered_grid(const PlanarRegion& region, int count, double spacing) {
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    const Eigen::Vector2d mid = region.center();
    Matrix3X out(3, count);
    for (int i = 0; i < count; ++i) {
        const int cx = i % cols;
        const int rz = i / cols;
        Eigen::Vector2d xz{mid(0) + (cx - 0.5 * (cols - 1)) * spacing, mid(1) + (rz - 0.5 * (rows - 1)) * spacing};
        out.col(i) = region.lift(xz);
    }
    return out;
}

Placement initial_placement(const ScenarioConfig& c, const Matrix3X& user_refs) {
    Placement p;
    const PlanarRegion box = reference_box(c, 0.0);
    const Eigen::Vector2d mid = box.center();
    p.o_u = faru_reference(c, mid(0), mid(1));
    p.o_b = farb_reference(c, mid(0), mid(1));
    p.user_refs = user_refs;
    p.T.resize(3, user_refs.cols());
    for (Eigen::Index k = 0; k < user_refs.cols(); ++k) {
        const PlanarRegion reg = user_region(c, user_refs.col(k));
        p.T.col(k) = reg.lift(reg.center());
    }
    p.U = centered_grid(faru_region(c, p.o_u), c.num_far_antennas, c.min_spacing);
    p.B = centered_grid(farb_region(c, p.o_b), c.num_far_antennas, c.min_spacing);
    p.R = centered_grid(bs_region(c), c.num_bs_antennas, c.min_spacing);
    return p;
}

void translate_faru(Placement& p, const Eigen::Vector3d& new_o_u) {
    const Eigen::Vector3d shift = new_o_u - p.o_u;
    p.U.colwise() += shift;
    p.o_u = new_o_u;
}

void translate_farb(Placement& p, const Eigen::Vector3d& new_o_b) {
    const Eigen::Vector3d shift = new_o_b - p.o_b;
    p.B.colwise() += shift;
    p.o_b = new_o_b;
}

double PlacementReport::worst_violation() const {
    double w = 0.0;
    for (const auto& e : entries) w = std::max(w, e.violation);
    return w;
}

double spacing_slack(const Matrix3X& positions, double min_spacing) {
    double slack = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < positions.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < positions.cols(); ++j) {
            slack = std::min(slack, (positions.col(i) - positions.col(j)).norm() - min_spacing);
        }
    }
    return slack;
}

namespace {

ConstraintEntry region_entry(const char* name, const Matrix3X& pts, const PlanarRegion& reg) {
    ConstraintEntry e{name, true, 0.0};
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        double v = reg.violation(PlanarRegion::project(pts.col(i)));
        v = std::max(v, std::abs(pts(1, i) - reg.y));
        e.violation = std::max(e.violation, v);
    }
    e.satisfied = e.violation <= 0.0;
    return e;
}

ConstraintEntry spacing_entry(const char* name, const Matrix3X& pts, double d_min) {
    const double slack = spacing_slack(pts, d_min);
    ConstraintEntry e{name, true, 0.0};
    if (std::isfinite(slack) && slack < 0.0) e.violation = -slack;
    e.satisfied = e.violation <= 0.0;
    return e;
}

}  // namespace

PlacementReport validate_placement(const Placement& p, const ScenarioConfig& c) {
    PlacementReport r;
    ConstraintEntry users{"user_region", true, 0.0};
    for (Eigen::Index k = 0; k < p.T.cols(); ++k) {
        Matrix3X one = p.T.col(k);
        auto e = region_entry("user_region", one, user_region(c, p.user_refs.col(k)));
        users.violation = std::max(users.violation, e.violation);
    }
    users.satisfied = users.violation <= 0.0;
    r.entries.push_back(users);
    r.entries.push_back(region_entry("faru_region", p.U, faru_region(c, p.o_u)));
    r.entries.push_back(region_entry("farb_region", p.B, farb_region(c, p.o_b)));
    r.entries.push_back(region_entry("bs_region", p.R, bs_region(c)));
    r.entries.push_back(spacing_entry("faru_spacing", p.U, c.min_spacing));
    r.entries.push_back(spacing_entry("farb_spacing", p.B, c.min_spacing));
    r.entries.push_back(spacing_entry("bs_spacing", p.R, c.min_spacing));
    Matrix3X ou = p.o_u;
    Matrix3X ob = p.o_b;
    r.entries.push_back(region_entry("o_u_box", ou, reference_box(c, c.far_bs_distance + c.blockage_width)));
    r.entries.push_back(region_entry("o_b_box", ob, reference_box(c, c.far_bs_distance)));
    return r;
}

}  // namespace faree
