// SPDX-License-Identifier: Apache-2.0
//
// Convexification toolkit: Taylor linearizations, DC expansions, square-root
// product bounds, quadratic MM minorants/majorants of phase-sum functions and
// min-distance linearizations.
#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

namespace faree {

using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// Phase-sum functions of an in-plane antenna position x = (x, z).
//
// One term is c * exp(j * phi(x)) with
//   phi(x) = wave^T x - c1_hat * sum_s sign_s * |X(x) - anchor_s|,
// X(x) = (x(0), plane_y, x(1)). Steering phases give the wave part, propagation
// through the blockage gives the distance part.
// ---------------------------------------------------------------------------

struct DistancePiece {
    Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
    double sign = 1.0;
};

struct PhasorTerm {
    cd coeff{0.0, 0.0};
    Eigen::Vector2d wave = Eigen::Vector2d::Zero();
    int npieces = 0;
    std::array<DistancePiece, 2> pieces{};

    bool is_constant() const { return npieces == 0 && wave.isZero(0.0); }
};

/// Shared geometry for the phase-sum functions of one moving antenna.
struct PhasorContext {
    double plane_y = 0.0;
    double c1_hat = 0.0;
    /// Every anchor lies at least this far from the antenna plane (blockage width).
    double min_anchor_gap = 0.0;
};

/// z(x) = sum_j c_j exp(j phi_j(x)).
struct PhasorSum {
    PhasorContext ctx;
    std::vector<PhasorTerm> terms;

    cd value(const Eigen::Vector2d& x) const;
    void add_constant(cd c);
    void add_wave(cd c, const Eigen::Vector2d& wave);
    void add_distance(cd c, const Eigen::Vector2d& wave, const Eigen::Vector3d& anchor);
};

/// f(x) = constant + Re sum_j d_j exp(j phi_j(x)).
struct RealPhasorSum {
    PhasorContext ctx;
    double constant = 0.0;
    std::vector<PhasorTerm> terms;

    double value(const Eigen::Vector2d& x) const;
    Eigen::Vector2d gradient(const Eigen::Vector2d& x) const;
    Eigen::Matrix2d hessian(const Eigen::Vector2d& x) const;
};

/// Re(conj(w) * z(x)).
RealPhasorSum real_part(const PhasorSum& z, cd w);
/// |z(x)|^2 expanded into pairwise phase differences.
RealPhasorSum squared_modulus(const PhasorSum& z);

// ---------------------------------------------------------------------------
// Curvature (iota) constants.
// ---------------------------------------------------------------------------

enum class CurvatureMode {
    geometric,  // sum_j |d_j| ((|wave_j| + n_j c1_hat)^2 + c1_hat sum_s 1/gap_s)
    paper,      // closed-form constants C2, C4 (never below the geometric bound)
};

/// Constants for the closed-form curvature bounds.
struct PaperConstants {
    double wavelength = 0.3;
    double c1 = 0.0;          // use max(C1, c1_hat)
    double largest_dim = 0.0; // T = max(L, W, H)
    double width = 0.0;       // W
};

double paper_c2(const PaperConstants& k);
double paper_c4(const PaperConstants& k);

/// Upper bound on the spectral norm of the Hessian of f over the whole plane.
/// Throws std::domain_error when an anchor sits closer than half the blockage width.
double curvature_bound(const RealPhasorSum& f, CurvatureMode mode = CurvatureMode::geometric,
                       const PaperConstants* paper = nullptr);

// ---------------------------------------------------------------------------
// Quadratic surrogates.
// ---------------------------------------------------------------------------

enum class Sense { minorant, majorant };

/// q(x) = value + gradient^T (x - anchor) -/+ curvature/2 |x - anchor|^2.
struct QuadraticSurrogate {
    Sense sense = Sense::minorant;
    double curvature = 0.0;
    Eigen::Vector2d anchor = Eigen::Vector2d::Zero();
    double value = 0.0;  // at the anchor
    Eigen::Vector2d gradient = Eigen::Vector2d::Zero();

    double operator()(const Eigen::Vector2d& x) const;
    /// Same surrogate after scaling by a positive constant.
    QuadraticSurrogate scaled(double s) const;
    /// Sum of two surrogates of the same sense and anchor.
    QuadraticSurrogate plus(const QuadraticSurrogate& o) const;
    QuadraticSurrogate shifted(double c) const;
};

QuadraticSurrogate mm_surrogate(const RealPhasorSum& f, const Eigen::Vector2d& anchor, Sense sense,
                                CurvatureMode mode = CurvatureMode::geometric,
                                const PaperConstants* paper = nullptr);

/// Lower bound of |z(x)|^2: 2 * minorant(Re(conj(z_n) z(x))) - |z_n|^2. Exact at the anchor.
QuadraticSurrogate signal_minorant(const PhasorSum& z, const Eigen::Vector2d& anchor,
                                   CurvatureMode mode = CurvatureMode::geometric,
                                   const PaperConstants* paper = nullptr);

enum class MajorantMode {
    pairwise,  // MM majorant of the pairwise expansion, exact at the anchor
    rayleigh,  // |z0|^2 + J lambda_max + majorant of 2 Re(conj(z0) w(x))
};

/// Upper bound of |z(x)|^2.
QuadraticSurrogate power_majorant(const PhasorSum& z, const Eigen::Vector2d& anchor,
                                  MajorantMode mode = MajorantMode::pairwise,
                                  CurvatureMode curvature = CurvatureMode::geometric,
                                  const PaperConstants* paper = nullptr);

/// J * lambda_max(Q) for a Hermitian Q: the Rayleigh-Ritz bound of theta^H Q theta over
/// unit-modulus theta in C^J.
double rayleigh_bound(const Eigen::MatrixXcd& Q);

// ---------------------------------------------------------------------------
// Scalar and small-vector surrogates.
// ---------------------------------------------------------------------------

/// Affine map o -> scale/D^l - scale * l * (o_n - t)^T (o - o_n) / D^{l+2}, D = |o_n - t|.
struct AffineMap {
    Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
    double value = 0.0;
    Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
    double operator()(const Eigen::Vector3d& o) const { return value + gradient.dot(o - anchor); }
};

AffineMap taylor_inverse_pathloss(const Eigen::Vector3d& o_n, const Eigen::Vector3d& t, double scale,
                                  double exponent);

/// Spectral norm bound of the Hessian of scale/|o - t|^l for |o - t| >= d_lower.
double inverse_pathloss_curvature(double scale, double exponent, double d_lower);

/// a*b = (a+b)^2/4 - (a-b)^2/4 with the concave part linearized at (a_n, b_n).
/// The result upper-bounds a*b everywhere and is exact at the anchor.
struct DcBilinear {
    double a_n = 0.0;
    double b_n = 0.0;
    double operator()(double a, double b) const;
    /// Coefficients of the linearized part: -(a_n-b_n)^2/4 + ca*a + cb*b + c0.
    double ca() const { return -0.5 * (a_n - b_n); }
    double cb() const { return 0.5 * (a_n - b_n); }
    double c0() const { return -0.25 * (a_n - b_n) * (a_n - b_n) + 0.5 * (a_n - b_n) * (a_n - b_n); }
};

DcBilinear dc_bilinear(double a_n, double b_n);

/// First-order expansion of sqrt(psi * chi / p) at (p_n, psi_n, chi_n).
struct SqrtProductAffine {
    double p_n = 1.0, psi_n = 1.0, chi_n = 1.0;
    double value = 1.0;
    double d_p = 0.0, d_psi = 0.0, d_chi = 0.0;
    double operator()(double p, double psi, double chi) const {
        return value + d_p * (p - p_n) + d_psi * (psi - psi_n) + d_chi * (chi - chi_n);
    }
};

SqrtProductAffine sqrt_product_lower(double p_n, double psi_n, double chi_n);

/// Linearization of |x - x_other| >= d_min at x_n: e^T x >= rhs. Any x satisfying it also
/// satisfies the true spacing constraint.
struct SpacingCut {
    Eigen::VectorXd normal;
    double rhs = 0.0;
    double slack(const Eigen::VectorXd& x) const { return normal.dot(x) - rhs; }
};

SpacingCut linearize_min_distance(const Eigen::VectorXd& x_n, const Eigen::VectorXd& x_other, double d_min);

/// Convex majorant of sum_i p_i * beta_i * |w^H h_i|^2 around (p_n, w_n).
/// Each product is split with a balanced factor kappa_i; the concave part is
/// linearized with the sign rule that keeps the bound valid.
struct InterferenceMajorant {
    Eigen::VectorXd p_n;
    Eigen::VectorXcd w_n;
    std::vector<Eigen::VectorXcd> h;
    Eigen::VectorXd beta;
    Eigen::VectorXd kappa;
    Eigen::VectorXd u_n;  // kappa p_n beta - |w_n^H h|^2 / kappa

    double operator()(const Eigen::VectorXd& p, const Eigen::VectorXcd& w) const;
    double true_value(const Eigen::VectorXd& p, const Eigen::VectorXcd& w) const;
};

InterferenceMajorant dc_interference_majorant(const Eigen::VectorXd& p_n, const Eigen::VectorXcd& w_n,
                                              const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXd& beta);

/// Balanced split factor sqrt(b_n / a_n), or 1 when either side vanishes.
double balanced_kappa(double a_n, double b_n);

}  // namespace faree
