// SPDX-License-Identifier: Apache-2.0
#include "faree/surrogates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "faree/units.hpp"

namespace faree {

namespace {

Eigen::Vector3d lift(const PhasorContext& ctx, const Eigen::Vector2d& x) { return {x(0), ctx.plane_y, x(1)}; }

double phase_of(const PhasorContext& ctx, const PhasorTerm& t, const Eigen::Vector2d& x) {
    double phi = t.wave.dot(x);
    if (t.npieces) {
        const Eigen::Vector3d X = lift(ctx, x);
        for (int s = 0; s < t.npieces; ++s) phi -= ctx.c1_hat * t.pieces[s].sign * (X - t.pieces[s].anchor).norm();
    }
    return phi;
}

/// Gradient and Hessian of the phase.
void phase_derivatives(const PhasorContext& ctx, const PhasorTerm& t, const Eigen::Vector2d& x, Eigen::Vector2d& g,
                       Eigen::Matrix2d& H) {
    g = t.wave;
    H.setZero();
    if (!t.npieces) return;
    const Eigen::Vector3d X = lift(ctx, x);
    for (int s = 0; s < t.npieces; ++s) {
        const Eigen::Vector3d r = X - t.pieces[s].anchor;
        const double d = r.norm();
        const Eigen::Vector2d p(r(0), r(2));
        const double w = ctx.c1_hat * t.pieces[s].sign;
        g -= w * p / d;
        H -= w * (Eigen::Matrix2d::Identity() / d - p * p.transpose() / (d * d * d));
    }
}

bool same_anchor(const Eigen::Vector3d& a, const Eigen::Vector3d& b) { return (a - b).cwiseAbs().maxCoeff() == 0.0; }

}  // namespace

// PhasorSum ----------------------------------------------------------------

cd PhasorSum::value(const Eigen::Vector2d& x) const {
    cd z{0.0, 0.0};
    for (const auto& t : terms) z += t.coeff * std::polar(1.0, phase_of(ctx, t, x));
    return z;
}

void PhasorSum::add_constant(cd c) {
    PhasorTerm t;
    t.coeff = c;
    terms.push_back(t);
}

void PhasorSum::add_wave(cd c, const Eigen::Vector2d& wave) {
    PhasorTerm t;
    t.coeff = c;
    t.wave = wave;
    terms.push_back(t);
}

void PhasorSum::add_distance(cd c, const Eigen::Vector2d& wave, const Eigen::Vector3d& anchor) {
    PhasorTerm t;
    t.coeff = c;
    t.wave = wave;
    t.npieces = 1;
    t.pieces[0] = {anchor, 1.0};
    terms.push_back(t);
}

// RealPhasorSum ------------------------------------------------------------

double RealPhasorSum::value(const Eigen::Vector2d& x) const {
    double v = constant;
    for (const auto& t : terms) v += std::real(t.coeff * std::polar(1.0, phase_of(ctx, t, x)));
    return v;
}

Eigen::Vector2d RealPhasorSum::gradient(const Eigen::Vector2d& x) const {
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    Eigen::Vector2d g;
    Eigen::Matrix2d H;
    for (const auto& t : terms) {
        phase_derivatives(ctx, t, x, g, H);
        const cd e = t.coeff * std::polar(1.0, phase_of(ctx, t, x));
        out -= std::imag(e) * g;
    }
    return out;
}

Eigen::Matrix2d RealPhasorSum::hessian(const Eigen::Vector2d& x) const {
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    Eigen::Vector2d g;
    Eigen::Matrix2d H;
    for (const auto& t : terms) {
        phase_derivatives(ctx, t, x, g, H);
        const cd e = t.coeff * std::polar(1.0, phase_of(ctx, t, x));
        out -= std::real(e) * (g * g.transpose()) + std::imag(e) * H;
    }
    return out;
}

RealPhasorSum real_part(const PhasorSum& z, cd w) {
    RealPhasorSum f;
    f.ctx = z.ctx;
    for (const auto& t : z.terms) {
        PhasorTerm d = t;
        d.coeff = std::conj(w) * t.coeff;
        if (d.is_constant()) {
            f.constant += std::real(d.coeff);
        } else {
            f.terms.push_back(d);
        }
    }
    return f;
}

RealPhasorSum squared_modulus(const PhasorSum& z) {
    RealPhasorSum f;
    f.ctx = z.ctx;
    const std::size_t n = z.terms.size();
    for (std::size_t j = 0; j < n; ++j) f.constant += std::norm(z.terms[j].coeff);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = j + 1; l < n; ++l) {
            const PhasorTerm& a = z.terms[j];
            const PhasorTerm& b = z.terms[l];
            PhasorTerm t;
            t.coeff = 2.0 * a.coeff * std::conj(b.coeff);
            t.wave = a.wave - b.wave;
            std::array<DistancePiece, 4> pcs{};
            int np = 0;
            for (int s = 0; s < a.npieces; ++s) pcs[np++] = a.pieces[s];
            for (int s = 0; s < b.npieces; ++s) {
                DistancePiece p = b.pieces[s];
                p.sign = -p.sign;
                bool merged = false;
                for (int q = 0; q < np; ++q) {
                    if (same_anchor(pcs[q].anchor, p.anchor)) {
                        pcs[q].sign += p.sign;
                        merged = true;
                        break;
                    }
                }
                if (!merged) pcs[np++] = p;
            }
            for (int q = 0; q < np; ++q) {
                if (pcs[q].sign == 0.0) continue;
                if (t.npieces == 2) throw std::logic_error("squared_modulus: more than two distance pieces");
                t.pieces[t.npieces++] = pcs[q];
            }
            if (t.is_constant()) {
                f.constant += std::real(t.coeff);
            } else if (t.coeff != cd(0.0, 0.0)) {
                f.terms.push_back(t);
            }
        }
    }
    return f;
}

// Curvature ----------------------------------------------------------------

double paper_c2(const PaperConstants& k) {
    const double lam = k.wavelength;
    const double C1 = k.c1;
    const double T = k.largest_dim;
    const double W = k.width;
    return 4.0 * kPi * kPi / (lam * lam) + 4.0 * kPi * C1 * T / (lam * W) + C1 * C1 * T * T / (W * W) + C1 / W +
           C1 * T * T / (W * W * W);
}

double paper_c4(const PaperConstants& k) {
    const double C1 = k.c1;
    const double T = k.largest_dim;
    const double W = k.width;
    return C1 * (T * T + W * W) / (W * W * W) + C1 * C1 * T * T / (W * W);
}

double curvature_bound(const RealPhasorSum& f, CurvatureMode mode, const PaperConstants* paper) {
    if (mode == CurvatureMode::paper && !paper) throw std::invalid_argument("curvature_bound: paper constants missing");
    double total = 0.0;
    for (const auto& t : f.terms) {
        double grad = t.wave.norm();
        double curv = 0.0;
        for (int s = 0; s < t.npieces; ++s) {
            const double gap = std::abs(t.pieces[s].anchor(1) - f.ctx.plane_y);
            if (gap < 0.5 * f.ctx.min_anchor_gap || gap <= 0.0) {
                throw std::domain_error("curvature_bound: anchor closer to the antenna plane than half the blockage "
                                        "width (gap " + std::to_string(gap) + " m)");
            }
            grad += f.ctx.c1_hat * std::abs(t.pieces[s].sign);
            curv += f.ctx.c1_hat * std::abs(t.pieces[s].sign) / gap;
        }
        double bound = std::abs(t.coeff) * (grad * grad + curv);
        if (mode == CurvatureMode::paper) {
            double c = 0.0;
            const bool has_wave = !t.wave.isZero(0.0);
            if (t.npieces == 0) {
                c = 4.0 * kPi * kPi / (paper->wavelength * paper->wavelength);
            } else if (has_wave) {
                c = paper_c2(*paper);
            } else {
                c = paper_c4(*paper);
            }
            bound = std::max(bound, 2.0 * std::abs(t.coeff) * c);
        }
        total += bound;
    }
    return total;
}

// Quadratic surrogates -----------------------------------------------------

double QuadraticSurrogate::operator()(const Eigen::Vector2d& x) const {
    const Eigen::Vector2d d = x - anchor;
    const double q = 0.5 * curvature * d.squaredNorm();
    return value + gradient.dot(d) + (sense == Sense::minorant ? -q : q);
}

QuadraticSurrogate QuadraticSurrogate::scaled(double s) const {
    if (!(s >= 0.0)) throw std::invalid_argument("QuadraticSurrogate::scaled: factor must be >= 0");
    QuadraticSurrogate o = *this;
    o.curvature *= s;
    o.value *= s;
    o.gradient *= s;
    return o;
}

QuadraticSurrogate QuadraticSurrogate::plus(const QuadraticSurrogate& o) const {
    if (o.sense != sense || (o.anchor - anchor).cwiseAbs().maxCoeff() > 0.0) {
        throw std::invalid_argument("QuadraticSurrogate::plus: sense or anchor mismatch");
    }
    QuadraticSurrogate r = *this;
    r.curvature += o.curvature;
    r.value += o.value;
    r.gradient += o.gradient;
    return r;
}

QuadraticSurrogate QuadraticSurrogate::shifted(double c) const {
    QuadraticSurrogate r = *this;
    r.value += c;
    return r;
}

QuadraticSurrogate mm_surrogate(const RealPhasorSum& f, const Eigen::Vector2d& anchor, Sense sense, CurvatureMode mode,
                                const PaperConstants* paper) {
    QuadraticSurrogate q;
    q.sense = sense;
    q.anchor = anchor;
    q.value = f.value(anchor);
    q.gradient = f.gradient(anchor);
    q.curvature = curvature_bound(f, mode, paper);
    return q;
}

QuadraticSurrogate signal_minorant(const PhasorSum& z, const Eigen::Vector2d& anchor, CurvatureMode mode,
                                   const PaperConstants* paper) {
    const cd zn = z.value(anchor);
    const RealPhasorSum f = real_part(z, zn);
    return mm_surrogate(f, anchor, Sense::minorant, mode, paper).scaled(2.0).shifted(-std::norm(zn));
}

double rayleigh_bound(const Eigen::MatrixXcd& Q) {
    if (Q.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Q, Eigen::EigenvaluesOnly);
    return static_cast<double>(Q.rows()) * std::max(0.0, es.eigenvalues().maxCoeff());
}

QuadraticSurrogate power_majorant(const PhasorSum& z, const Eigen::Vector2d& anchor, MajorantMode mode,
                                  CurvatureMode curvature, const PaperConstants* paper) {
    if (mode == MajorantMode::pairwise) {
        return mm_surrogate(squared_modulus(z), anchor, Sense::majorant, curvature, paper);
    }
    cd z0{0.0, 0.0};
    PhasorSum w;
    w.ctx = z.ctx;
    for (const auto& t : z.terms) {
        if (t.is_constant()) {
            z0 += t.coeff;
        } else {
            w.terms.push_back(t);
        }
    }
    const Eigen::Index J = static_cast<Eigen::Index>(w.terms.size());
    Eigen::VectorXcd c(J);
    for (Eigen::Index j = 0; j < J; ++j) c(j) = w.terms[j].coeff;
    // |sum_j c_j theta_j|^2 = theta^H (conj(c) c^T) theta <= J lambda_max.
    const double bound = rayleigh_bound(c.conjugate() * c.transpose());
    QuadraticSurrogate cross = mm_surrogate(real_part(w, z0), anchor, Sense::majorant, curvature, paper).scaled(2.0);
    return cross.shifted(std::norm(z0) + bound);
}

// Scalar surrogates ---------------------------------------------------------

AffineMap taylor_inverse_pathloss(const Eigen::Vector3d& o_n, const Eigen::Vector3d& t, double scale,
                                  double exponent) {
    const Eigen::Vector3d r = o_n - t;
    const double D = r.norm();
    if (!(D > 0.0)) throw std::domain_error("taylor_inverse_pathloss: coincident points");
    AffineMap m;
    m.anchor = o_n;
    m.value = scale / std::pow(D, exponent);
    m.gradient = -scale * exponent * r / std::pow(D, exponent + 2.0);
    return m;
}

double inverse_pathloss_curvature(double scale, double exponent, double d_lower) {
    if (!(d_lower > 0.0)) throw std::domain_error("inverse_pathloss_curvature: distance bound must be positive");
    return std::abs(scale) * exponent * (exponent + 1.0) / std::pow(d_lower, exponent + 2.0);
}

double DcBilinear::operator()(double a, double b) const {
    return 0.25 * (a + b) * (a + b) + ca() * a + cb() * b + c0();
}

DcBilinear dc_bilinear(double a_n, double b_n) { return DcBilinear{a_n, b_n}; }

SqrtProductAffine sqrt_product_lower(double p_n, double psi_n, double chi_n) {
    if (!(p_n > 0.0 && psi_n > 0.0 && chi_n > 0.0)) {
        throw std::domain_error("sqrt_product_lower: anchors must be positive");
    }
    SqrtProductAffine s;
    s.p_n = p_n;
    s.psi_n = psi_n;
    s.chi_n = chi_n;
    s.value = std::sqrt(psi_n * chi_n / p_n);
    s.d_psi = 0.5 * std::sqrt(chi_n / (p_n * psi_n));
    s.d_chi = 0.5 * std::sqrt(psi_n / (p_n * chi_n));
    s.d_p = -0.5 * std::sqrt(psi_n * chi_n) / std::pow(p_n, 1.5);
    return s;
}

SpacingCut linearize_min_distance(const Eigen::VectorXd& x_n, const Eigen::VectorXd& x_other, double d_min) {
    const Eigen::VectorXd r = x_n - x_other;
    const double d = r.norm();
    if (!(d > 0.0)) throw std::domain_error("linearize_min_distance: coincident anchor");
    SpacingCut c;
    c.normal = r / d;
    c.rhs = d_min + c.normal.dot(x_other);
    return c;
}

double balanced_kappa(double a_n, double b_n) {
    if (a_n > 0.0 && b_n > 0.0) return std::sqrt(b_n / a_n);
    return 1.0;
}

InterferenceMajorant dc_interference_majorant(const Eigen::VectorXd& p_n, const Eigen::VectorXcd& w_n,
                                              const std::vector<Eigen::VectorXcd>& h, const Eigen::VectorXd& beta) {
    InterferenceMajorant m;
    m.p_n = p_n;
    m.w_n = w_n;
    m.h = h;
    m.beta = beta;
    const Eigen::Index n = p_n.size();
    m.kappa.resize(n);
    m.u_n.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double a = p_n(i) * beta(i);
        const double b = std::norm(h[i].dot(w_n));
        m.kappa(i) = balanced_kappa(a, b);
        m.u_n(i) = m.kappa(i) * a - b / m.kappa(i);
    }
    return m;
}

double InterferenceMajorant::operator()(const Eigen::VectorXd& p, const Eigen::VectorXcd& w) const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (h[i].squaredNorm() == 0.0) continue;  // the product is identically zero
        const double k = kappa(i);
        const cd zn = h[i].dot(w_n);  // h^H w_n
        const cd z = h[i].dot(w);
        const double a = k * p(i) * beta(i);
        const double a_n = k * p_n(i) * beta(i);
        const double b = std::norm(z) / k;
        const double b_n = std::norm(zn) / k;
        // For u_n > 0 the exact convex b keeps the bound valid; otherwise its tangent does.
        const double b_used = u_n(i) > 0.0 ? b : (std::norm(zn) + 2.0 * std::real(std::conj(zn) * (z - zn))) / k;
        total += 0.25 * ((a + b) * (a + b) - u_n(i) * u_n(i) - 2.0 * u_n(i) * (a - a_n) + 2.0 * u_n(i) * (b_used - b_n));
    }
    return total;
}

double InterferenceMajorant::true_value(const Eigen::VectorXd& p, const Eigen::VectorXcd& w) const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) total += p(i) * beta(i) * std::norm(h[i].dot(w));
    return total;
}

}  // namespace faree
