// SPDX-License-Identifier: Apache-2.0
#include "faree/convex/program.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace faree::convex {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInf = std::numeric_limits<double>::infinity();

double quad_part(const MatrixXd& P, const VectorXd& q, double r, const VectorXd& x) {
    double v = r;
    if (q.size()) v += q.dot(x);
    if (P.size()) v += 0.5 * x.dot(P * x);
    return v;
}

}  // namespace

Constraint Constraint::affine(VectorXd a, double b, std::string label) {
    Constraint c;
    c.kind = ConstraintKind::affine;
    c.a = std::move(a);
    c.b = b;
    c.label = std::move(label);
    return c;
}

Constraint Constraint::quadratic(MatrixXd P, VectorXd q, double r, std::string label) {
    Constraint c;
    c.kind = ConstraintKind::quadratic;
    c.P = std::move(P);
    c.q = std::move(q);
    c.r = r;
    c.label = std::move(label);
    return c;
}

Constraint Constraint::squared(std::vector<SquaredTerm> squares, MatrixXd P, VectorXd q, double r,
                               std::string label) {
    Constraint c;
    c.kind = ConstraintKind::squared_quadratic;
    c.squares = std::move(squares);
    c.P = std::move(P);
    c.q = std::move(q);
    c.r = r;
    c.label = std::move(label);
    return c;
}

double Constraint::value(const VectorXd& x) const {
    if (kind == ConstraintKind::affine) return a.dot(x) - b;
    double v = quad_part(P, q, r, x);
    for (const auto& s : squares) {
        const double si = quad_part(s.G, s.l, s.e, x);
        v += 0.25 * si * si;
    }
    return v;
}

double Constraint::accumulate(const VectorXd& x, double w_grad, VectorXd* grad, double w_hess, MatrixXd* hess,
                              VectorXd* own_grad) const {
    const Eigen::Index n = x.size();
    VectorXd g = VectorXd::Zero(n);
    double v = 0.0;
    if (kind == ConstraintKind::affine) {
        g = a;
        v = a.dot(x) - b;
    } else {
        v = quad_part(P, q, r, x);
        if (q.size()) g += q;
        if (P.size()) {
            g += P * x;
            if (hess) *hess += w_hess * P;
        }
        for (const auto& s : squares) {
            VectorXd ds = s.l.size() ? VectorXd(s.l) : VectorXd::Zero(n);
            double si = s.e + (s.l.size() ? s.l.dot(x) : 0.0);
            if (s.G.size()) {
                const VectorXd Gx = s.G * x;
                ds += Gx;
                si += 0.5 * x.dot(Gx);
            }
            v += 0.25 * si * si;
            g += 0.5 * si * ds;
            if (hess) {
                *hess += w_hess * 0.5 * (ds * ds.transpose());
                if (s.G.size()) *hess += w_hess * 0.5 * si * s.G;
            }
        }
    }
    if (grad) *grad += w_grad * g;
    if (own_grad) *own_grad = g;
    return v;
}

void ConvexProgram::validate() const {
    auto check_psd = [](const MatrixXd& M, const std::string& what) {
        if (!M.size()) return;
        if (M.rows() != M.cols()) throw std::invalid_argument(what + ": matrix not square");
        const MatrixXd S = 0.5 * (M + M.transpose());
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw std::invalid_argument(what + ": matrix is not positive semidefinite (min eigenvalue " +
                                        std::to_string(es.eigenvalues().minCoeff()) + ")");
        }
    };
    auto check_dim = [&](Eigen::Index d, const std::string& what) {
        if (d != 0 && d != n) throw std::invalid_argument(what + ": dimension mismatch");
    };
    check_dim(objective.linear.size(), "objective linear term");
    if (objective.neg_quad.size()) {
        check_dim(objective.neg_quad.rows(), "objective quadratic term");
        check_psd(objective.neg_quad, "objective quadratic term");
    }
    for (const auto& t : objective.logs) check_dim(t.a.size(), "log term");
    for (const auto& c : constraints) {
        const std::string tag = "constraint '" + c.label + "'";
        if (c.kind == ConstraintKind::affine) {
            if (c.a.size() != n) throw std::invalid_argument(tag + ": dimension mismatch");
            continue;
        }
        check_dim(c.q.size(), tag);
        if (c.P.size()) {
            check_dim(c.P.rows(), tag);
            check_psd(c.P, tag);
        }
        for (const auto& s : c.squares) {
            check_dim(s.l.size(), tag);
            if (s.G.size()) {
                check_dim(s.G.rows(), tag);
                check_psd(s.G, tag);
            }
        }
    }
}

double ConvexProgram::objective_value(const VectorXd& x) const {
    double v = objective.constant;
    for (const auto& t : objective.logs) {
        const double u = 1.0 + t.a.dot(x) + t.b;
        if (!(u > 0.0)) return -kInf;
        v += t.weight * std::log2(u);
    }
    if (objective.linear.size()) v += objective.linear.dot(x);
    if (objective.neg_quad.size()) v -= 0.5 * x.dot(objective.neg_quad * x);
    return v;
}

double ConvexProgram::max_violation(const VectorXd& x) const {
    double w = 0.0;
    for (const auto& c : constraints) w = std::max(w, c.value(x));
    return w;
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "infeasible";
}

namespace {

struct BarrierOutcome {
    VectorXd x;
    double t = 1.0;
    bool converged = false;
    bool stopped_early = false;
    int newton = 0;
};

/// Value of the barrier function; +inf outside the strict interior.
double barrier_value(const ConvexProgram& prog, const VectorXd& x, double t) {
    const double f = prog.objective_value(x);
    if (!std::isfinite(f)) return kInf;
    double v = -t * f;
    for (const auto& c : prog.constraints) {
        const double g = c.value(x);
        if (!(g < 0.0)) return kInf;
        v -= std::log(-g);
    }
    return v;
}

void barrier_derivatives(const ConvexProgram& prog, const VectorXd& x, double t, VectorXd& grad, MatrixXd& hess) {
    const Eigen::Index n = x.size();
    grad.setZero(n);
    hess.setZero(n, n);
    for (const auto& term : prog.objective.logs) {
        const double u = 1.0 + term.a.dot(x) + term.b;
        grad -= t * term.weight / (u * kLn2) * term.a;
        hess += t * term.weight / (u * u * kLn2) * (term.a * term.a.transpose());
    }
    if (prog.objective.linear.size()) grad -= t * prog.objective.linear;
    if (prog.objective.neg_quad.size()) {
        grad += t * (prog.objective.neg_quad * x);
        hess += t * prog.objective.neg_quad;
    }
    VectorXd gi(n);
    MatrixXd Hi(n, n);
    for (const auto& c : prog.constraints) {
        Hi.setZero();
        const double g = c.accumulate(x, 0.0, nullptr, 1.0, &Hi, &gi);
        const double inv = 1.0 / (-g);
        grad += inv * gi;
        hess += inv * inv * (gi * gi.transpose()) + inv * Hi;
    }
}

/// KKT residual of the original problem at a strictly feasible x. Two multiplier
/// estimates are tried: the barrier multipliers 1/(t (-g_i)) and least-squares multipliers
/// (non-negative) on the constraints that sit at their boundary. Each gives
/// max(stationarity, complementarity) as an upper bound on the residual; the smaller is
/// returned. The second estimate is immune to the round-off in tiny slacks that limits
/// the first one late on the central path.
double kkt_residual(const ConvexProgram& prog, const VectorXd& x, double t) {
    const Eigen::Index n = x.size();
    const Eigen::Index m = static_cast<Eigen::Index>(prog.constraints.size());
    VectorXd df = VectorXd::Zero(n);
    for (const auto& term : prog.objective.logs) {
        const double u = 1.0 + term.a.dot(x) + term.b;
        df += term.weight / (u * kLn2) * term.a;
    }
    if (prog.objective.linear.size()) df += prog.objective.linear;
    if (prog.objective.neg_quad.size()) df -= prog.objective.neg_quad * x;
    if (m == 0) return df.cwiseAbs().maxCoeff();

    MatrixXd J(n, m);
    VectorXd g(m);
    VectorXd gi(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        g(i) = prog.constraints[static_cast<std::size_t>(i)].accumulate(x, 0.0, nullptr, 0.0, nullptr, &gi);
        if (!(g(i) < 0.0)) return kInf;
        J.col(i) = gi;
    }
    auto residual = [&](const VectorXd& lam) {
        const double comp = (lam.array() * g.array().abs()).maxCoeff();
        return std::max((df - J * lam).cwiseAbs().maxCoeff(), comp);
    };
    VectorXd lam = (1.0 / (t * (-g.array()))).matrix();
    double best = residual(lam);

    // Near-boundary constraints get least-squares multipliers; the others keep their
    // barrier multipliers, which are accurate when the slack is large.
    const double reach = 1e-5 * (1.0 + x.cwiseAbs().maxCoeff());
    std::vector<Eigen::Index> active;
    VectorXd rhs = df;
    VectorXd base = lam;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double gn = J.col(i).norm();
        if (gn > 0.0 && -g(i) / gn <= reach) {
            active.push_back(i);
            base(i) = 0.0;
        }
    }
    rhs -= J * base;
    while (!active.empty()) {
        MatrixXd JA(n, static_cast<Eigen::Index>(active.size()));
        for (std::size_t j = 0; j < active.size(); ++j) JA.col(static_cast<Eigen::Index>(j)) = J.col(active[j]);
        const VectorXd la = JA.completeOrthogonalDecomposition().solve(rhs);
        std::vector<Eigen::Index> keep;
        for (std::size_t j = 0; j < active.size(); ++j) {
            if (la(static_cast<Eigen::Index>(j)) >= 0.0) keep.push_back(active[j]);
        }
        if (keep.size() == active.size()) {
            VectorXd full = base;
            for (std::size_t j = 0; j < active.size(); ++j) full(active[j]) = la(static_cast<Eigen::Index>(j));
            best = std::min(best, residual(full));
            break;
        }
        active = std::move(keep);
    }
    return best;
}

/// Barrier path following. stop_early, when set, is checked after every Newton step.
BarrierOutcome follow_path(const ConvexProgram& prog, VectorXd x, const SolveOptions& opt,
                           const std::function<bool(const VectorXd&)>& stop_early) {
    BarrierOutcome out;
    const double m = std::max<double>(1.0, static_cast<double>(prog.constraints.size()));
    double t = opt.t0;
    double mu = opt.mu;
    int failures = 0;
    VectorXd best_center = x;
    double best_t = t;
    VectorXd grad;
    MatrixXd hess;

    while (true) {
        // Centering at the current t.
        bool centered = false;
        bool failed = false;
        VectorXd xc = x;
        for (int it = 0; it < opt.max_newton; ++it) {
            if (out.newton >= opt.max_total_newton) {
                failed = true;
                break;
            }
            barrier_derivatives(prog, xc, t, grad, hess);
            const Eigen::Index n = xc.size();
            VectorXd dx;
            double reg = 0.0;
            const double diag_scale = std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
            for (int attempt = 0; attempt < 8; ++attempt) {
                Eigen::LDLT<MatrixXd> ldlt(hess + reg * MatrixXd::Identity(n, n));
                if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
                    dx = ldlt.solve(-grad);
                    if (dx.allFinite() && grad.dot(dx) < 0.0) break;
                }
                dx.resize(0);
                reg = reg == 0.0 ? 1e-12 * diag_scale : reg * 100.0;
            }
            ++out.newton;
            if (dx.size() == 0) {
                failed = true;
                break;
            }
            const double lambda2 = -grad.dot(dx);
            if (lambda2 * 0.5 <= 1e-11) {
                centered = true;
                break;
            }
            const double phi0 = barrier_value(prog, xc, t);
            double alpha = 1.0;
            bool accepted = false;
            while (alpha > 1e-14) {
                const VectorXd xn = xc + alpha * dx;
                const double phi = barrier_value(prog, xn, t);
                if (std::isfinite(phi) && phi < phi0 - 0.01 * alpha * lambda2) {
                    xc = xn;
                    accepted = true;

                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                // Round-off floor: once the decrement is this small relative to the barrier
                // value, progress can no longer be resolved and the point counts as centered.
                if (lambda2 * 0.5 <= std::max(1e-6, 1e-9 * std::abs(phi0))) {
                    centered = true;
                } else {
                    failed = true;
                }
                break;
            }
            if (stop_early && stop_early(xc)) {
                out.x = xc;
                out.t = t;
                out.stopped_early = true;
                return out;
            }
        }
        if (!centered) failed = true;

        if (failed) {
            ++failures;
            if (failures >= 3 || out.newton >= opt.max_total_newton) {
                out.x = best_center;
                out.t = best_t;
                out.converged = false;
                return out;
            }
            // Retreat to the last center with a gentler schedule.
            mu = std::max(1.0 + 0.5 * (mu - 1.0), 1.05);
            x = best_center;
            t = best_t * mu;
            continue;
        }

        x = xc;
        best_center = xc;
        best_t = t;
        barrier_derivatives(prog, x, t, grad, hess);
        if (m / t <= opt.tolerance) {
            out.x = x;
            out.t = t;
            out.converged = true;
            return out;
        }
        t *= mu;
    }
}

bool strictly_feasible(const ConvexProgram& prog, const VectorXd& x) {
    if (!x.allFinite()) return false;
    if (!std::isfinite(prog.objective_value(x))) return false;
    for (const auto& c : prog.constraints) {
        if (!(c.value(x) < 0.0)) return false;
    }
    return true;
}

/// Phase-I: minimise s subject to g_i(x) <= s, domain(x) <= s, s >= -1.
std::optional<VectorXd> phase_one(const ConvexProgram& prog, const VectorXd& x0, const SolveOptions& opt,
                                  int& newton) {
    const int n = prog.n;
    ConvexProgram p1;
    p1.n = n + 1;
    p1.objective.linear = VectorXd::Zero(n + 1);
    p1.objective.linear(n) = -1.0;
    auto pad_vec = [&](const VectorXd& v) {
        VectorXd o = VectorXd::Zero(n + 1);
        if (v.size()) o.head(n) = v;
        return o;
    };
    auto pad_mat = [&](const MatrixXd& M) {
        if (!M.size()) return MatrixXd();
        MatrixXd o = MatrixXd::Zero(n + 1, n + 1);
        o.topLeftCorner(n, n) = M;
        return o;
    };
    double s0 = -0.5;
    for (const auto& c : prog.constraints) {
        Constraint d = c;
        if (c.kind == ConstraintKind::affine) {
            d.a = pad_vec(c.a);
            d.a(n) = -1.0;
        } else {
            d.q = pad_vec(c.q);
            d.q(n) = -1.0;
            d.P = pad_mat(c.P);
            for (auto& s : d.squares) {
                s.l = pad_vec(s.l);
                s.G = pad_mat(s.G);
            }
        }
        p1.constraints.push_back(std::move(d));
        s0 = std::max(s0, c.value(x0) + 1.0);
    }
    for (const auto& t : prog.objective.logs) {
        VectorXd a = pad_vec(-t.a);
        a(n) = -1.0;
        p1.constraints.push_back(Constraint::affine(a, 1.0 + t.b, "log-domain"));
        s0 = std::max(s0, -(1.0 + t.a.dot(x0) + t.b) + 1.0);
    }
    VectorXd lower = VectorXd::Zero(n + 1);
    lower(n) = -1.0;
    p1.constraints.push_back(Constraint::affine(lower, 1.0, "phase-one floor"));

    VectorXd z(n + 1);
    z.head(n) = x0;
    z(n) = s0;
    SolveOptions o1 = opt;
    o1.tolerance = 1e-10;
    auto done = [&](const VectorXd& zz) { return strictly_feasible(prog, zz.head(n)); };
    BarrierOutcome r = follow_path(p1, z, o1, done);
    newton += r.newton;
    if (strictly_feasible(prog, r.x.head(n))) return VectorXd(r.x.head(n));
    return std::nullopt;
}

}  // namespace

SolveResult solve(const ConvexProgram& program, const std::optional<VectorXd>& x0, const SolveOptions& options) {
    if (options.validate) program.validate();
    SolveResult res;
    VectorXd start = x0.value_or(VectorXd::Zero(program.n));
    if (start.size() != program.n) throw std::invalid_argument("solve: start point has wrong dimension");
    int newton = 0;
    if (!strictly_feasible(program, start)) {
        auto feasible = phase_one(program, start, options, newton);
        if (!feasible) {
            res.x = start;
            res.status = SolveStatus::infeasible;
            res.iterations = newton;
            res.objective = program.objective_value(start);
            res.max_violation = program.max_violation(start);
            res.kkt_residual = kInf;
            return res;
        }
        start = *feasible;
    }
    BarrierOutcome r = follow_path(program, start, options, nullptr);
    newton += r.newton;
    res.x = r.x;
    res.objective = program.objective_value(r.x);
    res.max_violation = program.max_violation(r.x);
    res.kkt_residual = kkt_residual(program, r.x, r.t);
    res.iterations = newton;
    res.status = (r.converged && res.kkt_residual <= options.tolerance && res.max_violation <= options.tolerance)
                     ? SolveStatus::optimal
                     : SolveStatus::max_iter;
    return res;
}

}  // namespace faree::convex
