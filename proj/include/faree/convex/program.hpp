// SPDX-License-Identifier: Apache-2.0
//
// Small dense solver for concave maximization under affine and convex
// quadratic constraints. Primal log-barrier with damped Newton steps.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace faree::convex {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// w * log2(1 + a^T x + b)
struct LogTerm {
    double weight = 1.0;
    VectorXd a;
    double b = 0.0;
};

/// sum of log terms + c^T x - 1/2 x^T Q x + constant, Q positive semidefinite.
struct Objective {
    std::vector<LogTerm> logs;
    VectorXd linear;     // empty means zero
    MatrixXd neg_quad;   // empty means zero
    double constant = 0.0;
};

/// s(x) = 1/2 x^T G x + l^T x + e; contributes s(x)^2 / 4.
/// Convex when G is PSD and s >= 0 wherever the other constraints hold.
struct SquaredTerm {
    MatrixXd G;  // empty means zero
    VectorXd l;
    double e = 0.0;
};

enum class ConstraintKind { affine, quadratic, squared_quadratic };

/// g(x) <= 0 with
///   affine:            g = a^T x - b
///   quadratic:         g = 1/2 x^T P x + q^T x + r
///   squared_quadratic: g = sum_i s_i(x)^2 / 4 + 1/2 x^T P x + q^T x + r
struct Constraint {
    ConstraintKind kind = ConstraintKind::affine;
    VectorXd a;
    double b = 0.0;
    MatrixXd P;
    VectorXd q;
    double r = 0.0;
    std::vector<SquaredTerm> squares;
    std::string label;

    static Constraint affine(VectorXd a, double b, std::string label = {});
    static Constraint quadratic(MatrixXd P, VectorXd q, double r, std::string label = {});
    static Constraint squared(std::vector<SquaredTerm> squares, MatrixXd P, VectorXd q, double r,
                              std::string label = {});

    double value(const VectorXd& x) const;
    /// Adds w * grad to g and w * hess to H when the pointers are non-null.
    double accumulate(const VectorXd& x, double w_grad, VectorXd* grad, double w_hess, MatrixXd* hess,
                      VectorXd* own_grad = nullptr) const;
};

struct ConvexProgram {
    int n = 0;
    Objective objective;
    std::vector<Constraint> constraints;
    /// Throws std::invalid_argument when a quadratic matrix has an eigenvalue below -1e-10
    /// or dimensions disagree.
    void validate() const;
    double objective_value(const VectorXd& x) const;  // -inf outside the log domain
    double max_violation(const VectorXd& x) const;
};

enum class SolveStatus { optimal, max_iter, infeasible };

std::string status_name(SolveStatus s);

struct SolveOptions {
    double t0 = 1.0;
    double mu = 10.0;
    double tolerance = 1e-8;   // duality gap and stationarity
    int max_newton = 500;      // per centering step
    int max_total_newton = 20000;
    bool validate = true;
};

struct SolveResult {
    VectorXd x;
    double objective = 0.0;
    SolveStatus status = SolveStatus::infeasible;
    double kkt_residual = 0.0;
    double max_violation = 0.0;
    int iterations = 0;  // Newton steps, phase-I included
};

/// Solves the program from x0 when x0 is strictly feasible, otherwise runs phase-I
/// starting from x0 (or the origin).
SolveResult solve(const ConvexProgram& program, const std::optional<VectorXd>& x0 = std::nullopt,
                  const SolveOptions& options = {});

}  // namespace faree::convex
