// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "faree/convex/program.hpp"

namespace faree::convex {

/// Convex restriction built around an anchor. `extract` maps the solution of the
/// restriction back to the state space of the true problem.
struct ScaSubproblem {
    ConvexProgram program;
    std::optional<VectorXd> start;
    std::function<VectorXd(const VectorXd&)> extract;
};

struct ScaOptions {
    double tolerance = 1e-4;  // relative change of the true objective
    double abs_tolerance = 0.0;  // absolute change, for objectives that sit near zero
    int max_iter = 50;
    SolveOptions solver;
};

struct ScaTrace {
    std::vector<VectorXd> iterates;     // committed states, first entry is x0
    std::vector<double> objectives;     // true objective per committed state
    int iterations = 0;                 // restrictions solved
    bool converged = false;
    std::string stop_reason;
    const VectorXd& x() const { return iterates.back(); }
    double objective() const { return objectives.back(); }
};

/// Successive convex approximation with a commit rule: a candidate that lowers the
/// true objective or violates true feasibility is rejected and the loop stops.
/// Throws std::invalid_argument when x0 is infeasible for the true problem.
ScaTrace sca_drive(const std::function<ScaSubproblem(const VectorXd&)>& build,
                   const std::function<double(const VectorXd&)>& true_objective,
                   const std::function<bool(const VectorXd&)>& true_feasible, const VectorXd& x0,
                   const ScaOptions& options = {});

struct DinkelbachResult {
    VectorXd x;
    double s = 0.0;
    std::vector<double> s_trace;
    double residual = 0.0;  // |f(x) - s g(x)|
    int iterations = 0;
    bool converged = false;
};

/// Maximises f/g through parametric problems max f - s g. The parametric solver
/// receives s and returns a maximiser; a failure should throw.
DinkelbachResult dinkelbach_drive(const std::function<double(const VectorXd&)>& f,
                                  const std::function<double(const VectorXd&)>& g,
                                  const std::function<VectorXd(double)>& parametric_solver, double s0,
                                  double eps3 = 1e-6, int max_iter = 30);

}  // namespace faree::convex
