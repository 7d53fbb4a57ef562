// SPDX-License-Identifier: Apache-2.0
#include "faree/convex/drivers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace faree::convex {

ScaTrace sca_drive(const std::function<ScaSubproblem(const VectorXd&)>& build,
                   const std::function<double(const VectorXd&)>& true_objective,
                   const std::function<bool(const VectorXd&)>& true_feasible, const VectorXd& x0,
                   const ScaOptions& options) {
    if (!true_feasible(x0)) throw std::invalid_argument("sca_drive: starting point is infeasible");
    ScaTrace trace;
    trace.iterates.push_back(x0);
    trace.objectives.push_back(true_objective(x0));
    trace.stop_reason = "max_iter";
    for (int it = 0; it < options.max_iter; ++it) {
        const VectorXd& x = trace.iterates.back();
        const double f = trace.objectives.back();
        ScaSubproblem sub = build(x);
        SolveResult r = solve(sub.program, sub.start, options.solver);
        ++trace.iterations;
        if (r.status == SolveStatus::infeasible) {
            trace.stop_reason = "restriction infeasible";
            break;
        }
        VectorXd cand = sub.extract ? sub.extract(r.x) : r.x;
        if (!true_feasible(cand)) {
            trace.stop_reason = "candidate infeasible";
            break;
        }
        const double fc = true_objective(cand);
        if (!(fc >= f)) {
            trace.stop_reason = "candidate not improving";
            break;
        }
        trace.iterates.push_back(cand);
        trace.objectives.push_back(fc);
        if (std::abs(fc - f) <= std::max(options.tolerance * std::abs(f), options.abs_tolerance)) {
            trace.converged = true;
            trace.stop_reason = "converged";
            break;
        }
    }
    return trace;
}

DinkelbachResult dinkelbach_drive(const std::function<double(const VectorXd&)>& f,
                                  const std::function<double(const VectorXd&)>& g,
                                  const std::function<VectorXd(double)>& parametric_solver, double s0, double eps3,
                                  int max_iter) {
    DinkelbachResult out;
    double s = s0;
    out.s_trace.push_back(s);
    VectorXd best;
    double best_ratio = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < max_iter; ++t) {
        VectorXd x = parametric_solver(s);
        ++out.iterations;
        const double fx = f(x);
        const double gx = g(x);
        if (!(gx > 0.0)) throw std::domain_error("dinkelbach_drive: denominator must be positive");
        const double ratio = fx / gx;
        if (ratio > best_ratio || best.size() == 0) {
            best = x;
            best_ratio = ratio;
        }
        const double residual = std::abs(fx - s * gx);
        out.residual = residual;
        if (residual < eps3) {
            out.converged = true;
            out.x = x;
            out.s = s;
            return out;
        }
        if (ratio < s) {
            // An inexact parametric solve cannot raise s further; keep the best point.
            break;
        }
        s = ratio;
        out.s_trace.push_back(s);
    }
    // Not converged: residual stays that of the last parametric solve.
    out.x = best;
    out.s = std::max(s, best_ratio);
    return out;
}

}  // namespace faree::convex
