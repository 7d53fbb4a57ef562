// SPDX-License-Identifier: Apache-2.0
#include "faree/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "faree/baselines.hpp"
#include "faree/convex/drivers.hpp"
#include "faree/units.hpp"

namespace faree {

using convex::Constraint;
using convex::ConvexProgram;
using convex::LogTerm;
using convex::SquaredTerm;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {

// Rate floors are tested with this relative slack so that committed states pass
// check_solution with room to spare.
constexpr double kRateSlack = 1e-9;

struct PlaneWave {
    Vector2d wave = Vector2d::Zero();
    cd factor{1.0, 0.0};
};

/// exp(j k kappa . (X - ref)) = factor * exp(j wave . x) on the plane y = plane_y.
PlaneWave plane_wave(const Vector3d& kappa, const Vector3d& ref, double plane_y, double lambda, bool conjugate) {
    const double k = 2.0 * kPi / lambda;
    PlaneWave w;
    w.wave = k * Vector2d(kappa(0), kappa(2));
    double offset = k * (kappa(1) * plane_y - kappa.dot(ref));
    if (conjugate) {
        w.wave = -w.wave;
        offset = -offset;
    }
    w.factor = std::polar(1.0, offset);
    return w;
}

/// Real symmetric Q with y^T Q y = |w^H h|^2 for y = [Re w; Im w].
MatrixXd real_form(const Eigen::MatrixXcd& A) {
    const Eigen::Index n = A.rows();
    MatrixXd Q(2 * n, 2 * n);
    Q.topLeftCorner(n, n) = A.real();
    Q.topRightCorner(n, n) = -A.imag();
    Q.bottomLeftCorner(n, n) = A.imag();
    Q.bottomRightCorner(n, n) = A.real();
    return 0.5 * (Q + Q.transpose());
}

PaperConstants paper_constants(const Problem& pr) {
    const auto& c = pr.config;
    PaperConstants k;
    k.wavelength = c.wavelength();
    k.c1 = std::max(pr.consts.c1, pr.consts.c1_hat);
    k.largest_dim = std::max({c.blockage_length, c.blockage_width, c.blockage_height});
    k.width = c.blockage_width;
    return k;
}

/// Normalized SINR surrogates of one user: signal minorant and denominator majorant,
/// both equal to 1 at the anchor, and the anchor SINR.
struct SinrSurrogate {
    QuadraticSurrogate signal;
    QuadraticSurrogate denom;
    double sinr = 0.0;
    bool active = false;
};

/// Adds coef * [val + g^T (x - xn) + iota/2 |x - xn|^2] on the first two variables.
/// Adds val + g.(x - a) + iota/2 |x - a|^2 in local coordinates x = origin + h y, so the
/// expansion never cancels large absolute positions.
void add_planar_form(MatrixXd& P, VectorXd& q, double& r, double val, const Vector2d& g, double iota,
                     const Vector2d& a, const Vector2d& origin, double h) {
    const Vector2d d0 = origin - a;
    P(0, 0) += iota * h * h;
    P(1, 1) += iota * h * h;
    q.head<2>() += h * (g + iota * d0);
    r += val + g.dot(d0) + 0.5 * iota * d0.squaredNorm();
}

/// Convex restriction over [y (2), s (K), v (K)] maximizing sum log2(1 + sinr_j s_j), where the
/// antenna sits at xn + h y.
ConvexProgram position_program(const std::vector<SinrSurrogate>& users, const Vector2d& xn, double h,
                               const PlanarRegion& box, const std::vector<SpacingCut>& cuts, double tau_min,
                               VectorXd& start) {
    const int K = static_cast<int>(users.size());
    const int n = 2 + 2 * K;
    ConvexProgram prog;
    prog.n = n;
    const double eps = 1e-6;
    start = VectorXd::Zero(n);
    for (int j = 0; j < K; ++j) {
        const int is = 2 + j;
        const int iv = 2 + K + j;
        const SinrSurrogate& u = users[j];
        if (!u.active) {
            for (int idx : {is, iv}) {
                VectorXd a = VectorXd::Zero(n);
                a(idx) = 1.0;
                prog.constraints.push_back(Constraint::affine(a, 2.0, "slack_hi"));
                prog.constraints.push_back(Constraint::affine(-a, 0.0, "slack_lo"));
            }
            start(is) = 1.0;
            start(iv) = 1.0;
            continue;
        }
        start(is) = 1.0 - 2.0 * eps;
        start(iv) = 1.0 + eps;
        LogTerm lt;
        lt.a = VectorXd::Zero(n);
        lt.a(is) = u.sinr;
        prog.objective.logs.push_back(lt);
        {
            // (s + v)^2 / 4 <= signal minorant
            MatrixXd P = MatrixXd::Zero(n, n);
            VectorXd q = VectorXd::Zero(n);
            double r = 0.0;
            P(is, is) = P(iv, iv) = P(is, iv) = P(iv, is) = 0.5;
            add_planar_form(P, q, r, -u.signal.value, -u.signal.gradient, u.signal.curvature, u.signal.anchor, xn, h);
            prog.constraints.push_back(Constraint::quadratic(P, q, r, "signal"));
        }
        {
            // denominator majorant <= v
            MatrixXd P = MatrixXd::Zero(n, n);
            VectorXd q = VectorXd::Zero(n);
            double r = 0.0;
            add_planar_form(P, q, r, u.denom.value, u.denom.gradient, u.denom.curvature, u.denom.anchor, xn, h);
            q(iv) -= 1.0;
            prog.constraints.push_back(Constraint::quadratic(P, q, r, "denominator"));
        }
        if (tau_min > 0.0) {
            VectorXd a = VectorXd::Zero(n);
            a(is) = -u.sinr;
            prog.constraints.push_back(Constraint::affine(a, -tau_min, "rate"));
        }
    }
    for (int d = 0; d < 2; ++d) {
        VectorXd a = VectorXd::Zero(n);
        a(d) = h;
        prog.constraints.push_back(Constraint::affine(a, box.hi(d) - xn(d), "box_hi"));
        prog.constraints.push_back(Constraint::affine(-a, xn(d) - box.lo(d), "box_lo"));
    }
    for (const auto& c : cuts) {
        VectorXd a = VectorXd::Zero(n);
        a.head<2>() = -h * c.normal;
        prog.constraints.push_back(Constraint::affine(a, c.normal.dot(xn) - c.rhs, "spacing"));
    }
    return prog;
}

QuadraticSurrogate zero_majorant(const Vector2d& anchor) {
    QuadraticSurrogate q;
    q.sense = Sense::majorant;
    q.anchor = anchor;
    return q;
}

/// Surrogates for every user given phase-sum gains of one moving antenna.
std::vector<SinrSurrogate> side_surrogates(const Problem& pr, const SideModel& model, const Vector2d& xn,
                                           const VectorXd& q, double sigma_r, double sigma_u_beta0) {
    const int K = static_cast<int>(q.size());
    const auto& opt = pr.options;
    const PaperConstants pc = paper_constants(pr);
    const PaperConstants* pcp = opt.curvature == CurvatureMode::paper ? &pc : nullptr;
    std::vector<SinrSurrogate> out(K);
    for (int j = 0; j < K; ++j) {
        const double Sn = std::norm(model.z[j][j].value(xn));
        if (!(Sn > 0.0) || !(q(j) > 0.0)) continue;
        SinrSurrogate& u = out[j];
        u.active = true;
        u.signal = signal_minorant(model.z[j][j], xn, opt.curvature, pcp).scaled(1.0 / Sn);
        QuadraticSurrogate d = zero_majorant(xn);
        const double wn = sigma_u_beta0 / q(j);
        QuadraticSurrogate noise = zero_majorant(xn).shifted(model.noise_const[j]);
        for (const auto& part : model.noise_parts[j]) {
            noise = noise.plus(power_majorant(part, xn, opt.majorant, opt.curvature, pcp));
        }
        d = d.plus(noise.scaled(wn)).shifted(sigma_r / q(j));
        for (int i = 0; i < K; ++i) {
            if (i == j || q(i) <= 0.0) continue;
            d = d.plus(power_majorant(model.z[j][i], xn, opt.majorant, opt.curvature, pcp).scaled(q(i) / q(j)));
        }
        const double Dn = d.value;
        u.denom = d.scaled(1.0 / Dn);
        u.sinr = Sn / Dn;
    }
    return out;
}

ControlState decode_control(const VectorXd& x, int K, int N, double pmax) {
    ControlState c;
    c.p = pmax * x.head(K);
    c.omega.resize(N, K);
    for (int k = 0; k < K; ++k) {
        const int o = K + 2 * N * k;
        for (int r = 0; r < N; ++r) c.omega(r, k) = cd(x(o + r), x(o + N + r));
    }
    return c;
}

VectorXd encode_control(const ControlState& c, double pmax) {
    const int K = static_cast<int>(c.p.size());
    const int N = static_cast<int>(c.omega.rows());
    VectorXd x(K + 2 * N * K);
    x.head(K) = c.p / pmax;
    for (int k = 0; k < K; ++k) {
        const int o = K + 2 * N * k;
        for (int r = 0; r < N; ++r) {
            x(o + r) = c.omega(r, k).real();
            x(o + N + r) = c.omega(r, k).imag();
        }
    }
    return x;
}

void record(const Problem& pr, OptimizerState& st, int outer, const std::string& stage) {
    const LinkReport rep = check_solution(st.placement, st.control, pr.channels(st.placement), pr.config, pr.scheme);
    st.trace.push_back({outer, stage, rep.ee, rep.sum_rate, rep.total_power, rep.worst_violation()});
}

}  // namespace

// Problem ----------------------------------------------------------------------

ChannelRealization Problem::channels(const Placement& placement) const {
    ChannelRealization ch = synthesize(config, consts, placement, draw);
    if (scheme == Scheme::sris) {
        ch.theta = sris_through_matrix(config, placement, draw.angles, ch.beta_k, seed);
        ch.H = ch.H0 * ch.theta.entries;
    }
    return ch;
}

Problem make_problem(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme,
                     const OptimizerOptions& options) {
    config.validate();
    Problem p;
    p.config = config;
    p.consts = propagation_constants(config.medium);
    p.draw = draw_scenario(config, seed);
    p.scheme = scheme;
    p.seed = seed;
    p.options = options;
    return p;
}

double sinr_floor(const ScenarioConfig& config) { return std::exp2(config.min_rate / config.bandwidth) - 1.0; }

Evaluation evaluate(const Problem& problem, const Placement& placement, const ControlState& control) {
    const auto& c = problem.config;
    Evaluation e;
    e.channels = problem.channels(placement);
    e.sinr = all_sinr(control, e.channels, c);
    e.spectral_sum = 0.0;
    e.rates_ok = true;
    const double floor = c.min_rate - kRateSlack * std::max(c.min_rate, 1.0);
    for (Eigen::Index k = 0; k < e.sinr.size(); ++k) {
        const double se = std::log2(1.0 + e.sinr(k));
        e.spectral_sum += se;
        if (!(c.bandwidth * se >= floor)) e.rates_ok = false;
    }
    e.ee = c.bandwidth * e.spectral_sum / (control.p.sum() + circuit_power(c, problem.scheme));
    return e;
}

// Sides --------------------------------------------------------------------------

std::string side_name(Side s) {
    switch (s) {
        case Side::users: return "users";
        case Side::faru: return "faru";
        case Side::farb: return "farb";
        case Side::bs: return "bs";
    }
    return "users";
}

int side_count(const ScenarioConfig& config, Side s) {
    switch (s) {
        case Side::users: return config.num_users;
        case Side::faru:
        case Side::farb: return config.num_far_antennas;
        case Side::bs: return config.num_bs_antennas;
    }
    return 0;
}

namespace {

Matrix3X& side_array(Placement& p, Side s) {
    switch (s) {
        case Side::users: return p.T;
        case Side::faru: return p.U;
        case Side::farb: return p.B;
        case Side::bs: return p.R;
    }
    return p.T;
}

}  // namespace

Eigen::Vector2d antenna_position(const Placement& p, Side s, int index) {
    return PlanarRegion::project(side_array(const_cast<Placement&>(p), s).col(index));
}

void set_antenna_position(Placement& p, Side s, int index, const Eigen::Vector2d& xz) {
    Matrix3X& a = side_array(p, s);
    a(0, index) = xz(0);
    a(2, index) = xz(1);
}

PlanarRegion antenna_region(const ScenarioConfig& config, const Placement& p, Side s, int index) {
    switch (s) {
        case Side::users: return user_region(config, p.user_refs.col(index));
        case Side::faru: return faru_region(config, p.o_u);
        case Side::farb: return farb_region(config, p.o_b);
        case Side::bs: return bs_region(config);
    }
    return bs_region(config);
}

double SideModel::noise(int j, const Eigen::Vector2d& x) const {
    double v = noise_const[j];
    for (const auto& part : noise_parts[j]) v += std::norm(part.value(x));
    return v;
}

SideModel build_side_model(const Problem& pr, const Placement& pl, const ControlState& control,
                           const ChannelRealization& ch, Side side, int m) {
    const auto& c = pr.config;
    const auto& a = pr.draw.angles;
    const auto& fd = pr.draw.fading;
    const int K = c.num_users;
    const int M = c.num_far_antennas;
    const double lam = c.wavelength();
    const auto [a1, n1] = rician_weights(c.rician_k1);
    const auto [a0, n0] = rician_weights(c.rician_k0);
    const Eigen::MatrixXcd& W = control.omega;
    const Eigen::MatrixXcd& Th = ch.theta.entries;

    SideModel sm;
    sm.ctx.c1_hat = pr.consts.c1_hat;
    sm.ctx.min_anchor_gap = c.blockage_width;
    sm.ctx.plane_y = antenna_region(c, pl, side, m).y;
    sm.z.assign(K, std::vector<PhasorSum>(K));
    sm.noise_const.assign(K, 0.0);
    sm.noise_parts.assign(K, {});
    for (auto& row : sm.z)
        for (auto& z : row) z.ctx = sm.ctx;

    auto new_part = [&](int j) -> PhasorSum& {
        sm.noise_parts[j].emplace_back();
        sm.noise_parts[j].back().ctx = sm.ctx;
        return sm.noise_parts[j].back();
    };

    switch (side) {
        case Side::faru: {
            for (int j = 0; j < K; ++j) {
                const Eigen::RowVectorXcd A = W.col(j).adjoint() * ch.H0;  // 1 x M
                const Eigen::RowVectorXcd AT = A * Th;
                for (int i = 0; i < K; ++i) {
                    const cd rho_t =
                        phase_difference(pl.T.col(i), pl.user_refs.col(i), user_aod(a, i), lam);
                    const PlaneWave pw = plane_wave(faru_aoa(a, i), pl.o_u, sm.ctx.plane_y, lam, false);
                    PhasorSum& z = sm.z[j][i];
                    z.add_constant((AT * ch.h.col(i))(0) - AT(m) * ch.h(m, i));
                    for (int p = 0; p < M; ++p) {
                        const double amp = std::abs(Th(p, m));
                        z.add_distance(A(p) * amp * a1 * std::conj(rho_t) * pw.factor, pw.wave, pl.B.col(p));
                        z.add_distance(A(p) * amp * n1 * fd.hhat(m, i), Vector2d::Zero(), pl.B.col(p));
                    }
                }
                sm.noise_const[j] = AT.squaredNorm() - std::norm(AT(m));
                PhasorSum& part = new_part(j);
                for (int p = 0; p < M; ++p) part.add_distance(A(p) * std::abs(Th(p, m)), Vector2d::Zero(), pl.B.col(p));
            }
            break;
        }
        case Side::farb: {
            const Eigen::VectorXcd rho_r = steering_vector(pl.R, Vector3d::Zero(), bs_aoa(a), lam);
            const PlaneWave pw = plane_wave(farb_aod(a), pl.o_b, sm.ctx.plane_y, lam, true);
            for (int j = 0; j < K; ++j) {
                const cd r0 = a0 * W.col(j).dot(rho_r) * pw.factor;
                const cd r1 = n0 * W.col(j).dot(fd.Hhat0.col(m));
                const Eigen::RowVectorXcd A = W.col(j).adjoint() * ch.H0;
                for (int i = 0; i < K; ++i) {
                    const Eigen::VectorXcd v = Th * ch.h.col(i);
                    PhasorSum& z = sm.z[j][i];
                    z.add_constant((A * v)(0) - A(m) * v(m));
                    for (int q = 0; q < M; ++q) {
                        const double amp = std::abs(Th(m, q));
                        z.add_distance(r0 * amp * ch.h(q, i), pw.wave, pl.U.col(q));
                        z.add_distance(r1 * amp * ch.h(q, i), Vector2d::Zero(), pl.U.col(q));
                    }
                }
                const Eigen::RowVectorXcd AT = A * Th;
                for (int q = 0; q < M; ++q) {
                    const double amp = std::abs(Th(m, q));
                    PhasorSum& part = new_part(j);
                    part.add_constant(AT(q) - A(m) * Th(m, q));
                    part.add_distance(r0 * amp, pw.wave, pl.U.col(q));
                    part.add_distance(r1 * amp, Vector2d::Zero(), pl.U.col(q));
                }
            }
            break;
        }
        case Side::bs: {
            const Eigen::VectorXcd rho_b = steering_vector(pl.B, pl.o_b, farb_aod(a), lam);
            const PlaneWave pw = plane_wave(bs_aoa(a), Vector3d::Zero(), sm.ctx.plane_y, lam, false);
            const Eigen::RowVectorXcd BT = rho_b.adjoint() * Th;            // 1 x M
            const Eigen::RowVectorXcd NT = fd.Hhat0.row(m) * Th;            // 1 x M
            for (int j = 0; j < K; ++j) {
                const cd w = std::conj(W(m, j));
                const Eigen::RowVectorXcd WH = W.col(j).adjoint() * ch.H;
                for (int i = 0; i < K; ++i) {
                    PhasorSum& z = sm.z[j][i];
                    const cd full = (WH * ch.h.col(i))(0);
                    const cd own = w * (ch.H.row(m) * ch.h.col(i))(0);
                    z.add_constant(full - own + w * n0 * (NT * ch.h.col(i))(0));
                    z.add_wave(w * a0 * pw.factor * (BT * ch.h.col(i))(0), pw.wave);
                }
                for (int q = 0; q < M; ++q) {
                    PhasorSum& part = new_part(j);
                    part.add_constant(WH(q) - w * ch.H(m, q) + w * n0 * NT(q));
                    part.add_wave(w * a0 * pw.factor * BT(q), pw.wave);
                }
            }
            break;
        }
        case Side::users: {
            const Eigen::VectorXcd rho_u = steering_vector(pl.U, pl.o_u, faru_aoa(a, m), lam);
            const Eigen::VectorXcd hb = ch.H * rho_u;
            const Eigen::VectorXcd hn = ch.H * fd.hhat.col(m);
            const PlaneWave pw = plane_wave(user_aod(a, m), pl.user_refs.col(m), sm.ctx.plane_y, lam, true);
            for (int j = 0; j < K; ++j) {
                for (int i = 0; i < K; ++i) {
                    PhasorSum& z = sm.z[j][i];
                    if (i != m) {
                        z.add_constant(W.col(j).dot(ch.H * ch.h.col(i)));
                    } else {
                        z.add_wave(a1 * W.col(j).dot(hb) * pw.factor, pw.wave);
                        z.add_constant(n1 * W.col(j).dot(hn));
                    }
                }
                sm.noise_const[j] = (W.col(j).adjoint() * ch.H).squaredNorm();
            }
            break;
        }
    }
    return sm;
}

// Position updates ---------------------------------------------------------------

PositionResult optimize_antenna(const Problem& pr, const Placement& placement, const ControlState& control,
                                Side side, int index) {
    const auto& c = pr.config;
    const auto& opt = pr.options;
    PositionResult res;
    res.placement = placement;
    res.control = control;
    const Evaluation base = evaluate(pr, placement, control);
    res.objective_before = res.objective_after = base.spectral_sum;
    if (!base.rates_ok) return res;

    const PlanarRegion region = antenna_region(c, placement, side, index);
    std::vector<Vector2d> others;
    if (side != Side::users) {
        const Matrix3X& arr = side_array(const_cast<Placement&>(placement), side);
        for (Eigen::Index i = 0; i < arr.cols(); ++i)
            if (i != index) others.push_back(PlanarRegion::project(arr.col(i)));
    }
    const double dmin = c.min_spacing;
    const double tau_min = sinr_floor(c);

    auto place = [&](const VectorXd& x) {
        Placement p = placement;
        set_antenna_position(p, side, index, Vector2d(x(0), x(1)));
        return p;
    };
    // Receivers at a candidate: the current ones, or MMSE for the current powers when refreshing.
    auto receivers_at = [&](const Placement& p) {
        ControlState ctl = control;
        if (opt.refresh_receivers) {
            const ChannelRealization ch = pr.channels(p);
            ctl.omega = mmse_beamformers(ch, ctl.p, c);
            rotate_beamformers(ctl.omega, ch);
        }
        return ctl;
    };
    // Every candidate is checked once for feasibility and then scored; cache the last one.
    VectorXd cached_x;
    Evaluation cached;
    ControlState cached_ctl;
    auto eval_at = [&](const VectorXd& x) -> const Evaluation& {
        if (cached_x.size() != x.size() || cached_x != x) {
            const Placement p = place(x);
            cached_ctl = receivers_at(p);
            cached = evaluate(pr, p, cached_ctl);
            cached_x = x;
        }
        return cached;
    };
    auto geometric_ok = [&](const Vector2d& x) {
        if (region.violation(x) > 0.0) return false;
        for (const auto& o : others)
            if ((x - o).norm() < dmin) return false;
        return true;
    };
    auto feasible = [&](const VectorXd& x) { return geometric_ok(x.head<2>()) && eval_at(x).rates_ok; };
    auto objective = [&](const VectorXd& x) { return eval_at(x).spectral_sum; };

    auto build = [&](const VectorXd& x) {
        const Vector2d xn = x.head<2>();
        const Placement p = place(x);
        const Evaluation& e = eval_at(x);
        const SideModel model = build_side_model(pr, p, cached_ctl, e.channels, side, index);
        VectorXd q = control.p.cwiseProduct(e.channels.beta_k) * e.channels.beta_0;
        const auto users = side_surrogates(pr, model, xn, q, c.noise_bs(), c.noise_faru * e.channels.beta_0);
        std::vector<SpacingCut> cuts;
        if (dmin > 0.0) {
            for (const auto& o : others) cuts.push_back(linearize_min_distance(xn, o, dmin));
        }
        convex::ScaSubproblem sub;
        VectorXd start;
        const double h = c.wavelength();
        sub.program = position_program(users, xn, h, region, cuts, tau_min, start);
        sub.start = start;
        sub.extract = [xn, h](const VectorXd& y) { return VectorXd(xn + h * y.head<2>()); };
        return sub;
    };

    // Starts: the current position, then the best feasible points of a coarse grid.
    std::vector<VectorXd> starts;
    const Vector2d x0 = antenna_position(placement, side, index);
    starts.push_back(x0);
    if (opt.multistarts > 1 && opt.start_grid > 1) {
        std::vector<std::pair<double, VectorXd>> cand;
        const int g = opt.start_grid;
        for (int ix = 0; ix < g; ++ix) {
            for (int iz = 0; iz < g; ++iz) {
                const Vector2d x = region.lo + Vector2d(ix * (region.hi(0) - region.lo(0)) / (g - 1),
                                                        iz * (region.hi(1) - region.lo(1)) / (g - 1));
                if ((x - x0).norm() < 1e-9) continue;
                const VectorXd xv = x;
                if (!feasible(xv)) continue;
                cand.emplace_back(objective(xv), xv);
            }
        }
        std::stable_sort(cand.begin(), cand.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
        for (int i = 0; i < static_cast<int>(cand.size()) && static_cast<int>(starts.size()) < opt.multistarts; ++i)
            starts.push_back(cand[i].second);
    }

    convex::ScaOptions so;
    so.max_iter = opt.position_sca_iters;
    so.tolerance = opt.position_tolerance;
    so.solver.validate = false;
    so.solver.tolerance = opt.subproblem_tolerance;
    VectorXd best = starts.front();
    double best_f = base.spectral_sum;
    for (const auto& s : starts) {
        if (!feasible(s)) continue;
        try {
            const convex::ScaTrace tr = convex::sca_drive(build, objective, feasible, s, so);
            res.sca_iterations += tr.iterations;
            if (tr.objective() > best_f) {
                best_f = tr.objective();
                best = tr.x();
            }
        } catch (const std::exception&) {
            // A start that breaks the surrogate geometry is skipped.
        }
    }
    if (best_f > base.spectral_sum) {
        res.placement = place(best);
        res.control = receivers_at(res.placement);
        res.objective_after = best_f;
        res.moved = true;
    }
    return res;
}

PositionResult optimize_side(const Problem& pr, const Placement& placement, const ControlState& control, Side side) {
    PositionResult out;
    out.placement = placement;
    out.control = control;
    bool first = true;
    for (int i = 0; i < side_count(pr.config, side); ++i) {
        PositionResult r = optimize_antenna(pr, out.placement, out.control, side, i);
        if (first) out.objective_before = r.objective_before;
        first = false;
        out.placement = r.placement;
        out.control = r.control;
        out.objective_after = r.objective_after;
        out.sca_iterations += r.sca_iterations;
        out.moved = out.moved || r.moved;
    }
    return out;
}

PositionResult optimize_large_scale(const Problem& pr, const Placement& placement, const ControlState& control) {
    const auto& c = pr.config;
    const auto& opt = pr.options;
    const int K = c.num_users;
    PositionResult res;
    res.placement = placement;
    res.control = control;
    const Evaluation base = evaluate(pr, placement, control);
    res.objective_before = res.objective_after = base.spectral_sum;
    if (!base.rates_ok) return res;

    auto placement_ok = [&](const Placement& p) { return validate_placement(p, c).feasible(0.0); };

    // o_b: corner rule under the true objective.
    {
        const PlanarRegion box = reference_box(c, c.far_bs_distance);
        std::vector<Vector2d> corners;
        if (opt.corner == CornerRule::paper) {
            corners.push_back(box.hi);
        } else {
            corners = {box.lo, Vector2d(box.hi(0), box.lo(1)), Vector2d(box.lo(0), box.hi(1)), box.hi};
        }
        for (const auto& cr : corners) {
            Placement p = res.placement;
            translate_farb(p, farb_reference(c, cr(0), cr(1)));
            const Evaluation e = evaluate(pr, p, control);
            if (e.rates_ok && placement_ok(p) && e.spectral_sum > res.objective_after) {
                res.placement = p;
                res.objective_after = e.spectral_sum;
                res.moved = true;
            }
        }
    }

    // o_u: SCA on the pathloss surrogates.
    const double y_u = c.far_bs_distance + c.blockage_width;
    const PlanarRegion box = reference_box(c, y_u);
    const Placement anchor_placement = res.placement;
    auto place = [&](const VectorXd& x) {
        Placement p = anchor_placement;
        translate_faru(p, faru_reference(c, x(0), x(1)));
        return p;
    };
    VectorXd cached_x;
    Evaluation cached;
    auto eval_at = [&](const VectorXd& x) -> const Evaluation& {
        if (cached_x.size() != x.size() || cached_x != x) {
            cached = evaluate(pr, place(x), control);
            cached_x = x;
        }
        return cached;
    };
    auto feasible = [&](const VectorXd& x) {
        return box.violation(x.head<2>()) <= 0.0 && eval_at(x).rates_ok && placement_ok(place(x));
    };
    auto objective = [&](const VectorXd& x) { return eval_at(x).spectral_sum; };
    const double l = c.pathloss_exponent;
    VectorXd dlow(K);
    for (int k = 0; k < K; ++k) {
        const Vector2d t = PlanarRegion::project(anchor_placement.T.col(k));
        dlow(k) = (anchor_placement.T.col(k) - box.lift(box.clamp(t))).norm();
    }

    auto build = [&](const VectorXd& x) {
        const Vector2d xn = x.head<2>();
        const Placement p = place(x);
        const Evaluation& e = eval_at(x);
        const EffectiveGains g = effective_gains(control, e.channels);
        const double b0 = e.channels.beta_0;
        auto beta_surrogate = [&](int i, Sense sense) {
            const AffineMap t = taylor_inverse_pathloss(p.o_u, p.T.col(i), pr.draw.fading.mu_k(i), l);
            QuadraticSurrogate s;
            s.sense = sense;
            s.anchor = xn;
            s.value = t.value;
            s.gradient = Vector2d(t.gradient(0), t.gradient(2));
            s.curvature = inverse_pathloss_curvature(pr.draw.fading.mu_k(i), l, dlow(i));
            return s;
        };
        std::vector<SinrSurrogate> users(K);
        for (int j = 0; j < K; ++j) {
            const double bj = e.channels.beta_k(j);
            if (!(g.cross(j, j) > 0.0) || !(bj > 0.0)) continue;
            SinrSurrogate& u = users[j];
            u.active = true;
            u.signal = beta_surrogate(j, Sense::minorant).scaled(1.0 / bj);
            QuadraticSurrogate d = zero_majorant(xn).shifted(c.noise_bs() + b0 * c.noise_faru * g.noise(j));
            for (int i = 0; i < K; ++i) {
                if (i == j) continue;
                const double w = control.p(i) * b0 * g.cross(j, i);
                if (w > 0.0) d = d.plus(beta_surrogate(i, Sense::majorant).scaled(w));
            }
            const double Dn = d.value;
            u.denom = d.scaled(1.0 / Dn);
            u.sinr = control.p(j) * b0 * bj * g.cross(j, j) / Dn;
        }
        convex::ScaSubproblem sub;
        VectorXd start;
        const double h = 1.0;
        sub.program = position_program(users, xn, h, box, {}, sinr_floor(c), start);
        sub.start = start;
        sub.extract = [xn, h](const VectorXd& y) { return VectorXd(xn + h * y.head<2>()); };
        return sub;
    };

    const VectorXd x0 = PlanarRegion::project(anchor_placement.o_u);
    if (feasible(x0)) {
        convex::ScaOptions so;
        so.max_iter = opt.position_sca_iters;
        so.tolerance = opt.position_tolerance;
        so.solver.validate = false;
        so.solver.tolerance = opt.subproblem_tolerance;
        try {
            const convex::ScaTrace tr = convex::sca_drive(build, objective, feasible, x0, so);
            res.sca_iterations = tr.iterations;
            if (tr.objective() > res.objective_after) {
                res.placement = place(tr.x());
                res.objective_after = tr.objective();
                res.moved = true;
            }
        } catch (const std::exception&) {
            // keep the previous o_u
        }
    }
    return res;
}

// Power and beamforming ------------------------------------------------------------

Eigen::MatrixXcd mrc_beamformers(const ChannelRealization& ch) {
    const Eigen::MatrixXcd hb = ch.H * ch.h;
    Eigen::MatrixXcd w(hb.rows(), hb.cols());
    for (Eigen::Index k = 0; k < hb.cols(); ++k) {
        const double n = hb.col(k).norm();
        if (n > 0.0) {
            w.col(k) = hb.col(k) / n;
        } else {
            w.col(k) = Eigen::VectorXcd::Zero(hb.rows());
            w(0, k) = 1.0;
        }
    }
    return w;
}

Eigen::MatrixXcd mmse_beamformers(const ChannelRealization& ch, const Eigen::VectorXd& p,
                                  const ScenarioConfig& config) {
    const Eigen::MatrixXcd hb = ch.H * ch.h;
    const Eigen::Index N = hb.rows();
    Eigen::MatrixXcd R = config.noise_bs() * Eigen::MatrixXcd::Identity(N, N) +
                         ch.beta_0 * config.noise_faru * ch.H * ch.H.adjoint();
    for (Eigen::Index i = 0; i < hb.cols(); ++i) R += p(i) * ch.beta_0 * ch.beta_k(i) * hb.col(i) * hb.col(i).adjoint();
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(R);
    Eigen::MatrixXcd w = ldlt.solve(hb);
    for (Eigen::Index k = 0; k < w.cols(); ++k) {
        const double n = w.col(k).norm();
        if (n > 0.0 && std::isfinite(n)) {
            w.col(k) /= n;
        } else {
            w.col(k) = hb.col(k).norm() > 0.0 ? Eigen::VectorXcd(hb.col(k).normalized()) : Eigen::VectorXcd::Zero(N);
        }
    }
    return w;
}

void rotate_beamformers(Eigen::MatrixXcd& omega, const ChannelRealization& ch) {
    const Eigen::MatrixXcd hb = ch.H * ch.h;
    for (Eigen::Index k = 0; k < omega.cols(); ++k) {
        const cd z = omega.col(k).dot(hb.col(k));  // w^H hb
        if (std::abs(z) > 0.0) omega.col(k) *= z / std::abs(z);
    }
}

bool restore_feasibility(const Problem& pr, const ChannelRealization& ch, ControlState& control) {
    const auto& c = pr.config;
    const double tau = sinr_floor(c);
    const int K = c.num_users;
    VectorXd p = control.p.cwiseMax(0.0).cwiseMin(c.max_power);
    if (p.maxCoeff() <= 0.0) p.setConstant(0.5 * c.max_power);
    for (int it = 0; it < 500; ++it) {
        ControlState trial{p, mmse_beamformers(ch, p, c)};
        const VectorXd s = all_sinr(trial, ch, c);
        bool ok = true;
        for (int k = 0; k < K; ++k) {
            if (!(c.bandwidth * std::log2(1.0 + s(k)) >= c.min_rate)) ok = false;
        }
        if (ok) {
            control = trial;
            return true;
        }
        VectorXd next = p;
        for (int k = 0; k < K; ++k) {
            next(k) = std::min(c.max_power, p(k) * tau * (1.0 + 1e-3) / std::max(s(k), 1e-300));
        }
        if ((next - p).norm() <= 1e-15 * c.max_power) break;
        p = next;
    }
    return false;
}

PowerResult optimize_power_beamforming(const Problem& pr, const Placement& placement, const ControlState& control) {
    const auto& c = pr.config;
    const auto& opt = pr.options;
    const int K = c.num_users;
    const int N = c.num_bs_antennas;
    const double P = c.max_power;
    const double Pc = circuit_power(c, pr.scheme);
    const double tau_min = sinr_floor(c);
    const ChannelRealization ch = pr.channels(placement);
    const Eigen::MatrixXcd hb = ch.H * ch.h;  // N x K
    const VectorXd beta_bar = ch.beta_0 * ch.beta_k;
    const MatrixXd QH = real_form(ch.H * ch.H.adjoint());
    std::vector<MatrixXd> Qh(K);
    for (int i = 0; i < K; ++i) Qh[i] = real_form(hb.col(i) * hb.col(i).adjoint());

    const int nx = K + 2 * N * K;
    const int n = nx + 2 * K;
    auto ip = [&](int k) { return k; };
    auto iw = [&](int k) { return K + 2 * N * k; };
    auto ipsi = [&](int k) { return nx + k; };
    auto ichi = [&](int k) { return nx + K + k; };

    PowerResult res;
    res.control = control;

    auto sinr_of = [&](const VectorXd& x) { return all_sinr(decode_control(x, K, N, P), ch, c); };
    auto f_true = [&](const VectorXd& x) {
        const VectorXd s = sinr_of(x);
        double f = 0.0;
        for (int k = 0; k < K; ++k) f += std::log2(1.0 + s(k));
        return f;
    };
    auto g_true = [&](const VectorXd& x) { return P * x.head(K).sum() + Pc; };
    auto feasible = [&](const VectorXd& x) {
        for (int k = 0; k < K; ++k) {
            if (x(ip(k)) < 0.0 || x(ip(k)) > 1.0) return false;
            if (x.segment(iw(k), 2 * N).norm() > 1.0 + 1e-12) return false;
        }
        const VectorXd s = sinr_of(x);
        const double floor = c.min_rate - kRateSlack * std::max(c.min_rate, 1.0);
        for (int k = 0; k < K; ++k)
            if (!(c.bandwidth * std::log2(1.0 + s(k)) >= floor)) return false;
        return true;
    };

    VectorXd x0 = encode_control(control, P);
    res.ee_before = c.bandwidth * f_true(x0) / g_true(x0);
    res.ee_after = res.ee_before;
    if (!feasible(x0)) return res;

    // For fixed powers the unit-norm MMSE receivers maximize every SINR, so swapping them in
    // keeps the rate floors and cannot lower the EE. Used on the start and on the result.
    auto with_mmse = [&](const VectorXd& x) {
        ControlState ctl = decode_control(x, K, N, P);
        ctl.omega = mmse_beamformers(ch, ctl.p, c);
        rotate_beamformers(ctl.omega, ch);
        const VectorXd xm = encode_control(ctl, P);
        return feasible(xm) && f_true(xm) > f_true(x) ? xm : x;
    };
    x0 = with_mmse(x0);

    auto build_for = [&](double s) {
        return [&, s](const VectorXd& xa) {
            ControlState ctl = decode_control(xa, K, N, P);
            rotate_beamformers(ctl.omega, ch);
            const VectorXd xn = encode_control(ctl, P);
            const EffectiveGains g = effective_gains(ctl, ch);
            const VectorXd sn = sinr_from_gains(g, ctl.p, ch, c);
            const double eps = 1e-6;
            ConvexProgram prog;
            prog.n = n;
            prog.objective.linear = VectorXd::Zero(n);
            VectorXd start = VectorXd::Zero(n);
            start.head(nx) = xn;
            for (int k = 0; k < K; ++k) {
                start(ip(k)) = std::max(xn(ip(k)), 1e-12) * (1.0 - eps);
                start.segment(iw(k), 2 * N) *= (1.0 - eps);
            }
            for (int k = 0; k < K; ++k) {
                prog.objective.linear(ip(k)) = -s * P;
                const double pk = std::max(xn(ip(k)), 1e-12);
                const double psi_n = std::max(sn(k), 1e-12);
                double chi_n = c.noise_bs() + ch.beta_0 * c.noise_faru * g.noise(k);
                for (int i = 0; i < K; ++i)
                    if (i != k) chi_n += ctl.p(i) * beta_bar(i) * g.cross(k, i);
                start(ipsi(k)) = 1.0 - 6.0 * eps;
                start(ichi(k)) = 1.0 + eps;

                LogTerm lt;
                lt.a = VectorXd::Zero(n);
                lt.a(ipsi(k)) = psi_n;
                prog.objective.logs.push_back(lt);

                // Signal: sqrt(psi chi / p) expansion <= Re(w^H hb).
                {
                    const SqrtProductAffine L = sqrt_product_lower(pk, 1.0, 1.0);
                    const double ck = std::sqrt(psi_n * chi_n / (P * beta_bar(k)));
                    VectorXd a = VectorXd::Zero(n);
                    a(ip(k)) = ck * L.d_p;
                    a(ipsi(k)) = ck * L.d_psi;
                    a(ichi(k)) = ck * L.d_chi;
                    a.segment(iw(k), N) = -hb.col(k).real();
                    a.segment(iw(k) + N, N) = -hb.col(k).imag();
                    const double b = -ck * (L.value - L.d_p * pk - L.d_psi - L.d_chi);
                    prog.constraints.push_back(Constraint::affine(a, b, "signal"));
                }
                // Denominator majorant <= chi.
                {
                    MatrixXd Pm = MatrixXd::Zero(n, n);
                    VectorXd q = VectorXd::Zero(n);
                    double r = c.noise_bs() / chi_n;
                    const int o = iw(k);
                    Pm.block(o, o, 2 * N, 2 * N) += 2.0 * ch.beta_0 * c.noise_faru / chi_n * QH;
                    q(ichi(k)) = -1.0;
                    std::vector<SquaredTerm> squares;
                    const VectorXd yk = xn.segment(o, 2 * N);
                    for (int i = 0; i < K; ++i) {
                        if (i == k) continue;
                        const double ci = P * beta_bar(i) / chi_n;
                        const double an = xn(ip(i));
                        const double bn = ci * g.cross(k, i);
                        const double kap = balanced_kappa(an, bn);
                        const double u = kap * an - bn / kap;
                        SquaredTerm sq;
                        sq.G = MatrixXd::Zero(n, n);
                        sq.G.block(o, o, 2 * N, 2 * N) = 2.0 * ci / kap * Qh[i];
                        sq.l = VectorXd::Zero(n);
                        sq.l(ip(i)) = kap;
                        squares.push_back(std::move(sq));
                        r += -0.25 * u * u + 0.5 * u * kap * an - 0.5 * u * bn / kap;
                        q(ip(i)) += -0.5 * u * kap;
                        if (u > 0.0) {
                            Pm.block(o, o, 2 * N, 2 * N) += u * ci / kap * Qh[i];
                        } else if (u < 0.0) {
                            const VectorXd grad = 2.0 * ci / kap * (Qh[i] * yk);
                            q.segment(o, 2 * N) += 0.5 * u * grad;
                            r += 0.5 * u * (bn / kap - grad.dot(yk));
                        }
                    }
                    prog.constraints.push_back(
                        Constraint::squared(std::move(squares), std::move(Pm), std::move(q), r, "denominator"));
                }
                if (tau_min > 0.0) {
                    VectorXd a = VectorXd::Zero(n);
                    a(ipsi(k)) = -psi_n;
                    prog.constraints.push_back(Constraint::affine(a, -tau_min, "rate"));
                }
                {
                    VectorXd a = VectorXd::Zero(n);
                    a(ip(k)) = 1.0;
                    prog.constraints.push_back(Constraint::affine(a, 1.0, "power_hi"));
                    prog.constraints.push_back(Constraint::affine(-a, 0.0, "power_lo"));
                }
                {
                    MatrixXd Pm = MatrixXd::Zero(n, n);
                    Pm.block(iw(k), iw(k), 2 * N, 2 * N) = 2.0 * MatrixXd::Identity(2 * N, 2 * N);
                    prog.constraints.push_back(Constraint::quadratic(Pm, VectorXd::Zero(n), -1.0, "beam_norm"));
                }
            }
            convex::ScaSubproblem sub;
            sub.program = std::move(prog);
            sub.start = start;
            sub.extract = [nx](const VectorXd& z) { return VectorXd(z.head(nx)); };
            return sub;
        };
    };

    VectorXd current = x0;
    convex::ScaOptions so;
    so.max_iter = opt.power_sca_iters;
    so.tolerance = opt.power_tolerance;
    so.abs_tolerance = opt.power_tolerance * std::max(f_true(x0), 1e-12);
    so.solver.validate = false;
    so.solver.tolerance = opt.subproblem_tolerance;
    auto parametric = [&](double s) -> VectorXd {
        auto obj = [&](const VectorXd& x) { return f_true(x) - s * g_true(x); };
        const convex::ScaTrace tr = convex::sca_drive(build_for(s), obj, feasible, current, so);
        res.sca_solves += tr.iterations;
        current = tr.x();
        return current;
    };
    const convex::DinkelbachResult dr =
        convex::dinkelbach_drive(f_true, g_true, parametric, f_true(x0) / g_true(x0), opt.dinkelbach_eps,
                                 opt.dinkelbach_iters);
    res.dinkelbach_updates = dr.iterations;
    res.s_trace = dr.s_trace;
    const VectorXd xb = with_mmse(dr.x.size() ? dr.x : x0);
    const double ee = c.bandwidth * f_true(xb) / g_true(xb);
    if (feasible(xb) && ee >= res.ee_before) {
        ControlState ctl = decode_control(xb, K, N, P);
        rotate_beamformers(ctl.omega, ch);
        res.control = ctl;
        res.ee_after = ee;
    }
    return res;
}

// Outer loop ----------------------------------------------------------------------

std::string OptimizerState::trace_csv_header() { return "outer_iter,stage,EE,sum_rate,total_power,worst_violation"; }

std::string OptimizerState::trace_csv() const {
    std::ostringstream os;
    char buf[256];
    os << trace_csv_header() << '\n';
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.17g,%.17g,%.17g\n", r.outer_iter, r.stage.c_str(), r.ee,
                      r.sum_rate, r.total_power, r.worst_violation);
        os << buf;
    }
    return os.str();
}

OptimizerState initial_state(const Problem& pr) {
    const auto& c = pr.config;
    OptimizerState st;
    st.placement = initial_placement(c, pr.draw.user_refs);
    st.channels = pr.channels(st.placement);
    st.control.p = VectorXd::Constant(c.num_users, 0.5 * c.max_power);
    st.control.omega = mrc_beamformers(st.channels);
    const Evaluation e = evaluate(pr, st.placement, st.control);
    st.feasible = e.rates_ok;
    if (!st.feasible) {
        st.feasible = restore_feasibility(pr, st.channels, st.control);
        if (!st.feasible) st.diagnostics = "rate floors unreachable from the initial placement";
    }
    return st;
}

OptimizerState optimize_ee(const Problem& pr) {
    const auto& opt = pr.options;
    OptimizerState st = initial_state(pr);
    if (!st.feasible) {
        st.report = check_solution(st.placement, st.control, st.channels, pr.config, pr.scheme);
        record(pr, st, 0, "init");
        st.ee_trace.push_back(0.0);
        return st;
    }
    record(pr, st, 0, "init");
    double ee = st.trace.back().ee;
    st.ee_trace.push_back(ee);
    for (int it = 1; it <= opt.max_outer; ++it) {
        const double ee_prev = ee;
        if (opt.large_scale) {
            PositionResult r = optimize_large_scale(pr, st.placement, st.control);
            st.placement = r.placement;
            st.control = r.control;
            record(pr, st, it, "large_scale");
        }
        if (opt.positions) {
            for (Side s : {Side::users, Side::faru, Side::farb, Side::bs}) {
                PositionResult r = optimize_side(pr, st.placement, st.control, s);
                st.placement = r.placement;
                st.control = r.control;
                record(pr, st, it, side_name(s));
            }
        }
        st.control = optimize_power_beamforming(pr, st.placement, st.control).control;
        record(pr, st, it, "power");
        ee = st.trace.back().ee;
        st.ee_trace.push_back(ee);
        st.outer_iterations = it;
        if (std::abs(ee - ee_prev) <= opt.outer_tolerance * std::max(std::abs(ee_prev), 1e-300)) {
            st.converged = true;
            break;
        }
    }
    st.channels = pr.channels(st.placement);
    st.report = check_solution(st.placement, st.control, st.channels, pr.config, pr.scheme);
    st.feasible = st.report.feasible;
    if (!st.feasible) st.diagnostics = "final state violates a constraint";
    return st;
}

OptimizerState optimize_ee(const ScenarioConfig& config, std::uint64_t seed, Scheme scheme,
                           const OptimizerOptions& options) {
    return optimize_ee(make_problem(config, seed, scheme, options));
}

}  // namespace faree
