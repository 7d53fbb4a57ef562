// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include "doctest.h"

#include "faree/baselines.hpp"

using namespace faree;

TEST_CASE("co-phasing aligns every element of the LoS cascade") {
    ScenarioConfig c = table_one_config();
    c.rician_k0 = c.rician_k1 = std::numeric_limits<double>::infinity();
    c.num_users = 1;
    const Problem pr = make_problem(c, 4, Scheme::sris);
    const OptimizerState st = initial_state(pr);
    const ChannelRealization ch = pr.channels(st.placement);
    // With one user and pure LoS, every element's contribution to H h has the same phase.
    const Eigen::MatrixXcd& th = ch.theta.entries;
    const Eigen::VectorXcd hb = ch.H0.row(0).transpose().cwiseProduct(th.diagonal()).cwiseProduct(ch.h.col(0));
    for (Eigen::Index m = 1; m < hb.size(); ++m)
        CHECK(std::abs(std::arg(hb(m) * std::conj(hb(0)))) <= 1e-9);
    for (Eigen::Index m = 0; m < th.rows(); ++m) CHECK(std::abs(th(m, m)) == doctest::Approx(std::sqrt(0.9)));
    CHECK((th - Eigen::MatrixXcd(th.diagonal().asDiagonal())).norm() == 0.0);
}

TEST_CASE("single element, pure LoS: SRIS with matched transmission matches FAR") {
    ScenarioConfig c = table_one_config();
    c.num_users = 1;
    c.num_far_antennas = 1;
    c.rician_k0 = c.rician_k1 = std::numeric_limits<double>::infinity();
    const Problem far = make_problem(c, 2, Scheme::far);
    const OptimizerState st = initial_state(far);
    const ChannelRealization cf = far.channels(st.placement);
    ScenarioConfig cs = c;
    cs.sris_transmission = std::norm(cf.theta.entries(0, 0));
    cs.sris_reflection = 0.0;
    REQUIRE(cs.sris_transmission <= 1.0);
    const Problem sris = make_problem(cs, 2, Scheme::sris);
    const ChannelRealization chs = sris.channels(st.placement);
    const double a = all_sinr(st.control, cf, c)(0);
    const double b = all_sinr(st.control, chs, cs)(0);
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("zero transmission gives zero rate and zero EE") {
    ScenarioConfig c = table_one_config();
    c.sris_transmission = 0.0;
    c.min_rate = 0.0;
    const OptimizerState st = evaluate_sris(c, 1);
    CHECK(st.report.sum_rate == 0.0);
    CHECK(st.report.ee == 0.0);
}

TEST_CASE("AFR equals frozen FAR under matched hardware power") {
    ScenarioConfig c = table_one_config();
    c.power_afr_antenna = c.power_far / (2.0 * c.num_far_antennas);
    for (std::uint64_t seed : {0u, 3u}) {
        const OptimizerState afr = evaluate_afr(c, seed);
        const OptimizerState far = optimize_ee(c, seed, Scheme::far, baseline_options());
        CHECK(afr.report.ee == doctest::Approx(far.report.ee).epsilon(1e-12));
        CHECK(afr.report.csv_row() == far.report.csv_row());
    }
}

TEST_CASE("AFR EE drops when the per-antenna power doubles at fixed rates") {
    ScenarioConfig c = table_one_config();
    const OptimizerState st = evaluate_afr(c, 2);
    ScenarioConfig c2 = c;
    c2.power_afr_antenna *= 2.0;
    const LinkReport r = evaluate_link(st.control, st.channels, c2, Scheme::afr);
    CHECK(r.sum_rate == doctest::Approx(st.report.sum_rate).epsilon(1e-12));
    CHECK(r.ee < st.report.ee);
}

TEST_CASE("schemes share the random draw of a seed") {
    const ScenarioConfig c = table_one_config();
    const Problem f = make_problem(c, 7, Scheme::far);
    const Problem s = make_problem(c, 7, Scheme::sris);
    const Problem a = make_problem(c, 7, Scheme::afr);
    CHECK((f.draw.user_refs - s.draw.user_refs).norm() == 0.0);
    CHECK((f.draw.user_refs - a.draw.user_refs).norm() == 0.0);
    const Placement p = initial_state(f).placement;
    const ChannelRealization cf = f.channels(p), cs = s.channels(p), ca = a.channels(p);
    CHECK((cf.h - cs.h).norm() == 0.0);
    CHECK((cf.H0 - cs.H0).norm() == 0.0);
    CHECK((cf.h - ca.h).norm() == 0.0);
    CHECK((cf.H - ca.H).norm() == 0.0);
    CHECK((cf.beta_k - cs.beta_k).norm() == 0.0);
    CHECK(cf.beta_0 == cs.beta_0);
}

TEST_CASE("baseline solutions are feasible and keep the fixed geometry") {
    const ScenarioConfig c = table_one_config();
    for (std::uint64_t seed : {0u, 1u, 2u}) {
        for (Scheme s : {Scheme::sris, Scheme::afr}) {
            const OptimizerState st = run_scheme(c, seed, s);
            CAPTURE(scheme_name(s));
            REQUIRE(st.feasible);
            CHECK(st.report.feasible);
            CHECK(st.report.worst_violation() <= 1e-6);
            CHECK(st.report.ee > 0.0);
            const Placement p0 = initial_state(make_problem(c, seed, s)).placement;
            CHECK((st.placement.T - p0.T).norm() == 0.0);
            CHECK((st.placement.U - p0.U).norm() == 0.0);
            CHECK((st.placement.B - p0.B).norm() == 0.0);
            CHECK((st.placement.R - p0.R).norm() == 0.0);
            for (std::size_t i = 1; i < st.ee_trace.size(); ++i) CHECK(st.ee_trace[i] >= st.ee_trace[i - 1]);
        }
    }
}

TEST_CASE("SRIS circuit power counts 2M elements") {
    const ScenarioConfig c = table_one_config();
    const OptimizerState st = evaluate_sris(c, 0);
    const double circuit = c.power_bs + 2.0 * c.num_far_antennas * c.power_sris_element;
    CHECK(st.report.total_power == doctest::Approx(st.control.p.sum() + circuit).epsilon(1e-14));
}
