#include "helpers.hpp"
#include "nlrom/condensation.hpp"
#include "nlrom/dynamics.hpp"
#include "nlrom/invariant.hpp"
#include "nlrom/qm.hpp"
#include "nlrom/zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nlrom;

namespace {

ReducedModel duffing(double h, double xi = 0.0, double force = 0.0) {
    ReducedModel rm;
    rm.method = "duffing";
    rm.masters = {0};
    rm.omega = VectorXd::Constant(1, 1.0);
    RealPoly p = zero_poly(1);
    p.add({3, 0}, h);
    rm.restoring = {p};
    if (xi > 0) rm.damping_ratio = VectorXd::Constant(1, xi);
    if (force > 0) rm.force_amplitude = VectorXd::Constant(1, force);
    return rm;
}

/// Amplitude of a single-valued curve at w, by linear interpolation.
double interpolate(const Curve& c, double w) {
    for (size_t k = 1; k < c.points.size(); ++k) {
        const auto &a = c.points[k - 1], &b = c.points[k];
        if ((a.omega - w) * (b.omega - w) <= 0 && a.omega != b.omega) {
            const double t = (w - a.omega) / (b.omega - a.omega);
            return (1 - t) * a.amplitude(0) + t * b.amplitude(0);
        }
    }
    return NAN;
}

}  // namespace

TEST(Integrate, LinearOscillatorPeriod) {
    auto rm = duffing(0.0);
    const double dt = 2 * M_PI / 2000;
    auto tr = integrate(rm, VectorXd::Constant(1, 1.0), VectorXd::Zero(1), 2.5 * M_PI, dt);
    double crossing = NAN;
    for (size_t k = 1; k < tr.t.size(); ++k)
        if (tr.t[k] > M_PI && tr.v(k - 1, 0) < 0 && tr.v(k, 0) >= 0) {
            const double t0 = tr.t[k - 1], v0 = tr.v(k - 1, 0), v1 = tr.v(k, 0);
            crossing = t0 - v0 * (tr.t[k] - t0) / (v1 - v0);
        }
    EXPECT_NEAR(crossing, M_PI, 1e-6);
    EXPECT_NEAR(tr.x(tr.x.rows() - 1, 0), std::cos(tr.t.back()), 1e-10);
}

TEST(Integrate, DuffingEnergyIsConserved) {
    auto rm = duffing(0.5);
    const double dt = 2 * M_PI / 1000;
    auto tr = integrate(rm, VectorXd::Constant(1, 0.3), VectorXd::Zero(1), 200 * M_PI, dt, 100);
    auto energy = [](double x, double v) { return 0.5 * v * v + 0.5 * x * x + 0.125 * x * x * x * x; };
    const double e0 = energy(tr.x(0, 0), tr.v(0, 0));
    double drift = 0.0;
    for (Eigen::Index k = 0; k < tr.x.rows(); ++k) drift = std::max(drift, std::abs(energy(tr.x(k, 0), tr.v(k, 0)) - e0));
    EXPECT_LT(drift / e0, 1e-6);
}

TEST(Integrate, PhysicalAndModalAgree) {
    std::mt19937 rng(12);
    auto p = testutil::random_physical(3, rng, 0.3);
    auto mm = assemble_modal(p, 3);
    VectorXd q0(3);
    q0 << 0.1, -0.05, 0.02;
    auto tp = integrate(p, mm.V * q0, VectorXd::Zero(3), 5.0, 1e-3, 1000);
    auto tm = integrate(mm, q0, VectorXd::Zero(3), 5.0, 1e-3, 1000);
    ASSERT_EQ(tp.x.rows(), tm.x.rows());
    for (Eigen::Index k = 0; k < tp.x.rows(); ++k)
        EXPECT_LT((tp.x.row(k).transpose() - mm.V * tm.x.row(k).transpose()).norm(), 1e-9);
}

TEST(Integrate, BlowUpIsReported) {
    auto rm = duffing(-1.0);
    try {
        integrate(rm, VectorXd::Constant(1, 3.0), VectorXd::Zero(1), 100.0, 1e-2);
        FAIL() << "expected a numerical error";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("blew up"), std::string::npos);
    }
}

TEST(ClosedForm, PureCubicAgreesAcrossMethods) {
    auto mm = make_two_dof(1.0, 3.0, {}, {{0, 0, 0, 0, 0.8}});
    for (auto m : {GammaMethod::NF, GammaMethod::ICE, GammaMethod::MD, GammaMethod::SMD})
        EXPECT_NEAR(gamma_closed_form(mm, 0, m), 0.3, 1e-15);
}

TEST(ClosedForm, HandValueForNormalForm) {
    // -3/8 * 2 (1/3)^2 (1 + 4/(3 * 5)) = -19/180
    auto mm = make_two_dof(1.0, 3.0, {{1, 0, 0, 1.0}}, {});
    EXPECT_NEAR(gamma_closed_form(mm, 0, GammaMethod::NF), -19.0 / 180.0, 1e-15);
    auto t = gamma_terms(mm, 0, GammaMethod::ICE);
    EXPECT_EQ(t.common, 0.0);
    EXPECT_NEAR(t.summed, -3.0 / 36.0, 1e-15);
}

TEST(ClosedForm, NormalFormGuardAtOneToTwo) {
    auto mm = make_two_dof(1.0, 2.0, {{1, 0, 0, 1.0}}, {});
    EXPECT_THROW(gamma_closed_form(mm, 0, GammaMethod::NF), ResonanceError);
    EXPECT_NO_THROW(gamma_closed_form(mm, 0, GammaMethod::ICE));
}

TEST(ClosedForm, MethodNames) {
    for (auto m : {GammaMethod::NF, GammaMethod::ICE, GammaMethod::MD, GammaMethod::SMD})
        EXPECT_EQ(parse_gamma_method(to_string(m)), m);
    EXPECT_THROW(parse_gamma_method("bogus"), std::invalid_argument);
}

TEST(Backbone, LinearModelIsFlat) {
    auto c = backbone(duffing(0.0), 0.5);
    ASSERT_GT(c.points.size(), 3u);
    for (const auto& p : c.points) EXPECT_NEAR(p.omega, 1.0, 1e-10);
    EXPECT_LT(c.max_residual, 1e-10);
}

TEST(Backbone, DuffingCurvature) {
    const double h = 0.4, a = std::sqrt(0.01 / (3 * h / 8));
    auto c = backbone(duffing(h), a);
    // the curve stops at the first point past a; interpolate the frequency there
    double w = NAN;
    for (size_t k = 1; k < c.points.size(); ++k) {
        const auto &p = c.points[k - 1], &q = c.points[k];
        if (p.amplitude(0) <= a && q.amplitude(0) >= a) {
            const double t = (a - p.amplitude(0)) / (q.amplitude(0) - p.amplitude(0));
            w = (1 - t) * p.omega + t * q.omega;
        }
    }
    EXPECT_GE(c.points.back().amplitude(0), a);
    const double shift = 3 * h / 8 * a * a;
    EXPECT_NEAR(w - 1.0, shift, 0.01 * shift);
    for (const auto& p : c.points) EXPECT_TRUE(p.stable);
    EXPECT_NEAR(gamma_from_backbone(c, a), 3 * h / 8, 1e-3);
}

TEST(Backbone, VelocityTermsEnterCurvature) {
    ReducedModel rm = duffing(0.6);
    rm.restoring[0].add({1, 2}, 0.3);
    rm.restoring[0].add({2, 0}, 0.2);
    auto c = backbone(rm, 0.2);
    EXPECT_NEAR(gamma_from_backbone(c, 0.2), hb_gamma(rm), 1e-2 * std::abs(hb_gamma(rm)));
}

TEST(Backbone, TooFewPointsForFit) {
    Curve c;
    c.points.resize(3);
    for (auto& p : c.points) p.amplitude = VectorXd::Constant(1, 0.1);
    EXPECT_THROW(gamma_from_backbone(c, 1.0), NumericalError);
}

TEST(Frf, ZeroForcingGivesZeroResponse) {
    ReducedModel rm = duffing(0.5, 0.02);
    rm.force_amplitude = VectorXd::Zero(1);
    auto c = frf(rm, 0.8, 1.2);
    ASSERT_FALSE(c.points.empty());
    for (const auto& p : c.points) EXPECT_LT(p.amplitude(0), 1e-14);
}

TEST(Frf, LinearPeakMatchesResonance) {
    const double xi = 0.02, F = 0.01;
    auto c = frf(duffing(0.0, xi, F), 0.8, 1.2);
    double peak = 0.0;
    for (const auto& p : c.points) peak = std::max(peak, p.amplitude(0));
    EXPECT_NEAR(peak, F / (2 * xi * std::sqrt(1 - xi * xi)), 1e-3 * peak);
    for (const auto& p : c.points)
        EXPECT_NEAR(p.amplitude(0), F / std::hypot(1 - p.omega * p.omega, 2 * xi * p.omega), 1e-10);
}

TEST(Frf, ForwardAndReverseCoincide) {
    HbOptions opt;
    opt.ds_max = 2e-3;
    ReducedModel rm = duffing(0.5, 0.05, 0.005);
    auto fwd = frf(rm, 0.8, 1.2, opt), rev = frf(rm, 0.8, 1.2, opt, true);
    EXPECT_GT(fwd.points.front().omega, rev.points.front().omega - 1.0);
    EXPECT_LT(rev.points.back().omega, fwd.points.back().omega);
    double peak = 0.0;
    for (const auto& p : fwd.points) peak = std::max(peak, p.amplitude(0));
    for (const auto& p : rev.points) {
        const double a = interpolate(fwd, p.omega);
        if (std::isnan(a)) continue;
        EXPECT_NEAR(a, p.amplitude(0), 1e-3 * peak);
    }
}

TEST(Frf, FoldsBoundTheUnstableBranch) {
    auto c = frf(duffing(1.0, 0.01, 0.01), 0.7, 1.6);
    std::vector<size_t> sn;
    for (size_t k = 0; k < c.points.size(); ++k)
        if (c.points[k].tag == "SN") sn.push_back(k);
    ASSERT_EQ(sn.size(), 2u);
    size_t unstable = 0;
    for (size_t k = 0; k < c.points.size(); ++k)
        if (!c.points[k].stable) {
            ++unstable;
            EXPECT_GE(k + 1, sn.front());
            EXPECT_LE(k, sn.back() + 1);
        }
    EXPECT_GT(unstable, 0u);
    EXPECT_LT(c.max_residual, 1e-9);
}

TEST(Frf, RequiresDamping) {
    EXPECT_THROW(frf(duffing(1.0, 0.0, 0.01), 0.7, 1.6), std::invalid_argument);
}

TEST(CompareManifolds, IdenticalMapsHaveZeroDistance) {
    auto mm = make_two_dof(1.0, 2.5, {{1, 0, 0, 0.5}}, {});
    auto r = graph_single(mm, 0);
    auto d = compare_manifolds(r.map, r.map, VectorXd::Constant(1, 1.0), {0.01, 0.1});
    for (double v : d.full_circle) EXPECT_EQ(v, 0.0);
}

TEST(CompareManifolds, StaticMapApproachesInvariantForLargeGap) {
    auto gap = [](double rho) {
        auto mm = make_two_dof(1.0, rho, {{1, 0, 0, 0.5}}, {});
        auto inv = graph_single(mm, 0);
        auto st = static_condensation_third(mm, 0);
        auto d = compare_manifolds(inv.map, st.map, VectorXd::Constant(1, 1.0), {0.1});
        return std::make_pair(d.full_circle[0], d.zero_velocity[0]);
    };
    auto near = gap(2.5), far = gap(10.0);
    EXPECT_GT(near.first, 4.0 * far.first);
    EXPECT_GT(near.first, 0.0);
}

TEST(CompareManifolds, QuadraticManifoldIsCloserOnZeroVelocitySlice) {
    auto mm = make_two_dof(1.0, 3.0, {{1, 0, 0, 0.5}}, {});
    auto inv = graph_single(mm, 0);
    auto qm = qm_build(as_physical(mm), {0}, DerivativeKind::Full);
    qm.map.space = "modal";  // identity mass and diagonal stiffness: physical and modal coordinates coincide
    auto d = compare_manifolds(inv.map, qm.map, VectorXd::Constant(1, 1.0), {0.05});
    EXPECT_LT(d.zero_velocity[0], d.full_circle[0]);
}

TEST(CompareManifolds, MismatchedSpacesThrow) {
    auto mm = make_two_dof(1.0, 3.0, {{1, 0, 0, 0.5}}, {});
    auto inv = graph_single(mm, 0);
    auto qm = qm_build(as_physical(mm), {0}, DerivativeKind::Full);
    EXPECT_THROW(compare_manifolds(inv.map, qm.map, VectorXd::Constant(1, 1.0), {0.05}), std::invalid_argument);
}
