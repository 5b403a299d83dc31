#include "nlrom/dynamics.hpp"
#include "nlrom/invariant.hpp"
#include "nlrom/parametrisation.hpp"
#include "nlrom/zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nlrom;

namespace {

ModalModel sample(double xi = 0.0) {
    auto mm = make_two_dof(1.0, 2.7, {{1, 0, 0, 0.6}, {0, 0, 0, 0.3}, {0, 1, 1, 0.4}, {1, 1, 1, 0.2}},
                           {{0, 0, 0, 0, 0.8}, {1, 0, 0, 0, 0.2}});
    if (xi > 0) mm.damping_ratio = VectorXd::Constant(2, xi);
    return mm;
}

std::vector<double> amplitudes(double lo = 1e-3) {
    std::vector<double> a;
    for (int k = 0; k <= 8; ++k) a.push_back(lo * std::pow(10.0, k / 8.0));
    return a;
}

}  // namespace

TEST(Diagonalize, FieldMatchesFirstOrderEquations) {
    auto mm = sample(0.02);
    auto sys = diagonalize(mm);
    Eigen::VectorXcd z = Eigen::VectorXcd::Random(4) * 0.3;
    Eigen::VectorXcd xv = sys.P * z;
    Eigen::VectorXcd q = xv.head(2), v = xv.tail(2);
    Eigen::VectorXcd rhs(4);
    rhs.head(2) = v;
    Eigen::VectorXcd f = quad_apply(mm.g, q, q) + cubic_apply(mm.h, q, q, q);
    for (int p = 0; p < 2; ++p)
        rhs(2 + p) = -mm.omega(p) * mm.omega(p) * q(p) - 2.0 * mm.xi(p) * mm.omega(p) * v(p) - f(p);
    EXPECT_LT((sys.P * sys.field(z) - rhs).norm(), 1e-13);
}

TEST(Parametrise, DampedResidualScalesWithOrder) {
    auto mm = sample(0.01);
    auto sys = diagonalize(mm);
    auto amps = amplitudes();
    for (Style st : {Style::Graph, Style::NormalForm}) {
        auto p3 = parametrise(sys, {0}, 3, st);
        EXPECT_NEAR(loglog_slope(amps, invariance_residual(p3, sys, amps)), 4.0, 0.3);
        auto p5 = parametrise(sys, {0}, 5, st);
        // larger amplitudes keep the fifth-order residual above round-off
        auto big = amplitudes(1e-2);
        EXPECT_NEAR(loglog_slope(big, invariance_residual(p5, sys, big)), 6.0, 0.3);
    }
}

TEST(Parametrise, RealGraphFormMatchesClosedForm) {
    auto mm = sample();
    auto sys = diagonalize(mm);
    Rom eng = to_real_form(parametrise(sys, {0}, 3, Style::Graph), sys, "graph");
    Rom ref = graph_single(mm, 0);
    RealPoly d = eng.reduced.restoring[0].truncated(3) - ref.reduced.restoring[0];
    for (const auto& [e, c] : d.terms()) EXPECT_NEAR(c, 0.0, 1e-12);
}

TEST(Parametrise, NormalFormCurvatureMatchesClosedForm) {
    auto mm = sample();
    auto sys = diagonalize(mm);
    Rom nf = to_real_form(parametrise(sys, {0}, 3, Style::NormalForm), sys, "nf");
    EXPECT_NEAR(hb_gamma(nf.reduced), gamma_closed_form(mm, 0, GammaMethod::NF), 1e-10);
}

TEST(Parametrise, CrossResonanceIsReported) {
    auto mm = make_two_dof(1.0, 2.0, {{1, 0, 0, 0.5}}, {});
    auto sys = diagonalize(mm);
    EXPECT_THROW(parametrise(sys, {0}, 3, Style::Graph), ResonanceError);
}

TEST(Parametrise, TrivialResonancesAreKeptInNormalForm) {
    auto sys = diagonalize(sample());
    auto par = parametrise(sys, {0}, 3, Style::NormalForm);
    EXPECT_FALSE(par.resonance_log.empty());
}

TEST(Parametrise, OrderLimits) {
    auto sys = diagonalize(sample());
    EXPECT_THROW(parametrise(sys, {0}, 0, Style::Graph), std::invalid_argument);
    EXPECT_THROW(parametrise(sys, {0}, 12, Style::Graph), std::invalid_argument);
}

TEST(LogLogSlope, ExactPowerLaw) {
    std::vector<double> a{1e-3, 2e-3, 4e-3}, r;
    for (double x : a) r.push_back(7.0 * std::pow(x, 3.0));
    EXPECT_NEAR(loglog_slope(a, r), 3.0, 1e-12);
    EXPECT_THROW(loglog_slope({1.0}, {1.0}), std::invalid_argument);
}
