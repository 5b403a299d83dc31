#include "nlrom/dynamics.hpp"
#include "nlrom/invariant.hpp"
#include "nlrom/zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace nlrom;

namespace {

/// Lie derivative of P along the linear master flow x_r' = y_r, y_r' = -w_r^2 x_r.
RealPoly linear_lie(const RealPoly& P, const VectorXd& w) {
    const int m = int(w.size());
    RealPoly out = zero_poly(m);
    for (int r = 0; r < m; ++r) {
        RealPoly y = RealPoly::variable(2 * m, m + r);
        RealPoly x = RealPoly::variable(2 * m, r, -w(r) * w(r));
        out += P.derivative(r).mul(y);
        out += P.derivative(m + r).mul(x);
    }
    return out;
}

/// Largest coefficient of the second-order homological residual of a modal
/// map: d/dt x_k = y_k and d/dt y_k = -w_k^2 x_k - g^k(x, x) on degree-2 terms.
double homological_residual(const ModalModel& mm, const ManifoldMap& map) {
    const int m = map.n_masters();
    VectorXd wm(m);
    for (int r = 0; r < m; ++r) wm(r) = mm.omega(map.masters[r]);
    double worst = 0.0;
    for (int k = 0; k < mm.size(); ++k) {
        RealPoly X2 = map.displacement[k].homogeneous(2), Y2 = map.velocity[k].homogeneous(2);
        RealPoly e1 = linear_lie(X2, wm) - Y2;
        RealPoly force = zero_poly(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                std::vector<int> d(m, 0);
                d[i] += 1;
                d[j] += 1;
                force.add(exponents(d, std::vector<int>(m, 0)), mm.g({k, map.masters[i], map.masters[j]}));
            }
        RealPoly e2 = linear_lie(Y2, wm) + X2 * (mm.omega(k) * mm.omega(k)) + force;
        // master equations keep their own quadratic dynamics in the graph style
        bool master = std::find(map.masters.begin(), map.masters.end(), k) != map.masters.end();
        if (master && map.style == "graph") continue;
        for (const auto& [e, c] : e1.terms()) worst = std::max(worst, std::abs(c));
        for (const auto& [e, c] : e2.terms()) worst = std::max(worst, std::abs(c));
    }
    return worst;
}

ModalModel three_mode() {
    VectorXd w(3);
    w << 1.0, 2.7, 4.3;
    return make_modal(w, {{0, 0, 0, 0.3}, {1, 0, 0, 0.6}, {2, 0, 0, -0.4}, {0, 1, 1, 0.2}, {2, 0, 1, 0.5}},
                      {{0, 0, 0, 0, 0.8}, {1, 0, 0, 0, 0.2}, {0, 0, 1, 1, 0.3}});
}

}  // namespace

TEST(GraphSingle, SolvesHomologicalEquation) {
    auto mm = three_mode();
    auto rom = graph_single(mm, 0);
    EXPECT_LT(homological_residual(mm, rom.map), 1e-14);
}

TEST(GraphSingle, HandComputedCoefficients) {
    auto mm = make_two_dof(1.0, 2.5, {{1, 0, 0, 0.5}}, {{0, 0, 0, 0, 1.0}});
    auto rom = graph_single(mm, 0);
    // a = (2 - 6.25) 0.5 / (6.25 * 2.25), b = 1 / (6.25 * 2.25), alpha = -1 / 2.25
    EXPECT_NEAR(rom.map.displacement[1].coeff({2, 0}), -2.125 / 14.0625, 1e-15);
    EXPECT_NEAR(rom.map.displacement[1].coeff({0, 2}), 1.0 / 14.0625, 1e-15);
    EXPECT_NEAR(rom.map.velocity[1].coeff({1, 1}), -1.0 / 2.25, 1e-15);
    EXPECT_NEAR(rom.reduced.restoring[0].coeff({3, 0}), 1.0 - 2.125 / 14.0625, 1e-15);
    EXPECT_NEAR(rom.reduced.restoring[0].coeff({1, 2}), 1.0 / 14.0625, 1e-15);
}

TEST(GraphSingle, OneToTwoResonanceIsRejected) {
    auto mm = make_two_dof(1.0, 2.0, {{1, 0, 0, 0.5}}, {});
    try {
        graph_single(mm, 0);
        FAIL() << "expected a resonance error";
    } catch (const ResonanceError& e) {
        EXPECT_NE(std::string(e.what()).find("mode 2"), std::string::npos);
    }
    auto uncoupled = make_two_dof(1.0, 2.0, {}, {{0, 0, 0, 0, 1.0}});
    EXPECT_NO_THROW(graph_single(uncoupled, 0));
}

TEST(GraphMulti, MatchesClosedFormForOneMaster) {
    auto mm = three_mode();
    auto a = graph_single(mm, 0);
    auto b = graph_multi(mm, {0});
    for (int k = 1; k < 3; ++k) {
        RealPoly d = a.map.displacement[k] - b.map.displacement[k].homogeneous(2);
        for (const auto& [e, c] : d.terms()) EXPECT_NEAR(c, 0.0, 1e-12);
    }
    RealPoly r = a.reduced.restoring[0] - b.reduced.restoring[0].truncated(3);
    for (const auto& [e, c] : r.terms()) EXPECT_NEAR(c, 0.0, 1e-12);
}

TEST(NormalForm, QuadraticMapSolvesHomologicalEquation) {
    auto mm = three_mode();
    for (auto masters : {std::vector<int>{0}, std::vector<int>{0, 1}}) {
        auto rom = nf_third_order(mm, masters);
        EXPECT_LT(homological_residual(mm, rom.map), 1e-13);
    }
}

TEST(NormalForm, ReducedDynamicsRestrictToSingleMaster) {
    auto mm = three_mode();
    auto one = nf_third_order(mm, {0}).reduced.restoring[0];
    auto two = nf_third_order(mm, {0, 1}).reduced.restoring[0];
    for (const auto& [e, c] : two.terms()) {
        if (e[1] != 0 || e[3] != 0) continue;
        EXPECT_NEAR(c, one.coeff({e[0], e[2]}), 1e-12);
    }
    for (const auto& [e, c] : one.terms()) EXPECT_NEAR(c, two.coeff({e[0], 0, e[1], 0}), 1e-12);
}

TEST(NormalForm, ResonantMastersAreRejected) {
    VectorXd w(2);
    w << 1.0, 3.0;
    auto mm = make_modal(w, {}, {{1, 0, 0, 0, 0.5}, {0, 0, 0, 0, 1.0}});
    try {
        nf_third_order(mm, {0, 1});
        FAIL() << "expected a resonance error";
    } catch (const ResonanceError& e) {
        EXPECT_NE(std::string(e.what()).find("internal resonance among masters"), std::string::npos);
    }
}

TEST(NormalForm, GammaMatchesClosedForm) {
    auto mm = three_mode();
    EXPECT_NEAR(hb_gamma(nf_third_order(mm, {0}).reduced), gamma_closed_form(mm, 0, GammaMethod::NF), 1e-12);
    EXPECT_NEAR(hb_gamma(graph_single(mm, 0).reduced), gamma_closed_form(mm, 0, GammaMethod::NF), 1e-12);
}

TEST(DirectNormalForm, AgreesWithModalNormalFormOnModalCoordinates) {
    auto mm = three_mode();
    auto dnf = dnf_second_order(as_physical(mm), {0});
    auto nf = nf_third_order(mm, {0});
    RealPoly d = dnf.rom.reduced.restoring[0] - nf.reduced.restoring[0];
    for (const auto& [e, c] : d.terms()) EXPECT_NEAR(c, 0.0, 1e-10);
    EXPECT_NEAR(dnf.omega(0), 1.0, 1e-12);
}

TEST(Equivalence, ResidualIsFourthOrder) {
    auto mm = three_mode();
    auto rep = gamma_equivalence_check(mm, 0);
    EXPECT_NEAR(rep.gamma_graph, rep.gamma_nf, 1e-12);
    EXPECT_NEAR(rep.slope, 4.0, 0.3);
}

TEST(Equivalence, VanishingSelfQuadraticGivesInfiniteSlope) {
    auto mm = make_two_dof(1.0, 2.5, {{1, 0, 0, 0.5}}, {{0, 0, 0, 0, 1.0}});
    auto rep = gamma_equivalence_check(mm, 0);
    EXPECT_TRUE(std::isinf(rep.slope));
}
