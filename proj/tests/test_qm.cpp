#include "helpers.hpp"
#include "nlrom/dynamics.hpp"
#include "nlrom/invariant.hpp"
#include "nlrom/qm.hpp"
#include "nlrom/zoo.hpp"

#include <gtest/gtest.h>

using namespace nlrom;

TEST(ModalDerivative, VanishesWithoutQuadraticTensor) {
    std::mt19937 rng(5);
    auto p = testutil::random_physical(4, rng);
    p.quad = QuadTensor(4);
    auto mm = assemble_modal(p, 4);
    for (auto kind : {DerivativeKind::Full, DerivativeKind::Static}) {
        auto d = modal_derivative(p, mm.V, mm.omega, 0, 1, kind);
        EXPECT_LT(d.theta.norm(), 1e-14);
    }
}

TEST(ModalDerivative, StaticDiagonalOracle) {
    VectorXd w(3);
    w << 1.0, 2.0, 3.0;
    auto mm = make_modal(w, {{2, 0, 0, 0.7}}, {});
    auto p = as_physical(mm);
    auto d = modal_derivative(p, MatrixXd::Identity(3, 3), w, 0, 0, DerivativeKind::Static);
    EXPECT_NEAR(d.theta(0), 0.0, 1e-15);
    EXPECT_NEAR(d.theta(1), 0.0, 1e-15);
    EXPECT_NEAR(d.theta(2), -1.4 / 9.0, 1e-15);
}

TEST(ModalDerivative, FullKindSolvesBorderedSystem) {
    std::mt19937 rng(6);
    auto p = testutil::random_physical(5, rng);
    auto mm = assemble_modal(p, 5);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            auto d = modal_derivative(p, mm.V, mm.omega, i, j, DerivativeKind::Full);
            VectorXd phi_i = mm.V.col(i), phi_j = mm.V.col(j);
            EXPECT_LT(std::abs(phi_i.dot(p.mass * d.theta)), 1e-12);
            VectorXd r = (p.stiffness - mm.omega(i) * mm.omega(i) * p.mass) * d.theta - d.domega2 * p.mass * phi_i +
                         2.0 * quad_apply(p.quad, phi_j, phi_i);
            EXPECT_LT(r.norm(), 1e-10);
            // the eigenvalue derivative is the projected tangent stiffness
            EXPECT_NEAR(d.domega2, 2.0 * phi_i.dot(quad_apply(p.quad, phi_j, phi_i)), 1e-10);
        }
}

TEST(QuadraticManifold, MapIsVelocityFreeAndSymmetric) {
    VectorXd w(3);
    w << 1.0, 1.6, 5.0;
    auto mm = make_modal(w, {{2, 0, 0, 0.5}, {2, 0, 1, 0.3}, {2, 1, 1, -0.2}}, {{0, 0, 0, 0, 1.0}});
    auto rom = qm_build(as_physical(mm), {0, 1}, DerivativeKind::Static);
    EXPECT_EQ(rom.map.style, "quadratic");
    for (int k = 0; k < 3; ++k) EXPECT_TRUE(velocity_free(rom.map.displacement[k], 2));
    // theta_01 = theta_10 = -2 g^2_01 / w_2^2, entering as x0 x1 with weight one
    EXPECT_NEAR(rom.map.displacement[2].coeff({1, 1, 0, 0}), -2.0 * 0.3 / 25.0, 1e-14);
    EXPECT_NEAR(rom.map.displacement[2].coeff({2, 0, 0, 0}), -0.5 / 25.0, 1e-14);
}

TEST(QuadraticManifold, WithoutQuadraticTensorIsModalTruncation) {
    VectorXd w(3);
    w << 1.0, 1.6, 5.0;
    auto mm = make_modal(w, {}, {{0, 0, 0, 0, 1.0}, {1, 0, 0, 1, 0.4}, {2, 0, 0, 0, 0.7}});
    auto rom = qm_build(as_physical(mm), {0, 1}, DerivativeKind::Full);
    EXPECT_NEAR(rom.reduced.restoring[0].coeff({3, 0, 0, 0}), 1.0, 1e-14);
    EXPECT_NEAR(rom.reduced.restoring[0].coeff({1, 2, 0, 0}), 3.0 * 0.4, 1e-14);
    EXPECT_NEAR(rom.reduced.restoring[1].coeff({2, 1, 0, 0}), 3.0 * 0.4, 1e-14);
    EXPECT_EQ(rom.reduced.restoring[1].coeff({3, 0, 0, 0}), 0.0);
}

TEST(QuadraticManifold, GammaMatchesClosedForms) {
    auto mm = make_two_dof(1.0, 4.3, {{1, 0, 0, 0.6}, {0, 1, 1, 0.2}}, {{0, 0, 0, 0, 0.8}, {1, 0, 0, 0, 0.2}});
    auto pm = as_physical(mm);
    EXPECT_NEAR(hb_gamma(qm_build(pm, {0}, DerivativeKind::Full).reduced),
                gamma_closed_form(mm, 0, GammaMethod::MD), 1e-12);
    EXPECT_NEAR(hb_gamma(qm_build(pm, {0}, DerivativeKind::Static).reduced),
                gamma_closed_form(mm, 0, GammaMethod::SMD), 1e-12);
}

TEST(QuadraticManifold, FlatBeamBackboneMatchesNormalForm) {
    BeamSpec spec;
    spec.modes = 4;
    auto mm = make_vk_beam(spec);
    auto md = qm_build(as_physical(mm), {0}, DerivativeKind::Full);
    auto nf = nf_third_order(mm, {0});
    const double g = gamma_closed_form(mm, 0, GammaMethod::NF);
    const double a = std::sqrt(0.02 / std::abs(g));
    auto b1 = backbone(md.reduced, a), b2 = backbone(nf.reduced, a);
    const double w1 = b1.points.back().omega, w2 = b2.points.back().omega;
    EXPECT_NEAR(b1.points.back().amplitude(0), b2.points.back().amplitude(0), 1e-8);
    EXPECT_LT(std::abs(w1 - w2), 0.01 * std::abs(w2 - 1.0));
}
