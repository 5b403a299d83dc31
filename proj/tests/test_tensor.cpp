#include "helpers.hpp"
#include "nlrom/tensor.hpp"

#include <gtest/gtest.h>

using namespace nlrom;

TEST(SymTensor, PermutedIndicesShareOneEntry) {
    QuadTensor g(3);
    g.set({2, 0, 1}, 0.5);
    EXPECT_EQ(g.nnz(), 1u);
    EXPECT_EQ(g({0, 1, 2}), 0.5);
    EXPECT_EQ(g({1, 2, 0}), 0.5);
    g.add({1, 0, 2}, 0.25);
    EXPECT_EQ(g({2, 1, 0}), 0.75);
    g.set({0, 2, 1}, 0.0);
    EXPECT_EQ(g.nnz(), 0u);
}

TEST(SymTensor, OutOfRangeIndexThrows) {
    CubicTensor h(2);
    EXPECT_THROW(h.set({0, 0, 0, 2}, 1.0), std::out_of_range);
    EXPECT_THROW(h.set({-1, 0, 0, 0}, 1.0), std::out_of_range);
}

TEST(SymTensor, ContractionMatchesDenseLoops) {
    std::mt19937 rng(7);
    const int n = 4;
    auto p = testutil::random_physical(n, rng);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorXd x = VectorXd::NullaryExpr(n, [&] { return u(rng); });
    VectorXd y = VectorXd::NullaryExpr(n, [&] { return u(rng); });
    VectorXd z = VectorXd::NullaryExpr(n, [&] { return u(rng); });
    VectorXd gq = quad_apply(p.quad, x, y);
    VectorXd gd = testutil::dense_quad(p.quad.dense(), n, x, y);
    EXPECT_LT((gq - gd).norm(), 1e-13 * gd.norm());
    VectorXd hq = cubic_apply(p.cubic, x, y, z);
    VectorXd hd = testutil::dense_cubic(p.cubic.dense(), n, x, y, z);
    EXPECT_LT((hq - hd).norm(), 1e-13 * hd.norm());
}

TEST(SymTensor, ContractionIsSymmetricInArguments) {
    std::mt19937 rng(8);
    const int n = 3;
    auto p = testutil::random_physical(n, rng);
    VectorXd x = VectorXd::Random(n), y = VectorXd::Random(n), z = VectorXd::Random(n);
    EXPECT_LT((quad_apply(p.quad, x, y) - quad_apply(p.quad, y, x)).norm(), 1e-14);
    EXPECT_LT((cubic_apply(p.cubic, x, y, z) - cubic_apply(p.cubic, z, x, y)).norm(), 1e-13);
}

TEST(SymTensor, PruneIsRelative) {
    QuadTensor g(2);
    g.set({0, 0, 0}, 100.0);
    g.set({0, 0, 1}, 1e-9);
    g.set({1, 1, 1}, 1e-3);
    g.prune(1e-8);
    EXPECT_EQ(g.nnz(), 2u);
    EXPECT_EQ(g({0, 1, 0}), 0.0);
}

TEST(DenseTensor, SymmetryCheckFindsViolation) {
    DenseTensor t(2, 3);
    t.at({0, 0, 1}) = 1.0;
    t.at({0, 1, 0}) = 1.0;
    t.at({1, 0, 0}) = 1.5;
    auto rep = check_symmetry(t, 1e-9);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.max_violation, 0.5 / 1.5, 1e-12);
    ASSERT_FALSE(rep.violations.empty());
}

TEST(DenseTensor, SymmetrizeAveragesPermutations) {
    DenseTensor t(2, 3);
    t.at({0, 0, 1}) = 1.0;
    t.at({0, 1, 0}) = 2.0;
    t.at({1, 0, 0}) = 3.0;
    QuadTensor g = symmetrize<3>(t);
    EXPECT_NEAR(g({0, 0, 1}), 2.0, 1e-15);
    EXPECT_TRUE(check_symmetry(to_dense(g), 1e-12).pass);
}

TEST(DenseTensor, RoundTripThroughSymmetricStorage) {
    std::mt19937 rng(9);
    auto p = testutil::random_physical(3, rng);
    CubicTensor h = symmetrize<4>(to_dense(p.cubic));
    EXPECT_EQ(h.nnz(), p.cubic.nnz());
    for (const auto& [k, v] : p.cubic.entries()) EXPECT_NEAR(h(k), v, 1e-15);
}
