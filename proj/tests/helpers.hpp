#ifndef NLROM_TEST_HELPERS_HPP
#define NLROM_TEST_HELPERS_HPP

#include "nlrom/model.hpp"
#include "nlrom/zoo.hpp"

#include <random>
#include <vector>

namespace testutil {

using nlrom::MatrixXd;
using nlrom::VectorXd;

/// Random symmetric positive definite matrix with eigenvalues in [lo, hi].
inline MatrixXd random_spd(int n, double lo, double hi, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), e(lo, hi);
    MatrixXd A = MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
    Eigen::HouseholderQR<MatrixXd> qr(A);
    MatrixXd Q = qr.householderQ();
    VectorXd d = VectorXd::NullaryExpr(n, [&] { return e(rng); });
    MatrixXd S = Q * d.asDiagonal() * Q.transpose();
    return 0.5 * (S + S.transpose());
}

/// Physical model with random SPD mass and stiffness and dense random tensors.
inline nlrom::PhysicalModel random_physical(int n, std::mt19937& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    nlrom::PhysicalModel p;
    p.n = n;
    p.mass = random_spd(n, 0.5, 2.0, rng);
    p.stiffness = random_spd(n, 1.0, 20.0, rng);
    p.quad = nlrom::QuadTensor(n);
    p.cubic = nlrom::CubicTensor(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = j; k < n; ++k) {
                p.quad.set({i, j, k}, scale * u(rng));
                for (int l = k; l < n; ++l) p.cubic.set({i, j, k, l}, scale * u(rng));
            }
    return p;
}

/// Naive dense contraction out_s = sum_ij T[s][i][j] x_i y_j.
inline VectorXd dense_quad(const std::vector<double>& d, int n, const VectorXd& x, const VectorXd& y) {
    VectorXd out = VectorXd::Zero(n);
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out(s) += d[(s * n + i) * n + j] * x(i) * y(j);
    return out;
}

inline VectorXd dense_cubic(const std::vector<double>& d, int n, const VectorXd& x, const VectorXd& y,
                            const VectorXd& z) {
    VectorXd out = VectorXd::Zero(n);
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) out(s) += d[((s * n + i) * n + j) * n + k] * x(i) * y(j) * z(k);
    return out;
}

}  // namespace testutil

#endif
