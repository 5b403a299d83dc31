#include "nlrom/qm.hpp"

#include <Eigen/Eigenvalues>

namespace nlrom {

namespace {

using PolyVec = std::vector<RealPoly>;

RealPoly var(int m, int v) { return RealPoly::variable(2 * m, v); }

// sum_d w_d p_d
RealPoly dot(const VectorXd& w, const PolyVec& p, int m) {
    RealPoly out = zero_poly(m);
    for (int d = 0; d < int(p.size()); ++d)
        if (w(d) != 0.0) out += p[d] * w(d);
    return out;
}

}  // namespace

ModalDerivative modal_derivative(const PhysicalModel& model, const MatrixXd& V, const VectorXd& omega, int i, int j,
                                 DerivativeKind kind) {
    const int n = model.n;
    VectorXd pi = V.col(i), pj = V.col(j);
    VectorXd rhs = -2.0 * quad_apply(model.quad, pj, pi);
    ModalDerivative md;
    if (kind == DerivativeKind::Static) {
        Eigen::FullPivLU<MatrixXd> lu(model.stiffness);
        if (!lu.isInvertible()) throw NumericalError("singular stiffness matrix in static modal derivative");
        md.theta = lu.solve(rhs);
        return md;
    }
    MatrixXd B = MatrixXd::Zero(n + 1, n + 1);
    VectorXd Mphi = model.mass * pi;
    B.topLeftCorner(n, n) = model.stiffness - omega(i) * omega(i) * model.mass;
    B.topRightCorner(n, 1) = -Mphi;
    B.bottomLeftCorner(1, n) = Mphi.transpose();
    Eigen::FullPivLU<MatrixXd> lu(B);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        throw NumericalError("singular bordered system in modal derivative of mode " + std::to_string(i + 1));
    VectorXd r(n + 1);
    r << rhs, 0.0;
    VectorXd sol = lu.solve(r);
    md.theta = sol.head(n);
    md.domega2 = sol(n);
    return md;
}

Rom qm_build(const PhysicalModel& model, const std::vector<int>& masters, DerivativeKind kind) {
    const int n = model.n;
    check_masters(n, masters);
    const int m = int(masters.size());
    int top = *std::max_element(masters.begin(), masters.end()) + 1;
    ModalModel lin = assemble_modal(
        PhysicalModel{model.n, model.mass, model.stiffness, QuadTensor(n), CubicTensor(n)}, top);
    MatrixXd phi(n, m);
    VectorXd w(m);
    for (int a = 0; a < m; ++a) {
        phi.col(a) = lin.V.col(masters[a]);
        w(a) = lin.omega(masters[a]);
    }

    std::vector<std::vector<VectorXd>> th(m, std::vector<VectorXd>(m));
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            th[a][b] = modal_derivative(model, lin.V, lin.omega, masters[a], masters[b], kind).theta;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) th[a][b] = th[b][a] = 0.5 * (th[a][b] + th[b][a]);

    const MatrixXd& M = model.mass;
    const MatrixXd& K = model.stiffness;

    // displacement map and its velocity
    Rom rom;
    ManifoldMap& map = rom.map;
    map.style = "quadratic";
    map.space = "physical";
    map.order = 2;
    map.masters = masters;
    map.displacement.assign(n, zero_poly(m));
    map.velocity.assign(n, zero_poly(m));
    for (int d = 0; d < n; ++d) {
        for (int a = 0; a < m; ++a) {
            map.displacement[d] += var(m, a) * phi(d, a);
            map.velocity[d] += var(m, m + a) * phi(d, a);
            for (int b = 0; b < m; ++b) {
                map.displacement[d] += var(m, a).mul(var(m, b)) * (0.5 * th[a][b](d));
                map.velocity[d] += var(m, a).mul(var(m, m + b)) * th[a][b](d);
            }
        }
    }

    // M sum theta_ab y_a y_b + K X + G(X,X) + H(X,X,X), to third order
    PolyVec R(n, zero_poly(m));
    auto add_vec = [&](const VectorXd& v, const RealPoly& mono) {
        for (int d = 0; d < n; ++d)
            if (v(d) != 0.0) R[d] += mono * v(d);
    };
    for (int a = 0; a < m; ++a) {
        VectorXd pa = phi.col(a);
        add_vec(K * pa, var(m, a));
        for (int b = 0; b < m; ++b) {
            VectorXd pb = phi.col(b);
            RealPoly xab = var(m, a).mul(var(m, b));
            add_vec(M * th[a][b], var(m, m + a).mul(var(m, m + b)));
            add_vec(0.5 * (K * th[a][b]) + quad_apply(model.quad, pa, pb), xab);
            for (int c = 0; c < m; ++c) {
                VectorXd pc = phi.col(c);
                RealPoly xabc = xab.mul(var(m, c));
                add_vec(quad_apply(model.quad, pa, th[b][c]) + cubic_apply(model.cubic, pa, pb, pc), xabc);
            }
        }
    }

    // projection on the tangent space: Q_b = P_b' R
    PolyVec Q(m, zero_poly(m));
    for (int b = 0; b < m; ++b) {
        Q[b] = dot(phi.col(b), R, m);
        for (int a = 0; a < m; ++a) Q[b] += var(m, a).mul(dot(th[a][b], R, m), 3);
    }

    // reduced mass P'MP = I + E, inverted to second order
    std::vector<PolyVec> E(m, PolyVec(m, zero_poly(m)));
    for (int b = 0; b < m; ++b)
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a) {
                double lin1 = phi.col(b).dot(M * th[a][c]) + th[a][b].dot(M * phi.col(c));
                E[b][c] += var(m, a) * lin1;
                for (int d = 0; d < m; ++d)
                    E[b][c] += var(m, a).mul(var(m, d)) * th[a][b].dot(M * th[d][c]);
            }

    ReducedModel& rm = rom.reduced;
    rm.method = kind == DerivativeKind::Full ? "qm-md" : "qm-smd";
    rm.masters = masters;
    rm.omega = w;
    rm.restoring.assign(m, zero_poly(m));
    for (int r = 0; r < m; ++r) {
        // acc_r = -(Q_r - E_rc Q_c + E_rd E_dc Q_c)
        RealPoly inv_q = Q[r];
        for (int c = 0; c < m; ++c) {
            inv_q -= E[r][c].mul(Q[c], 3);
            for (int d = 0; d < m; ++d) inv_q += E[r][d].mul(E[d][c], 2).mul(Q[c], 3);
        }
        inv_q -= var(m, r) * (w(r) * w(r));
        inv_q.prune(1e-14 * std::max(1.0, w(r) * w(r)));
        rm.restoring[r] = inv_q;
    }
    return rom;
}

}  // namespace nlrom
