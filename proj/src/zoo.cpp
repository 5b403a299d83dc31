#include "nlrom/zoo.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>

namespace nlrom {

namespace {

template <int R, typename Entry>
void insert_checked(SymTensor<R>& t, std::map<typename SymTensor<R>::Key, double>& seen,
                    const typename SymTensor<R>::Key& key, double v) {
    auto c = SymTensor<R>::canonical(key);
    auto it = seen.find(c);
    if (it != seen.end()) {
        if (std::abs(it->second - v) > 1e-14 * std::max(1.0, std::abs(v)))
            throw std::invalid_argument("coupling entries violate index symmetry");
        return;
    }
    seen[c] = v;
    t.set(c, v);
}

}  // namespace

ModalModel make_modal(const VectorXd& omega, const std::vector<QuadEntry>& g,
                      const std::vector<CubicEntry>& h) {
    const int N = int(omega.size());
    for (int p = 0; p < N; ++p)
        if (!(omega(p) > 0)) throw std::invalid_argument("eigenfrequencies must be positive");
    ModalModel mm;
    mm.omega = omega;
    mm.V = MatrixXd::Identity(N, N);
    mm.g = QuadTensor(N);
    mm.h = CubicTensor(N);
    std::map<QuadTensor::Key, double> sg;
    std::map<CubicTensor::Key, double> sh;
    for (const auto& e : g) insert_checked<3, QuadEntry>(mm.g, sg, {e.s, e.i, e.j}, e.value);
    for (const auto& e : h) insert_checked<4, CubicEntry>(mm.h, sh, {e.s, e.i, e.j, e.k}, e.value);
    return mm;
}

ModalModel make_two_dof(double w1, double w2, const std::vector<QuadEntry>& g,
                        const std::vector<CubicEntry>& h) {
    return make_modal(Eigen::Vector2d(w1, w2), g, h);
}

void gauss_legendre(int n, double a, double b, VectorXd& nodes, VectorXd& weights) {
    // Golub-Welsch: eigenvalues of the Jacobi matrix
    MatrixXd J = MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double beta = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = J(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(J);
    nodes = 0.5 * (b - a) * (es.eigenvalues().array() + 1.0) + a;
    weights = (b - a) * es.eigenvectors().row(0).transpose().array().square();
}

double axial_coefficient(const BeamSpec& s) {
    const double c = (s.axial == AxialLaw::Stretching ? s.young * s.area : s.young * s.inertia) /
                     (2.0 * s.length);
    return c * s.thickness * s.thickness * s.length / (s.young * s.inertia * std::pow(M_PI, 4));
}

double foundation_coefficient(const BeamSpec& s) {
    return s.kappa * s.thickness * s.thickness * std::pow(s.length, 4) /
           (s.young * s.inertia * std::pow(M_PI, 4));
}

PhysicalModel beam_galerkin(BeamKind kind, const BeamSpec& spec) {
    const int n = spec.modes;
    if (n < 1) throw std::invalid_argument("mode count must be at least 1");
    for (double v : {spec.length, spec.young, spec.inertia, spec.area, spec.density, spec.thickness})
        if (!(v > 0)) throw std::invalid_argument("beam parameters must be positive");

    const int nq = spec.quadrature_points > 0 ? spec.quadrature_points : 8 * n + 40;
    VectorXd y, w;
    gauss_legendre(nq, 0.0, 1.0, y, w);

    // sqrt(2) sin(k pi y) and derivatives at the nodes
    MatrixXd psi(nq, n), dpsi(nq, n), ddpsi(nq, n);
    for (int k = 0; k < n; ++k) {
        const double kp = (k + 1) * M_PI;
        for (int q = 0; q < nq; ++q) {
            psi(q, k) = std::sqrt(2.0) * std::sin(kp * y(q));
            dpsi(q, k) = std::sqrt(2.0) * kp * std::cos(kp * y(q));
            ddpsi(q, k) = -std::sqrt(2.0) * kp * kp * std::sin(kp * y(q));
        }
    }
    const auto W = w.asDiagonal();

    PhysicalModel pm;
    pm.n = n;
    pm.mass = psi.transpose() * W * psi;
    pm.mass = 0.5 * (pm.mass + pm.mass.transpose());
    // w'''' / pi^4 projected, using (sin)'''' = (k pi)^4 sin
    MatrixXd d4 = psi;
    for (int k = 0; k < n; ++k) d4.col(k) *= std::pow(k + 1, 4);
    pm.stiffness = psi.transpose() * W * d4;
    pm.quad = QuadTensor(n);
    pm.cubic = CubicTensor(n);

    if (kind == BeamKind::Foundation) {
        const double kap = foundation_coefficient(spec);
        if (kap != 0.0) {
            DenseTensor H(n, 4);
            for (int p = 0; p < n; ++p)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int k = 0; k < n; ++k) {
                            double s = 0.0;
                            for (int q = 0; q < nq; ++q)
                                s += w(q) * psi(q, p) * psi(q, i) * psi(q, j) * psi(q, k);
                            H.at({p, i, j, k}) = kap * s;
                        }
            pm.cubic = symmetrize<4>(H);
            pm.cubic.prune(1e-14);
        }
    } else {
        const double eps = axial_coefficient(spec);
        const double W0 = kind == BeamKind::ShallowArch ? spec.w0 / spec.thickness : 0.0;
        MatrixXd D = dpsi.transpose() * W * dpsi;     // int psi_i' psi_j'
        MatrixXd Pm = psi.transpose() * W * ddpsi;    // int psi_p psi_k''
        VectorXd d0 = VectorXd::Zero(n), p0 = VectorXd::Zero(n);
        if (W0 != 0.0) {
            VectorXd dw0(nq), ddw0(nq);
            for (int q = 0; q < nq; ++q) {
                dw0(q) = W0 * M_PI * std::cos(M_PI * y(q));
                ddw0(q) = -W0 * M_PI * M_PI * std::sin(M_PI * y(q));
            }
            d0 = dpsi.transpose() * W * dw0;
            p0 = psi.transpose() * W * ddw0;
        }
        // N = eps (q'Dq + 2 d0'q), force = -N (Pm q + p0)
        MatrixXd lin = -eps * (p0 * d0.transpose() + d0 * p0.transpose());
        pm.stiffness += lin;
        pm.stiffness = 0.5 * (pm.stiffness + pm.stiffness.transpose());

        DenseTensor G(n, 3), H(n, 4);
        for (int p = 0; p < n; ++p)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    G.at({p, i, j}) = -eps * (D(i, j) * p0(p) + d0(i) * Pm(p, j) + d0(j) * Pm(p, i));
                    for (int k = 0; k < n; ++k)
                        H.at({p, i, j, k}) =
                            -eps * (D(i, j) * Pm(p, k) + D(i, k) * Pm(p, j) + D(j, k) * Pm(p, i)) / 3.0;
                }
        if (W0 != 0.0) {
            pm.quad = symmetrize<3>(G);
            pm.quad.prune(1e-13);
        }
        if (eps != 0.0) {
            pm.cubic = symmetrize<4>(H);
            pm.cubic.prune(1e-13);
        }
    }
    return pm;
}

ModalModel make_vk_beam(const BeamSpec& spec) {
    return assemble_modal(beam_galerkin(BeamKind::VonKarman, spec), spec.modes);
}

ModalModel make_foundation_beam(const BeamSpec& spec) {
    return assemble_modal(beam_galerkin(BeamKind::Foundation, spec), spec.modes);
}

ModalModel make_shallow_arch(const BeamSpec& spec) {
    return assemble_modal(beam_galerkin(BeamKind::ShallowArch, spec), spec.modes);
}

ForceEvaluator as_blackbox(const PhysicalModel& model) {
    return [model](const VectorXd& X) { return nonlinear_force(model, X); };
}

ForceEvaluator as_blackbox(const ModalModel& mm) {
    return [mm](const VectorXd& q) { return nonlinear_force(mm, q); };
}

}  // namespace nlrom
