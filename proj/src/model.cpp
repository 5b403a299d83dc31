#include "nlrom/model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>

namespace nlrom {

void check_masters(int n, const std::vector<int>& masters) {
    if (masters.empty()) throw std::invalid_argument("master set is empty");
    std::set<int> seen;
    for (int m : masters) {
        if (m < 0 || m >= n) throw std::invalid_argument("master index out of range");
        if (!seen.insert(m).second) throw std::invalid_argument("duplicate master index");
    }
}

std::vector<int> complement(int n, const std::vector<int>& masters) {
    std::vector<int> out;
    for (int p = 0; p < n; ++p)
        if (std::find(masters.begin(), masters.end(), p) == masters.end()) out.push_back(p);
    return out;
}

ModalModel assemble_modal(const PhysicalModel& model, int n_modes) {
    const int n = model.n;
    if (model.mass.rows() != n || model.stiffness.rows() != n)
        throw std::invalid_argument("matrix size does not match dof count");
    if (n_modes < 1 || n_modes > n) throw std::invalid_argument("mode count out of range");

    Eigen::LLT<MatrixXd> llt(model.mass);
    if (llt.info() != Eigen::Success) throw NumericalError("mass matrix is not positive definite");

    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(model.stiffness, model.mass);
    if (es.info() != Eigen::Success) throw NumericalError("eigen solver did not converge");

    ModalModel mm;
    mm.omega.resize(n_modes);
    mm.V = es.eigenvectors().leftCols(n_modes);
    for (int k = 0; k < n_modes; ++k) {
        double w2 = es.eigenvalues()(k);
        if (w2 < 0) throw NumericalError("negative eigenvalue: stiffness is not positive semi-definite");
        mm.omega(k) = std::sqrt(w2);
        // sign convention: largest component positive
        Eigen::Index imax;
        mm.V.col(k).cwiseAbs().maxCoeff(&imax);
        if (mm.V(imax, k) < 0) mm.V.col(k) *= -1.0;
    }

    mm.g = QuadTensor(n_modes);
    mm.h = CubicTensor(n_modes);
    if (model.quad.nnz()) {
        for (int i = 0; i < n_modes; ++i)
            for (int j = i; j < n_modes; ++j) {
                VectorXd phi_i = mm.V.col(i), phi_j = mm.V.col(j);
                VectorXd w = mm.V.transpose() * quad_apply(model.quad, phi_i, phi_j);
                for (int p = 0; p <= i; ++p) mm.g.set({p, i, j}, w(p));
            }
        mm.g.prune(1e-15);
    }
    if (model.cubic.nnz()) {
        for (int i = 0; i < n_modes; ++i)
            for (int j = i; j < n_modes; ++j)
                for (int k = j; k < n_modes; ++k) {
                    VectorXd a = mm.V.col(i), b = mm.V.col(j), c = mm.V.col(k);
                    VectorXd w = mm.V.transpose() * cubic_apply(model.cubic, a, b, c);
                    for (int p = 0; p <= i; ++p) mm.h.set({p, i, j, k}, w(p));
                }
        mm.h.prune(1e-15);
    }
    return mm;
}

PhysicalModel as_physical(const ModalModel& mm) {
    PhysicalModel pm;
    pm.n = mm.size();
    pm.mass = MatrixXd::Identity(pm.n, pm.n);
    pm.stiffness = mm.omega.array().square().matrix().asDiagonal();
    pm.quad = mm.g;
    pm.cubic = mm.h;
    return pm;
}

VectorXd nonlinear_force(const PhysicalModel& model, const VectorXd& X) {
    if (X.size() != model.n) throw std::invalid_argument("displacement size mismatch");
    VectorXd f = VectorXd::Zero(model.n);
    if (model.quad.nnz()) f += quad_apply(model.quad, X, X);
    if (model.cubic.nnz()) f += cubic_apply(model.cubic, X, X, X);
    return f;
}

VectorXd nonlinear_force(const ModalModel& mm, const VectorXd& q) {
    if (q.size() != mm.size()) throw std::invalid_argument("displacement size mismatch");
    VectorXd f = VectorXd::Zero(mm.size());
    if (mm.g.nnz()) f += quad_apply(mm.g, q, q);
    if (mm.h.nnz()) f += cubic_apply(mm.h, q, q, q);
    return f;
}

VectorXd eval_internal_force(const PhysicalModel& model, const VectorXd& X) {
    return model.stiffness * X + nonlinear_force(model, X);
}

MatrixXd tangent_stiffness(const PhysicalModel& model, const VectorXd& X) {
    MatrixXd J = model.stiffness;
    for (const auto& [key, v] : model.quad.entries()) {
        auto p = key;
        do {
            J(p[0], p[1]) += 2.0 * v * X(p[2]);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    for (const auto& [key, v] : model.cubic.entries()) {
        auto p = key;
        do {
            J(p[0], p[1]) += 3.0 * v * X(p[2]) * X(p[3]);
        } while (std::next_permutation(p.begin(), p.end()));
    }
    return J;
}

double potential_energy(const PhysicalModel& model, const VectorXd& X) {
    double e = 0.5 * X.dot(model.stiffness * X);
    if (model.quad.nnz()) e += quad_apply(model.quad, X, X).dot(X) / 3.0;
    if (model.cubic.nnz()) e += cubic_apply(model.cubic, X, X, X).dot(X) / 4.0;
    return e;
}

namespace {

double matrix_asymmetry(const MatrixXd& A) {
    double s = A.norm();
    return s == 0 ? 0.0 : (A - A.transpose()).norm() / s;
}

}  // namespace

ModelSymmetryReport check_tensor_symmetry(const PhysicalModel& model, double tol) {
    ModelSymmetryReport rep;
    rep.quad = check_symmetry(to_dense(model.quad), tol);
    rep.cubic = check_symmetry(to_dense(model.cubic), tol);
    rep.mass_asymmetry = matrix_asymmetry(model.mass);
    rep.stiffness_asymmetry = matrix_asymmetry(model.stiffness);
    rep.pass = rep.quad.pass && rep.cubic.pass && rep.mass_asymmetry <= tol &&
               rep.stiffness_asymmetry <= tol;
    return rep;
}

ModelSymmetryReport check_tensor_symmetry(const ModalModel& mm, double tol) {
    ModelSymmetryReport rep;
    rep.quad = check_symmetry(to_dense(mm.g), tol);
    rep.cubic = check_symmetry(to_dense(mm.h), tol);
    rep.pass = rep.quad.pass && rep.cubic.pass;
    return rep;
}

namespace {

// x_p x_q^2 on equation p: the combination +w_p + w_q - w_q always hits w_p.
bool trivially_resonant(int eq, const std::vector<int>& modes) {
    if (modes.size() != 3) return false;
    for (int a = 0; a < 3; ++a) {
        if (modes[a] != eq) continue;
        int b = (a + 1) % 3, c = (a + 2) % 3;
        if (modes[b] == modes[c]) return true;
    }
    return false;
}

std::string relation_text(int eq, const std::vector<int>& modes, const std::vector<int>& signs) {
    std::string s = "w" + std::to_string(eq + 1) + " =";
    for (std::size_t a = 0; a < modes.size(); ++a) {
        if (a == 0)
            s += signs[a] > 0 ? " " : " -";
        else
            s += signs[a] > 0 ? " + " : " - ";
        s += "w" + std::to_string(modes[a] + 1);
    }
    return s;
}

void classify_one(const ModalModel& mm, const std::vector<int>& masters, double tol_res,
                  int eq, const std::vector<int>& modes, double coeff,
                  MonomialClassification& out) {
    MonomialInfo info;
    info.equation = eq;
    info.modes = modes;
    info.coefficient = coeff;

    auto is_master = [&](int p) {
        return std::find(masters.begin(), masters.end(), p) != masters.end();
    };
    bool all_master = std::all_of(modes.begin(), modes.end(), is_master);
    info.invariant_breaking = all_master && !is_master(eq);

    if (trivially_resonant(eq, modes)) {
        info.tag = ResonanceTag::TriviallyResonant;
        out.monomials.push_back(info);
        return;
    }

    // every sign combination of the monomial frequencies against w_eq
    const int d = int(modes.size());
    double best = 1e300;
    std::vector<int> best_signs;
    for (int mask = 0; mask < (1 << d); ++mask) {
        std::vector<int> signs(d);
        double comb = 0.0;
        for (int a = 0; a < d; ++a) {
            signs[a] = (mask >> a & 1) ? -1 : 1;
            comb += signs[a] * mm.omega(modes[a]);
        }
        double r = std::abs(comb - mm.omega(eq)) / mm.omega(eq);
        if (r < best) {
            best = r;
            best_signs = signs;
        }
    }
    if (best < tol_res) {
        info.tag = ResonanceTag::Resonant;
        out.resonances.push_back({relation_text(eq, modes, best_signs), best, eq, modes});
    }
    out.monomials.push_back(info);
}

}  // namespace

MonomialClassification classify_monomials(const ModalModel& mm, const std::vector<int>& masters,
                                          double tol_res) {
    check_masters(mm.size(), masters);
    MonomialClassification out;
    const int N = mm.size();
    for (int p = 0; p < N; ++p) {
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j) {
                double c = mm.g({p, i, j});
                if (c != 0.0) classify_one(mm, masters, tol_res, p, {i, j}, c, out);
            }
        for (int i = 0; i < N; ++i)
            for (int j = i; j < N; ++j)
                for (int k = j; k < N; ++k) {
                    double c = mm.h({p, i, j, k});
                    if (c != 0.0) classify_one(mm, masters, tol_res, p, {i, j, k}, c, out);
                }
    }
    return out;
}

int spectral_quotient(const VectorXd& decay, const std::vector<int>& masters) {
    check_masters(int(decay.size()), masters);
    std::vector<int> slaves = complement(int(decay.size()), masters);
    if (slaves.empty()) throw std::invalid_argument("spectral quotient needs at least one slave mode");
    for (int p = 0; p < decay.size(); ++p)
        if (!(decay(p) > 0)) throw std::invalid_argument("decay rates must be positive");
    double min_master = 1e300, max_slave = 0.0;
    for (int m : masters) min_master = std::min(min_master, decay(m));
    for (int s : slaves) max_slave = std::max(max_slave, decay(s));
    // guard against 5 - 1e-16 style truncation
    return int(std::floor(max_slave / min_master * (1.0 + 1e-12)));
}

}  // namespace nlrom
