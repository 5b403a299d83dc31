#ifndef NLROM_MODEL_HPP
#define NLROM_MODEL_HPP

#include "nlrom/tensor.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace nlrom {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Failure of a numerical procedure (singular solve, divergence, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Internal or cross resonance that invalidates a reduction.
struct ResonanceError : NumericalError {
    using NumericalError::NumericalError;
};

/// M X'' + K X + G(X,X) + H(X,X,X) = 0.
struct PhysicalModel {
    int n = 0;
    MatrixXd mass;
    MatrixXd stiffness;
    QuadTensor quad;
    CubicTensor cubic;
};

/// q_p'' + 2 xi_p w_p q_p' + w_p^2 q_p + g^p(q,q) + h^p(q,q,q) = 0,
/// with mass-normalised eigenvectors in V.
struct ModalModel {
    VectorXd omega;
    MatrixXd V;
    QuadTensor g;
    CubicTensor h;
    VectorXd damping_ratio;  // empty means conservative

    int size() const { return int(omega.size()); }
    double xi(int p) const { return damping_ratio.size() ? damping_ratio(p) : 0.0; }
};

/// Lowest n_modes eigenpairs, mass normalised, with projected tensors.
ModalModel assemble_modal(const PhysicalModel& model, int n_modes);

/// The modal model seen as a physical one: M = I, K = diag(w^2).
PhysicalModel as_physical(const ModalModel& mm);

/// K X + G(X,X) + H(X,X,X).
VectorXd eval_internal_force(const PhysicalModel& model, const VectorXd& X);

/// G(X,X) + H(X,X,X).
VectorXd nonlinear_force(const PhysicalModel& model, const VectorXd& X);

/// g(q,q) + h(q,q,q) in modal coordinates.
VectorXd nonlinear_force(const ModalModel& mm, const VectorXd& q);

/// Jacobian of the internal force, K + 2G(., X) + 3H(., X, X).
MatrixXd tangent_stiffness(const PhysicalModel& model, const VectorXd& X);

/// 1/2 X'KX + 1/3 G(X,X).X + 1/4 H(X,X,X).X
double potential_energy(const PhysicalModel& model, const VectorXd& X);

struct ModelSymmetryReport {
    SymmetryReport quad;
    SymmetryReport cubic;
    double mass_asymmetry = 0.0;
    double stiffness_asymmetry = 0.0;
    bool pass = true;
};

ModelSymmetryReport check_tensor_symmetry(const PhysicalModel& model, double tol);
ModelSymmetryReport check_tensor_symmetry(const ModalModel& mm, double tol);

enum class ResonanceTag { TriviallyResonant, Resonant, NonResonant };

struct MonomialInfo {
    int equation = 0;
    std::vector<int> modes;  // sorted mode indices of the monomial
    double coefficient = 0.0;
    ResonanceTag tag = ResonanceTag::NonResonant;
    bool invariant_breaking = false;
};

struct ResonanceRelation {
    std::string relation;  // e.g. "w2 = w1 + w1" (1-based mode numbers)
    double residual = 0.0;  // |combination - w_j| / w_j
    int equation = 0;
    std::vector<int> modes;
};

struct MonomialClassification {
    std::vector<MonomialInfo> monomials;
    std::vector<ResonanceRelation> resonances;
};

/// Tags every quadratic and cubic monomial of the modal equations.
MonomialClassification classify_monomials(const ModalModel& mm, const std::vector<int>& masters,
                                          double tol_res = 1e-2);

/// Int(max slave decay rate / min master decay rate).
int spectral_quotient(const VectorXd& decay, const std::vector<int>& masters);

/// Remaining mode indices, ascending.
std::vector<int> complement(int n, const std::vector<int>& masters);

/// Throws std::invalid_argument on empty, duplicate or out-of-range masters.
void check_masters(int n, const std::vector<int>& masters);

}  // namespace nlrom

#endif
