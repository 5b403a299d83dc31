#ifndef NLROM_QM_HPP
#define NLROM_QM_HPP

#include "nlrom/model.hpp"
#include "nlrom/rom.hpp"

#include <vector>

namespace nlrom {

enum class DerivativeKind { Full, Static };

struct ModalDerivative {
    VectorXd theta;
    double domega2 = 0.0;  // eigenvalue derivative, full kind only
};

/// Derivative of mode i with respect to the amplitude of mode j.
/// Full: (K - w_i^2 M) theta - d(w_i^2) M phi_i = -2 G(phi_j, phi_i) with phi_i' M theta = 0.
/// Static: K theta = -2 G(phi_j, phi_i).
ModalDerivative modal_derivative(const PhysicalModel& model, const MatrixXd& V, const VectorXd& omega, int i, int j,
                                 DerivativeKind kind);

/// Quadratic manifold X = Phi x + 1/2 sum theta_ij x_i x_j with symmetrised
/// derivatives, and its Galerkin-projected reduced dynamics truncated at order 3.
Rom qm_build(const PhysicalModel& model, const std::vector<int>& masters, DerivativeKind kind);

}  // namespace nlrom

#endif
