#ifndef NLROM_INVARIANT_HPP
#define NLROM_INVARIANT_HPP

#include "nlrom/model.hpp"
#include "nlrom/rom.hpp"

#include <map>
#include <utility>
#include <vector>

namespace nlrom {

/// Relative tolerance of the second-order resonance guards, |w_k - (w_i +- w_j)| / w_k.
inline constexpr double kResonanceTol = 1e-3;

/// Graph-style manifold of one master mode with its cubic reduced dynamics.
Rom graph_single(const ModalModel& mm, int m, double tol = kResonanceTol);

/// Graph-style manifold of several masters, third order, from the parametrisation engine.
Rom graph_multi(const ModalModel& mm, const std::vector<int>& masters);

/// Quadratic coefficients of the real normal form change of coordinates:
/// x_k = R_k + sum a^k_ij R_i R_j + b^k_ij S_i S_j, y_k = S_k + sum c^k_ij R_i S_j,
/// stored for every mode k and master pair (i, j).
struct NfQuadratic {
    std::vector<int> masters;
    std::map<std::pair<int, int>, VectorXd> a, b, gamma;  // keyed by (i, j) ordered
};

NfQuadratic nf_quadratic(const ModalModel& mm, const std::vector<int>& masters, double tol = kResonanceTol);

/// Third-order normal form reduced dynamics on the master set.
Rom nf_third_order(const ModalModel& mm, const std::vector<int>& masters, double tol = kResonanceTol);

struct DnfResult {
    Rom rom;
    MatrixXd phi;      // master eigenvectors
    VectorXd omega;    // master frequencies
    std::map<std::pair<int, int>, VectorXd> a, b, gamma;  // physical vectors, keyed by master positions
};

/// Second-order normal form computed from M, K and G using master eigenpairs only.
DnfResult dnf_second_order(const PhysicalModel& model, const std::vector<int>& masters,
                           double tol = kResonanceTol);

struct EquivalenceReport {
    double gamma_graph = 0.0;
    double gamma_nf = 0.0;
    double max_coefficient_gap = 0.0;  // slave quadratic geometry, graph vs normal form
    std::vector<double> amplitudes;
    std::vector<double> residuals;
    double slope = 0.0;
};

/// Maps the normal-form flow through the normal coordinate change and
/// measures how far it is from satisfying the graph-style reduced dynamics.
/// The slope is infinite when the residual vanishes identically, which
/// happens when the master has no self-quadratic term.
EquivalenceReport gamma_equivalence_check(const ModalModel& mm, int m);

}  // namespace nlrom

#endif
