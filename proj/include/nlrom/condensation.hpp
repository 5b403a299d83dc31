#ifndef NLROM_CONDENSATION_HPP
#define NLROM_CONDENSATION_HPP

#include "nlrom/model.hpp"
#include "nlrom/rom.hpp"

#include <vector>

namespace nlrom {

struct NewtonOptions {
    double tol = 1e-12;  // on the residual norm, relative to the load
    int max_iter = 30;
    int max_halvings = 12;
};

/// Solves K X + f_nl(X) = F by Newton iterations with load stepping,
/// starting from X0. Throws NumericalError when the load cannot be reached.
VectorXd static_solve(const PhysicalModel& model, const VectorXd& load, const VectorXd& X0,
                      const NewtonOptions& opt = {});

struct IceSample {
    VectorXd beta;      // load factor per master
    VectorXd x_master;  // modal back-projection on the masters
    VectorXd X;         // full static solution
};

struct IceSamples {
    std::vector<int> masters;
    VectorXd omega;  // master frequencies
    MatrixXd phi;    // master mode shapes
    std::vector<IceSample> samples;
};

/// Static solutions under body forces sum_r beta_r M phi_r, one per row of betas.
IceSamples ice_sample(const PhysicalModel& model, const std::vector<int>& masters,
                      const std::vector<VectorXd>& betas, const NewtonOptions& opt = {});

/// Symmetric grid of `points` load levels per master (tensor product for
/// two masters), scaled so that the largest |x_r| on each axis equals amp_target.
IceSamples ice_sample_target(const PhysicalModel& model, const std::vector<int>& masters, double amp_target,
                             int points = 21, const NewtonOptions& opt = {});

struct IceFit {
    Rom rom;
    double fit_residual = 0.0;  // max |beta - fit| relative to max |beta|
    double beta_max = 0.0;
};

/// Least-squares polynomial fit of the load factors (and of every
/// displacement component, giving the stress manifold) in the master coordinates.
IceFit ice_fit(const IceSamples& samples, int order = 3);

/// Explicit third-order condensation of the slaves on one master mode.
Rom static_condensation_third(const ModalModel& mm, int m);

/// (rho^2 - 8/3) / (rho^2 - 4).
double correction_factor(double rho);

}  // namespace nlrom

#endif
