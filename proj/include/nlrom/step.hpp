#ifndef NLROM_STEP_HPP
#define NLROM_STEP_HPP

#include "nlrom/model.hpp"
#include "nlrom/zoo.hpp"

#include <string>
#include <vector>

namespace nlrom {

/// Prescribed amplitudes for the static load cases, one per mode in V.
struct StepPlan {
    VectorXd lambda;
    bool cubic = true;  // also identify the cubic tensor
};

struct StepResult {
    QuadTensor g;
    CubicTensor h;
    ModelSymmetryReport symmetry;  // of the raw identified coefficients
    std::vector<std::string> warnings;
    VectorXd lambda;
    int evaluations = 0;
    double check_residual = 0.0;  // relative misfit at off-plan test points
};

/// Identifies modal quadratic and cubic coefficients from static force
/// evaluations at prescribed combinations of mode shapes.
StepResult step_identify(const ForceEvaluator& force, const MatrixXd& V, const MatrixXd& M,
                         const StepPlan& plan, double symmetry_tol = 1e-9);

/// Per-mode amplitude with |f_nl(l phi)| / |K l phi| inside [lo, hi]. Modes with
/// no nonlinear force along themselves get the geometric mean of the others.
VectorXd choose_lambda(const ForceEvaluator& force, const MatrixXd& V, const MatrixXd& K,
                       double lo = 1e-3, double hi = 1e-1);

}  // namespace nlrom

#endif
