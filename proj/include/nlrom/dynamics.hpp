#ifndef NLROM_DYNAMICS_HPP
#define NLROM_DYNAMICS_HPP

#include "nlrom/model.hpp"
#include "nlrom/rom.hpp"

#include <string>
#include <vector>

namespace nlrom {

// ---- time integration -------------------------------------------------------

struct Trajectory {
    std::vector<double> t;
    MatrixXd x;  // one row per stored time
    MatrixXd v;
};

/// Fixed-step RK4 on the first-order form; stores every `stride`-th step.
Trajectory integrate(const PhysicalModel& model, const VectorXd& x0, const VectorXd& v0, double t_end, double dt,
                     int stride = 1);
Trajectory integrate(const ModalModel& mm, const VectorXd& q0, const VectorXd& v0, double t_end, double dt,
                     int stride = 1);
Trajectory integrate(const ReducedModel& rm, const VectorXd& x0, const VectorXd& v0, double t_end, double dt,
                     int stride = 1);

// ---- backbone curvature -----------------------------------------------------

enum class GammaMethod { NF, ICE, MD, SMD };

GammaMethod parse_gamma_method(const std::string& name);
std::string to_string(GammaMethod method);

/// Gamma = common + summed, where `summed` holds the slave contributions.
struct GammaTerms {
    double common = 0.0;
    double summed = 0.0;
    double total() const { return common + summed; }
};

GammaTerms gamma_terms(const ModalModel& mm, int m, GammaMethod method, double tol = 1e-3);
double gamma_closed_form(const ModalModel& mm, int m, GammaMethod method, double tol = 1e-3);

// ---- continuation -----------------------------------------------------------

struct CurvePoint {
    double omega = 0.0;
    VectorXd amplitude;  // max over one period, per master
    bool stable = true;
    std::string tag = "none";  // none | SN | PF | NS-candidate
};

struct Curve {
    std::string method;
    std::vector<CurvePoint> points;
    double max_residual = 0.0;  // largest harmonic-balance residual at converged points
};

struct HbOptions {
    int harmonics = 7;
    int target_iterations = 3;
    int max_iterations = 15;
    int max_steps = 5000;
    double tol = 1e-12;
    double ds_initial = 0.0;  // 0 picks a value from the amplitude scale
    double ds_min = 0.0;
    double ds_max = 0.0;
    bool stability = true;
};

/// Free conservative periodic orbits of the first master, from small
/// amplitude until the max displacement reaches a_max.
Curve backbone(const ReducedModel& rm, double a_max, const HbOptions& opt = {});

/// Forced damped response over [omega_min, omega_max]; reverse starts at omega_max.
Curve frf(const ReducedModel& rm, double omega_min, double omega_max, const HbOptions& opt = {},
          bool reverse = false);

/// Fits w = c0 + c1 a^2 + c2 a^3 + c3 a^4 on points with a <= a_fit and returns c1 / c0.
double gamma_from_backbone(const Curve& curve, double a_fit);

// ---- manifold comparison ----------------------------------------------------

struct ManifoldDistance {
    std::vector<double> amplitudes;
    std::vector<double> zero_velocity;  // slave discrepancy on the y = 0 slice
    std::vector<double> full_circle;    // on x = A cos t, y = -A w sin t
};

/// Slave outputs: non-master modes for modal maps, every output for physical ones.
ManifoldDistance compare_manifolds(const ManifoldMap& a, const ManifoldMap& b, const VectorXd& omega,
                                   const std::vector<double>& amplitudes, int samples = 64);

}  // namespace nlrom

#endif
