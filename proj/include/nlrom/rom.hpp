#ifndef NLROM_ROM_HPP
#define NLROM_ROM_HPP

#include "nlrom/model.hpp"
#include "nlrom/poly.hpp"

#include <string>
#include <vector>

namespace nlrom {

/// Polynomial map from m master (displacement, velocity) pairs to the
/// displacement and velocity of every output coordinate. Polynomial
/// variables are ordered x_1..x_m, y_1..y_m.
struct ManifoldMap {
    std::string style;   // graph | normal-form | stress | quadratic
    std::string space;   // modal | physical
    int order = 0;
    std::vector<int> masters;
    std::vector<RealPoly> displacement;
    std::vector<RealPoly> velocity;

    int n_masters() const { return int(masters.size()); }
    int n_outputs() const { return int(displacement.size()); }
    VectorXd displacement_at(const VectorXd& x, const VectorXd& y) const;
    VectorXd velocity_at(const VectorXd& x, const VectorXd& y) const;
};

/// x_r'' + 2 xi_r w_r x_r' + w_r^2 x_r + N_r(x, x') = F_r cos(W t)
/// with N_r a polynomial in (x_1..x_m, x'_1..x'_m).
struct ReducedModel {
    std::string method;
    std::vector<int> masters;
    VectorXd omega;
    std::vector<RealPoly> restoring;
    VectorXd damping_ratio;    // empty means undamped
    VectorXd force_amplitude;  // empty means unforced
    double force_frequency = 0.0;

    int m() const { return int(omega.size()); }
    double xi(int r) const { return damping_ratio.size() ? damping_ratio(r) : 0.0; }
    bool forced() const { return force_amplitude.size() > 0 && force_amplitude.cwiseAbs().maxCoeff() > 0; }

    /// Accelerations for state (x, v) at time t; forcing frequency may be overridden.
    VectorXd acceleration(const VectorXd& x, const VectorXd& v, double t) const;
    VectorXd acceleration(const VectorXd& x, const VectorXd& v, double t, double frequency) const;
};

struct Rom {
    ManifoldMap map;
    ReducedModel reduced;
};

/// Empty polynomial over 2m variables.
RealPoly zero_poly(int m);

/// Exponent vector for x_1^d_1..x_m^d_m y_1^v_1..y_m^v_m.
Exps exponents(const std::vector<int>& disp, const std::vector<int>& vel);

/// Coefficient of a monomial in a map or reduced polynomial.
double coefficient(const RealPoly& p, const std::vector<int>& disp, const std::vector<int>& vel);

/// True when every monomial has an even total velocity exponent.
bool even_in_velocity(const RealPoly& p, int m);

/// True when no monomial contains a velocity variable.
bool velocity_free(const RealPoly& p, int m);

/// Backbone curvature of one equation of a reduced model by first-order
/// harmonic balance, with the other masters at rest. Only x^2, x'^2, x^3
/// and x x'^2 terms contribute; odd-velocity terms are rejected.
double hb_gamma(const ReducedModel& rm, int r = 0);

/// Identity map on the listed masters of an N-mode modal space.
ManifoldMap linear_modal_map(int n_modes, const std::vector<int>& masters, const std::string& style);

}  // namespace nlrom

#endif
