#ifndef NLROM_PARAMETRISATION_HPP
#define NLROM_PARAMETRISATION_HPP

#include "nlrom/model.hpp"
#include "nlrom/poly.hpp"
#include "nlrom/rom.hpp"

#include <string>
#include <vector>

namespace nlrom {

/// First-order form of the modal equations in eigen-coordinates.
/// Coordinate 2p is the (+) and 2p+1 the (-) eigen-coordinate of mode p,
/// with x_p = z_2p + z_2p+1 and x_p' = l+ z_2p + l- z_2p+1.
struct DiagonalSystem {
    ModalModel modal;
    Eigen::VectorXcd lambda;  // 2N eigenvalues
    Eigen::MatrixXcd P;       // (x; x') = P z

    int n_modes() const { return modal.size(); }
    /// Full vector field in eigen-coordinates.
    Eigen::VectorXcd field(const Eigen::VectorXcd& z) const;
    /// Nonlinear part only.
    Eigen::VectorXcd nonlinear(const Eigen::VectorXcd& z) const;
};

DiagonalSystem diagonalize(const ModalModel& mm);

enum class Style { Graph, NormalForm };

struct Parametrisation {
    Style style = Style::Graph;
    int order = 1;
    std::vector<int> masters;
    Eigen::VectorXcd lambda_master;  // eigenvalues of the 2m master coordinates
    std::vector<ComplexPoly> W;      // 2N components over 2m variables
    std::vector<ComplexPoly> f;      // 2m components
    std::vector<std::string> resonance_log;

    int n_vars() const { return int(lambda_master.size()); }
};

struct ParametriseOptions {
    double near_resonance = 1e-3;  // relative divisor threshold
    int max_order = 9;
};

/// Order-by-order solution of the invariance equation F(W(s)) = DW(s) f(s).
Parametrisation parametrise(const DiagonalSystem& sys, const std::vector<int>& masters, int order,
                            Style style, const ParametriseOptions& opt = {});

/// max_s |F(W(s)) - DW(s) f(s)| over rings of master states with modal
/// displacement amplitude a, one value per amplitude.
std::vector<double> invariance_residual(const Parametrisation& par, const DiagonalSystem& sys,
                                        const std::vector<double>& amplitudes, int samples = 16);

/// Least-squares slope of log(residual) against log(amplitude).
double loglog_slope(const std::vector<double>& amplitudes, const std::vector<double>& residuals);

/// Drops every term of W whose degree equals k (used to probe residual orders).
Parametrisation without_order(Parametrisation par, int k);

/// Real form: modal map in master variables and reduced oscillator equations,
/// truncated at the parametrisation order.
Rom to_real_form(const Parametrisation& par, const DiagonalSystem& sys, const std::string& method);

}  // namespace nlrom

#endif
