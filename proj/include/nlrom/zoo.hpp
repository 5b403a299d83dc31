#ifndef NLROM_ZOO_HPP
#define NLROM_ZOO_HPP

#include "nlrom/model.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nlrom {

struct QuadEntry {
    int s, i, j;
    double value;
};

struct CubicEntry {
    int s, i, j, k;
    double value;
};

/// Two modal oscillators with user-supplied couplings. Entries may be given
/// in any index order; unspecified permutations follow by symmetry, and
/// conflicting values for the same index set are rejected.
ModalModel make_two_dof(double w1, double w2, const std::vector<QuadEntry>& g,
                        const std::vector<CubicEntry>& h);

/// Same for N modes.
ModalModel make_modal(const VectorXd& omega, const std::vector<QuadEntry>& g,
                      const std::vector<CubicEntry>& h);

/// Axial force law for the beam models: ES/(2l) is the usual stretching
/// coefficient, EI/(2l) the alternative form.
enum class AxialLaw { Stretching, Bending };

/// Simply supported beam data. Outputs are scaled so that the flat-beam
/// fundamental frequency is 1 and displacements are in thickness units.
struct BeamSpec {
    int modes = 1;
    double length = 1.0;
    double young = 1.0;
    double inertia = 1.0 / 12.0;  // second moment of area
    double area = 1.0;
    double density = 1.0;
    double thickness = 1.0;
    double kappa = 0.0;  // cubic foundation stiffness per unit length
    double w0 = 0.0;     // arch rise, w0 sin(pi y / l)
    AxialLaw axial = AxialLaw::Stretching;
    int quadrature_points = 0;  // 0 selects a count from the mode number
};

enum class BeamKind { VonKarman, Foundation, ShallowArch };

/// Galerkin model on the sine basis (mass matrix is the identity).
PhysicalModel beam_galerkin(BeamKind kind, const BeamSpec& spec);

ModalModel make_vk_beam(const BeamSpec& spec);
ModalModel make_foundation_beam(const BeamSpec& spec);
ModalModel make_shallow_arch(const BeamSpec& spec);

/// Nondimensional axial coupling and foundation coefficients used by the generators.
double axial_coefficient(const BeamSpec& spec);
double foundation_coefficient(const BeamSpec& spec);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, VectorXd& nodes, VectorXd& weights);

using ForceEvaluator = std::function<VectorXd(const VectorXd&)>;

/// X -> G(X,X) + H(X,X,X), hiding the tensors.
ForceEvaluator as_blackbox(const PhysicalModel& model);
ForceEvaluator as_blackbox(const ModalModel& mm);

}  // namespace nlrom

#endif
