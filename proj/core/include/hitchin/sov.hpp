#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hitchin/curve.hpp"
#include "hitchin/trajectory.hpp"

namespace hitchin {

/// Throws SingularSystem on repeated x, InconsistentGeometry on residuals.
void validate_configuration(const SpectralCurve& curve, const PhaseConfiguration& config, double tol = 1e-8);
/// Same check without a curve: sizes and distinct x only.
void validate_configuration(const BaseCurve& base, Family family, const PhaseConfiguration& config);

struct HamiltonianSolution {
  std::vector<CVector> solutions;  // all accepted solutions, sorted deterministically
  std::size_t chosen = 0;          // index continuous with the hint (or 0)
  const CVector& H() const { return solutions[chosen]; }
};

/// Hamiltonians through the given separating variables.
/// SL2: one linear solve. SO4: all solutions of the six quartic relations.
HamiltonianSolution solve_hamiltonians(const BaseCurve& base, Family family, const PhaseConfiguration& config,
                                       const std::optional<CVector>& hint = std::nullopt);

/// Scalar observable of (lambda, x).
using Observable = std::function<cplx(const CVector& lambda, const CVector& x)>;

/// sum_i y_i (dF/dlambda_i dG/dx_i - dG/dlambda_i dF/dx_i), derivatives by a
/// fourth-order central stencil.
cplx poisson_bracket(const Observable& F, const Observable& G, const PhaseConfiguration& config);

struct HamiltonianGradients {
  CMatrix dH_dlambda;  // (k, i) = dH_k / dlambda_i
  CMatrix dH_dx;       // (k, i) = dH_k / dx_i
  CMatrix dR_dH;       // (i, k)
};

HamiltonianGradients hamiltonian_gradients(const SpectralCurve& curve, const PhaseConfiguration& config);

/// Matrix of brackets {H_a, H_b} from the gradients.
CMatrix hamiltonian_brackets(const SpectralCurve& curve, const PhaseConfiguration& config);
double commutation_check(const SpectralCurve& curve, const PhaseConfiguration& config);

/// Flow of H_k: dx_i/dt = y_i dH_k/dlambda_i, dlambda_i/dt = -y_i dH_k/dx_i
/// (that is, df/dt = {H_k, f}). The curve carries H(config0).
TrajectoryRecord ode_flow(const SpectralCurve& curve, const PhaseConfiguration& config0, int k,
                          const std::vector<double>& times, double rel_tol = 1e-10);

/// Random configuration of h points, all within `radius` of the origin and at
/// least `clearance` from the critical x-values.
PhaseConfiguration random_configuration(const SpectralCurve& curve, unsigned seed, double radius = 1.5);

/// Random x_i and lambda_i with y_i = sqrt(P5(x_i)); the Hamiltonians are then
/// whatever solve_hamiltonians returns.
PhaseConfiguration random_free_configuration(const BaseCurve& base, Family family, unsigned seed);

}  // namespace hitchin
