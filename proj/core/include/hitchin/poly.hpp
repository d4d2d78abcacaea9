#pragma once

#include <array>
#include <span>
#include <vector>

#include "hitchin/types.hpp"

namespace hitchin::poly {

// Coefficients are stored in ascending order: c[0] + c[1] x + ...

inline cplx eval(std::span<const cplx> c, cplx x) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

inline cplx eval_derivative(std::span<const cplx> c, cplx x) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * c[k];
  return acc;
}

std::vector<cplx> derivative(std::span<const cplx> c);

/// Both roots of a x^2 + b x + c, computed without cancellation.
std::array<cplx, 2> quadratic_roots(cplx a, cplx b, cplx c);

/// All roots of a polynomial with nonzero leading coefficient, from the
/// companion-matrix eigenvalues followed by Newton polishing.
std::vector<cplx> roots(std::span<const cplx> c);

/// "Double root" tolerance used throughout: 1e-8 * (1 + max|root|).
double coincidence_tolerance(std::span<const cplx> roots);

/// Smallest pairwise distance in a set of complex numbers (infinity if < 2).
double min_separation(std::span<const cplx> pts);

/// Monic polynomial with the given roots, ascending coefficients.
std::vector<cplx> from_roots(std::span<const cplx> roots);

}  // namespace hitchin::poly
