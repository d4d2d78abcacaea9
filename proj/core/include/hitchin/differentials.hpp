#pragma once

#include "hitchin/curve.hpp"

namespace hitchin {

/// Holomorphic Prym differentials w_k = g_k dx, k = 0..h-1.
///   SL2: g_i = x^i / (2 y lambda)
///   SO4: g_i = x^i q / (y lambda (4 lambda^2 + 2p)),  g_{3+j} = lambda x^j / (y (4 lambda^2 + 2p))
/// Chart versions f_k with w_k = f_k dz at x = z^-2, y = z^-5 Y, lambda = z^-2 L.
class DifferentialBasis {
 public:
  explicit DifferentialBasis(const SpectralCurve& curve) : curve_(&curve) {}

  int size() const { return curve_->h(); }
  const SpectralCurve& curve() const { return *curve_; }

  void eval(cplx x, cplx y, cplx lam, cplx* out) const;
  void eval_chart(cplx z, cplx Y, cplx L, cplx* out) const;

  /// lambda dx / y and its chart form -2 L / Y.
  cplx action_density(cplx, cplx y, cplx lam) const { return lam / y; }
  cplx action_density_chart(cplx, cplx Y, cplx L) const { return -2.0 * L / Y; }

  /// c with lambda dx / y = sum_k c_k w_k.
  CVector action_coefficients() const;
  /// P with d(lambda dx / y)/dH_k = -sum_m P(m, k) w_m.
  CMatrix action_derivative_map() const;

 private:
  const SpectralCurve* curve_;
};

}  // namespace hitchin
