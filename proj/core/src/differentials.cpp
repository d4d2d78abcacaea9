#include "hitchin/differentials.hpp"

namespace hitchin {

void DifferentialBasis::eval(cplx x, cplx y, cplx lam, cplx* out) const {
  if (curve_->family() == Family::SL2) {
    const cplx d = 1.0 / (2.0 * y * lam);
    out[0] = d;
    out[1] = x * d;
    out[2] = x * x * d;
    return;
  }
  const cplx D = 1.0 / (y * (4.0 * lam * lam + 2.0 * curve_->p(x)));
  const cplx a = curve_->q(x) * D / lam, b = lam * D;
  out[0] = a;
  out[1] = x * a;
  out[2] = x * x * a;
  out[3] = b;
  out[4] = x * b;
  out[5] = x * x * b;
}

void DifferentialBasis::eval_chart(cplx z, cplx Y, cplx L, cplx* out) const {
  const cplx z2 = z * z, z4 = z2 * z2;
  if (curve_->family() == Family::SL2) {
    const cplx d = -1.0 / (Y * L);
    out[0] = z4 * d;
    out[1] = z2 * d;
    out[2] = d;
    return;
  }
  const cplx D = -2.0 / (Y * (4.0 * L * L + 2.0 * curve_->p_chart(z)));
  const cplx a = curve_->q_chart(z) * D / L, b = L * D;
  out[0] = z4 * a;
  out[1] = z2 * a;
  out[2] = a;
  out[3] = z4 * b;
  out[4] = z2 * b;
  out[5] = b;
}

CVector DifferentialBasis::action_coefficients() const {
  const CVector& H = curve_->hams();
  if (curve_->family() == Family::SL2) return -2.0 * H;
  CVector c(6);
  c << -4.0 * H[3], -4.0 * H[4], -4.0 * H[5], -2.0 * H[0], -2.0 * H[1], -2.0 * H[2];
  return c;
}

CMatrix DifferentialBasis::action_derivative_map() const {
  const int h = size();
  CMatrix P = CMatrix::Zero(h, h);
  if (curve_->family() == Family::SL2) return CMatrix::Identity(h, h);
  for (int k = 0; k < 3; ++k) {
    P(3 + k, k) = 1.0;
    P(k, 3 + k) = 2.0;
  }
  return P;
}

}  // namespace hitchin
