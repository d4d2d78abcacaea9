#include "hitchin/defaults.hpp"

namespace hitchin {

BaseCurve default_base_curve() {
  const std::vector<cplx> roots{{-2.1, 0.0}, {-0.9, 0.3}, {0.4, -0.2}, {1.3, 0.1}, {2.2, -0.4}};
  return BaseCurve::from_roots(roots);
}

CVector default_hams(Family family) {
  CVector H(phase_dim(family));
  if (family == Family::SL2) {
    H << cplx(0.7, 0.2), cplx(-0.3, 0.1), cplx(1.1, -0.2);
  } else {
    H << cplx(0.5, 0.1), cplx(0.2, -0.3), cplx(1.2, 0.2), cplx(-0.4, 0.2), cplx(0.1, 0.3), cplx(0.45, -0.15);
  }
  return H;
}

SpectralCurve default_curve(Family family) {
  return SpectralCurve(default_base_curve(), family, default_hams(family));
}

}  // namespace hitchin
