#pragma once

#include <initializer_list>

#include "hitchin/defaults.hpp"

namespace hitchin::testing {

inline CVector vec(std::initializer_list<cplx> v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (cplx c : v) out[i++] = c;
  return out;
}

inline BaseCurve default_base() { return default_base_curve(); }
inline SpectralCurve default_sl2() { return default_curve(Family::SL2); }
inline SpectralCurve default_so4() { return default_curve(Family::SO4); }

}  // namespace hitchin::testing
