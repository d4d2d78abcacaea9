#pragma once

#include "hitchin/curve.hpp"

namespace hitchin {

/// Reference base curve and Hamiltonians used by the CLI defaults, the
/// self-test and the benchmarks.
BaseCurve default_base_curve();
CVector default_hams(Family family);
SpectralCurve default_curve(Family family);

}  // namespace hitchin
