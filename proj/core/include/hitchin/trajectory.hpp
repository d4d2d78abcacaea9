#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hitchin/curve.hpp"

namespace hitchin {

/// Ordered separating variables: h points on the spectral curve.
struct PhaseConfiguration {
  std::vector<SurfacePoint> points;

  int size() const { return static_cast<int>(points.size()); }
  CVector xs() const;
  CVector lambdas() const;
};

struct TrajectoryRecord {
  std::string provenance;  // "ode" or "theta"
  std::vector<double> times;
  std::vector<PhaseConfiguration> configs;
  /// max_j |H_j(t) - H_j(0)| recomputed from the points.
  std::vector<double> ham_residual;
  /// max_i |R(lambda_i, x_i, H(0))| and |y_i^2 - P5(x_i)|.
  std::vector<double> curve_residual;
  std::vector<std::string> warnings;
};

/// One row per (t, i): t, i, Re/Im of x, y, lambda, provenance.
void write_csv(std::ostream& os, const TrajectoryRecord& rec);

/// Symmetric Hausdorff distance between two multisets of complex numbers.
double hausdorff(const CVector& a, const CVector& b);

/// Hausdorff distance between the point sets {(x, y, lambda)} (max-norm in C^3).
double hausdorff_points(const PhaseConfiguration& a, const PhaseConfiguration& b);

}  // namespace hitchin
