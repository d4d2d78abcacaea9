#pragma once

#include <optional>
#include <vector>

#include "hitchin/cycles.hpp"
#include "hitchin/differentials.hpp"
#include "hitchin/quadrature.hpp"
#include "hitchin/series.hpp"
#include "hitchin/trajectory.hpp"

namespace hitchin {

/// Integral from a point over infinity to the petal base point: a chart leg
/// from z = 0 followed by a line in x.
struct InfinityLeg {
  cplx label;       // L(0) of the point over infinity
  CVector values;   // h differentials followed by lambda dx / y
  int arrival = -1; // sheet at the base point
};

struct PeriodData {
  SpectralCurve curve;
  CycleSet cycles;
  /// Petal integrals per orbit edge (petal * orbits + orbit): h differentials
  /// followed by lambda dx / y.
  std::vector<CVector> edges;
  CMatrix A_periods, B_periods;  // (i, j) = integral of w_i over a_j (b_j)
  CVector A_action, B_action;    // cycle integrals of lambda dx / y
  CMatrix A_mat;                 // inverse of A_periods
  CMatrix B_norm;                // A_mat * B_periods
  CMatrix tau;                   // B_norm * D^-1, symmetric
  std::vector<std::int64_t> divisors;  // D
  double symmetry_error = 0.0;   // relative
  double min_im_eig = 0.0;
  cplx far_point;                // x where the chart leg meets the x-plane
  std::vector<InfinityLeg> infinity;
  QuadratureOptions quad;        // used for every later path integral too

  int h() const { return cycles.h; }
  /// Period vector (h + 1 raw integrals) of a cycle in fundamental coordinates.
  CVector cycle_integral(const IVector& coords) const;
};

/// Integral of the h basis differentials and lambda dx / y along a path starting
/// at `start`. The end point (continued) is written to `end` if given.
CVector integrate_differentials(const SpectralCurve& curve, const XPath& path, const SurfacePoint& start,
                                SurfacePoint* end = nullptr, const QuadratureOptions& opt = {});
/// Single differential (index h means lambda dx / y) starting on sheet
/// `start_sheet` of lift_x at the path start.
cplx integrate_differential(const SpectralCurve& curve, int index, const XPath& path, int start_sheet);

/// Fills the period matrices; throws BilinearViolation if tau is not a
/// symmetric matrix with positive definite imaginary part.
PeriodData period_matrix(const SpectralCurve& curve, const CycleSet& cycles, const QuadratureOptions& opt = {});
PeriodData compute_periods(const SpectralCurve& curve, const QuadratureOptions& opt = {});

/// Raw integrals (h + 1) from the base point over infinity with index
/// `infinity_index` to p. `alternate` uses a different path in the x-plane.
CVector abel_integral(const PeriodData& pd, const SurfacePoint& p, bool alternate = false, int infinity_index = 0);
/// Normalized Abel-Prym image of a point and of a configuration.
CVector abel_point(const PeriodData& pd, const SurfacePoint& p, bool alternate = false);
CVector abel_prym(const PeriodData& pd, const PhaseConfiguration& config, bool alternate = false);
/// Normalized image of the point over infinity with the given index.
CVector abel_infinity(const PeriodData& pd, int index);
/// Normalized image of the point with chart coordinate z near that point over
/// infinity, integrated along the chart ray.
CVector abel_chart(const PeriodData& pd, int index, cplx z);

/// Lattice m + tau D n closest to v. residual is the largest distance of the
/// fitted coefficients from integers.
struct LatticeFit {
  RVector m, n;
  double residual = 0.0;
};
LatticeFit lattice_fit(const PeriodData& pd, const CVector& v);

/// A_s(P(z)) = sum_l phi(s, l - 1) / l z^l near the point over infinity with
/// label index `point`, x = z^-2, Y(0) = 1.
struct AbelJet {
  int point = 0;
  int order = 0;
  CMatrix phi;  // h x order
};
/// Y(z), L(z) series at a point over infinity.
std::pair<Series, Series> infinity_expansion(const SpectralCurve& curve, int point, int order);
/// Chart densities f_k(z) (h differentials, then lambda dx / y) as series.
std::vector<Series> chart_density_series(const SpectralCurve& curve, int point, int order);
AbelJet abel_jet(const PeriodData& pd, int point, int order);

struct ActionAngleData {
  CVector I;
  CMatrix dI_dH;
  /// Column k: angular velocity of the normalized Abel-Prym image under the
  /// flow of H_k, i.e. row k of dI_dH^-1.
  CMatrix frequencies;
};
/// Actions I_a = integral of lambda dx / y over a_a and their H-derivatives.
/// Throws ExpansionResidual when the direct cycle integrals of lambda dx / y
/// disagree with the basis expansion by more than 1e-7.
ActionAngleData action_variables(const PeriodData& pd);

}  // namespace hitchin
