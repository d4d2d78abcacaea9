#pragma once

#include <array>
#include <span>
#include <vector>

#include "hitchin/path.hpp"
#include "hitchin/types.hpp"

namespace hitchin {

/// y^2 = P5(x) with P5 monic of degree 5, coefficients ascending.
class BaseCurve {
 public:
  BaseCurve() = default;
  explicit BaseCurve(const std::array<cplx, 6>& coeffs);
  static BaseCurve from_roots(std::span<const cplx> roots);

  const std::array<cplx, 6>& coeffs() const { return c_; }
  const std::array<cplx, 5>& roots() const { return roots_; }
  cplx P(cplx x) const;
  cplx dP(cplx x) const;
  /// P~(z) = z^10 P5(z^-2) and its z-derivative (chart at infinity).
  cplx P_chart(cplx z) const;
  cplx dP_chart(cplx z) const;

 private:
  std::array<cplx, 6> c_{};
  std::array<cplx, 5> roots_{};
};

/// R(lambda, x, H) = 0 over the base curve.
///   SL2: lambda^2 + r2(x),            r2 = H0 + H1 x + H2 x^2
///   SO4: lambda^4 + p lambda^2 + q^2, p = H0 + H1 x + H2 x^2, q = H3 + H4 x + H5 x^2
/// Construction checks only shapes; validate_generic() checks the genericity
/// assumptions needed by branch-point and period computations.
class SpectralCurve {
 public:
  SpectralCurve() = default;
  SpectralCurve(BaseCurve base, Family family, CVector hams);

  const BaseCurve& base() const { return base_; }
  Family family() const { return family_; }
  const CVector& hams() const { return hams_; }
  int h() const { return phase_dim(family_); }
  SpectralCurve with_hams(CVector hams) const { return SpectralCurve(base_, family_, std::move(hams)); }

  /// p (SO4) or r2 (SL2), and q (zero for SL2).
  cplx p(cplx x) const;
  cplx q(cplx x) const;
  cplx dp(cplx x) const;
  cplx dq(cplx x) const;

  cplx R(cplx lam, cplx x) const;
  cplx R_lambda(cplx lam, cplx x) const;
  cplx R_x(cplx lam, cplx x) const;
  /// dR/dH_k, k = 0..h-1.
  void dR_dH(cplx lam, cplx x, cplx* out) const;
  /// All lambda over x (2 for SL2, 4 for SO4), unordered.
  std::vector<cplx> lambda_roots(cplx x) const;

  // Chart at infinity: x = z^-2, y = z^-5 Y, lambda = z^-2 L.
  cplx p_chart(cplx z) const;
  cplx q_chart(cplx z) const;
  cplx dp_chart(cplx z) const;
  cplx dq_chart(cplx z) const;
  cplx G_chart(cplx L, cplx z) const;
  cplx G_L(cplx L, cplx z) const;
  cplx G_z(cplx L, cplx z) const;
  std::vector<cplx> lambda_chart_roots(cplx z) const;
  /// Values L(0) labelling the points over infinity, sorted by argument.
  std::vector<cplx> infinity_labels() const;

  /// Spectral branch x-values (roots of r2, or of q -+ p/2).
  std::vector<cplx> branch_x() const;
  /// SO4 singular x-values (roots of q); empty for SL2.
  std::vector<cplx> singular_x() const;
  /// Roots of P5, branch x-values and singular x-values.
  std::vector<cplx> critical_x() const;
  /// Quarter of the smallest separation between critical x-values.
  double default_clearance() const;
  /// max(1, |coefficients|) used to scale residual tolerances.
  double residual_scale() const;
  /// Throws DegenerateCurve when the curve is not in general position.
  void validate_generic() const;

 private:
  BaseCurve base_;
  Family family_ = Family::SL2;
  CVector hams_;
};

struct SurfacePoint {
  cplx x, y, lambda;
  int sheet_id = -1;
};

struct Involutions {
  SurfacePoint tau1, tau2, tau;
};

cplx eval_R(const SpectralCurve& curve, cplx lam, cplx x);
std::vector<SurfacePoint> branch_points(const SpectralCurve& curve);
std::vector<SurfacePoint> singular_points(const SpectralCurve& curve);
int genus_check(const SpectralCurve& curve);

/// All points over x sorted by (arg y, arg lambda, |lambda|); sheet_id is the
/// position in that order. clearance < 0 means curve.default_clearance().
std::vector<SurfacePoint> lift_x(const SpectralCurve& curve, cplx x, double clearance = -1.0);
/// Sheet index of (y, lambda) at p.x in the lift_x ordering.
int sheet_of(const SpectralCurve& curve, const SurfacePoint& p);
SurfacePoint continue_point(const SpectralCurve& curve, const SurfacePoint& start, const XPath& path);
Involutions involutions(const SurfacePoint& p);

/// |y^2 - P5(x)| and |R| for a point.
std::array<double, 2> residuals(const SpectralCurve& curve, const SurfacePoint& p);

}  // namespace hitchin
