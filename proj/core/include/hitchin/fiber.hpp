#pragma once

#include <array>
#include <vector>

#include "hitchin/curve.hpp"
#include "hitchin/path.hpp"

namespace hitchin {

/// Fiber coordinates over a point w of the parameter plane: (y, lambda) in the
/// finite chart (w = x), (Y, L) in the chart at infinity (w = z).
struct Fiber {
  cplx u, v;
};

/// Root sets and first derivatives of the fiber coordinates as functions of w.
class FiberModel {
 public:
  FiberModel(const SpectralCurve& curve, bool chart);

  const SpectralCurve& curve() const { return *curve_; }
  bool chart() const { return chart_; }
  /// Critical values in the w-plane (roots of the discriminants, singular points).
  const std::vector<cplx>& obstacles() const { return obstacles_; }

  cplx u_square(cplx w) const { return chart_ ? curve_->base().P_chart(w) : curve_->base().P(w); }
  cplx du(cplx w, cplx u) const;
  cplx dv(cplx w, cplx v) const;
  std::vector<cplx> v_roots(cplx w) const;

 private:
  const SpectralCurve* curve_;
  bool chart_;
  std::vector<cplx> obstacles_;
};

/// One predictor-corrector step from w0 to w1, predictor displacement dw.
/// Returns false when the nearest root is not separated from the second
/// nearest by a factor of 3.
bool fiber_hop(const FiberModel& m, cplx w0, const Fiber& f, cplx w1, cplx dw, Fiber& out);

/// Carries f along seg from t0 to t1 using steps of at most max_dt, halving on
/// ambiguity. Throws ContinuationFailure below min_dt.
Fiber fiber_track(const FiberModel& m, const Segment& seg, Fiber f, double t0, double t1, double max_dt,
                  double min_dt);

}  // namespace hitchin
