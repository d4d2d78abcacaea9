#include "hitchin/fiber.hpp"

#include <cmath>
#include <limits>

#include "hitchin/errors.hpp"

namespace hitchin {

FiberModel::FiberModel(const SpectralCurve& curve, bool chart) : curve_(&curve), chart_(chart) {
  auto xs = curve.critical_x();
  if (!chart) {
    obstacles_ = xs;
  } else {
    for (cplx x : xs) {
      if (x == cplx{}) continue;
      const cplx z = 1.0 / std::sqrt(x);
      obstacles_.push_back(z);
      obstacles_.push_back(-z);
    }
  }
}

cplx FiberModel::du(cplx w, cplx u) const {
  const cplx d = chart_ ? curve_->base().dP_chart(w) : curve_->base().dP(w);
  return d / (2.0 * u);
}

cplx FiberModel::dv(cplx w, cplx v) const {
  if (chart_) return -curve_->G_z(v, w) / curve_->G_L(v, w);
  return -curve_->R_x(v, w) / curve_->R_lambda(v, w);
}

std::vector<cplx> FiberModel::v_roots(cplx w) const {
  return chart_ ? curve_->lambda_chart_roots(w) : curve_->lambda_roots(w);
}

namespace {

// Picks the candidate nearest to `pred`; false when the runner-up is too close.
template <class Range>
bool pick(const Range& cands, cplx pred, cplx& out) {
  double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
  cplx best{};
  for (cplx c : cands) {
    const double d = std::abs(c - pred);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = c;
    } else if (d < d2) {
      d2 = d;
    }
  }
  out = best;
  return d2 >= 3.0 * d1;
}

}  // namespace

bool fiber_hop(const FiberModel& m, cplx w0, const Fiber& f, cplx w1, cplx dw, Fiber& out) {
  const cplx up = f.u + m.du(w0, f.u) * dw;
  const cplx vp = f.v + m.dv(w0, f.v) * dw;
  if (!std::isfinite(std::abs(up)) || !std::isfinite(std::abs(vp))) return false;
  const cplx s = std::sqrt(m.u_square(w1));
  const std::array<cplx, 2> us{s, -s};
  if (!pick(us, up, out.u)) return false;
  return pick(m.v_roots(w1), vp, out.v);
}

Fiber fiber_track(const FiberModel& m, const Segment& seg, Fiber f, double t0, double t1, double max_dt,
                  double min_dt) {
  double t = t0;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double dt = std::min(max_dt, std::abs(t1 - t0));
  while (dir * (t1 - t) > 0.0) {
    const double step = std::min(dt, std::abs(t1 - t));
    const double tn = (step == std::abs(t1 - t)) ? t1 : t + dir * step;
    const cplx w0 = segment_point(seg, t), w1 = segment_point(seg, tn);
    const cplx dw = segment_velocity(seg, t) * (tn - t);
    Fiber next;
    if (fiber_hop(m, w0, f, w1, dw, next)) {
      f = next;
      t = tn;
      dt = std::min(2.0 * step, max_dt);
    } else {
      dt = 0.5 * step;
      if (dt < min_dt) throw ContinuationFailure("step size underflow during continuation");
    }
  }
  return f;
}

}  // namespace hitchin
