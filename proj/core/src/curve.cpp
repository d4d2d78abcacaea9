#include "hitchin/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hitchin/errors.hpp"
#include "hitchin/fiber.hpp"
#include "hitchin/poly.hpp"

namespace hitchin {

namespace {

// Roots of c0 + c1 x + c2 x^2, dropping the ones at infinity when c2 vanishes.
std::vector<cplx> quad_roots(cplx c0, cplx c1, cplx c2, double scale) {
  const double tiny = 1e-14 * scale;
  if (std::abs(c2) > tiny) {
    auto r = poly::quadratic_roots(c2, c1, c0);
    return {r[0], r[1]};
  }
  if (std::abs(c1) > tiny) return {-c0 / c1};
  return {};
}

bool arg_less(cplx a, cplx b) {
  const double da = std::arg(a), db = std::arg(b);
  if (std::abs(da - db) > 1e-12) return da < db;
  return std::abs(a) < std::abs(b);
}

double dist_to(std::span<const cplx> pts, cplx x) {
  double d = std::numeric_limits<double>::infinity();
  for (auto p : pts) d = std::min(d, std::abs(p - x));
  return d;
}

}  // namespace

BaseCurve::BaseCurve(const std::array<cplx, 6>& coeffs) : c_(coeffs) {
  if (c_[5] != cplx(1.0, 0.0)) throw ConfigError("P5 must be monic (leading coefficient exactly 1)");
  auto r = poly::roots(c_);
  for (std::size_t i = 0; i < 5; ++i) roots_[i] = r[i];
  if (poly::min_separation(roots_) <= poly::coincidence_tolerance(roots_))
    throw DegenerateCurve("P5 has a multiple root");
}

BaseCurve BaseCurve::from_roots(std::span<const cplx> roots) {
  if (roots.size() != 5) throw ConfigError("base curve needs exactly 5 roots");
  auto c = poly::from_roots(roots);
  std::array<cplx, 6> a;
  std::copy(c.begin(), c.end(), a.begin());
  a[5] = 1.0;
  return BaseCurve(a);
}

cplx BaseCurve::P(cplx x) const { return poly::eval(c_, x); }
cplx BaseCurve::dP(cplx x) const { return poly::eval_derivative(c_, x); }

cplx BaseCurve::P_chart(cplx z) const {
  // sum_k c_k z^(10-2k) = sum_k c_{5-m} (z^2)^m
  const cplx w = z * z;
  cplx acc = 0.0;
  for (int m = 5; m >= 0; --m) acc = acc * w + c_[5 - m];
  return acc;
}

cplx BaseCurve::dP_chart(cplx z) const {
  const cplx w = z * z;
  cplx acc = 0.0;
  for (int m = 5; m >= 1; --m) acc = acc * w + static_cast<double>(m) * c_[5 - m];
  return 2.0 * z * acc;
}

SpectralCurve::SpectralCurve(BaseCurve base, Family family, CVector hams)
    : base_(std::move(base)), family_(family), hams_(std::move(hams)) {
  if (hams_.size() != phase_dim(family_))
    throw ConfigError("expected " + std::to_string(phase_dim(family_)) + " Hamiltonians for " +
                      std::string(family_name(family_)));
}

cplx SpectralCurve::p(cplx x) const { return hams_[0] + x * (hams_[1] + x * hams_[2]); }
cplx SpectralCurve::q(cplx x) const {
  return family_ == Family::SL2 ? cplx{} : hams_[3] + x * (hams_[4] + x * hams_[5]);
}
cplx SpectralCurve::dp(cplx x) const { return hams_[1] + 2.0 * x * hams_[2]; }
cplx SpectralCurve::dq(cplx x) const {
  return family_ == Family::SL2 ? cplx{} : hams_[4] + 2.0 * x * hams_[5];
}

cplx SpectralCurve::R(cplx lam, cplx x) const {
  const cplx l2 = lam * lam;
  if (family_ == Family::SL2) return l2 + p(x);
  const cplx qq = q(x);
  return l2 * (l2 + p(x)) + qq * qq;
}

cplx SpectralCurve::R_lambda(cplx lam, cplx x) const {
  if (family_ == Family::SL2) return 2.0 * lam;
  return lam * (4.0 * lam * lam + 2.0 * p(x));
}

cplx SpectralCurve::R_x(cplx lam, cplx x) const {
  if (family_ == Family::SL2) return dp(x);
  return lam * lam * dp(x) + 2.0 * q(x) * dq(x);
}

void SpectralCurve::dR_dH(cplx lam, cplx x, cplx* out) const {
  const cplx pw[3] = {1.0, x, x * x};
  if (family_ == Family::SL2) {
    for (int k = 0; k < 3; ++k) out[k] = pw[k];
    return;
  }
  const cplx l2 = lam * lam, qq = 2.0 * q(x);
  for (int k = 0; k < 3; ++k) {
    out[k] = l2 * pw[k];
    out[3 + k] = qq * pw[k];
  }
}

std::vector<cplx> SpectralCurve::lambda_roots(cplx x) const {
  if (family_ == Family::SL2) {
    const cplx l = std::sqrt(-p(x));
    return {l, -l};
  }
  const cplx qq = q(x);
  auto u = poly::quadratic_roots(1.0, p(x), qq * qq);
  const cplx a = std::sqrt(u[0]), b = std::sqrt(u[1]);
  return {a, -a, b, -b};
}

cplx SpectralCurve::p_chart(cplx z) const {
  const cplx w = z * z;
  return hams_[2] + w * (hams_[1] + w * hams_[0]);
}
cplx SpectralCurve::q_chart(cplx z) const {
  if (family_ == Family::SL2) return 0.0;
  const cplx w = z * z;
  return hams_[5] + w * (hams_[4] + w * hams_[3]);
}
cplx SpectralCurve::dp_chart(cplx z) const { return 2.0 * z * (hams_[1] + 2.0 * z * z * hams_[0]); }
cplx SpectralCurve::dq_chart(cplx z) const {
  if (family_ == Family::SL2) return 0.0;
  return 2.0 * z * (hams_[4] + 2.0 * z * z * hams_[3]);
}

cplx SpectralCurve::G_chart(cplx L, cplx z) const {
  const cplx l2 = L * L;
  if (family_ == Family::SL2) return l2 + p_chart(z);
  const cplx qq = q_chart(z);
  return l2 * (l2 + p_chart(z)) + qq * qq;
}
cplx SpectralCurve::G_L(cplx L, cplx z) const {
  if (family_ == Family::SL2) return 2.0 * L;
  return L * (4.0 * L * L + 2.0 * p_chart(z));
}
cplx SpectralCurve::G_z(cplx L, cplx z) const {
  if (family_ == Family::SL2) return dp_chart(z);
  return L * L * dp_chart(z) + 2.0 * q_chart(z) * dq_chart(z);
}

std::vector<cplx> SpectralCurve::lambda_chart_roots(cplx z) const {
  if (family_ == Family::SL2) {
    const cplx l = std::sqrt(-p_chart(z));
    return {l, -l};
  }
  const cplx qq = q_chart(z);
  auto u = poly::quadratic_roots(1.0, p_chart(z), qq * qq);
  const cplx a = std::sqrt(u[0]), b = std::sqrt(u[1]);
  return {a, -a, b, -b};
}

std::vector<cplx> SpectralCurve::infinity_labels() const {
  auto r = lambda_chart_roots(0.0);
  std::sort(r.begin(), r.end(), arg_less);
  return r;
}

double SpectralCurve::residual_scale() const {
  double s = 1.0;
  for (auto c : base_.coeffs()) s = std::max(s, std::abs(c));
  for (Eigen::Index i = 0; i < hams_.size(); ++i) s = std::max(s, std::abs(hams_[i]));
  return s;
}

std::vector<cplx> SpectralCurve::branch_x() const {
  const double s = residual_scale();
  const auto& H = hams_;
  if (family_ == Family::SL2) return quad_roots(H[0], H[1], H[2], s);
  auto out = quad_roots(H[3] - 0.5 * H[0], H[4] - 0.5 * H[1], H[5] - 0.5 * H[2], s);
  auto b = quad_roots(H[3] + 0.5 * H[0], H[4] + 0.5 * H[1], H[5] + 0.5 * H[2], s);
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

std::vector<cplx> SpectralCurve::singular_x() const {
  if (family_ == Family::SL2) return {};
  return quad_roots(hams_[3], hams_[4], hams_[5], residual_scale());
}

std::vector<cplx> SpectralCurve::critical_x() const {
  std::vector<cplx> out(base_.roots().begin(), base_.roots().end());
  auto b = branch_x();
  auto s = singular_x();
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

double SpectralCurve::default_clearance() const {
  auto c = critical_x();
  return 0.25 * poly::min_separation(c);
}

void SpectralCurve::validate_generic() const {
  const double s = residual_scale();
  const auto& H = hams_;
  if (std::abs(H[2]) <= 1e-12 * s) throw DegenerateCurve("H2 = 0: fiber over infinity is ramified");
  if (family_ == Family::SO4) {
    if (std::abs(H[5]) <= 1e-12 * s) throw DegenerateCurve("H5 = 0: point count over infinity drops");
    if (std::abs(H[2] * H[2] - 4.0 * H[5] * H[5]) <= 1e-10 * s * s)
      throw DegenerateCurve("H2^2 = 4 H5^2: fiber over infinity is ramified");
  }
  auto b = branch_x();
  if (b.size() != static_cast<std::size_t>(family_ == Family::SL2 ? 2 : 4))
    throw DegenerateCurve("wrong number of branch x-values");
  auto c = critical_x();
  const double tol = poly::coincidence_tolerance(c);
  if (family_ == Family::SO4 && poly::min_separation(singular_x()) <= tol)
    throw DegenerateCurve("q has a double root");
  if (poly::min_separation(c) <= tol)
    throw DegenerateCurve("branch or singular points collide");
}

cplx eval_R(const SpectralCurve& curve, cplx lam, cplx x) { return curve.R(lam, x); }

std::vector<SurfacePoint> branch_points(const SpectralCurve& curve) {
  curve.validate_generic();
  std::vector<SurfacePoint> out;
  for (cplx x : curve.branch_x()) {
    const cplx y = std::sqrt(curve.base().P(x));
    for (cplx ys : {y, -y}) {
      if (curve.family() == Family::SL2) {
        out.push_back({x, ys, 0.0, -1});
      } else {
        const cplx l = std::sqrt(-0.5 * curve.p(x));
        out.push_back({x, ys, l, -1});
        out.push_back({x, ys, -l, -1});
      }
    }
  }
  return out;
}

std::vector<SurfacePoint> singular_points(const SpectralCurve& curve) {
  if (curve.family() != Family::SO4) return {};
  auto xs = curve.singular_x();
  if (xs.size() != 2) throw DegenerateCurve("q must be quadratic for four singular points");
  if (std::abs(xs[0] - xs[1]) <= poly::coincidence_tolerance(xs)) throw DegenerateCurve("q has a double root");
  std::vector<SurfacePoint> out;
  for (cplx x : xs) {
    const cplx y = std::sqrt(curve.base().P(x));
    out.push_back({x, y, 0.0, -1});
    out.push_back({x, -y, 0.0, -1});
  }
  return out;
}

int genus_check(const SpectralCurve& curve) {
  const int degree = lambda_count(curve.family());
  const int expected = curve.family() == Family::SL2 ? 5 : 13;
  const int ram_per_base_point = curve.family() == Family::SL2 ? 1 : 2;
  auto bx = curve.branch_x();
  std::vector<cplx> others(curve.base().roots().begin(), curve.base().roots().end());
  auto sx = curve.singular_x();
  others.insert(others.end(), sx.begin(), sx.end());
  auto all = curve.critical_x();
  const double tol = poly::coincidence_tolerance(all);
  int simple = 0;
  for (std::size_t i = 0; i < bx.size(); ++i) {
    bool ok = dist_to(others, bx[i]) > tol;
    for (std::size_t j = 0; j < bx.size(); ++j)
      if (j != i && std::abs(bx[i] - bx[j]) <= tol) ok = false;
    if (ok) simple += 2 * ram_per_base_point;  // two base points (y-signs) over each x
  }
  const int twice = degree * 2 + simple;  // 2g - 2 = 2 on the base
  const int genus = twice / 2 + 1;
  if (twice % 2 != 0 || genus != expected)
    throw InconsistentGeometry("Riemann-Hurwitz gives genus " + std::to_string(genus) + " (" +
                               std::to_string(simple) + " simple branch points), expected " +
                               std::to_string(expected));
  return genus;
}

std::vector<SurfacePoint> lift_x(const SpectralCurve& curve, cplx x, double clearance) {
  std::vector<cplx> branch(curve.base().roots().begin(), curve.base().roots().end());
  auto bx = curve.branch_x();
  branch.insert(branch.end(), bx.begin(), bx.end());
  if (clearance < 0.0) clearance = poly::coincidence_tolerance(branch);
  if (dist_to(branch, x) < clearance) throw NearBranchPoint("x is within clearance of a branch x-value");
  const cplx y0 = std::sqrt(curve.base().P(x));
  std::array<cplx, 2> ys{y0, -y0};
  std::sort(ys.begin(), ys.end(), arg_less);
  auto ls = curve.lambda_roots(x);
  std::sort(ls.begin(), ls.end(), arg_less);
  std::vector<SurfacePoint> out;
  int id = 0;
  for (cplx y : ys)
    for (cplx l : ls) out.push_back({x, y, l, id++});
  return out;
}

int sheet_of(const SpectralCurve& curve, const SurfacePoint& p) {
  auto pts = lift_x(curve, p.x, 0.0);
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (const auto& s : pts) {
    const double d = std::abs(s.y - p.y) + std::abs(s.lambda - p.lambda);
    if (d < bd) {
      bd = d;
      best = s.sheet_id;
    }
  }
  return best;
}

SurfacePoint continue_point(const SpectralCurve& curve, const SurfacePoint& start, const XPath& path) {
  if (path.empty() || path.length() == 0.0) return start;
  if (std::abs(path.start() - start.x) > 1e-12 * (1.0 + std::abs(start.x)))
    throw ConfigError("path does not begin at the start point");
  FiberModel model(curve, false);
  if (path.clearance() > 0.0 && path.min_distance(model.obstacles()) < path.clearance() * (1.0 - 1e-9))
    throw NearBranchPoint("path violates clearance");
  Fiber f{start.y, start.lambda};
  const double L = path.length();
  const double min_dt_len = 1e-12 * L;
  const double step_len = path.clearance() > 0.0 ? path.clearance() / 4.0 : L / 64.0;
  for (const auto& seg : path.segments()) {
    const double sl = segment_length(seg);
    if (sl == 0.0) continue;
    f = fiber_track(model, seg, f, 0.0, 1.0, step_len / sl, min_dt_len / sl);
  }
  SurfacePoint out{path.end(), f.u, f.v, -1};
  if (dist_to(model.obstacles(), out.x) > 0.0) {
    try {
      out.sheet_id = sheet_of(curve, out);
    } catch (const NearBranchPoint&) {
    }
  }
  return out;
}

Involutions involutions(const SurfacePoint& p) {
  return {{p.x, p.y, -p.lambda, -1}, {p.x, -p.y, p.lambda, -1}, {p.x, -p.y, -p.lambda, -1}};
}

std::array<double, 2> residuals(const SpectralCurve& curve, const SurfacePoint& p) {
  return {std::abs(p.y * p.y - curve.base().P(p.x)), std::abs(curve.R(p.lambda, p.x))};
}

}  // namespace hitchin
