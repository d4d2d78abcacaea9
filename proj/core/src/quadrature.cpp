#include "hitchin/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "hitchin/errors.hpp"

namespace hitchin {

namespace {

// Kronrod 15-point abscissae (positive half, descending) and weights; every
// second abscissa starting at index 1 is a Gauss 7-point node.
constexpr std::array<double, 8> kXgk{0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                     0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                     0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                     0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                     0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                     0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                     0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Context {
  const FiberModel& model;
  const Segment& seg;
  int n;
  const Integrand& g;
  const QuadratureOptions& opt;
  double min_dt;
  int evals = 0;
  std::vector<cplx> buf;
};

// Nodes of [a, b] sorted ascending; index 7 is the midpoint.
std::array<double, 15> nodes(double a, double b) {
  const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  std::array<double, 15> t;
  for (int j = 0; j < 7; ++j) {
    t[j] = c - hw * kXgk[j];
    t[14 - j] = c + hw * kXgk[j];
  }
  t[7] = c;
  return t;
}

double kronrod_weight(int idx) { return kWgk[idx <= 7 ? idx : 14 - idx]; }
// Gauss weight at sorted node idx, or 0 if not a Gauss node.
double gauss_weight(int idx) {
  const int j = idx <= 7 ? idx : 14 - idx;  // position in kXgk
  if (j % 2 == 1) return kWg[j / 2];
  if (j == 7) return kWg[3];
  return 0.0;
}

void piece(Context& ctx, double a, double b, const Fiber& fa, int depth, CVector& acc, Fiber& fb) {
  const auto t = nodes(a, b);
  const double hw = 0.5 * (b - a);
  CVector K = CVector::Zero(ctx.n), G = CVector::Zero(ctx.n);
  Fiber f = fa;
  double tp = a;
  for (int i = 0; i < 15; ++i) {
    f = fiber_track(ctx.model, ctx.seg, f, tp, t[i], t[i] - tp, ctx.min_dt);
    tp = t[i];
    const cplx w = segment_point(ctx.seg, t[i]);
    const cplx v = segment_velocity(ctx.seg, t[i]);
    ctx.g(w, f, ctx.buf.data());
    ++ctx.evals;
    const double wk = kronrod_weight(i), wg = gauss_weight(i);
    for (int k = 0; k < ctx.n; ++k) {
      const cplx val = ctx.buf[k] * v;
      K[k] += wk * val;
      G[k] += wg * val;
    }
  }
  K *= hw;
  G *= hw;
  double err = 0.0, mag = 0.0;
  for (int k = 0; k < ctx.n; ++k) {
    err = std::max(err, std::abs(K[k] - G[k]));
    mag = std::max(mag, std::abs(K[k]));
  }
  if (!std::isfinite(err)) throw QuadratureNonconvergence("non-finite integrand");
  const double tol = std::max(ctx.opt.abs_tol * (b - a), ctx.opt.rel_tol * mag);
  if (err <= tol || (depth >= ctx.opt.max_depth && err <= 1e3 * tol)) {
    acc += K;
    fb = fiber_track(ctx.model, ctx.seg, f, tp, b, b - tp, ctx.min_dt);
    return;
  }
  if (depth >= ctx.opt.max_depth) throw QuadratureNonconvergence("adaptive refinement depth exceeded");
  const double m = t[7];
  Fiber fm;
  piece(ctx, a, m, fa, depth + 1, acc, fm);
  piece(ctx, m, b, fm, depth + 1, acc, fb);
}

double segment_clearance(const Segment& s, const std::vector<cplx>& obstacles) {
  double d = std::numeric_limits<double>::infinity();
  for (cplx o : obstacles) d = std::min(d, segment_distance(s, o));
  return d;
}

}  // namespace

PathIntegral integrate_path(const FiberModel& model, const XPath& path, Fiber start, int n, const Integrand& g,
                            const QuadratureOptions& opt) {
  PathIntegral out;
  out.values = CVector::Zero(n);
  out.end = start;
  for (const auto& seg : path.segments()) {
    const double len = segment_length(seg);
    if (len == 0.0) continue;
    const double d = segment_clearance(seg, model.obstacles());
    int pieces = 1;
    if (std::isfinite(d) && d > 0.0) pieces = std::clamp(static_cast<int>(std::ceil(len / (0.5 * d))), 1, 256);
    // abs_tol is per unit parameter, so the segment total stays within abs_tol.
    Context ctx{model, seg, n, g, opt, 1e-14, 0, std::vector<cplx>(n)};
    Fiber f = out.end;
    for (int p = 0; p < pieces; ++p) {
      const double a = static_cast<double>(p) / pieces, b = static_cast<double>(p + 1) / pieces;
      Fiber fb;
      piece(ctx, a, b, f, 0, out.values, fb);
      f = fb;
    }
    out.evaluations += ctx.evals;
    out.end = f;
  }
  return out;
}

}  // namespace hitchin
