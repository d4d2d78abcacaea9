#include "hitchin/periods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hitchin/errors.hpp"
#include "hitchin/parallel.hpp"
#include "hitchin/poly.hpp"

namespace hitchin {

namespace {

Integrand finite_integrand(const SpectralCurve& curve) {
  const int h = curve.h();
  return [&curve, h](cplx x, const Fiber& f, cplx* out) {
    DifferentialBasis(curve).eval(x, f.u, f.v, out);
    out[h] = f.v / f.u;
  };
}

Integrand chart_integrand(const SpectralCurve& curve) {
  const int h = curve.h();
  return [&curve, h](cplx z, const Fiber& f, cplx* out) {
    DifferentialBasis(curve).eval_chart(z, f.u, f.v, out);
    out[h] = -2.0 * f.v / f.u;
  };
}

double min_separation(const std::vector<cplx>& pts) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

// Straight path with detours around critical x-values; each detour radius
// stays below half the distance to the endpoints and to other obstacles.
XPath safe_line(const SpectralCurve& curve, cplx a, cplx b) {
  const auto obs = curve.critical_x();
  const double sep = min_separation(obs);
  std::vector<double> r(obs.size());
  for (std::size_t j = 0; j < obs.size(); ++j)
    r[j] = std::min({0.5 * sep, 0.5 * std::abs(obs[j] - a), 0.5 * std::abs(obs[j] - b)});
  return detoured_line(a, b, obs, r, curve.default_clearance());
}

XPath alternate_line(const SpectralCurve& curve, cplx a, cplx b) {
  const auto obs = curve.critical_x();
  const cplx mid = 0.5 * (a + b), d = b - a;
  cplx best = mid + 0.6 * kI * d;
  double score = -1.0;
  for (double s : {0.6, -0.6, 0.9, -0.9, 0.4, -0.4}) {
    const cplx m = mid + s * kI * d;
    double sc = std::numeric_limits<double>::infinity();
    for (cplx o : obs) sc = std::min(sc, std::abs(o - m));
    if (sc > score) {
      score = sc;
      best = m;
    }
  }
  return safe_line(curve, a, best).then(safe_line(curve, best, b));
}

CVector walk_integral(const PeriodData& pd, const Walk& w) {
  const CycleSet& cs = pd.cycles;
  CVector v = CVector::Zero(pd.h() + 1);
  for (const auto& st : w) {
    const auto& e = pd.edges[st.petal * cs.orbits + cs.orbit_of[st.sheet]];
    v += st.forward ? e : CVector(-e);
  }
  return v;
}

Series shift(const Series& s, int m) {
  Series out(s.order());
  for (int k = 0; k + m <= s.order(); ++k) out[k + m] = s[k];
  return out;
}

// a0 + a1 z^2 + a2 z^4 truncated at `order`.
Series even_quadratic(cplx a0, cplx a1, cplx a2, int order) {
  Series s(order, a0);
  if (order >= 2) s[2] = a1;
  if (order >= 4) s[4] = a2;
  return s;
}

}  // namespace

CVector PeriodData::cycle_integral(const IVector& coords) const {
  const IVector chain = edge_chain(cycles, coords);
  CVector v = CVector::Zero(h() + 1);
  for (int e = 0; e < chain.size(); ++e)
    if (chain[e] != 0) v += static_cast<double>(chain[e]) * edges[e];
  return v;
}

CVector integrate_differentials(const SpectralCurve& curve, const XPath& path, const SurfacePoint& start,
                                SurfacePoint* end, const QuadratureOptions& opt) {
  const FiberModel model(curve, false);
  auto res = integrate_path(model, path, Fiber{start.y, start.lambda}, curve.h() + 1, finite_integrand(curve), opt);
  if (end) {
    end->x = path.empty() ? start.x : path.end();
    end->y = res.end.u;
    end->lambda = res.end.v;
    end->sheet_id = sheet_of(curve, *end);
  }
  return res.values;
}

cplx integrate_differential(const SpectralCurve& curve, int index, const XPath& path, int start_sheet) {
  if (index < 0 || index > curve.h()) throw ConfigError("differential index out of range");
  if (path.empty()) return 0.0;
  const auto fiber = lift_x(curve, path.start());
  if (start_sheet < 0 || start_sheet >= static_cast<int>(fiber.size())) throw ConfigError("sheet out of range");
  return integrate_differentials(curve, path, fiber[start_sheet])[index];
}

PeriodData period_matrix(const SpectralCurve& curve, const CycleSet& cycles, const QuadratureOptions& opt) {
  PeriodData pd;
  pd.curve = curve;
  pd.cycles = cycles;
  pd.quad = opt;
  const CycleSet& cs = pd.cycles;
  const int h = cs.h, n = cs.petals();
  const SpectralCurve& c = pd.curve;

  pd.edges.assign(n * cs.orbits, CVector());
  parallel_for(pd.edges.size(), [&](std::size_t e) {
    const int k = static_cast<int>(e) / cs.orbits, o = static_cast<int>(e) % cs.orbits;
    pd.edges[e] = integrate_differentials(c, petal_path(cs, k), cs.fiber[cs.orbit_rep[o]], nullptr, opt);
  });

  pd.A_periods.resize(h, h);
  pd.B_periods.resize(h, h);
  pd.A_action.resize(h);
  pd.B_action.resize(h);
  for (int j = 0; j < h; ++j) {
    const CVector a = pd.cycle_integral(cs.a_cycles.row(j).transpose());
    const CVector b = pd.cycle_integral(cs.b_cycles.row(j).transpose());
    pd.A_periods.col(j) = a.head(h);
    pd.B_periods.col(j) = b.head(h);
    pd.A_action[j] = a[h];
    pd.B_action[j] = b[h];
  }
  Eigen::PartialPivLU<CMatrix> lu(pd.A_periods);
  if (!(lu.rcond() > 1e-13)) throw BilinearViolation("a-periods are singular");
  pd.A_mat = lu.inverse();
  pd.B_norm = pd.A_mat * pd.B_periods;
  pd.divisors = cs.divisors;
  RVector dinv(h);
  for (int j = 0; j < h; ++j) dinv[j] = 1.0 / static_cast<double>(cs.divisors[j]);
  CMatrix tau = pd.B_norm * dinv.cast<cplx>().asDiagonal();
  pd.symmetry_error = (tau - tau.transpose()).norm() / tau.norm();
  tau = 0.5 * (tau + tau.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(tau.imag());
  if (eig.eigenvalues().maxCoeff() < 0.0) {
    // Opposite orientation of the b-cycles.
    pd.cycles.b_cycles = -pd.cycles.b_cycles;
    pd.B_periods = -pd.B_periods;
    pd.B_action = -pd.B_action;
    pd.B_norm = -pd.B_norm;
    tau = -tau;
    eig.compute(tau.imag());
  }
  pd.tau = tau;
  pd.min_im_eig = eig.eigenvalues().minCoeff();
  if (!(pd.symmetry_error <= 1e-6) || !(pd.min_im_eig > 0.0))
    throw BilinearViolation("tau symmetry error " + std::to_string(pd.symmetry_error) + ", min eig Im tau " +
                            std::to_string(pd.min_im_eig));

  // Chart leg from each point over infinity to a far point, then into the base point
  // along the widest gap between directions to critical x-values.
  const auto obs = c.critical_x();
  std::vector<double> ang;
  double rmax = 0.0;
  for (cplx o : obs) {
    ang.push_back(std::arg(o - cs.base));
    rmax = std::max(rmax, std::abs(o));
  }
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2.0 * kPi - ang.back(), dir = ang.back() + 0.5 * gap;
  for (std::size_t j = 1; j < ang.size(); ++j)
    if (ang[j] - ang[j - 1] > gap) {
      gap = ang[j] - ang[j - 1];
      dir = ang[j - 1] + 0.5 * gap;
    }
  const double R = 4.0 * (rmax + std::abs(cs.base)) + 4.0;
  pd.far_point = cs.base + std::polar(R, dir);
  const cplx z1 = 1.0 / std::sqrt(pd.far_point);
  const FiberModel chart(c, true);
  const XPath zleg = XPath::line(0.0, z1, 0.0);
  const XPath xleg = safe_line(c, pd.far_point, cs.base);
  const auto labels = c.infinity_labels();
  pd.infinity.resize(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) {
    auto& leg = pd.infinity[j];
    leg.label = labels[j];
    auto zres = integrate_path(chart, zleg, Fiber{1.0, labels[j]}, h + 1, chart_integrand(c), opt);
    SurfacePoint far{pd.far_point, zres.end.u * std::pow(z1, -5), zres.end.v * std::pow(z1, -2), -1};
    SurfacePoint at_base;
    const CVector xres = integrate_differentials(c, xleg, far, &at_base, opt);
    leg.values = zres.values + xres;
    leg.arrival = at_base.sheet_id;
  }
  return pd;
}

PeriodData compute_periods(const SpectralCurve& curve, const QuadratureOptions& opt) {
  return period_matrix(curve, build_cycles(curve), opt);
}

CVector abel_integral(const PeriodData& pd, const SurfacePoint& p, bool alternate, int infinity_index) {
  const SpectralCurve& c = pd.curve;
  const CycleSet& cs = pd.cycles;
  if (infinity_index < 0 || infinity_index >= static_cast<int>(pd.infinity.size()))
    throw ConfigError("no such point over infinity");
  lift_x(c, p.x);  // clearance check
  const XPath back = alternate ? alternate_line(c, p.x, cs.base) : safe_line(c, p.x, cs.base);
  SurfacePoint at_base;
  const CVector tail = integrate_differentials(c, back, p, &at_base, pd.quad);
  const auto& leg = pd.infinity[infinity_index];
  return leg.values + walk_integral(pd, sheet_walk(cs, leg.arrival, at_base.sheet_id)) - tail;
}

CVector abel_point(const PeriodData& pd, const SurfacePoint& p, bool alternate) {
  return pd.A_mat * abel_integral(pd, p, alternate).head(pd.h());
}

CVector abel_prym(const PeriodData& pd, const PhaseConfiguration& config, bool alternate) {
  const std::size_t n = config.size();
  std::vector<CVector> parts(n);
  parallel_for(n, [&](std::size_t i) { parts[i] = abel_point(pd, config.points[i], alternate); });
  CVector phi = CVector::Zero(pd.h());
  for (const auto& v : parts) phi += v;
  return phi;
}

CVector abel_infinity(const PeriodData& pd, int index) {
  if (index < 0 || index >= static_cast<int>(pd.infinity.size())) throw ConfigError("no such point over infinity");
  const auto& l0 = pd.infinity[0];
  const auto& lj = pd.infinity[index];
  const CVector raw = l0.values + walk_integral(pd, sheet_walk(pd.cycles, l0.arrival, lj.arrival)) - lj.values;
  return pd.A_mat * raw.head(pd.h());
}

CVector abel_chart(const PeriodData& pd, int index, cplx z) {
  const SpectralCurve& c = pd.curve;
  const auto labels = c.infinity_labels();
  if (index < 0 || index >= static_cast<int>(labels.size())) throw ConfigError("no such point over infinity");
  const FiberModel chart(c, true);
  const auto res = integrate_path(chart, XPath::line(0.0, z, 0.0), Fiber{1.0, labels[index]}, pd.h() + 1,
                                  chart_integrand(c), pd.quad);
  return abel_infinity(pd, index) + pd.A_mat * res.values.head(pd.h());
}

LatticeFit lattice_fit(const PeriodData& pd, const CVector& v) {
  const int h = pd.h();
  RVector d(h);
  for (int j = 0; j < h; ++j) d[j] = static_cast<double>(pd.divisors[j]);
  LatticeFit fit;
  const RVector w = pd.tau.imag().ldlt().solve(v.imag());
  fit.n = w.cwiseQuotient(d);
  fit.m = v.real() - pd.tau.real() * w;
  for (int j = 0; j < h; ++j)
    fit.residual = std::max({fit.residual, std::abs(fit.n[j] - std::round(fit.n[j])),
                             std::abs(fit.m[j] - std::round(fit.m[j]))});
  return fit;
}

std::pair<Series, Series> infinity_expansion(const SpectralCurve& curve, int point, int order) {
  const auto labels = curve.infinity_labels();
  if (point < 0 || point >= static_cast<int>(labels.size())) throw ConfigError("no such point over infinity");
  const cplx L0 = labels[point];
  const auto& pc = curve.base().coeffs();
  Series Pt(order);
  for (int k = 0; k <= 5; ++k)
    if (10 - 2 * k <= order) Pt[10 - 2 * k] = pc[k];
  const Series Y = sqrt(Pt, 1.0);
  const CVector& H = curve.hams();
  const double scale = curve.residual_scale();
  if (std::abs(L0) < 1e-8 * scale) throw DegenerateCurve("lambda vanishes over infinity");
  if (curve.family() == Family::SL2) return {Y, sqrt(-1.0 * even_quadratic(H[2], H[1], H[0], order), L0)};
  const Series p = even_quadratic(H[2], H[1], H[0], order), q = even_quadratic(H[5], H[4], H[3], order);
  const Series disc = p * p - 4.0 * (q * q);
  const cplx s0 = 2.0 * L0 * L0 + p[0];
  if (std::abs(s0) < 1e-8 * scale || std::abs(s0 * s0 - disc[0]) > 1e-8 * scale * scale)
    throw DegenerateCurve("fiber over infinity is ramified");
  const Series L2 = 0.5 * (sqrt(disc, s0) - p);
  return {Y, sqrt(L2, L0)};
}

std::vector<Series> chart_density_series(const SpectralCurve& curve, int point, int order) {
  auto [Y, L] = infinity_expansion(curve, point, order);
  const int h = curve.h();
  std::vector<Series> f(h + 1);
  if (curve.family() == Family::SL2) {
    const Series d = -1.0 * inverse(Y * L);
    f[0] = shift(d, 4);
    f[1] = shift(d, 2);
    f[2] = d;
  } else {
    const CVector& H = curve.hams();
    const Series p = even_quadratic(H[2], H[1], H[0], order), q = even_quadratic(H[5], H[4], H[3], order);
    const Series D = -2.0 * inverse(Y * (4.0 * (L * L) + 2.0 * p));
    const Series a = q * D / L, b = L * D;
    f[0] = shift(a, 4);
    f[1] = shift(a, 2);
    f[2] = a;
    f[3] = shift(b, 4);
    f[4] = shift(b, 2);
    f[5] = b;
  }
  f[h] = -2.0 * L / Y;
  return f;
}

AbelJet abel_jet(const PeriodData& pd, int point, int order) {
  if (order < 1) throw ConfigError("jet order must be positive");
  const auto f = chart_density_series(pd.curve, point, order - 1);
  const int h = pd.h();
  CMatrix raw(h, order);
  for (int k = 0; k < h; ++k)
    for (int l = 0; l < order; ++l) raw(k, l) = f[k][l];
  return AbelJet{point, order, pd.A_mat * raw};
}

ActionAngleData action_variables(const PeriodData& pd) {
  const DifferentialBasis basis(pd.curve);
  const CVector c = basis.action_coefficients();
  ActionAngleData out;
  out.I = pd.A_periods.transpose() * c;
  const CVector Ib = pd.B_periods.transpose() * c;
  const double res = std::max((out.I - pd.A_action).cwiseAbs().maxCoeff(), (Ib - pd.B_action).cwiseAbs().maxCoeff());
  if (!(res <= 1e-7)) throw ExpansionResidual("lambda dx / y expansion misses by " + std::to_string(res));
  out.dI_dH = -pd.A_periods.transpose() * basis.action_derivative_map();
  Eigen::PartialPivLU<CMatrix> lu(out.dI_dH);
  if (!(lu.rcond() > 1e-13)) throw RankDeficiency("dI/dH is singular");
  out.frequencies = lu.inverse().transpose();
  return out;
}

}  // namespace hitchin
