#include "hitchin/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hitchin/errors.hpp"
#include "hitchin/sov.hpp"

namespace hitchin {

namespace {

// Orbit size of the points over infinity under tau.
constexpr double kOrbit = 2.0;

int partner(const std::vector<cplx>& labels, int j) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    const double d = std::abs(labels[i] + labels[j]);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

// ln theta at the sample points of a closed loop, with the branch of the
// logarithm continued node to node. Returns false if the loop winds.
bool log_theta_loop(const ThetaContext& ctx, const std::vector<CVector>& args, std::vector<cplx>& out) {
  const std::size_t n = args.size();
  out.resize(n);
  double prev = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto [e, v] = ctx.parts(args[i]);
    if (v == cplx{}) throw NearThetaDivisor("theta vanishes on the contour");
    double a = std::arg(v);
    if (i > 0) {
      double d = std::remainder(a - prev, 2.0 * kPi);
      total += d;
      a = prev + d;
    }
    prev = a;
    out[i] = cplx(e + std::log(std::abs(v)), i == 0 ? std::arg(v) : a);
  }
  total += std::remainder(std::arg(ctx.parts(args[0]).second) - prev, 2.0 * kPi);
  return std::abs(total) < kPi;
}

// Halves r until two consecutive circle estimates agree; returns the one on
// the larger circle.
template <class F>
bool settle(double r, double tol, F&& at, cplx& out) {
  bool have = false;
  cplx prev;
  for (int attempt = 0; attempt < 10; ++attempt, r *= 0.5) {
    cplx v;
    if (!at(r, v)) {
      have = false;
      continue;
    }
    if (have && std::abs(v - prev) <= tol * std::max(std::abs(v), 1.0)) {
      out = prev;
      return true;
    }
    prev = v;
    have = true;
  }
  return false;
}

}  // namespace

InfinityData infinity_data(const PeriodData& pd, int order) {
  InfinityData inf;
  inf.order = order;
  const auto labels = pd.curve.infinity_labels();
  std::vector<bool> seen(labels.size(), false);
  for (int j = 0; j < static_cast<int>(labels.size()); ++j) {
    if (seen[j]) continue;
    const int t = partner(labels, j);
    seen[j] = true;
    if (t >= 0) seen[t] = true;
    inf.points.push_back(j);
    inf.images.push_back(abel_infinity(pd, j));
    AbelJet jet = abel_jet(pd, j, order);
    std::vector<Series> a(pd.h(), Series(order));
    for (int s = 0; s < pd.h(); ++s)
      for (int l = 1; l <= order; ++l) a[s][l] = jet.phi(s, l - 1) / static_cast<double>(l);
    inf.jets.push_back(std::move(jet));
    inf.abel.push_back(std::move(a));
  }
  return inf;
}

double divisor_residual(const PeriodData& pd, const ThetaContext& ctx, const PhaseConfiguration& config,
                        const CVector& phi, const CVector& K) {
  double worst = 0.0;
  for (const auto& p : config.points) {
    const Jet j = ctx.jet(abel_point(pd, p) - phi - K, 0);
    worst = std::max(worst, std::abs(j[0]) / j.term_scale());
  }
  return worst;
}

RiemannConstants calibrate_K(const PeriodData& pd, const ThetaContext& ctx, const PhaseConfiguration& gamma0,
                             const CVector& phi0, const CalibrationOptions& opt) {
  const int h = pd.h();
  std::vector<CVector> pts;
  for (const auto& p : gamma0.points) pts.push_back(abel_point(pd, p) - phi0);

  // Values and gradients scaled by the largest lattice term at the current
  // iterate; trial points reuse those scales so the merit is |F|^2 of one
  // holomorphic map.
  std::vector<double> scale(h);
  auto eval = [&](const CVector& K, CVector& f, CMatrix& J) {
    double worst = 0.0;
    for (int i = 0; i < h; ++i) {
      const Jet jet = ctx.jet(pts[i] - K, 1);
      scale[i] = jet.log_scale() + std::log(jet.term_scale());
      f[i] = jet[0] / jet.term_scale();
      worst = std::max(worst, std::abs(f[i]));
      for (int j = 0; j < h; ++j) J(i, j) = -jet[1 + j] / jet.term_scale();
    }
    return worst;
  };
  auto trial = [&](const CVector& K) {
    double n2 = 0.0;
    for (int i = 0; i < h; ++i) {
      const Jet jet = ctx.jet(pts[i] - K, 0);
      n2 += std::norm(jet[0] * std::exp(jet.log_scale() - scale[i]));
    }
    return std::sqrt(n2);
  };

  const std::int64_t total = std::int64_t{1} << (2 * h);
  const std::int64_t seeds = opt.max_seeds < 0 ? total : std::min<std::int64_t>(total, opt.max_seeds);
  RiemannConstants best;
  best.fit_residual = std::numeric_limits<double>::infinity();
  CVector f(h);
  CMatrix J(h, h);
  for (std::int64_t s = 0; s < seeds; ++s) {
    CVector m(h), n(h);
    for (int j = 0; j < h; ++j) {
      m[j] = static_cast<double>((s >> j) & 1);
      n[j] = static_cast<double>((s >> (h + j)) & 1);
    }
    CVector K = 0.5 * (m + ctx.tau() * n);
    double res = eval(K, f, J);
    for (int it = 0; it < opt.max_iter && res > 1e-13; ++it) {
      const CVector step = -J.partialPivLu().solve(f);
      if (!step.allFinite()) break;
      const double r0 = f.norm();
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 12; ++ls, alpha *= 0.5)
        if (trial(K + alpha * step) < r0) {
          moved = true;
          break;
        }
      if (!moved) break;
      K += alpha * step;
      res = eval(K, f, J);
      if ((alpha * step).cwiseAbs().maxCoeff() < 1e-15) break;
    }
    if (res <= opt.tol) ++best.converged;
    if (res < best.fit_residual) {
      best.fit_residual = res;
      best.K = K;
      best.seed = static_cast<int>(s);
    }
  }
  if (!(best.fit_residual <= opt.tol))
    throw CalibrationFailure("no half-period seed converged (best residual " + std::to_string(best.fit_residual) + ")");
  return best;
}

PrymInverter::PrymInverter(const PeriodData& pd, const ThetaContext& ctx)
    : pd_(pd), ctx_(ctx), inf_(infinity_data(pd, 2 * pd.h())) {
  if (ctx.dim() != pd.h()) throw ConfigError("theta context does not match the period data");
}

CVector PrymInverter::residues(const CVector& phi, const CVector& K, int kmax) const {
  if (kmax < 1 || kmax > h()) throw ConfigError("power sum index out of range");
  const int m = 2 * kmax;
  CVector out = CVector::Zero(kmax);
  for (std::size_t q = 0; q < inf_.points.size(); ++q) {
    const CVector w0 = inf_.images[q] - phi - K;
    std::vector<Series> w(h());
    for (int s = 0; s < h(); ++s) w[s] = inf_.abel[q][s].truncated(m);
    Series F;
    bool done = false;
    // Jets cost one coefficient per multi-index and lattice point, the series
    // along the curve about m per point.
    if (m <= ctx_.options().max_degree && index_set(h(), m)->size() <= 40 * m) {
      try {
        F = compose_series(log_jet(ctx_.jet(w0, m)), w, m);
        done = true;
      } catch (const TruncationOverflow&) {
      }
    }
    if (!done) {
      const auto a = ctx_.along(w0, w, m);
      if (std::abs(a.series[0]) <= 1e-12 * a.term_scale) throw NearThetaDivisor("theta vanishes at a point over infinity");
      F = log(a.series);
      F[0] += a.log_scale;
    }
    for (int k = 1; k <= kmax; ++k) out[k - 1] += kOrbit * static_cast<double>(2 * k) * F[2 * k];
  }
  return out;
}

CMatrix PrymInverter::kappa(int q, int k) const {
  const int d = 2 * k - 1;
  const auto I = index_set(h(), d);
  const AbelJet& jet = inf_.jets[q];
  // prod_s A_s^{j_s} / j_s! for every j, built from parents.
  std::vector<Series> prod(I->size());
  prod[0] = Series(d, 1.0);
  for (int r = 1; r < I->size(); ++r) {
    const int s = I->parent_var(r);
    prod[r] = (prod[I->parent(r)] * inf_.abel[q][s].truncated(d)).truncated(d) *
              (1.0 / static_cast<double>(I->at(r)[s]));
  }
  CMatrix out(h(), I->size());
  for (int i = 0; i < h(); ++i) {
    Series deriv(d);
    for (int l = 0; l <= d && l < jet.order; ++l) deriv[l] = jet.phi(i, l);
    for (int r = 0; r < I->size(); ++r) out(i, r) = (deriv * prod[r])[d];
  }
  return out;
}

cplx PrymInverter::residue_kappa(const CVector& phi, const CVector& K, int k) const {
  if (k < 1 || k > h()) throw ConfigError("power sum index out of range");
  const int d = 2 * k - 1;
  const auto I = index_set(h(), d);
  cplx out = 0.0;
  for (std::size_t q = 0; q < inf_.points.size(); ++q) {
    const Jet L = log_jet(ctx_.jet(inf_.images[q] - phi - K, 2 * k));
    const CMatrix kap = kappa(static_cast<int>(q), k);
    std::vector<int> a(h());
    for (int i = 0; i < h(); ++i)
      for (int r = 1; r < I->size(); ++r) {
        // D^j d_i ln theta = (j + e_i)! c_{j + e_i}
        std::copy(I->at(r), I->at(r) + h(), a.begin());
        ++a[i];
        double fact = 1.0;
        for (int s = 0; s < h(); ++s) fact *= std::tgamma(a[s] + 1.0);
        out += kOrbit * kap(i, r) * fact * L[L.indices().rank(a.data())];
      }
  }
  return out;
}

double PrymInverter::divisor_proximity(const CVector& phi, const CVector& K) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& img : inf_.images) {
    const Jet j = ctx_.jet(img - phi - K, 0);
    best = std::min(best, std::abs(j[0]) / j.term_scale());
  }
  return best;
}

double PrymInverter::chart_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (cplx c : pd_.curve.critical_x())
    if (std::abs(c) > 0.0) r = std::min(r, 1.0 / std::sqrt(std::abs(c)));
  return r;
}

cplx PrymInverter::residue_contour(const CVector& phi, const CVector& K, int k, const ContourOptions& opt) const {
  if (k < 1 || k > h()) throw ConfigError("power sum index out of range");
  const int N = std::max(opt.nodes, 4 * k + 4);
  cplx out = 0.0;
  for (std::size_t q = 0; q < inf_.points.size(); ++q) {
    // res z^-2k F'(z) dz = 2k [z^2k] F
    auto at = [&](double r, cplx& val) {
      std::vector<cplx> z(N);
      std::vector<CVector> args(N);
      for (int n = 0; n < N; ++n) {
        z[n] = std::polar(r, 2.0 * kPi * n / N);
        args[n] = abel_chart(pd_, inf_.points[q], z[n]) - phi - K;
      }
      std::vector<cplx> F;
      if (!log_theta_loop(ctx_, args, F)) return false;
      cplx c = 0.0;
      for (int n = 0; n < N; ++n) c += F[n] * std::pow(z[n], -2 * k);
      val = static_cast<double>(2 * k) * c / static_cast<double>(N);
      return true;
    };
    cplx v;
    if (opt.radius > 0.0) {
      if (!at(opt.radius, v)) throw NearThetaDivisor("theta winds on the contour");
    } else if (!settle(0.5 * std::min(chart_radius(), 1.0), 1e-7, at, v)) {
      throw NearThetaDivisor("no contour radius gives a stable residue");
    }
    out += kOrbit * v;
  }
  return out;
}

cplx PrymInverter::residue_closed_k1(const CVector& phi, const CVector& K) const {
  constexpr int N = 32;
  cplx out = 0.0;
  for (std::size_t q = 0; q < inf_.points.size(); ++q) {
    const CVector v = inf_.jets[q].phi.col(0);
    const CVector w0 = inf_.images[q] - phi - K;
    auto at = [&](double r, cplx& val) {
      std::vector<cplx> t(N);
      std::vector<CVector> args(N);
      for (int n = 0; n < N; ++n) {
        t[n] = std::polar(r, 2.0 * kPi * n / N);
        args[n] = w0 + t[n] * v;
      }
      std::vector<cplx> G;
      if (!log_theta_loop(ctx_, args, G)) return false;
      cplx c2 = 0.0;
      for (int n = 0; n < N; ++n) c2 += G[n] / (t[n] * t[n]);
      val = 2.0 * c2 / static_cast<double>(N);
      return true;
    };
    cplx d2;
    if (!settle(0.2 / std::max(v.cwiseAbs().maxCoeff(), 1e-300), 1e-10, at, d2))
      throw NearThetaDivisor("no radius gives a stable second derivative");
    out += kOrbit * d2;
  }
  return out;
}

CalibrationData PrymInverter::calibrate(const PhaseConfiguration& gamma0, const CalibrationOptions& opt) const {
  CalibrationData cal;
  cal.phi0 = abel_prym(pd_, gamma0);
  cal.K = calibrate_K(pd_, ctx_, gamma0, cal.phi0, opt);
  cal.sigma_ref = power_sums(gamma0.xs());
  cal.consts = cal.sigma_ref + residues(cal.phi0, cal.K.K, h());
  return cal;
}

CVector PrymInverter::sigma(const CalibrationData& cal, const CVector& phi) const {
  return cal.consts - residues(phi, cal.K.K, h());
}

cplx PrymInverter::sigma_series(const CalibrationData& cal, const CVector& phi, int k) const {
  return cal.consts[k - 1] - residues(phi, cal.K.K, k)[k - 1];
}

cplx PrymInverter::sigma_kappa(const CalibrationData& cal, const CVector& phi, int k) const {
  return cal.consts[k - 1] - residue_kappa(phi, cal.K.K, k);
}

cplx PrymInverter::sigma_contour(const CalibrationData& cal, const CVector& phi, int k,
                                 const ContourOptions& opt) const {
  return cal.consts[k - 1] - residue_contour(phi, cal.K.K, k, opt);
}

CVector power_sums(const CVector& x) {
  const int h = static_cast<int>(x.size());
  CVector s = CVector::Zero(h);
  for (int i = 0; i < h; ++i) {
    cplx p = 1.0;
    for (int k = 0; k < h; ++k) {
      p *= x[i];
      s[k] += 2.0 * p;
    }
  }
  return s;
}

CVector power_sums_to_x(const CVector& sigma, const RootOptions& opt) {
  const int h = static_cast<int>(sigma.size());
  if (h < 1) throw ConfigError("no power sums");
  const CVector p = 0.5 * sigma;
  // Newton's identities: k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i.
  std::vector<cplx> e(h + 1, 0.0);
  e[0] = 1.0;
  for (int k = 1; k <= h; ++k) {
    cplx acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += (i % 2 ? 1.0 : -1.0) * e[k - i] * p[i - 1];
    e[k] = acc / static_cast<double>(k);
  }
  // x^h + a_{h-1} x^{h-1} + ... + a_0, a_{h-k} = (-1)^k e_k.
  std::vector<cplx> a(h + 1);
  a[h] = 1.0;
  for (int k = 1; k <= h; ++k) a[h - k] = (k % 2 ? -1.0 : 1.0) * e[k];
  CMatrix C = CMatrix::Zero(h, h);
  for (int i = 1; i < h; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < h; ++i) C(i, h - 1) = -a[i];
  Eigen::ComplexEigenSolver<CMatrix> es(C, false);
  CVector x = es.eigenvalues();

  auto P = [&](cplx z, cplx& dP) {
    cplx v = a[h];
    dP = 0.0;
    for (int i = h - 1; i >= 0; --i) {
      dP = dP * z + v;
      v = v * z + a[i];
    }
    return v;
  };
  double scale = 1.0;
  for (int i = 0; i < h; ++i) scale = std::max(scale, std::abs(x[i]));
  const double eps = std::numeric_limits<double>::epsilon();

  // Clusters whose spread is consistent with rounding of a multiple root: m
  // roots within 10 eps^(1/m) of one of them, largest m first.
  std::vector<std::vector<int>> groups;
  std::vector<bool> used(h, false);
  for (int m = h; m >= 1; --m)
    for (int i = 0; i < h; ++i) {
      if (used[i]) continue;
      const double rad = 10.0 * std::pow(eps, 1.0 / m) * scale;
      std::vector<std::pair<double, int>> near;
      for (int j = 0; j < h; ++j)
        if (!used[j] && std::abs(x[j] - x[i]) < rad) near.push_back({std::abs(x[j] - x[i]), j});
      if (static_cast<int>(near.size()) < m) continue;
      std::sort(near.begin(), near.end());
      std::vector<int> g;
      for (int t = 0; t < m; ++t) {
        g.push_back(near[t].second);
        used[near[t].second] = true;
      }
      groups.push_back(g);
    }
  std::vector<int> cluster(h);
  const int nc = static_cast<int>(groups.size());
  for (int c = 0; c < nc; ++c)
    for (int i : groups[c]) cluster[i] = c;
  CVector out(h);
  for (int c = 0; c < nc; ++c) {
    std::vector<int> mem;
    for (int i = 0; i < h; ++i)
      if (cluster[i] == c) mem.push_back(i);
    cplx mean = 0.0;
    for (int i : mem) mean += x[i];
    mean /= static_cast<double>(mem.size());
    if (mem.size() == 1) {
      for (int it = 0; it < 3; ++it) {
        cplx d;
        const cplx v = P(mean, d);
        if (d == cplx{}) break;
        mean -= v / d;
      }
      cplx d;
      P(mean, d);
      double absP = 0.0;
      for (int i = h; i >= 0; --i) absP = absP * std::abs(mean) + std::abs(a[i]);
      const double cond = absP / std::max(std::abs(d) * std::max(std::abs(mean), 1.0), 1e-300);
      if (!(cond <= opt.max_condition))
        throw IllConditionedRoots("root condition number " + std::to_string(cond));
    }
    for (int i : mem) out[i] = mean;
  }
  return out;
}

PhaseConfiguration reconstruct_configuration(const SpectralCurve& curve, const CVector& x,
                                             const PhaseConfiguration& reference, const ReconstructOptions& opt) {
  const int h = reference.size();
  if (x.size() != h) throw ConfigError("x multiset and reference differ in size");
  std::vector<int> perm(h), best_perm;
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity(), second = best;
  do {
    double cost = 0.0;
    for (int i = 0; i < h; ++i) {
      const cplx a = x[perm[i]], b = reference.points[i].x;
      cost += std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
    }
    if (cost < best) {
      second = best;
      best = cost;
      best_perm = perm;
    } else if (cost < second) {
      second = cost;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  // Repeated x values give identical assignments.
  if (h > 1 && second <= (1.0 + opt.ambiguity) * best && second > best)
    throw AmbiguousAssignment("assignments within " + std::to_string(second / std::max(best, 1e-300) - 1.0));

  PhaseConfiguration out;
  for (int i = 0; i < h; ++i) {
    const SurfacePoint& ref = reference.points[i];
    const cplx xn = x[best_perm[i]];
    const auto lifts = lift_x(curve, xn, 0.0);
    // Far out, y ~ x^(5/2) and lambda ~ x: carry the reference along.
    cplx py = ref.y, pl = ref.lambda;
    if (std::min(std::abs(xn), std::abs(ref.x)) > 1.0) {
      const cplx rho = xn / ref.x;
      py *= std::pow(std::sqrt(rho), 5);
      pl *= rho;
    }
    double bd = std::numeric_limits<double>::infinity(), sd = bd;
    const SurfacePoint* pick = nullptr;
    for (const auto& s : lifts) {
      const double d = std::max(std::abs(s.y - py) / std::max({std::abs(s.y), std::abs(py), 1.0}),
                                std::abs(s.lambda - pl) / std::max({std::abs(s.lambda), std::abs(pl), 1.0}));
      if (d < bd) {
        sd = bd;
        bd = d;
        pick = &s;
      } else if (d < sd) {
        sd = d;
      }
    }
    if (!(sd > (1.0 + opt.ambiguity) * bd)) throw BranchCollision("two lifts are equally close to the reference");
    const auto res = residuals(curve, *pick);
    const double grow = std::pow(std::max(std::abs(pick->x), 1.0), 5);
    if (!(std::max(res[0], res[1]) <= opt.residual_tol * curve.residual_scale() * grow))
      throw InconsistentGeometry("reconstructed point is off the curve");
    out.points.push_back(*pick);
  }
  return out;
}

TrajectoryRecord theta_trajectory(const PrymInverter& inv, const CalibrationData& cal,
                                  const PhaseConfiguration& gamma0, int k, const std::vector<double>& times,
                                  const ThetaTrajectoryOptions& opt) {
  const PeriodData& pd = inv.periods();
  if (k < 0 || k >= pd.h()) throw ConfigError("Hamiltonian index out of range");
  const CVector nu = action_variables(pd).frequencies.col(k);
  const CVector H0 = pd.curve.hams();
  TrajectoryRecord rec;
  rec.provenance = "theta";
  PhaseConfiguration prev = gamma0;
  for (std::size_t s = 0; s < times.size(); ++s) {
    const double dt = s > 0 ? times[s] - times[s - 1] : (times.size() > 1 ? times[1] - times[0] : 0.0);
    static constexpr double kShift[] = {0.0, 0.1, -0.1, 0.05};
    double t = times[s];
    PhaseConfiguration cfg;
    for (int attempt = 0;; ++attempt) {
      t = times[s] + kShift[attempt] * dt;
      try {
        const CVector phi = cal.phi0 + nu * t;
        if (const double d = inv.divisor_proximity(phi, cal.K.K); d < opt.divisor_proximity)
          throw NearThetaDivisor("theta at infinity " + std::to_string(d));
        const CVector x = power_sums_to_x(inv.sigma(cal, phi), opt.roots);
        cfg = reconstruct_configuration(pd.curve, x, prev, opt.reconstruct);
        break;
      } catch (const NearThetaDivisor& e) {
        if (attempt >= opt.retries || dt == 0.0)
          throw NearThetaDivisor("sample " + std::to_string(s) + ": " + e.what());
        rec.warnings.push_back("sample " + std::to_string(s) + " t=" + std::to_string(t) +
                               ": near theta divisor, resampled");
      } catch (const Error& e) {
        throw Error(e.error_class(), "sample " + std::to_string(s) + ": " + e.what());
      }
    }
    double cres = 0.0;
    for (const auto& p : cfg.points) {
      const auto r = residuals(pd.curve, p);
      cres = std::max({cres, r[0], r[1]});
    }
    double hres = std::numeric_limits<double>::quiet_NaN();
    try {
      const auto sol = solve_hamiltonians(pd.curve.base(), pd.curve.family(), cfg, H0);
      hres = (sol.H() - H0).cwiseAbs().maxCoeff();
    } catch (const Error& e) {
      rec.warnings.push_back("sample " + std::to_string(s) + ": " + e.what());
    }
    rec.times.push_back(t);
    rec.configs.push_back(cfg);
    rec.ham_residual.push_back(hres);
    rec.curve_residual.push_back(cres);
    prev = cfg;
  }
  return rec;
}

}  // namespace hitchin
