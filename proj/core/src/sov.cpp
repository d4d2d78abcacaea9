#include "hitchin/sov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "hitchin/errors.hpp"
#include "hitchin/poly.hpp"

namespace hitchin {

namespace {

double x_separation_tol(const PhaseConfiguration& c) {
  double m = 0.0;
  for (const auto& p : c.points) m = std::max(m, std::abs(p.x));
  return 1e-8 * (1.0 + m);
}

void check_distinct(const PhaseConfiguration& c) {
  const double tol = x_separation_tol(c);
  for (int i = 0; i < c.size(); ++i)
    for (int j = i + 1; j < c.size(); ++j)
      if (std::abs(c.points[i].x - c.points[j].x) <= tol) throw SingularSystem("repeated x in configuration");
}

CMatrix rel_matrix(const SpectralCurve& curve, const PhaseConfiguration& c) {
  const int h = curve.h();
  CMatrix M(h, h);
  std::vector<cplx> row(h);
  for (int i = 0; i < h; ++i) {
    curve.dR_dH(c.points[i].lambda, c.points[i].x, row.data());
    for (int k = 0; k < h; ++k) M(i, k) = row[k];
  }
  return M;
}

// ---- SO4 solve --------------------------------------------------------------
//
// With W = diag(lambda^2) V the relations read W hp = -(lambda^4 + (V hq)^2).
// Projecting on the left null space N of W leaves three quadrics in hq, solved
// by a total-degree homotopy; hp follows by least squares.

struct Quadrics {
  CMatrix N;     // 6 x 3, N^T W = 0
  CMatrix V;     // 6 x 3 Vandermonde
  CVector lam4;  // lambda^4
  CVector c;     // N^T lambda^4

  CVector f(const CVector& hq) const {
    CVector Q = V * hq;
    return c + N.transpose() * Q.cwiseProduct(Q);
  }
  CMatrix J(const CVector& hq) const {
    CVector Q = V * hq;
    return N.transpose() * (2.0 * Q).asDiagonal() * V;
  }
};

struct Homotopy {
  const Quadrics& F;
  cplx gamma;
  CVector H(const CVector& h, double t) const {
    CVector g = h.cwiseProduct(h) - CVector::Ones(3);
    return (1.0 - t) * gamma * g + t * F.f(h);
  }
  CMatrix Hh(const CVector& h, double t) const {
    CMatrix Jg = (2.0 * h).asDiagonal();
    return (1.0 - t) * gamma * Jg + t * F.J(h);
  }
  CVector Ht(const CVector& h) const {
    CVector g = h.cwiseProduct(h) - CVector::Ones(3);
    return F.f(h) - gamma * g;
  }
  CVector velocity(const CVector& h, double t) const { return -Hh(h, t).partialPivLu().solve(Ht(h)); }
};

std::optional<CVector> track_path(const Homotopy& hm, CVector h) {
  double t = 0.0, dt = 0.02;
  int steps = 0;
  while (t < 1.0) {
    if (++steps > 20000 || dt < 1e-14) return std::nullopt;
    const double step = std::min(dt, 1.0 - t);
    // RK4 predictor.
    CVector k1 = hm.velocity(h, t);
    CVector k2 = hm.velocity(h + 0.5 * step * k1, t + 0.5 * step);
    CVector k3 = hm.velocity(h + 0.5 * step * k2, t + 0.5 * step);
    CVector k4 = hm.velocity(h + step * k3, t + step);
    CVector hp = h + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double tn = t + step;
    bool ok = hp.allFinite();
    for (int it = 0; ok && it < 3; ++it) {
      CVector d = hm.Hh(hp, tn).partialPivLu().solve(hm.H(hp, tn));
      hp -= d;
      if (!hp.allFinite()) ok = false;
      if (d.norm() <= 1e-11 * (1.0 + hp.norm())) break;
      if (it == 2) ok = false;
    }
    if (ok && (hp - h).norm() > 0.3 * (1.0 + h.norm())) ok = false;
    if (!ok) {
      dt = 0.5 * step;
      continue;
    }
    h = hp;
    t = tn;
    dt = std::min(1.5 * step, 0.05);
    if (h.norm() > 1e8) return std::nullopt;
  }
  return h;
}

bool lex_less(const CVector& a, const CVector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].real() - b[i].real()) > 1e-9) return a[i].real() < b[i].real();
    if (std::abs(a[i].imag() - b[i].imag()) > 1e-9) return a[i].imag() < b[i].imag();
  }
  return false;
}

std::vector<CVector> solve_so4(const BaseCurve& base, const PhaseConfiguration& c) {
  const int h = 6;
  Quadrics F;
  F.V.resize(h, 3);
  CMatrix W(h, 3);
  F.lam4.resize(h);
  for (int i = 0; i < h; ++i) {
    const cplx x = c.points[i].x, l2 = c.points[i].lambda * c.points[i].lambda;
    F.lam4[i] = l2 * l2;
    for (int k = 0; k < 3; ++k) {
      F.V(i, k) = std::pow(x, k);
      W(i, k) = l2 * F.V(i, k);
    }
  }
  Eigen::JacobiSVD<CMatrix> svd(W, Eigen::ComputeFullU);
  F.N = svd.matrixU().rightCols(3).conjugate();
  F.c = F.N.transpose() * F.lam4;

  const SpectralCurve probe(base, Family::SO4, CVector::Zero(6));
  double scale = 1.0;
  for (int i = 0; i < h; ++i) scale = std::max(scale, std::abs(F.lam4[i]));

  Homotopy hm{F, std::polar(1.0, 0.8341)};
  std::vector<CVector> out;
  for (int s = 0; s < 8; ++s) {
    CVector h0(3);
    for (int j = 0; j < 3; ++j) h0[j] = (s >> j) & 1 ? -1.0 : 1.0;
    auto hq = track_path(hm, h0);
    if (!hq) continue;
    CVector Q = F.V * *hq;
    CVector rhs = -(F.lam4 + Q.cwiseProduct(Q));
    CVector hp = W.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    CVector H(6);
    H << hp, *hq;
    // Newton on the full system.
    for (int it = 0; it < 12; ++it) {
      SpectralCurve cur = probe.with_hams(H);
      CVector r(h);
      for (int i = 0; i < h; ++i) r[i] = cur.R(c.points[i].lambda, c.points[i].x);
      if (r.cwiseAbs().maxCoeff() <= 1e-15 * scale) break;
      CMatrix M = rel_matrix(cur, c);
      CVector d = M.fullPivLu().solve(r);
      if (!d.allFinite()) break;
      H -= d;
      if (d.norm() <= 1e-16 * (1.0 + H.norm())) break;
    }
    SpectralCurve cur = probe.with_hams(H);
    double res = 0.0;
    for (int i = 0; i < h; ++i) res = std::max(res, std::abs(cur.R(c.points[i].lambda, c.points[i].x)));
    if (!(res <= 1e-10 * scale)) continue;
    bool dup = false;
    for (const auto& o : out)
      if ((o - H).norm() <= 1e-7 * (1.0 + H.norm())) dup = true;
    if (!dup) out.push_back(H);
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

cplx fd(const std::function<cplx(double)>& f, double step) {
  return (f(-2.0 * step) - 8.0 * f(-step) + 8.0 * f(step) - f(2.0 * step)) / (12.0 * step);
}

}  // namespace

void validate_configuration(const BaseCurve& base, Family family, const PhaseConfiguration& config) {
  if (config.size() != phase_dim(family))
    throw ConfigError("configuration must have " + std::to_string(phase_dim(family)) + " points");
  check_distinct(config);
}

void validate_configuration(const SpectralCurve& curve, const PhaseConfiguration& config, double tol) {
  validate_configuration(curve.base(), curve.family(), config);
  const double s = curve.residual_scale();
  for (const auto& p : config.points) {
    auto r = residuals(curve, p);
    if (r[0] > tol * s || r[1] > tol * s) throw InconsistentGeometry("configuration point is off the curve");
  }
}

HamiltonianSolution solve_hamiltonians(const BaseCurve& base, Family family, const PhaseConfiguration& config,
                                       const std::optional<CVector>& hint) {
  validate_configuration(base, family, config);
  HamiltonianSolution sol;
  if (family == Family::SL2) {
    CMatrix V(3, 3);
    CVector rhs(3);
    for (int i = 0; i < 3; ++i) {
      const cplx x = config.points[i].x;
      V(i, 0) = 1.0;
      V(i, 1) = x;
      V(i, 2) = x * x;
      rhs[i] = -config.points[i].lambda * config.points[i].lambda;
    }
    auto lu = V.fullPivLu();
    if (!lu.isInvertible()) throw SingularSystem("Vandermonde system is singular");
    CVector H = lu.solve(rhs);
    // One refinement step.
    H += lu.solve(rhs - V * H);
    sol.solutions.push_back(H);
  } else {
    sol.solutions = solve_so4(base, config);
    if (sol.solutions.empty()) throw NoRealizableH("no Hamiltonian vector satisfies the relations");
  }
  if (hint) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < sol.solutions.size(); ++s) {
      const double d = (sol.solutions[s] - *hint).norm();
      if (d < best) {
        best = d;
        sol.chosen = s;
      }
    }
  }
  return sol;
}

cplx poisson_bracket(const Observable& F, const Observable& G, const PhaseConfiguration& config) {
  const int h = config.size();
  const CVector lam = config.lambdas(), x = config.xs();
  auto partial = [&](const Observable& O, bool wrt_lambda, int i) {
    const cplx v = wrt_lambda ? lam[i] : x[i];
    const double step = 1e-3 * (1.0 + std::abs(v));
    return fd(
        [&](double d) {
          CVector l2 = lam, x2 = x;
          (wrt_lambda ? l2 : x2)[i] += d;
          return O(l2, x2);
        },
        step);
  };
  cplx acc = 0.0;
  for (int i = 0; i < h; ++i) {
    acc += config.points[i].y *
           (partial(F, true, i) * partial(G, false, i) - partial(G, true, i) * partial(F, false, i));
  }
  return acc;
}

HamiltonianGradients hamiltonian_gradients(const SpectralCurve& curve, const PhaseConfiguration& config) {
  const int h = curve.h();
  if (config.size() != h) throw ConfigError("configuration size does not match the family");
  HamiltonianGradients g;
  g.dR_dH = rel_matrix(curve, config);
  auto lu = g.dR_dH.partialPivLu();
  if (!(lu.rcond() > 1e-13)) throw RankDeficiency("dR/dH is singular at this configuration");
  CVector rl(h), rx(h);
  for (int i = 0; i < h; ++i) {
    rl[i] = curve.R_lambda(config.points[i].lambda, config.points[i].x);
    rx[i] = curve.R_x(config.points[i].lambda, config.points[i].x);
  }
  CMatrix Minv = lu.inverse();
  g.dH_dlambda = -Minv * rl.asDiagonal();
  g.dH_dx = -Minv * rx.asDiagonal();
  return g;
}

CMatrix hamiltonian_brackets(const SpectralCurve& curve, const PhaseConfiguration& config) {
  auto g = hamiltonian_gradients(curve, config);
  const int h = curve.h();
  CMatrix B = CMatrix::Zero(h, h);
  for (int a = 0; a < h; ++a)
    for (int b = 0; b < h; ++b) {
      cplx acc = 0.0;
      for (int i = 0; i < h; ++i)
        acc += config.points[i].y * (g.dH_dlambda(a, i) * g.dH_dx(b, i) - g.dH_dlambda(b, i) * g.dH_dx(a, i));
      B(a, b) = acc;
    }
  return B;
}

double commutation_check(const SpectralCurve& curve, const PhaseConfiguration& config) {
  return hamiltonian_brackets(curve, config).cwiseAbs().maxCoeff();
}

namespace {

using State = std::vector<double>;

struct FlowSystem {
  const SpectralCurve& curve;
  int k;
  int h;

  void operator()(const State& s, State& ds, double) const {
    CMatrix M(h, h);
    std::vector<cplx> row(h);
    std::vector<cplx> x(h), l(h), y(h);
    for (int i = 0; i < h; ++i) {
      x[i] = {s[2 * i], s[2 * i + 1]};
      l[i] = {s[2 * (h + i)], s[2 * (h + i) + 1]};
      y[i] = {s[2 * (2 * h + i)], s[2 * (2 * h + i) + 1]};
      curve.dR_dH(l[i], x[i], row.data());
      for (int kk = 0; kk < h; ++kk) M(i, kk) = row[kk];
    }
    CVector ek = CVector::Zero(h);
    ek[k] = 1.0;
    CVector r = M.transpose().partialPivLu().solve(ek);  // row k of M^-1
    for (int i = 0; i < h; ++i) {
      const cplx xd = -y[i] * r[i] * curve.R_lambda(l[i], x[i]);
      const cplx ld = y[i] * r[i] * curve.R_x(l[i], x[i]);
      const cplx yd = curve.base().dP(x[i]) * xd / (2.0 * y[i]);
      ds[2 * i] = xd.real();
      ds[2 * i + 1] = xd.imag();
      ds[2 * (h + i)] = ld.real();
      ds[2 * (h + i) + 1] = ld.imag();
      ds[2 * (2 * h + i)] = yd.real();
      ds[2 * (2 * h + i) + 1] = yd.imag();
    }
  }
};

PhaseConfiguration unpack(const State& s, int h) {
  PhaseConfiguration c;
  for (int i = 0; i < h; ++i)
    c.points.push_back({{s[2 * i], s[2 * i + 1]},
                        {s[2 * (2 * h + i)], s[2 * (2 * h + i) + 1]},
                        {s[2 * (h + i)], s[2 * (h + i) + 1]},
                        -1});
  return c;
}

}  // namespace

TrajectoryRecord ode_flow(const SpectralCurve& curve, const PhaseConfiguration& config0, int k,
                          const std::vector<double>& times, double rel_tol) {
  namespace odeint = boost::numeric::odeint;
  const int h = curve.h();
  if (k < 0 || k >= h) throw ConfigError("Hamiltonian index out of range");
  if (times.empty()) throw ConfigError("empty time grid");
  validate_configuration(curve, config0);

  std::vector<cplx> branch(curve.base().roots().begin(), curve.base().roots().end());
  for (cplx b : curve.branch_x()) branch.push_back(b);
  const double clearance = 1e-4 * (1.0 + poly::min_separation(branch));

  State s(6 * h);
  for (int i = 0; i < h; ++i) {
    const auto& p = config0.points[i];
    s[2 * i] = p.x.real();
    s[2 * i + 1] = p.x.imag();
    s[2 * (h + i)] = p.lambda.real();
    s[2 * (h + i) + 1] = p.lambda.imag();
    s[2 * (2 * h + i)] = p.y.real();
    s[2 * (2 * h + i) + 1] = p.y.imag();
  }

  TrajectoryRecord rec;
  rec.provenance = "ode";
  const CVector H0 = curve.hams();
  auto record = [&](double t, const PhaseConfiguration& c) {
    rec.times.push_back(t);
    rec.configs.push_back(c);
    auto hs = solve_hamiltonians(curve.base(), curve.family(), c, H0);
    rec.ham_residual.push_back((hs.H() - H0).cwiseAbs().maxCoeff());
    double cr = 0.0;
    for (const auto& p : c.points) {
      auto r = residuals(curve, p);
      cr = std::max({cr, r[0], r[1]});
    }
    rec.curve_residual.push_back(cr);
  };

  FlowSystem sys{curve, k, h};
  auto stepper = odeint::make_controlled(rel_tol, rel_tol, odeint::runge_kutta_fehlberg78<State>());
  PhaseConfiguration c0 = config0;
  for (auto& p : c0.points) p.sheet_id = -1;
  record(times[0], c0);
  for (std::size_t n = 1; n < times.size(); ++n) {
    const double t0 = times[n - 1], t1 = times[n];
    if (t1 != t0) {
      std::size_t count = 0;
      auto obs = [&](const State& st, double) {
        if (++count > 200000) throw StepFailure("too many integrator steps");
        for (int i = 0; i < h; ++i) {
          const cplx x{st[2 * i], st[2 * i + 1]};
          if (!std::isfinite(std::abs(x))) throw StepFailure("non-finite state");
          for (cplx b : branch)
            if (std::abs(x - b) < clearance) throw BranchCollision("separating variable hit a branch x-value");
        }
      };
      try {
        odeint::integrate_adaptive(stepper, sys, s, t0, t1, (t1 - t0) / 16.0, obs);
      } catch (const Error&) {
        throw;
      } catch (const std::exception& e) {
        throw StepFailure(e.what());
      }
    }
    // Re-lift y by continuity.
    for (int i = 0; i < h; ++i) {
      const cplx x{s[2 * i], s[2 * i + 1]};
      const cplx y{s[2 * (2 * h + i)], s[2 * (2 * h + i) + 1]};
      cplx r = std::sqrt(curve.base().P(x));
      if (std::abs(r - y) > std::abs(r + y)) r = -r;
      s[2 * (2 * h + i)] = r.real();
      s[2 * (2 * h + i) + 1] = r.imag();
    }
    record(t1, unpack(s, h));
  }
  return rec;
}

PhaseConfiguration random_configuration(const SpectralCurve& curve, unsigned seed, double radius) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int h = curve.h();
  auto crit = curve.critical_x();
  const double keep = std::max(0.05, curve.default_clearance());
  PhaseConfiguration c;
  for (int tries = 0; c.size() < h; ++tries) {
    if (tries > 100000) throw ConfigError("could not place random configuration");
    const cplx x{radius * u(rng), radius * u(rng)};
    if (std::abs(x) > radius) continue;
    bool ok = true;
    for (cplx b : crit) ok = ok && std::abs(x - b) > keep;
    for (const auto& p : c.points) ok = ok && std::abs(x - p.x) > 0.1;
    if (!ok) continue;
    auto pts = lift_x(curve, x);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(pts.size()) - 1);
    c.points.push_back(pts[pick(rng)]);
  }
  return c;
}

PhaseConfiguration random_free_configuration(const BaseCurve& base, Family family, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int h = phase_dim(family);
  PhaseConfiguration c;
  while (c.size() < h) {
    const cplx x{1.5 * u(rng), 1.5 * u(rng)};
    bool ok = true;
    for (cplx r : base.roots()) ok = ok && std::abs(x - r) > 0.1;
    for (const auto& p : c.points) ok = ok && std::abs(x - p.x) > 0.2;
    if (!ok) continue;
    cplx y = std::sqrt(base.P(x));
    if (u(rng) < 0.0) y = -y;
    c.points.push_back({x, y, {u(rng), u(rng)}, -1});
  }
  return c;
}

}  // namespace hitchin
