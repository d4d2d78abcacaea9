#include "harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>

#include "harness/cache.hpp"
#include "harness/config.hpp"
#include "hitchin/errors.hpp"
#include "hitchin/inversion.hpp"
#include "hitchin/sov.hpp"

namespace harness {

using namespace hitchin;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const char* name(Family f) { return f == Family::SL2 ? "SL2" : "SO4"; }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

// Periods, theta context and calibration for one family, built on first use.
struct FamilyData {
  Family family;
  ExperimentConfig cfg;
  SpectralCurve curve;
  PeriodData pd;
  double period_seconds = 0.0;
  std::unique_ptr<ThetaContext> ctx;
  std::unique_ptr<PrymInverter> inv;
  PhaseConfiguration g0;
  CalibrationData cal;
  double calibration_seconds = 0.0;
  bool calibrated = false;
};

class Fixture {
 public:
  explicit Fixture(const AcceptanceOptions& opt) : opt_(opt) {}

  FamilyData& periods(Family f) {
    auto& slot = data_[f];
    if (!slot) {
      slot = std::make_unique<FamilyData>();
      slot->family = f;
      slot->cfg = ExperimentConfig::defaults(f);
      slot->curve = slot->cfg.curve();
      const auto t0 = Clock::now();
      slot->pd = cached_periods(slot->curve, slot->cfg.tol, opt_.cache_dir).periods;
      slot->period_seconds = since(t0);
    }
    return *slot;
  }

  FamilyData& calibrated(Family f) {
    FamilyData& d = periods(f);
    if (!d.calibrated) {
      const auto t0 = Clock::now();
      ThetaOptions to;
      to.target_eps = d.cfg.tol.theta_eps;
      to.point_budget = d.cfg.tol.theta_budget;
      d.ctx = std::make_unique<ThetaContext>(d.pd.tau, to);
      d.inv = std::make_unique<PrymInverter>(d.pd, *d.ctx);
      d.g0 = d.cfg.initial(d.curve);
      CalibrationOptions co;
      co.tol = d.cfg.tol.residual;
      co.max_seeds = d.cfg.tol.calibration_seeds;
      d.cal = d.inv->calibrate(d.g0, co);
      d.calibration_seconds = since(t0);
      d.calibrated = true;
    }
    return d;
  }

 private:
  const AcceptanceOptions& opt_;
  std::map<Family, std::unique_ptr<FamilyData>> data_;
};

CVector random_phi(const CVector& phi0, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  CVector phi = phi0;
  for (auto& v : phi) v += cplx(u(rng), 0.3 * u(rng));
  return phi;
}

std::vector<double> grid(double t_max, int samples) {
  std::vector<double> t(samples + 1);
  for (int i = 0; i <= samples; ++i) t[i] = t_max * i / samples;
  return t;
}

void structural(Fixture&, CriterionResult& r) {
  const auto t0 = Clock::now();
  const SpectralCurve so4 = ExperimentConfig::defaults(Family::SO4).curve();
  const SpectralCurve sl2 = ExperimentConfig::defaults(Family::SL2).curve();
  const auto b4 = branch_points(so4).size(), s4 = singular_points(so4).size();
  const int g4 = genus_check(so4);
  const auto b2 = branch_points(sl2).size();
  const int g2 = genus_check(sl2);
  const double dt = since(t0);
  r.pass = b4 == 16 && s4 == 4 && g4 == 13 && b2 == 4 && g2 == 5 && dt < 1.0;
  r.detail = fmt("SO4 %zu branch points, %zu singular points, genus %d; SL2 %zu branch points, genus %d", b4, s4,
                 g4, b2, g2);
}

void integrability(Fixture&, CriterionResult& r) {
  const auto t0 = Clock::now();
  double worst[2] = {0.0, 0.0};
  for (Family f : {Family::SL2, Family::SO4}) {
    const SpectralCurve c = ExperimentConfig::defaults(f).curve();
    for (unsigned s = 0; s < 20; ++s)
      worst[f == Family::SO4] = std::max(worst[f == Family::SO4], commutation_check(c, random_configuration(c, 1000 + s)));
  }
  r.pass = worst[0] <= 1e-8 && worst[1] <= 1e-8 && since(t0) < 10.0;
  r.detail = fmt("max |{H_a, H_b}| SL2 %.2e, SO4 %.2e over 20 configurations each", worst[0], worst[1]);
}

void conservation(Fixture&, CriterionResult& r) {
  const auto t0 = Clock::now();
  bool ok = true;
  for (Family f : {Family::SL2, Family::SO4}) {
    const ExperimentConfig cfg = ExperimentConfig::defaults(f);
    const SpectralCurve c = cfg.curve();
    const auto g0 = cfg.initial(c);
    double hres = 0.0, cres = 0.0;
    for (int k = 0; k < c.h(); ++k) {
      const auto rec = ode_flow(c, g0, k, grid(1.0, 10), 1e-10);
      for (double v : rec.ham_residual) hres = std::max(hres, v);
      for (double v : rec.curve_residual) cres = std::max(cres, v);
    }
    ok = ok && hres <= 1e-8 && cres <= 1e-8;
    r.detail += fmt("%s%s drift %.2e, curve residual %.2e", r.detail.empty() ? "" : "; ", name(f), hres, cres);
  }
  r.pass = ok && since(t0) < 60.0;
  r.detail += " (all flows, t in [0, 1])";
}

void period_certificate(Fixture& fx, CriterionResult& r) {
  bool ok = true;
  for (Family f : {Family::SL2, Family::SO4}) {
    try {
      const FamilyData& d = fx.periods(f);
      const double cap = f == Family::SL2 ? 60.0 : 900.0;
      ok = ok && d.pd.symmetry_error <= 1e-8 && d.pd.min_im_eig > 0.0 && d.period_seconds < cap;
      r.detail += fmt("%s%s symmetry %.2e, min eig Im tau %.3g, %.1f s", r.detail.empty() ? "" : "; ", name(f),
                      d.pd.symmetry_error, d.pd.min_im_eig, d.period_seconds);
    } catch (const Error& e) {
      ok = false;
      r.diagnostics.push_back(std::string(name(f)) + ": " + e.what());
    }
  }
  r.pass = ok;
}

void tau_invariance(Fixture& fx, CriterionResult& r) {
  bool ok = true;
  for (Family f : {Family::SL2, Family::SO4}) {
    const PeriodData& pd = fx.periods(f).pd;
    double worst = 0.0;
    for (unsigned s = 0; s < 10; ++s) {
      const auto g = random_configuration(pd.curve, 2000 + s);
      PhaseConfiguration img;
      for (const auto& p : g.points) img.points.push_back(involutions(p).tau);
      worst = std::max(worst, lattice_fit(pd, abel_prym(pd, g) - abel_prym(pd, img)).residual);
    }
    ok = ok && worst <= 1e-6;
    r.detail += fmt("%s%s fit residual %.2e", r.detail.empty() ? "" : "; ", name(f), worst);
  }
  r.pass = ok;
  r.detail += " over 10 configurations each";
}

void sigma_equivalence(Fixture& fx, CriterionResult& r) {
  const auto t0 = Clock::now();
  bool ok = true;
  for (Family f : {Family::SL2, Family::SO4}) {
    FamilyData& d = fx.calibrated(f);
    const auto t1 = Clock::now();
    const int kmax = f == Family::SL2 ? 3 : 1;
    std::mt19937 rng(f == Family::SL2 ? 61 : 62);
    std::vector<double> worst(kmax, 0.0);
    for (int t = 0; t < 20; ++t) {
      const CVector phi = random_phi(d.cal.phi0, rng);
      for (int k = 1; k <= kmax; ++k)
        worst[k - 1] = std::max(worst[k - 1], rel(d.inv->sigma_series(d.cal, phi, k), d.inv->sigma_contour(d.cal, phi, k)));
    }
    for (int k = 1; k <= kmax; ++k) {
      ok = ok && worst[k - 1] <= 1e-6;
      r.detail += fmt("%s%s k=%d %.2e", r.detail.empty() ? "" : "; ", name(f), k, worst[k - 1]);
    }
    r.diagnostics.push_back(fmt("%s: 20 phi in %.1f s (calibration %.1f s)", name(f), since(t1), d.calibration_seconds));
  }
  r.pass = ok && since(t0) < 600.0;
  r.detail = "series vs contour, max rel. diff " + r.detail;
}

void closed_form(Fixture& fx, CriterionResult& r) {
  FamilyData& d = fx.calibrated(Family::SL2);
  std::mt19937 rng(71);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const CVector phi = random_phi(d.cal.phi0, rng);
    const cplx closed = d.cal.consts[0] - d.inv->residue_closed_k1(phi, d.cal.K.K);
    worst = std::max(worst, rel(closed, d.inv->sigma_series(d.cal, phi, 1)));
  }
  r.pass = worst <= 1e-8;
  r.detail = fmt("SL2 sigma_1 vs directional second derivative, max rel. diff %.2e over 20 phi", worst);
}

void round_trip(Fixture& fx, CriterionResult& r) {
  bool ok = true;
  for (Family f : {Family::SL2, Family::SO4}) {
    const auto t0 = Clock::now();
    const double tol = f == Family::SL2 ? 1e-6 : 1e-4, cap = f == Family::SL2 ? 300.0 : 1800.0;
    try {
      FamilyData& d = fx.calibrated(f);
      const CVector x = power_sums_to_x(d.inv->sigma(d.cal, d.cal.phi0));
      const double dist = hausdorff(x, d.g0.xs());
      const double dt = since(t0) + d.calibration_seconds;
      ok = ok && dist <= tol && dt < cap;
      r.detail += fmt("%s%s %.2e (%.0f s)", r.detail.empty() ? "" : "; ", name(f), dist, dt);
      r.diagnostics.push_back(fmt("%s: K fit residual %.2e from seed %d, %d seeds converged", name(f),
                                  d.cal.K.fit_residual, d.cal.K.seed, d.cal.K.converged));
      // An independent configuration with the same calibration.
      const auto g1 = random_configuration(d.curve, 77);
      try {
        const CVector x1 = power_sums_to_x(d.inv->sigma(d.cal, abel_prym(d.pd, g1)));
        r.diagnostics.push_back(fmt("%s: second configuration recovered to %.2e", name(f), hausdorff(x1, g1.xs())));
      } catch (const Error& e) {
        r.diagnostics.push_back(std::string(name(f)) + ": second configuration: " + e.what());
      }
    } catch (const Error& e) {
      ok = false;
      r.detail += fmt("%s%s failed", r.detail.empty() ? "" : "; ", name(f));
      r.diagnostics.push_back(std::string(name(f)) + ": " + e.what());
    }
  }
  r.pass = ok;
  r.detail = "x-multiset distance at t = 0: " + r.detail;
}

void so4_stretch(Fixture& fx, CriterionResult& r) {
  const auto t0 = Clock::now();
  FamilyData& d = fx.calibrated(Family::SO4);
  const auto ts = grid(0.2, 20);
  const auto ode = ode_flow(d.curve, d.g0, 0, ts);
  const CVector nu = action_variables(d.pd).frequencies.col(0);
  double dx = 0.0, divres = 0.0, lin = 0.0;
  int failed = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const CVector phi = d.cal.phi0 + nu * ts[i];
    const auto& g = ode.configs[i];
    divres = std::max(divres, divisor_residual(d.pd, *d.ctx, g, phi, d.cal.K.K));
    lin = std::max(lin, lattice_fit(d.pd, abel_prym(d.pd, g) - phi).residual);
    try {
      dx = std::max(dx, hausdorff(power_sums_to_x(d.inv->sigma(d.cal, phi)), g.xs()));
    } catch (const Error& e) {
      if (failed++ == 0) r.diagnostics.push_back(fmt("SO4 sample %zu: %s", i, e.what()));
    }
  }
  const bool pass = failed == 0 && dx <= 1e-3;
  r.detail += fmt("; SO4 stretch %s: max x distance %.2e", pass ? "met" : "FAILED", dx);
  r.diagnostics.push_back(fmt("SO4: %d of %zu samples failed; theta at the true points %.2e (relative to the "
                              "largest lattice term), linearization residual %.2e, %.0f s",
                              failed, ts.size(), divres, lin, since(t0)));
  if (!pass && divres > 1e-4)
    r.diagnostics.push_back("SO4: the flowed points leave the divisor theta(A(P) - phi(t) - K) = 0, so the shift K "
                            "fitted at t = 0 is not a Riemann constant for this lattice");
  else if (!pass)
    r.diagnostics.push_back("SO4: the flowed points stay on the theta divisor but the power sums do not recover them");
}

void end_to_end(Fixture& fx, CriterionResult& r, bool stretch) {
  const auto t0 = Clock::now();
  FamilyData& d = fx.calibrated(Family::SL2);
  const auto ts = grid(0.2, 20);
  const auto th = theta_trajectory(*d.inv, d.cal, d.g0, 0, ts);
  const auto ode = ode_flow(d.curve, d.g0, 0, th.times);
  double dx = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < th.times.size(); ++i) {
    dx = std::max(dx, hausdorff(th.configs[i].xs(), ode.configs[i].xs()));
    dp = std::max(dp, hausdorff_points(th.configs[i], ode.configs[i]));
  }
  const double dt = since(t0) + d.calibration_seconds;
  r.pass = dx <= 1e-4 && dp <= 1e-3 && dt < 900.0;
  r.detail = fmt("SL2 H_0 flow, 21 samples: x %.2e, (x, y, lambda) %.2e (%.0f s)", dx, dp, dt);
  for (const auto& w : th.warnings) r.diagnostics.push_back("SL2 " + w);
  if (stretch) {
    try {
      so4_stretch(fx, r);
    } catch (const Error& e) {
      r.detail += "; SO4 stretch FAILED";
      r.diagnostics.push_back(std::string("SO4: ") + e.what());
    }
  }
}

// Periods of a nearby curve on the same cycle basis.
PeriodData periods_on(const PeriodData& pd, const CVector& H) {
  const SpectralCurve c = pd.curve.with_hams(H);
  CycleSet cs = pd.cycles;
  cs.fiber = lift_x(c, cs.base);
  return period_matrix(c, cs, pd.quad);
}

void frequencies(Fixture& fx, CriterionResult& r) {
  bool ok = true;
  for (Family f : {Family::SL2, Family::SO4}) {
    const PeriodData& pd = fx.periods(f).pd;
    const auto aa = action_variables(pd);
    const int h = pd.h();
    const double step = 1e-5;
    CMatrix fd(h, h);
    for (int k = 0; k < h; ++k) {
      CVector Hp = pd.curve.hams(), Hm = Hp;
      Hp[k] += step;
      Hm[k] -= step;
      fd.col(k) = (action_variables(periods_on(pd, Hp)).I - action_variables(periods_on(pd, Hm)).I) / (2.0 * step);
    }
    const double e = (fd - aa.dI_dH).norm() / aa.dI_dH.norm();
    if (f == Family::SL2) ok = e <= 1e-4;
    r.detail += fmt("%s%s %.2e", r.detail.empty() ? "" : "; ", name(f), e);
  }
  r.pass = ok;
  r.detail = "dI/dH vs central differences, rel. error " + r.detail;
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  return fmt("criterion %2d %s  %s: %s (%.1f s)", r.id, r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str(),
             r.seconds);
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out) {
  Fixture fx(opt);
  using Fn = std::function<void(Fixture&, CriterionResult&)>;
  const std::vector<std::pair<std::string, Fn>> all{
      {"structural integers", structural},
      {"integrability", integrability},
      {"ODE conservation", conservation},
      {"period certificate", period_certificate},
      {"Abel-Prym tau-invariance", tau_invariance},
      {"sigma oracle equivalence", sigma_equivalence},
      {"SL2 closed form", closed_form},
      {"round-trip inversion", round_trip},
      {"trajectory match", [&](Fixture& f, CriterionResult& r) { end_to_end(f, r, opt.so4_stretch); }},
      {"frequency consistency", frequencies},
  };
  std::vector<CriterionResult> results;
  for (int id = 1; id <= static_cast<int>(all.size()); ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    CriterionResult r;
    r.id = id;
    r.name = all[id - 1].first;
    const auto t0 = Clock::now();
    try {
      all[id - 1].second(fx, r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = since(t0);
    out << format_result(r) << '\n';
    for (const auto& d : r.diagnostics) out << "    " << d << '\n';
    out.flush();
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace harness
