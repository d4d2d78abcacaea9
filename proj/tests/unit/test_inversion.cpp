#include <doctest.h>

#include <cmath>
#include <random>

#include "hitchin/errors.hpp"
#include "hitchin/inversion.hpp"
#include "hitchin/sov.hpp"
#include "test_support.hpp"

using namespace hitchin;
using hitchin::testing::vec;

namespace {

struct Sl2Setup {
  SpectralCurve curve = default_curve(Family::SL2);
  PeriodData pd = compute_periods(curve);
  ThetaContext ctx{pd.tau};
  PrymInverter inv{pd, ctx};
  PhaseConfiguration gamma0 = random_configuration(curve, 3);
  CalibrationData cal = inv.calibrate(gamma0);
};

const Sl2Setup& sl2() {
  static const Sl2Setup s;
  return s;
}

CVector random_phi(const CVector& phi0, std::mt19937& rng, double spread = 0.3) {
  std::uniform_real_distribution<double> u(-spread, spread);
  CVector phi = phi0;
  for (auto& v : phi) v += cplx(u(rng), 0.3 * u(rng));
  return phi;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1.0); }

}  // namespace

TEST_SUITE("inversion") {
  TEST_CASE("newton identities") {
    const CVector x = power_sums_to_x(vec({12.0, 28.0, 72.0}));
    CHECK(hausdorff(x, vec({1.0, 2.0, 3.0})) < 1e-12);

    const cplx a(0.7, -0.4);
    CVector s(4);
    for (int k = 1; k <= 4; ++k) s[k - 1] = 8.0 * std::pow(a, k);
    const CVector xa = power_sums_to_x(s);
    for (cplx r : xa) CHECK(std::abs(r - a) < 1e-9);

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int h : {3, 6}) {
      CVector r(h);
      for (auto& v : r) v = cplx(u(rng), u(rng));
      CHECK(hausdorff(power_sums_to_x(power_sums(r)), r) < 1e-9);
    }
    RootOptions strict;
    strict.max_condition = 1.0;
    CHECK_THROWS_AS(power_sums_to_x(power_sums(vec({1.0, 1.001, 3.0})), strict), IllConditionedRoots);
  }

  TEST_CASE("configuration reconstruction") {
    const SpectralCurve c = default_curve(Family::SL2);
    const PhaseConfiguration g = random_configuration(c, 11);
    const PhaseConfiguration same = reconstruct_configuration(c, g.xs(), g);
    CHECK(hausdorff_points(same, g) < 1e-12);

    CVector xs = g.xs();
    std::reverse(xs.begin(), xs.end());
    xs.array() += cplx(1e-6, -1e-6);
    const PhaseConfiguration moved = reconstruct_configuration(c, xs, g);
    for (int i = 0; i < g.size(); ++i) {
      CHECK(std::abs(moved.points[i].x - g.points[i].x - cplx(1e-6, -1e-6)) < 1e-15);
      CHECK(std::abs(moved.points[i].lambda - g.points[i].lambda) < 1e-4);
      CHECK(std::abs(moved.points[i].y - g.points[i].y) < 1e-4);
    }

    std::vector<double> ts;
    for (int i = 0; i <= 20; ++i) ts.push_back(0.01 * i);
    const auto rec = ode_flow(c, g, 1, ts);
    PhaseConfiguration prev = g;
    double worst = 0.0;
    for (const auto& cfg : rec.configs) {
      prev = reconstruct_configuration(c, cfg.xs(), prev);
      worst = std::max(worst, hausdorff_points(prev, cfg));
    }
    CHECK(worst < 1e-8);

    CVector mid = g.xs();
    const cplx m = 0.5 * (mid[0] + mid[1]);
    mid[0] = m + 1e-3;
    mid[1] = m - 1e-3;
    CHECK_THROWS_AS(reconstruct_configuration(c, mid, g), AmbiguousAssignment);
  }

  TEST_CASE("riemann constants") {
    const auto& s = sl2();
    CHECK(s.cal.K.fit_residual <= 1e-6);
    CHECK(divisor_residual(s.pd, s.ctx, s.gamma0, s.cal.phi0, s.cal.K.K) <= 1e-6);
    PhaseConfiguration flipped;
    for (const auto& p : s.gamma0.points) flipped.points.push_back(involutions(p).tau);
    CHECK(divisor_residual(s.pd, s.ctx, flipped, s.cal.phi0, s.cal.K.K) <= 1e-6);
    const auto rec = ode_flow(s.curve, s.gamma0, 0, {0.0, 0.05});
    const PhaseConfiguration& g1 = rec.configs.back();
    CHECK(divisor_residual(s.pd, s.ctx, g1, abel_prym(s.pd, g1), s.cal.K.K) <= 1e-4);
  }

  TEST_CASE("residue paths agree") {
    const auto& s = sl2();
    std::mt19937 rng(4);
    for (int t = 0; t < 5; ++t) {
      const CVector phi = random_phi(s.cal.phi0, rng);
      const CVector series = s.inv.sigma(s.cal, phi);
      for (int k = 1; k <= 3; ++k) {
        CHECK(rel(s.inv.sigma_kappa(s.cal, phi, k), series[k - 1]) < 1e-10);
        CHECK(rel(s.inv.sigma_contour(s.cal, phi, k), series[k - 1]) < 1e-6);
        CHECK(rel(s.inv.sigma_series(s.cal, phi, k), series[k - 1]) < 1e-12);
      }
      const cplx closed = s.cal.consts[0] - s.inv.residue_closed_k1(phi, s.cal.K.K);
      CHECK(rel(closed, series[0]) < 1e-8);
    }
  }

  TEST_CASE("kappa coefficients") {
    const auto& s = sl2();
    const CMatrix kap = s.inv.kappa(0, 1);
    const auto I = index_set(3, 1);
    const CMatrix& phi = s.inv.infinity().jets[0].phi;
    for (int i = 0; i < 3; ++i)
      for (int r = 1; r <= 3; ++r) CHECK(std::abs(kap(i, r) - phi(i, 0) * phi(I->parent_var(r), 0)) < 1e-14);
  }

  TEST_CASE("contour radius and constants") {
    const auto& s = sl2();
    std::mt19937 rng(6);
    const CVector phi = random_phi(s.cal.phi0, rng);
    ContourOptions a, b;
    a.radius = 0.25 * std::min(s.inv.chart_radius(), 1.0);
    b.radius = 0.5 * a.radius;
    for (int k = 1; k <= 2; ++k)
      CHECK(rel(s.inv.residue_contour(phi, s.cal.K.K, k, a), s.inv.residue_contour(phi, s.cal.K.K, k, b)) < 1e-7);
    CalibrationData other = s.cal;
    other.consts.array() += cplx(3.0, -1.0);
    const cplx d0 = s.inv.sigma_contour(s.cal, phi, 1) - s.inv.sigma_contour(s.cal, s.cal.phi0, 1);
    const cplx d1 = s.inv.sigma_contour(other, phi, 1) - s.inv.sigma_contour(other, s.cal.phi0, 1);
    CHECK(std::abs(d0 - d1) < 1e-12);
  }

  TEST_CASE("tau-images give the same power sums") {
    const auto& s = sl2();
    const PhaseConfiguration g = random_configuration(s.curve, 8);
    PhaseConfiguration flipped;
    for (const auto& p : g.points) flipped.points.push_back(involutions(p).tau);
    const CVector a = s.inv.sigma(s.cal, abel_prym(s.pd, g));
    const CVector b = s.inv.sigma(s.cal, abel_prym(s.pd, flipped));
    for (int k = 0; k < 3; ++k) CHECK(rel(a[k], b[k]) < 1e-6);
  }

  TEST_CASE("theta divisor is detected") {
    const auto& s = sl2();
    CVector odd = CVector::Zero(3);
    odd[0] = 0.5 + 0.5 * s.pd.tau(0, 0);
    for (int j = 1; j < 3; ++j) odd[j] = 0.5 * s.pd.tau(j, 0);
    const CVector phi = s.inv.infinity().images[0] - s.cal.K.K - odd;
    CHECK_THROWS_AS(s.inv.residues(phi, s.cal.K.K, 3), NearThetaDivisor);
  }

  TEST_CASE("round trip and trajectory") {
    const auto& s = sl2();
    const CVector x0 = power_sums_to_x(s.inv.sigma(s.cal, s.cal.phi0));
    CHECK(hausdorff(x0, s.gamma0.xs()) < 1e-6);

    std::vector<double> ts;
    for (int i = 0; i <= 20; ++i) ts.push_back(0.01 * i);
    for (int k : {0, 2}) {
      const auto th = theta_trajectory(s.inv, s.cal, s.gamma0, k, ts);
      const auto ode = ode_flow(s.curve, s.gamma0, k, ts);
      CHECK(th.provenance == "theta");
      REQUIRE(th.configs.size() == ts.size());
      double dx = 0.0, dp = 0.0, hres = 0.0, cres = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        dx = std::max(dx, hausdorff(th.configs[i].xs(), ode.configs[i].xs()));
        dp = std::max(dp, hausdorff_points(th.configs[i], ode.configs[i]));
        hres = std::max(hres, th.ham_residual[i]);
        cres = std::max(cres, th.curve_residual[i]);
      }
      CHECK(dx < 1e-4);
      CHECK(dp < 1e-3);
      CHECK(hres < 1e-5);
      CHECK(cres < 1e-6);
    }
  }

  TEST_CASE("divisor hits are resampled") {
    const auto& s = sl2();
    // A zero of theta on a coordinate line, by Newton.
    CVector w = CVector::Zero(3);
    w << cplx(0.1, 0.05), cplx(-0.2, 0.1), cplx(0.3, -0.05);
    for (int it = 0; it < 50; ++it) {
      const Jet j = s.ctx.jet(w, 1);
      w[0] -= j[0] / j[1];
    }
    REQUIRE(std::abs(s.ctx.jet(w, 0)[0]) < 1e-13 * s.ctx.jet(w, 0).term_scale());
    const CVector nu = action_variables(s.pd).frequencies.col(0);
    CalibrationData cal = s.cal;
    const double t1 = 0.02;
    cal.phi0 = s.inv.infinity().images[0] - cal.K.K - w - nu * t1;
    PhaseConfiguration start;
    const CVector x = power_sums_to_x(s.inv.sigma(cal, cal.phi0));
    for (cplx v : x) start.points.push_back(lift_x(s.curve, v, 0.0)[0]);
    const auto rec = theta_trajectory(s.inv, cal, start, 0, {0.0, 0.01, 0.02, 0.03});
    CHECK(rec.configs.size() == 4);
    CHECK(!rec.warnings.empty());
    CHECK(std::abs(rec.times[2] - t1) > 1e-4);
    CHECK_THROWS_AS(theta_trajectory(s.inv, s.cal, s.gamma0, 5, {0.0}), ConfigError);
  }
}
