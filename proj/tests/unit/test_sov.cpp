#include <doctest.h>

#include <cmath>
#include <random>

#include "hitchin/errors.hpp"
#include "hitchin/sov.hpp"
#include "test_support.hpp"

using namespace hitchin;
using hitchin::testing::vec;

namespace {

PhaseConfiguration sl2_config(const CVector& H, std::initializer_list<cplx> xs) {
  SpectralCurve c(default_base_curve(), Family::SL2, H);
  PhaseConfiguration cfg;
  for (cplx x : xs) {
    const cplx y = std::sqrt(c.base().P(x));
    cfg.points.push_back({x, y, std::sqrt(-c.p(x)), -1});
  }
  return cfg;
}

SpectralCurve curve_through(const PhaseConfiguration& cfg, Family f) {
  auto sol = solve_hamiltonians(default_base_curve(), f, cfg);
  return SpectralCurve(default_base_curve(), f, sol.H());
}

}  // namespace

TEST_SUITE("sov") {
  TEST_CASE("sl2 solve round trip") {
    const CVector H = vec({1, 2, 3});
    auto cfg = sl2_config(H, {0.0, 1.0, 2.0});
    auto sol = solve_hamiltonians(default_base_curve(), Family::SL2, cfg);
    REQUIRE(sol.solutions.size() == 1);
    CHECK((sol.H() - H).norm() < 1e-12);
  }

  TEST_CASE("so4 solve round trip contains both q-signs") {
    const CVector H = vec({1, 0, 2, 0, 1, 0});
    SpectralCurve c(default_base_curve(), Family::SO4, H);
    PhaseConfiguration cfg;
    for (int x = 0; x <= 5; ++x) cfg.points.push_back(lift_x(c, static_cast<double>(x), 0.0)[0]);
    auto sol = solve_hamiltonians(c.base(), Family::SO4, cfg, H);
    CHECK(sol.solutions.size() >= 2);
    const CVector Hneg = vec({1, 0, 2, 0, -1, 0});
    bool has = false, hasneg = false;
    for (const auto& s : sol.solutions) {
      has = has || (s - H).norm() < 1e-9;
      hasneg = hasneg || (s - Hneg).norm() < 1e-9;
      SpectralCurve cs = c.with_hams(s);
      for (const auto& p : cfg.points) CHECK(std::abs(cs.R(p.lambda, p.x)) <= 1e-10);
    }
    CHECK(has);
    CHECK(hasneg);
    CHECK((sol.H() - H).norm() < 1e-9);
  }

  TEST_CASE("so4 solve on random curves") {
    for (unsigned seed = 1; seed <= 5; ++seed) {
      auto cfg = random_free_configuration(default_base_curve(), Family::SO4, seed);
      auto c = curve_through(cfg, Family::SO4);
      auto again = random_configuration(c, seed + 100);
      auto sol = solve_hamiltonians(c.base(), Family::SO4, again, c.hams());
      CHECK((sol.H() - c.hams()).norm() <= 1e-9 * (1.0 + c.hams().norm()));
    }
  }

  TEST_CASE("repeated x is singular") {
    auto cfg = sl2_config(vec({1, 2, 3}), {0.5, 0.5, 2.0});
    CHECK_THROWS_AS(solve_hamiltonians(default_base_curve(), Family::SL2, cfg), SingularSystem);
  }

  TEST_CASE("coordinate brackets") {
    auto cfg = random_free_configuration(default_base_curve(), Family::SL2, 7);
    Observable l1 = [](const CVector& l, const CVector&) { return l[0]; };
    Observable x1 = [](const CVector&, const CVector& x) { return x[0]; };
    Observable x2 = [](const CVector&, const CVector& x) { return x[1]; };
    CHECK(std::abs(poisson_bracket(l1, x1, cfg) - cfg.points[0].y) < 1e-10);
    CHECK(std::abs(poisson_bracket(l1, x2, cfg)) < 1e-12);
    CHECK(std::abs(poisson_bracket(x1, x2, cfg)) < 1e-12);
  }

  TEST_CASE("bracket antisymmetry, Leibniz and Jacobi") {
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    auto cfg = random_free_configuration(default_base_curve(), Family::SL2, 9);
    auto cubic = [&]() {
      std::vector<cplx> a(10);
      for (auto& v : a) v = {g(rng), g(rng)};
      return Observable([a](const CVector& l, const CVector& x) {
        const cplx u = l[0] + 0.5 * x[1], v = x[0] - l[2], w = l[1] * x[2];
        return a[0] + a[1] * u + a[2] * v + a[3] * w + a[4] * u * v + a[5] * v * w + a[6] * u * u * u +
               a[7] * v * v * w + a[8] * u * w * w + a[9] * u * v * w;
      });
    };
    auto F = cubic(), G = cubic(), K = cubic();
    CHECK(std::abs(poisson_bracket(F, G, cfg) + poisson_bracket(G, F, cfg)) < 1e-10);
    Observable FG = [&](const CVector& l, const CVector& x) { return F(l, x) * G(l, x); };
    const CVector lam = cfg.lambdas(), xs = cfg.xs();
    const cplx lhs = poisson_bracket(FG, K, cfg);
    const cplx rhs = F(lam, xs) * poisson_bracket(G, K, cfg) + G(lam, xs) * poisson_bracket(F, K, cfg);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));
    Observable l1 = [](const CVector& l, const CVector&) { return l[0]; };
    Observable x1 = [](const CVector&, const CVector& x) { return x[0]; };
    Observable l2 = [](const CVector& l, const CVector&) { return l[1]; };
    // Brackets of coordinates are constants here, so every nested bracket vanishes.
    Observable b = [&](const CVector& l, const CVector& x) {
      PhaseConfiguration c2 = cfg;
      for (int i = 0; i < c2.size(); ++i) {
        c2.points[i].lambda = l[i];
        c2.points[i].x = x[i];
      }
      return poisson_bracket(l1, x1, c2);
    };
    CHECK(std::abs(poisson_bracket(b, l2, cfg)) < 1e-8);
  }

  TEST_CASE("gradients satisfy the defining identity and finite differences") {
    for (Family f : {Family::SL2, Family::SO4}) {
      auto cfg = random_free_configuration(default_base_curve(), f, 21);
      auto c = curve_through(cfg, f);
      auto g = hamiltonian_gradients(c, cfg);
      const int h = c.h();
      CMatrix lhs = g.dR_dH * g.dH_dlambda;
      for (int i = 0; i < h; ++i) lhs(i, i) += c.R_lambda(cfg.points[i].lambda, cfg.points[i].x);
      CHECK(lhs.cwiseAbs().maxCoeff() < 1e-10);
      // Central differences of the solve.
      for (int i = 0; i < h; ++i) {
        const double d = 1e-5;
        auto plus = cfg, minus = cfg;
        plus.points[i].lambda += d;
        minus.points[i].lambda -= d;
        CVector Hp = solve_hamiltonians(c.base(), f, plus, c.hams()).H();
        CVector Hm = solve_hamiltonians(c.base(), f, minus, c.hams()).H();
        CVector fdv = (Hp - Hm) / (2.0 * d);
        CHECK((fdv - g.dH_dlambda.col(i)).norm() <= 1e-6 * (1.0 + fdv.norm()));
        plus = cfg;
        minus = cfg;
        plus.points[i].x += d;
        minus.points[i].x -= d;
        Hp = solve_hamiltonians(c.base(), f, plus, c.hams()).H();
        Hm = solve_hamiltonians(c.base(), f, minus, c.hams()).H();
        fdv = (Hp - Hm) / (2.0 * d);
        CHECK((fdv - g.dH_dx.col(i)).norm() <= 1e-6 * (1.0 + fdv.norm()));
      }
    }
  }

  TEST_CASE("zero lambda configuration gives zero gradients") {
    auto cfg = sl2_config(vec({0, 0, 0}), {0.1, 0.6, -0.7});
    SpectralCurve c(default_base_curve(), Family::SL2, vec({0, 0, 0}));
    auto g = hamiltonian_gradients(c, cfg);
    CHECK(g.dH_dlambda.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("hamiltonians commute") {
    for (Family f : {Family::SL2, Family::SO4}) {
      for (unsigned seed = 30; seed < 35; ++seed) {
        auto cfg = random_free_configuration(default_base_curve(), f, seed);
        auto c = curve_through(cfg, f);
        CHECK(commutation_check(c, cfg) <= 1e-8);
        auto B = hamiltonian_brackets(c, cfg);
        for (int a = 0; a < c.h(); ++a) CHECK(B(a, a) == cplx{});
      }
    }
  }

  TEST_CASE("ode flow identity, conservation and reversibility") {
    for (Family f : {Family::SL2, Family::SO4}) {
      auto c = default_curve(f);
      auto cfg = random_configuration(c, 5, 1.2);
      auto id = ode_flow(c, cfg, 0, {0.0});
      REQUIRE(id.configs.size() == 1);
      CHECK(hausdorff_points(id.configs[0], cfg) == 0.0);
      std::vector<double> grid;
      for (int n = 0; n <= 10; ++n) grid.push_back(0.02 * n);
      auto rec = ode_flow(c, cfg, 0, grid, 1e-10);
      for (double r : rec.ham_residual) CHECK(r <= 1e-8);
      for (double r : rec.curve_residual) CHECK(r <= 1e-8);
      auto back = ode_flow(c, rec.configs.back(), 0, {0.2, 0.0}, 1e-10);
      CHECK(hausdorff_points(back.configs.back(), cfg) <= 1e-7);
    }
  }
}
