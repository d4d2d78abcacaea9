#include <doctest.h>

#include <algorithm>
#include <random>

#include "hitchin/curve.hpp"
#include "hitchin/errors.hpp"
#include "test_support.hpp"

using namespace hitchin;
using hitchin::testing::default_base;

TEST_SUITE("curve") {
  TEST_CASE("eval_R trivial values") {
    SpectralCurve so4(default_base(), Family::SO4, hitchin::testing::vec({0, 0, 1, 0, 0, 0}));
    CHECK(std::abs(eval_R(so4, 0.0, 5.0)) == 0.0);
    SpectralCurve sl2(default_base(), Family::SL2, hitchin::testing::vec({1, 0, 0}));
    for (cplx x : {cplx(0.3, 1.0), cplx(-2.0, 0.5), cplx(7.0, 0.0)}) CHECK(std::abs(eval_R(sl2, kI, x)) == 0.0);
  }

  TEST_CASE("eval_R matches expanded recomputation") {
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
      CVector H(6);
      for (int k = 0; k < 6; ++k) H[k] = {g(rng), g(rng)};
      SpectralCurve c(default_base(), Family::SO4, H);
      const cplx l{g(rng), g(rng)}, x{g(rng), g(rng)};
      // Fully expanded monomials of lambda^4 + lambda^2 p + q^2.
      cplx ref = std::pow(l, 4);
      for (int k = 0; k < 3; ++k) ref += l * l * H[k] * std::pow(x, k);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) ref += H[3 + a] * H[3 + b] * std::pow(x, a + b);
      CHECK(std::abs(eval_R(c, l, x) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
  }

  TEST_CASE("branch and singular counts") {
    auto sl2 = hitchin::testing::default_sl2();
    auto so4 = hitchin::testing::default_so4();
    CHECK(branch_points(sl2).size() == 4);
    CHECK(branch_points(so4).size() == 16);
    CHECK(singular_points(so4).size() == 4);
    CHECK(genus_check(sl2) == 5);
    CHECK(genus_check(so4) == 13);
    for (const auto& b : branch_points(so4)) {
      CHECK(std::abs(b.lambda * b.lambda + 0.5 * so4.p(b.x)) < 1e-12);
      const cplx qq = so4.q(b.x), hp = 0.5 * so4.p(b.x);
      CHECK(std::min(std::abs(qq - hp), std::abs(qq + hp)) < 1e-10);
      auto r = residuals(so4, b);
      CHECK(r[0] < 1e-10);
      CHECK(r[1] < 1e-10);
    }
  }

  TEST_CASE("sl2 branch x-values of x^2 - 1") {
    SpectralCurve c(default_base(), Family::SL2, hitchin::testing::vec({-1, 0, 1}));
    auto bp = branch_points(c);
    REQUIRE(bp.size() == 4);
    std::vector<double> xs;
    for (auto& p : bp) {
      CHECK(std::abs(p.x.imag()) < 1e-14);
      xs.push_back(p.x.real());
      CHECK(std::abs(p.y * p.y - c.base().P(p.x)) < 1e-12);
      CHECK(p.lambda == cplx{});
    }
    std::sort(xs.begin(), xs.end());
    CHECK(xs.front() == doctest::Approx(-1.0));
    CHECK(xs.back() == doctest::Approx(1.0));
  }

  TEST_CASE("singular points of q = x^2 - 4 and q = x^2") {
    SpectralCurve c(default_base(), Family::SO4, hitchin::testing::vec({1, 0, 2, -4, 0, 1}));
    auto sp = singular_points(c);
    REQUIRE(sp.size() == 4);
    for (auto& p : sp) {
      CHECK(std::abs(std::abs(p.x) - 2.0) < 1e-14);
      CHECK(std::abs(p.y * p.y - c.base().P(p.x)) < 1e-10);
    }
    SpectralCurve d(default_base(), Family::SO4, hitchin::testing::vec({1, 0, 2, 0, 0, 1}));
    CHECK_THROWS_AS(singular_points(d), DegenerateCurve);
  }

  TEST_CASE("degenerate sl2 fails the genus check") {
    SpectralCurve c(default_base(), Family::SL2, hitchin::testing::vec({1, 2, 1}));  // (x+1)^2
    CHECK_THROWS_AS(genus_check(c), InconsistentGeometry);
    CHECK_THROWS_AS(branch_points(c), DegenerateCurve);
  }

  TEST_CASE("lift_x residuals and ordering") {
    for (auto c : {hitchin::testing::default_sl2(), hitchin::testing::default_so4()}) {
      const cplx x{0.37, -0.81};
      auto pts = lift_x(c, x);
      CHECK(pts.size() == static_cast<std::size_t>(sheet_count(c.family())));
      for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].sheet_id == static_cast<int>(i));
        auto r = residuals(c, pts[i]);
        CHECK(r[0] <= 1e-10);
        CHECK(r[1] <= 1e-10);
        CHECK(sheet_of(c, pts[i]) == static_cast<int>(i));
      }
      CHECK_THROWS_AS(lift_x(c, c.branch_x()[0], 1e-3), NearBranchPoint);
    }
  }

  TEST_CASE("continuation identity and trivial loops") {
    auto c = hitchin::testing::default_sl2();
    const double cl = c.default_clearance();
    auto p = lift_x(c, {0.1, 2.0})[1];
    auto same = continue_point(c, p, XPath::line(p.x, p.x, cl));
    CHECK(same.y == p.y);
    CHECK(same.lambda == p.lambda);
    // Small loop around no critical point.
    auto back = continue_point(c, p, XPath::petal(p.x, p.x + cplx(0.05, 0.0), 0.02, 0.01));
    CHECK(std::abs(back.y - p.y) < 1e-10);
    CHECK(std::abs(back.lambda - p.lambda) < 1e-10);
  }

  TEST_CASE("monodromy around one sl2 branch x-value") {
    auto c = hitchin::testing::default_sl2();
    const double cl = c.default_clearance();
    const cplx b = c.branch_x()[0];
    const cplx base = b + cplx(8.0 * cl, 3.0 * cl);
    auto p = lift_x(c, base)[0];
    auto loop = XPath::petal(base, b, 2.0 * cl, cl);
    auto q = continue_point(c, p, loop);
    CHECK(std::abs(q.y - p.y) < 1e-10);
    CHECK(std::abs(q.lambda + p.lambda) < 1e-10);
    auto r2 = continue_point(c, q, loop);
    CHECK(std::abs(r2.lambda - p.lambda) < 1e-10);
    // Landing sheet agrees with a direct lift at the endpoint.
    auto direct = lift_x(c, base);
    CHECK(q.sheet_id >= 0);
    CHECK(std::abs(direct[q.sheet_id].lambda - q.lambda) < 1e-12);
  }

  TEST_CASE("continuation there and back") {
    auto c = hitchin::testing::default_so4();
    const double cl = c.default_clearance();
    auto p = lift_x(c, {3.0, 3.0})[5];
    auto pts = c.critical_x();
    std::vector<double> rad(pts.size(), 2.0 * cl);
    auto path = detoured_line(p.x, {-3.0, -2.5}, pts, rad, cl);
    auto q = continue_point(c, p, path);
    auto back = continue_point(c, q, path.reversed());
    CHECK(std::abs(back.y - p.y) < 1e-9);
    CHECK(std::abs(back.lambda - p.lambda) < 1e-9);
    auto r = residuals(c, q);
    CHECK(r[0] < 1e-10 * c.residual_scale());
    CHECK(r[1] < 1e-10 * c.residual_scale());
  }

  TEST_CASE("involutions") {
    auto c = hitchin::testing::default_so4();
    auto p = lift_x(c, {0.2, 0.4})[3];
    auto inv = involutions(p);
    auto twice = involutions(inv.tau1).tau1;
    CHECK(twice.lambda == p.lambda);
    CHECK(involutions(inv.tau2).tau1.y == involutions(inv.tau1).tau2.y);
    CHECK(involutions(inv.tau2).tau1.lambda == involutions(inv.tau1).tau2.lambda);
    for (auto& q : {inv.tau1, inv.tau2, inv.tau}) {
      auto r = residuals(c, q);
      CHECK(r[0] < 1e-10);
      CHECK(r[1] < 1e-10);
    }
  }

  TEST_CASE("validation rejects bad input") {
    CHECK_THROWS_AS(BaseCurve({1, 0, 0, 0, 0, 2}), ConfigError);
    CHECK_THROWS_AS(BaseCurve::from_roots(std::vector<cplx>{0, 0, 1, 2, 3}), DegenerateCurve);
    CHECK_THROWS_AS(SpectralCurve(default_base(), Family::SL2, hitchin::testing::vec({1, 2})), ConfigError);
    SpectralCurve h5(default_base(), Family::SO4, hitchin::testing::vec({1, 0, 2, 0, 1, 0}));
    CHECK_THROWS_AS(h5.validate_generic(), DegenerateCurve);
  }
}
