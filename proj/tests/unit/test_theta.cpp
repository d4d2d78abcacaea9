#include <doctest.h>

#include <cmath>
#include <random>

#include "hitchin/errors.hpp"
#include "hitchin/theta.hpp"

using namespace hitchin;

namespace {

CMatrix random_tau(int g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  RMatrix A(g, g), X(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      A(i, j) = u(rng);
      X(i, j) = u(rng);
    }
  const RMatrix Y = A * A.transpose() + 0.8 * RMatrix::Identity(g, g);
  const RMatrix Xs = 0.5 * (X + X.transpose());
  CMatrix tau(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) tau(i, j) = cplx(Xs(i, j), Y(i, j));
  return tau;
}

CVector random_z(int g, std::mt19937& rng, double im = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVector z(g);
  for (int i = 0; i < g; ++i) z[i] = cplx(u(rng), im * u(rng));
  return z;
}

Jet random_jet(int g, int d, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Jet j(index_set(g, d));
  for (int r = 0; r < j.indices().size(); ++r) j[r] = cplx(u(rng), u(rng));
  j[0] = 1.0;
  return j;
}

// Substitutes a univariate series u (no constant term) into s.
Series substitute(const Series& s, const Series& u) {
  const int m = s.order();
  Series out(m), pw(m, 1.0);
  for (int k = 0; k <= m; ++k) {
    out += s[k] * pw;
    pw = (pw * u.truncated(m)).truncated(m);
  }
  return out;
}

double binom(int n, int k) { return std::round(std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0))); }

}  // namespace

TEST_SUITE("theta") {
  TEST_CASE("multi-index sets") {
    for (int g : {1, 3, 6})
      for (int d : {0, 2, 5}) {
        const auto I = index_set(g, d);
        CHECK(I->size() == static_cast<int>(binom(g + d, d)));
        for (int r = 0; r < I->size(); ++r) {
          CHECK(I->rank(I->at(r)) == r);
          if (r > 0) CHECK(I->total(I->parent(r)) == I->total(r) - 1);
        }
      }
    const auto I = index_set(3, 4);
    const int a = I->rank(std::array<int, 3>{1, 0, 1}.data()), b = I->rank(std::array<int, 3>{0, 2, 0}.data());
    CHECK(I->sum(a, b) == I->rank(std::array<int, 3>{1, 2, 1}.data()));
    CHECK(I->sum(I->rank(std::array<int, 3>{3, 0, 0}.data()), b) == -1);
  }

  TEST_CASE("parity, integer periods, quasi-periodicity") {
    for (int g : {3, 6}) {
      ThetaOptions opt;
      opt.target_eps = 1e-12;
      const ThetaContext ctx(random_tau(g, 10 + g), opt);
      std::mt19937 rng(g);
      double worst_even = 0, worst_int = 0, worst_quasi = 0;
      const int trials = g == 3 ? 100 : 25;
      for (int t = 0; t < trials; ++t) {
        const CVector z = random_z(g, rng);
        const int j = static_cast<int>(rng() % g);
        const auto [e0, v0] = ctx.parts(z);
        const cplx th = ctx(z);
        const double scale = std::exp(e0);
        worst_even = std::max(worst_even, std::abs(ctx(CVector(-z)) - th) / scale);
        CVector zi = z;
        zi[j] += 1.0;
        worst_int = std::max(worst_int, std::abs(ctx(zi) - th) / scale);
        const CVector zt = z + ctx.tau().col(j);
        const cplx lhs = ctx(zt);
        const cplx rhs = std::exp(-kPi * kI * ctx.tau()(j, j) - 2.0 * kPi * kI * z[j]) * th;
        worst_quasi = std::max(worst_quasi, std::abs(lhs - rhs) / std::exp(ctx.parts(zt).first));
      }
      CHECK(worst_even < opt.target_eps);
      CHECK(worst_int < opt.target_eps);
      CHECK(worst_quasi < 10 * opt.target_eps);
    }
  }

  TEST_CASE("refinement stability") {
    const CMatrix tau = random_tau(3, 4);
    std::mt19937 rng(5);
    for (double eps : {1e-6, 1e-9, 1e-12}) {
      ThetaOptions a, b;
      a.target_eps = eps;
      b.target_eps = eps / 2;
      const ThetaContext ca(tau, a), cb(tau, b);
      for (int t = 0; t < 10; ++t) {
        const CVector z = random_z(3, rng);
        CHECK(std::abs(ca(z) - cb(z)) / std::exp(ca.parts(z).first) < eps);
      }
    }
  }

  TEST_CASE("point budget") {
    ThetaOptions opt;
    opt.point_budget = 50;
    const ThetaContext ctx(random_tau(6, 1), opt);
    CHECK_THROWS_AS(ctx(CVector::Zero(6)), TruncationOverflow);
    CHECK_THROWS_AS(ThetaContext(CMatrix::Identity(2, 2)), ConfigError);
  }

  TEST_CASE("jets against finite differences") {
    const ThetaContext ctx(random_tau(3, 7));
    std::mt19937 rng(9);
    for (int t = 0; t < 5; ++t) {
      const CVector z = random_z(3, rng);
      const Jet J = ctx.jet(z, 4);
      const double s = std::exp(J.log_scale());
      CHECK(std::abs(J.value() - ctx(z)) < 1e-13 * s);
      const double hs = 1e-5;
      for (int i = 0; i < 3; ++i) {
        CVector zp = z, zm = z;
        zp[i] += hs;
        zm[i] -= hs;
        const cplx fd = (ctx(zp) - ctx(zm)) / (2 * hs);
        std::array<int, 3> e{0, 0, 0};
        e[i] = 1;
        const cplx c1 = s * J[J.indices().rank(e.data())];
        CHECK(std::abs(fd - c1) <= 1e-6 * std::abs(c1) + 1e-9 * s);
        for (int k = 0; k < 3; ++k) {
          const double h2 = 3e-5;
          CVector a = z, b = z, c = z, d = z;
          a[i] += h2, a[k] += h2;
          b[i] += h2, b[k] -= h2;
          c[i] -= h2, c[k] += h2;
          d[i] -= h2, d[k] -= h2;
          const cplx fd2 = (ctx(a) - ctx(b) - ctx(c) + ctx(d)) / (4 * h2 * h2);
          std::array<int, 3> f{0, 0, 0};
          f[i] += 1;
          f[k] += 1;
          const cplx c2 = s * J[J.indices().rank(f.data())] * (i == k ? 2.0 : 1.0);
          CHECK(std::abs(fd2 - c2) <= 1e-6 * std::abs(c2) + 1e-6 * s);
        }
      }
      const Jet Jm = ctx.jet(CVector(-z), 4);
      double worst = 0.0;
      for (int r = 0; r < J.indices().size(); ++r) {
        const double sign = J.indices().total(r) % 2 ? -1.0 : 1.0;
        worst = std::max(worst, std::abs(Jm[r] * std::exp(Jm.log_scale()) - sign * s * J[r]));
      }
      CHECK(worst < 1e-12 * s);
    }
  }

  TEST_CASE("log and exp jets") {
    const Jet one = Jet::constant(3, 5, 1.0);
    const Jet l1 = log_jet(one);
    for (cplx c : l1.coeffs()) CHECK(std::abs(c) == 0.0);
    for (int g : {2, 6}) {
      const Jet j = random_jet(g, 6, 30 + g);
      const Jet back = exp_jet(log_jet(j));
      double worst = 0.0;
      for (int r = 0; r < j.indices().size(); ++r) worst = std::max(worst, std::abs(back[r] - j[r]));
      CHECK(worst < 1e-10);
      const Jet prod = j * j;
      const Jet l2 = log_jet(prod), l = log_jet(j);
      worst = 0.0;
      for (int r = 0; r < j.indices().size(); ++r) worst = std::max(worst, std::abs(l2[r] - 2.0 * l[r]));
      CHECK(worst < 1e-10);
    }
    const ThetaContext ctx(random_tau(3, 2));
    CVector z(3);
    z << cplx(0.2, 0.1), cplx(-0.3, 0.05), cplx(0.4, -0.2);
    const Jet J = ctx.jet(z, 3);
    const Jet L = log_jet(J);
    CHECK(std::abs(std::exp(L[0]) - J.value()) < 1e-12 * std::abs(J.value()));
    for (int i = 1; i <= 3; ++i) CHECK(std::abs(L[i] - J[i] / J[0]) < 1e-12 * std::abs(L[i]) + 1e-14);
    Jet tiny = Jet::constant(3, 2, 1e-20);
    CHECK_THROWS_AS(log_jet(tiny), NearThetaDivisor);
  }

  TEST_CASE("series composition") {
    const Jet j = random_jet(3, 5, 77);
    std::vector<Series> zero(3, Series(5));
    const Series c = compose_series(j, zero, 5);
    CHECK(c[0] == j[0]);
    for (int k = 1; k <= 5; ++k) CHECK(c[k] == cplx{});

    // chain rule
    std::vector<Series> lin(3, Series(1));
    const cplx v[3] = {0.3, -1.2, 0.7};
    for (int i = 0; i < 3; ++i) lin[i][1] = v[i];
    const Series s1 = compose_series(j, lin, 1);
    CHECK(std::abs(s1[1] - (j[1] * v[0] + j[2] * v[1] + j[3] * v[2])) < 1e-15);

    // substitution associativity
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Series> w(3, Series(6));
    Series inner(6);
    for (int k = 1; k <= 6; ++k) inner[k] = cplx(u(rng), u(rng));
    for (auto& s : w)
      for (int k = 1; k <= 6; ++k) s[k] = cplx(u(rng), u(rng));
    std::vector<Series> w2(3);
    for (int i = 0; i < 3; ++i) w2[i] = substitute(w[i], inner);
    const Jet j6 = random_jet(3, 6, 78);
    const Series lhs = compose_series(j6, w2, 6);
    const Series rhs = substitute(compose_series(j6, w, 6), inner);
    for (int k = 0; k <= 6; ++k) CHECK(std::abs(lhs[k] - rhs[k]) < 1e-10);
  }

  TEST_CASE("log theta along a curve matches sampling") {
    const ThetaContext ctx(random_tau(3, 12));
    CVector base(3);
    base << cplx(0.1, 0.2), cplx(-0.4, 0.1), cplx(0.25, -0.15);
    std::vector<Series> w(3, Series(8));
    const cplx a[3][2] = {{0.5, 0.2}, {-0.3, 0.4}, {0.8, -0.1}};
    for (int i = 0; i < 3; ++i) {
      w[i][1] = a[i][0];
      w[i][3] = a[i][1];
    }
    const int m = 8;
    const Series s = compose_series(log_jet(ctx.jet(base, m)), w, m);
    for (double r : {0.05, 0.025}) {
      const int N = 32;
      std::vector<cplx> coef(m + 1, 0.0);
      for (int k = 0; k < N; ++k) {
        const cplx zz = std::polar(r, 2 * kPi * k / N);
        CVector p = base;
        for (int i = 0; i < 3; ++i) p[i] += w[i].eval(zz);
        const cplx val = std::log(ctx(p));
        for (int l = 0; l <= m; ++l) coef[l] += val * std::pow(zz, -l) / static_cast<double>(N);
      }
      for (int l = 1; l <= 4; ++l) CHECK(std::abs(coef[l] - s[l]) <= 1e-6 * std::abs(s[l]) + 1e-9);
      CHECK(std::abs(std::exp(coef[0]) - std::exp(s[0])) < 1e-6 * std::abs(std::exp(s[0])));
    }
  }

  TEST_CASE("along-curve series matches jet composition") {
    const ThetaContext ctx(random_tau(4, 21));
    CVector base(4);
    base << cplx(0.3, -0.1), cplx(0.1, 0.2), cplx(-0.2, 0.05), cplx(0.45, 0.1);
    std::vector<Series> w(4, Series(7));
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (auto& s : w)
      for (int k = 1; k <= 7; ++k) s[k] = cplx(u(rng), u(rng));
    const Jet J = ctx.jet(base, 7);
    const Series ref = compose_series(J, w, 7);
    const auto a = ctx.along(base, w, 7);
    CHECK(std::abs(a.log_scale - J.log_scale()) < 1e-12);
    CHECK(std::abs(a.term_scale - J.term_scale()) < 1e-12 * J.term_scale());
    for (int k = 0; k <= 7; ++k) CHECK(std::abs(a.series[k] - ref[k]) < 1e-11 * (1 + std::abs(ref[k])));
  }
}
