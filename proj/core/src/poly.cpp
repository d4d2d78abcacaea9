#include "hitchin/poly.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace hitchin::poly {

std::vector<cplx> derivative(std::span<const cplx> c) {
  std::vector<cplx> d;
  for (std::size_t k = 1; k < c.size(); ++k) d.push_back(static_cast<double>(k) * c[k]);
  if (d.empty()) d.push_back(0.0);
  return d;
}

std::array<cplx, 2> quadratic_roots(cplx a, cplx b, cplx c) {
  const cplx disc = std::sqrt(b * b - 4.0 * a * c);
  // Choose the sign that avoids cancellation in -b -+ disc.
  const cplx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
  if (q == 0.0) return {0.0, 0.0};
  return {q / a, c / q};
}

std::vector<cplx> roots(std::span<const cplx> c) {
  std::size_t n = c.size();
  while (n > 0 && c[n - 1] == 0.0) --n;
  if (n <= 1) return {};
  const std::size_t deg = n - 1;
  const cplx lead = c[deg];
  if (deg == 1) return {-c[0] / lead};
  if (deg == 2) {
    auto r = quadratic_roots(c[2], c[1], c[0]);
    return {r[0], r[1]};
  }
  CMatrix comp = CMatrix::Zero(deg, deg);
  for (std::size_t i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / lead;
  Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
  std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + deg);

  const std::span<const cplx> cs(c.data(), n);
  for (auto& r : out) {
    for (int it = 0; it < 4; ++it) {
      const cplx f = eval(cs, r);
      const cplx df = eval_derivative(cs, r);
      if (df == 0.0) break;
      const cplx step = f / df;
      if (!std::isfinite(std::abs(step))) break;
      const cplx cand = r - step;
      if (std::abs(eval(cs, cand)) > std::abs(f)) break;
      r = cand;
    }
  }
  return out;
}

double coincidence_tolerance(std::span<const cplx> rts) {
  double m = 0.0;
  for (auto r : rts) m = std::max(m, std::abs(r));
  return 1e-8 * (1.0 + m);
}

double min_separation(std::span<const cplx> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, std::abs(pts[i] - pts[j]));
  return best;
}

std::vector<cplx> from_roots(std::span<const cplx> rts) {
  std::vector<cplx> c{1.0};
  for (auto r : rts) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

}  // namespace hitchin::poly
