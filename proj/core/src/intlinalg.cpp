#include "hitchin/intlinalg.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace hitchin {

std::int64_t form(const IMatrix& K, const IVector& v, const IVector& w) { return v.dot(K * w); }

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t d) {
  std::int64_t q = a / d;
  if ((a % d != 0) && ((a < 0) != (d < 0))) --q;
  return q;
}

}  // namespace

SymplecticReduction symplectic_reduce(const IMatrix& K) {
  const Eigen::Index n = K.rows();
  if (K.cols() != n || K != IMatrix(-K.transpose())) throw std::invalid_argument("form is not skew-symmetric");
  std::vector<IVector> rest;
  for (Eigen::Index i = 0; i < n; ++i) rest.push_back(IVector::Unit(n, i));
  struct Pair {
    IVector e, f;
    std::int64_t d;
  };
  std::vector<Pair> pairs;

  for (;;) {
    std::size_t bi = 0, bj = 0;
    std::int64_t best = 0;
    for (std::size_t i = 0; i < rest.size(); ++i)
      for (std::size_t j = i + 1; j < rest.size(); ++j) {
        const std::int64_t v = form(K, rest[i], rest[j]);
        if (v != 0 && (best == 0 || std::llabs(v) < best)) {
          best = std::llabs(v);
          bi = i;
          bj = j;
        }
      }
    if (best == 0) break;
    IVector e = rest[bi], f = rest[bj];
    if (form(K, e, f) < 0) std::swap(e, f);
    const std::int64_t d = form(K, e, f);
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(bj));
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(bi));

    bool restart = false;
    for (auto& u : rest) {
      const std::int64_t a = form(K, u, f), c = form(K, u, e);
      if (a % d != 0) {
        u -= floor_div(a, d) * e;
        restart = true;
        break;
      }
      if (c % d != 0) {
        u += floor_div(c, d) * f;
        restart = true;
        break;
      }
      u += -(a / d) * e + (c / d) * f;
    }
    if (restart) {
      rest.push_back(e);
      rest.push_back(f);
      continue;
    }
    pairs.push_back({e, f, d});
  }

  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
  SymplecticReduction out;
  out.pairs = static_cast<int>(pairs.size());
  out.basis.resize(n, n);
  Eigen::Index row = 0;
  for (const auto& p : pairs) {
    out.basis.row(row++) = p.e.transpose();
    out.divisors.push_back(p.d);
  }
  for (const auto& p : pairs) out.basis.row(row++) = p.f.transpose();
  for (const auto& r : rest) out.basis.row(row++) = r.transpose();
  return out;
}

}  // namespace hitchin
