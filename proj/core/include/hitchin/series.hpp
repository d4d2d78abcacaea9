#pragma once

#include <vector>

#include "hitchin/types.hpp"

namespace hitchin {

/// Univariate power series truncated at a fixed order (coefficients 0..order).
class Series {
 public:
  Series() = default;
  explicit Series(int order, cplx constant = 0.0) : c_(static_cast<std::size_t>(order) + 1, 0.0) {
    c_[0] = constant;
  }
  static Series from_coeffs(std::vector<cplx> coeffs) {
    Series s;
    s.c_ = std::move(coeffs);
    if (s.c_.empty()) s.c_.push_back(0.0);
    return s;
  }
  /// The variable z itself, truncated at `order`.
  static Series variable(int order) {
    Series s(order);
    if (order >= 1) s.c_[1] = 1.0;
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  cplx operator[](int k) const { return k <= order() ? c_[static_cast<std::size_t>(k)] : cplx{}; }
  cplx& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }
  const std::vector<cplx>& coeffs() const { return c_; }

  Series truncated(int order) const;
  cplx eval(cplx z) const;

  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(cplx a);

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(Series a, cplx s) { return a *= s; }
  friend Series operator*(cplx s, Series a) { return a *= s; }
  friend Series operator*(const Series& a, const Series& b);
  friend Series operator/(const Series& a, const Series& b);

  Series derivative() const;
  /// Antiderivative with zero constant term (order is preserved).
  Series integral() const;

 private:
  std::vector<cplx> c_{0.0};
};

Series inverse(const Series& a);
/// Square root with prescribed constant term `root0` (root0^2 == a[0]).
Series sqrt(const Series& a, cplx root0);
Series exp(const Series& a);
/// Logarithm; the constant term uses the principal branch.
Series log(const Series& a);

}  // namespace hitchin
