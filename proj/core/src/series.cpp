#include "hitchin/series.hpp"

#include <algorithm>

namespace hitchin {

Series Series::truncated(int order) const {
  Series s(order);
  for (int k = 0; k <= std::min(order, this->order()); ++k) s[k] = (*this)[k];
  return s;
}

cplx Series::eval(cplx z) const {
  cplx acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Series& Series::operator+=(const Series& o) {
  for (int k = 0; k <= std::min(order(), o.order()); ++k) (*this)[k] += o[k];
  return *this;
}

Series& Series::operator-=(const Series& o) {
  for (int k = 0; k <= std::min(order(), o.order()); ++k) (*this)[k] -= o[k];
  return *this;
}

Series& Series::operator*=(cplx a) {
  for (auto& v : c_) v *= a;
  return *this;
}

Series operator*(const Series& a, const Series& b) {
  const int n = std::min(a.order(), b.order());
  Series r(n);
  for (int i = 0; i <= n; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; i + j <= n; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Series inverse(const Series& a) {
  const int n = a.order();
  Series r(n);
  r[0] = 1.0 / a[0];
  for (int k = 1; k <= n; ++k) {
    cplx acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += a[j] * r[k - j];
    r[k] = -acc * r[0];
  }
  return r;
}

Series operator/(const Series& a, const Series& b) { return a * inverse(b.truncated(a.order())); }

Series Series::derivative() const {
  Series r(order());
  for (int k = 1; k <= order(); ++k) r[k - 1] = static_cast<double>(k) * (*this)[k];
  return r;
}

Series Series::integral() const {
  Series r(order());
  for (int k = 1; k <= order(); ++k) r[k] = (*this)[k - 1] / static_cast<double>(k);
  return r;
}

Series sqrt(const Series& a, cplx root0) {
  const int n = a.order();
  Series r(n);
  r[0] = root0;
  for (int k = 1; k <= n; ++k) {
    cplx acc = a[k];
    for (int j = 1; j < k; ++j) acc -= r[j] * r[k - j];
    r[k] = acc / (2.0 * root0);
  }
  return r;
}

Series exp(const Series& a) {
  // (exp a)' = a' exp a, solved term by term.
  const int n = a.order();
  Series r(n);
  r[0] = std::exp(a[0]);
  for (int k = 1; k <= n; ++k) {
    cplx acc = 0.0;
    for (int j = 1; j <= k; ++j) acc += static_cast<double>(j) * a[j] * r[k - j];
    r[k] = acc / static_cast<double>(k);
  }
  return r;
}

Series log(const Series& a) {
  // k L_k a_0 = k a_k - sum_{j=1}^{k-1} j L_j a_{k-j}
  const int n = a.order();
  Series r(n);
  r[0] = std::log(a[0]);
  for (int k = 1; k <= n; ++k) {
    cplx acc = static_cast<double>(k) * a[k];
    for (int j = 1; j < k; ++j) acc -= static_cast<double>(j) * r[j] * a[k - j];
    r[k] = acc / (static_cast<double>(k) * a[0]);
  }
  return r;
}

}  // namespace hitchin
