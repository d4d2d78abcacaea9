#include "hitchin/theta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <boost/math/special_functions/gamma.hpp>

#include "hitchin/errors.hpp"
#include "hitchin/parallel.hpp"

namespace hitchin {

MultiIndexSet::MultiIndexSet(int vars, int degree) : g_(vars), d_(degree) {
  if (vars < 1 || degree < 0) throw ConfigError("bad multi-index set");
  cnt_.assign(g_ + 1, std::vector<std::int64_t>(d_ + 1, 0));
  cnt_[0][0] = 1;
  for (int k = 1; k <= g_; ++k)
    for (int r = 0; r <= d_; ++r)
      for (int v = 0; v <= r; ++v) cnt_[k][r] += cnt_[k - 1][r - v];
  std::vector<int> a(g_);
  auto gen = [&](auto&& self, int pos, int rem, int tot) -> void {
    if (pos == g_ - 1) {
      a[pos] = rem;
      alpha_.insert(alpha_.end(), a.begin(), a.end());
      tot_.push_back(tot);
      return;
    }
    for (int v = rem; v >= 0; --v) {
      a[pos] = v;
      self(self, pos + 1, rem - v, tot);
    }
  };
  for (int k = 0; k <= d_; ++k) {
    start_.push_back(static_cast<int>(tot_.size()));
    gen(gen, 0, k, k);
  }
  start_.push_back(static_cast<int>(tot_.size()));
  count_ = tot_.size();
  parent_.assign(count_, -1);
  pvar_.assign(count_, -1);
  for (std::size_t r = 1; r < count_; ++r) {
    std::vector<int> b(at(static_cast<int>(r)), at(static_cast<int>(r)) + g_);
    int i = 0;
    while (b[i] == 0) ++i;
    --b[i];
    parent_[r] = rank(b.data());
    pvar_[r] = i;
  }
}

int MultiIndexSet::rank(const int* alpha) const {
  int k = 0;
  for (int i = 0; i < g_; ++i) k += alpha[i];
  std::int64_t r = start_[k];
  int rem = k;
  for (int i = 0; i + 1 < g_; ++i) {
    for (int v = rem; v > alpha[i]; --v) r += cnt_[g_ - i - 1][rem - v];
    rem -= alpha[i];
  }
  return static_cast<int>(r);
}

int MultiIndexSet::sum(int a, int b) const {
  if (tot_[a] + tot_[b] > d_) return -1;
  int s[32];
  const int* x = at(a);
  const int* y = at(b);
  for (int i = 0; i < g_; ++i) s[i] = x[i] + y[i];
  return rank(s);
}

IndexSetPtr index_set(int vars, int degree) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, IndexSetPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& p = cache[{vars, degree}];
  if (!p) p = std::make_shared<const MultiIndexSet>(vars, degree);
  return p;
}

Jet::Jet(IndexSetPtr idx, double log_scale) : idx_(std::move(idx)), log_scale_(log_scale) {
  c_.assign(static_cast<std::size_t>(idx_->size()), 0.0);
}

Jet Jet::constant(int vars, int degree, cplx value) {
  Jet j(index_set(vars, degree));
  j[0] = value;
  return j;
}

cplx Jet::coeff(std::initializer_list<int> alpha) const {
  if (static_cast<int>(alpha.size()) != vars()) throw ConfigError("multi-index length mismatch");
  int tot = 0;
  for (int a : alpha) tot += a;
  if (tot > degree()) return 0.0;
  return c_[static_cast<std::size_t>(idx_->rank(alpha.begin()))];
}

Jet operator*(const Jet& a, const Jet& b) {
  if (a.vars() != b.vars()) throw ConfigError("jet dimension mismatch");
  const auto idx = a.degree() <= b.degree() ? a.idx_ : b.idx_;
  const MultiIndexSet& I = *idx;
  Jet out(idx, a.log_scale_ + b.log_scale_);
  out.term_scale_ = a.term_scale_ * b.term_scale_;
  const int d = I.degree();
  for (int i = 0; i < I.size(); ++i) {
    if (a[i] == cplx{}) continue;
    for (int j = 0; j < I.begin(d - I.total(i) + 1); ++j) out[I.sum(i, j)] += a[i] * b[j];
  }
  return out;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.idx_ != idx_ || o.log_scale_ != log_scale_) throw ConfigError("jets are not compatible");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet log_jet(const Jet& jet, double floor) {
  const MultiIndexSet& I = jet.indices();
  const cplx J0 = jet[0];
  if (!(std::abs(J0) > floor * jet.term_scale()))
    throw NearThetaDivisor("base value " + std::to_string(std::abs(J0)) + " below floor");
  Jet L(jet.index_ptr());
  L[0] = std::log(J0) + jet.log_scale();
  for (int m = 1; m <= I.degree(); ++m) {
    for (int r = I.begin(m); r < I.begin(m + 1); ++r) L[r] = static_cast<double>(m) * jet[r];
    for (int d = 1; d < m; ++d)
      for (int a = I.begin(m - d); a < I.begin(m - d + 1); ++a) {
        if (jet[a] == cplx{}) continue;
        for (int b = I.begin(d); b < I.begin(d + 1); ++b) L[I.sum(a, b)] -= static_cast<double>(d) * jet[a] * L[b];
      }
    for (int r = I.begin(m); r < I.begin(m + 1); ++r) L[r] /= static_cast<double>(m) * J0;
  }
  return L;
}

Jet exp_jet(const Jet& jet) {
  const MultiIndexSet& I = jet.indices();
  const double s = std::exp(jet.log_scale());
  Jet E(jet.index_ptr());
  E[0] = std::exp(s * jet[0]);
  for (int m = 1; m <= I.degree(); ++m) {
    for (int d = 1; d <= m; ++d)
      for (int b = I.begin(d); b < I.begin(d + 1); ++b) {
        if (jet[b] == cplx{}) continue;
        for (int a = I.begin(m - d); a < I.begin(m - d + 1); ++a)
          E[I.sum(a, b)] += static_cast<double>(d) * s * jet[b] * E[a];
      }
    for (int r = I.begin(m); r < I.begin(m + 1); ++r) E[r] /= static_cast<double>(m);
  }
  return E;
}

Series compose_series(const Jet& jet, const std::vector<Series>& w, int m) {
  const MultiIndexSet& I = jet.indices();
  if (static_cast<int>(w.size()) != I.vars()) throw ConfigError("argument count mismatch");
  std::vector<Series> ws(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    ws[i] = w[i].truncated(m);
    ws[i][0] = 0.0;
  }
  const int top = I.begin(std::min(I.degree(), m) + 1);
  std::vector<Series> mono(static_cast<std::size_t>(top));
  mono[0] = Series(m, 1.0);
  Series out(m, jet[0]);
  for (int r = 1; r < top; ++r) {
    mono[r] = (mono[I.parent(r)] * ws[I.parent_var(r)]).truncated(m);
    if (jet[r] != cplx{}) out += jet[r] * mono[r];
  }
  return out;
}

ThetaContext::ThetaContext(CMatrix tau, ThetaOptions opt) : tau_(std::move(tau)), opt_(opt) {
  const int g = dim();
  if (tau_.cols() != g || g < 1) throw ConfigError("tau must be square");
  if ((tau_ - tau_.transpose()).norm() > 1e-10 * std::max(1.0, tau_.norm())) throw ConfigError("tau is not symmetric");
  Y_ = tau_.imag();
  X_ = tau_.real();
  Eigen::LLT<RMatrix> llt(kPi * Y_);
  if (llt.info() != Eigen::Success) throw ConfigError("Im tau is not positive definite");
  T_ = llt.matrixU();
  Yllt_.compute(Y_);
  Eigen::JacobiSVD<RMatrix> svd(T_);
  tinv_norm_ = 1.0 / svd.singularValues().minCoeff();
  det_t_ = T_.diagonal().prod();
  double r0 = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g; ++j) r0 = std::min(r0, T_.col(j).norm());
  rho_ = r0;
  const auto pts = ellipsoid(RVector::Zero(g), r0 * (1.0 + 1e-12));
  for (std::size_t p = 0; p < pts.size() / g; ++p) {
    Eigen::Map<const Eigen::VectorXi> n(&pts[p * g], g);
    if (n.cwiseAbs().maxCoeff() == 0) continue;
    rho_ = std::min(rho_, (T_ * n.cast<double>()).norm());
  }
}

double ThetaContext::radius(int degree, const CVector& z) const {
  const int g = dim();
  const RVector c = Yllt_.solve(RVector(z.imag()));
  const double a = tinv_norm_, b = c.norm();
  auto bound = [&](double R) {
    const double X2 = std::pow(R - 0.5 * rho_, 2);
    const double pre = 0.5 * g * std::pow(2.0 / rho_, g);
    if (degree == 0) return pre * boost::math::tgamma(0.5 * g, X2);
    const double poly = std::pow(2.0 * kPi, degree) * std::pow(2.0, degree - 1);
    return pre * poly *
           (std::pow(a, degree) * boost::math::tgamma(0.5 * (g + degree), X2) +
            std::pow(b, degree) * boost::math::tgamma(0.5 * g, X2));
  };
  double R = std::sqrt(static_cast<double>(g + degree)) + 0.5 * rho_;
  while (bound(R) >= opt_.target_eps) {
    R += 0.05;
    if (R > 200.0) throw TruncationOverflow("no admissible ellipsoid radius");
  }
  return R;
}

std::vector<int> ThetaContext::ellipsoid(const RVector& c, double R) const {
  const int g = dim();
  const double vol = std::pow(kPi, 0.5 * g) / std::tgamma(0.5 * g + 1.0) * std::pow(R, g) /
                     det_t_;
  if (vol > 4.0 * static_cast<double>(opt_.point_budget))
    throw TruncationOverflow("ellipsoid needs about " + std::to_string(vol) + " points");
  std::vector<int> out, n(g);
  std::vector<double> rem(g + 1);
  rem[g] = R * R;
  auto rec = [&](auto&& self, int i) -> void {
    double s = 0.0;
    for (int j = i + 1; j < g; ++j) s += T_(i, j) * (n[j] + c[j]);
    const double tii = T_(i, i);
    const double center = -c[i] - s / tii;
    const double half = std::sqrt(std::max(rem[i + 1], 0.0)) / tii;
    const int lo = static_cast<int>(std::ceil(center - half)), hi = static_cast<int>(std::floor(center + half));
    for (int v = lo; v <= hi; ++v) {
      n[i] = v;
      const double t = tii * (v + c[i]) + s;
      rem[i] = rem[i + 1] - t * t;
      if (rem[i] < 0.0) continue;
      if (i == 0) {
        out.insert(out.end(), n.begin(), n.end());
        if (static_cast<std::int64_t>(out.size() / g) > opt_.point_budget)
          throw TruncationOverflow("lattice point budget exceeded");
      } else {
        self(self, i - 1);
      }
    }
  };
  rec(rec, g - 1);
  return out;
}

std::int64_t ThetaContext::lattice_size(const CVector& z, int degree) const {
  const RVector c = Yllt_.solve(RVector(z.imag()));
  return static_cast<std::int64_t>(ellipsoid(c, radius(degree, z)).size() / dim());
}

std::pair<double, cplx> ThetaContext::parts(const CVector& z) const {
  const Jet j = jet(z, 0);
  return {j.log_scale(), j[0]};
}

cplx ThetaContext::operator()(const CVector& z) const { return jet(z, 0).value(); }

void ThetaContext::for_each_row(const CVector& z, double R, std::size_t chunks, const RowFn& fn) const {
  const int g = dim();
  const RVector x = z.real(), y = z.imag();
  const RVector c = Yllt_.solve(y);
  const double R2 = R * R;
  const double vol = std::pow(kPi, 0.5 * g) / std::tgamma(0.5 * g + 1.0) * std::pow(R, g) / det_t_;
  if (vol > 4.0 * static_cast<double>(opt_.point_budget))
    throw TruncationOverflow("ellipsoid needs about " + std::to_string(vol) + " points");
  const double t00 = T_(0, 0);
  const cplx A = cplx(-t00 * t00, kPi * X_(0, 0));

  // Row over n_0 with outer coordinates fixed: exponent A n0^2 + B n0 + C.
  auto row = [&](std::size_t ch, const std::vector<int>& n, double partial, double s, double phase) {
    const double center = -c[0] - s / t00;
    const double half = std::sqrt(std::max(R2 - partial, 0.0)) / t00;
    const int lo = static_cast<int>(std::ceil(center - half)), hi = static_cast<int>(std::floor(center + half));
    if (lo > hi) return;
    double xr = x[0];
    for (int j = 1; j < g; ++j) xr += X_(0, j) * n[j];
    const double u0 = t00 * c[0] + s;
    const cplx B(-2.0 * t00 * u0, 2.0 * kPi * xr);
    const cplx C(-partial - u0 * u0, phase);
    const double l = lo;
    fn(ch, n, lo, hi, std::exp(A * l * l + B * l + C), std::exp(A * (2.0 * l + 1.0) + B));
  };

  // Outer coordinates g-1 .. 1 by Fincke-Pohst; partial = squared norm of the
  // fixed part, phase = pi n.X.n + 2 pi n.x restricted to it.
  auto rec = [&](auto&& self, std::size_t ch, std::vector<int>& n, int i, double partial, double phase) -> void {
    if (i == 0) {
      double s = 0.0;
      for (int j = 1; j < g; ++j) s += T_(0, j) * (n[j] + c[j]);
      row(ch, n, partial, s, phase);
      return;
    }
    double s = 0.0, xs = x[i];
    for (int j = i + 1; j < g; ++j) {
      s += T_(i, j) * (n[j] + c[j]);
      xs += X_(i, j) * n[j];
    }
    const double tii = T_(i, i);
    const double center = -c[i] - s / tii;
    const double half = std::sqrt(std::max(R2 - partial, 0.0)) / tii;
    const int lo = static_cast<int>(std::ceil(center - half)), hi = static_cast<int>(std::floor(center + half));
    for (int v = lo; v <= hi; ++v) {
      const double t = tii * (v + c[i]) + s;
      if (partial + t * t > R2) continue;
      n[i] = v;
      self(self, ch, n, i - 1, partial + t * t, phase + kPi * X_(i, i) * v * v + 2.0 * kPi * v * xs);
    }
    n[i] = 0;
  };

  std::vector<int> tops;
  if (g > 1) {
    const double tii = T_(g - 1, g - 1);
    const int lo = static_cast<int>(std::ceil(-c[g - 1] - R / tii));
    const int hi = static_cast<int>(std::floor(-c[g - 1] + R / tii));
    for (int v = lo; v <= hi; ++v) tops.push_back(v);
  } else {
    tops.push_back(0);
  }
  chunks = std::max<std::size_t>(1, std::min(chunks, tops.size()));
  parallel_for(chunks, [&](std::size_t ch) {
    std::vector<int> n(g, 0);
    for (std::size_t t = ch; t < tops.size(); t += chunks) {
      if (g == 1) {
        row(ch, n, 0.0, 0.0, 0.0);
        continue;
      }
      const int i = g - 1, v = tops[t];
      const double u = T_(i, i) * (v + c[i]);
      if (u * u > R2) continue;
      n[i] = v;
      rec(rec, ch, n, i - 1, u * u, kPi * X_(i, i) * v * v + 2.0 * kPi * v * x[i]);
    }
  });
}

namespace {

struct RowAcc {
  std::vector<cplx> c;
  double tmax2 = 0.0;
  std::int64_t points = 0;
};

}  // namespace

Jet ThetaContext::jet(const CVector& z, int degree) const {
  const int g = dim();
  if (z.size() != g) throw ConfigError("theta argument has wrong dimension");
  if (degree < 0 || degree > opt_.max_degree) throw ConfigError("jet degree above ceiling");
  const IndexSetPtr idx = index_set(g, degree);
  const MultiIndexSet& I = *idx;
  const int M = I.size();
  // Split each multi-index into its first exponent and the rest.
  const IndexSetPtr rest_idx = g > 1 ? index_set(g - 1, degree) : nullptr;
  std::vector<int> first(M), rest(M, 0);
  for (int r = 0; r < M; ++r) {
    first[r] = I.at(r)[0];
    if (rest_idx) rest[r] = rest_idx->rank(I.at(r) + 1);
  }
  const int Mr = rest_idx ? rest_idx->size() : 1;
  const cplx tpi = 2.0 * kPi * kI;
  const cplx e2A = std::exp(2.0 * cplx(-T_(0, 0) * T_(0, 0), kPi * X_(0, 0)));
  const std::size_t chunks = static_cast<std::size_t>(std::max(1, thread_count()));
  std::vector<RowAcc> accs(chunks);
  std::vector<std::vector<cplx>> moms(chunks, std::vector<cplx>(degree + 1)), outers(chunks, std::vector<cplx>(Mr));
  for (auto& a : accs) a.c.assign(M, 0.0);

  for_each_row(z, radius(degree, z), chunks,
               [&](std::size_t ch, const std::vector<int>& n, int lo, int hi, cplx term, cplx q) {
                 RowAcc& acc = accs[ch];
                 auto& mom = moms[ch];
                 auto& outer = outers[ch];
                 std::fill(mom.begin(), mom.end(), cplx{});
                 for (int v = lo; v <= hi; ++v) {
                   acc.tmax2 = std::max(acc.tmax2, std::norm(term));
                   cplx p = term;
                   mom[0] += p;
                   for (int k = 1; k <= degree; ++k) {
                     p *= tpi * static_cast<double>(v) / static_cast<double>(k);
                     mom[k] += p;
                   }
                   term *= q;
                   q *= e2A;
                 }
                 acc.points += hi - lo + 1;
                 if (acc.points > opt_.point_budget) throw TruncationOverflow("lattice point budget exceeded");
                 outer[0] = 1.0;
                 for (int r = 1; r < Mr; ++r) {
                   const int i = rest_idx->parent_var(r);
                   outer[r] = outer[rest_idx->parent(r)] * tpi * static_cast<double>(n[i + 1]) /
                              static_cast<double>(rest_idx->at(r)[i]);
                 }
                 for (int r = 0; r < M; ++r) acc.c[r] += mom[first[r]] * outer[rest[r]];
               });

  const RVector y = z.imag();
  Jet out(idx, kPi * y.dot(Yllt_.solve(y)));
  double tmax2 = 0.0;
  std::int64_t points = 0;
  for (const auto& acc : accs) {
    for (int r = 0; r < M; ++r) out[r] += acc.c[r];
    tmax2 = std::max(tmax2, acc.tmax2);
    points += acc.points;
  }
  if (points > opt_.point_budget) throw TruncationOverflow("lattice point budget exceeded");
  out.set_term_scale(std::sqrt(tmax2));
  return out;
}

ThetaContext::AlongSeries ThetaContext::along(const CVector& z, const std::vector<Series>& w, int m) const {
  const int g = dim();
  if (z.size() != g || static_cast<int>(w.size()) != g) throw ConfigError("theta argument has wrong dimension");
  std::vector<Series> ws(g);
  for (int i = 0; i < g; ++i) {
    ws[i] = w[i].truncated(m);
    ws[i][0] = 0.0;
  }
  // Powers (2 pi i w_0)^p / p!, flat: pw[p * (m + 1) + k].
  const cplx tpi = 2.0 * kPi * kI;
  const int m1 = m + 1;
  std::vector<cplx> pw(static_cast<std::size_t>(m1) * m1, 0.0);
  {
    Series cur(m, 1.0);
    for (int p = 0; p <= m; ++p) {
      for (int k = 0; k <= m; ++k) pw[p * m1 + k] = cur[k];
      cur = (cur * ws[0]) * (tpi / static_cast<double>(p + 1));
    }
  }
  // 2 pi i w_j, flat.
  std::vector<cplx> wt(static_cast<std::size_t>(g) * m1, 0.0);
  for (int j = 0; j < g; ++j)
    for (int k = 1; k <= m; ++k) wt[j * m1 + k] = tpi * ws[j][k];
  const cplx e2A = std::exp(2.0 * cplx(-T_(0, 0) * T_(0, 0), kPi * X_(0, 0)));
  const std::size_t chunks = static_cast<std::size_t>(std::max(1, thread_count()));
  struct Work {
    std::vector<cplx> acc, mom, inner, a, e;
    std::int64_t points = 0;
    double tmax2 = 0.0;
  };
  std::vector<Work> work(chunks);
  for (auto& wk : work) {
    wk.acc.assign(m1, 0.0);
    wk.mom.assign(m1, 0.0);
    wk.inner.assign(m1, 0.0);
    wk.a.assign(m1, 0.0);
    wk.e.assign(m1, 0.0);
  }
  for_each_row(z, radius(m, z), chunks, [&](std::size_t ch, const std::vector<int>& n, int lo, int hi, cplx term, cplx q) {
    Work& wk = work[ch];
    std::fill(wk.mom.begin(), wk.mom.end(), cplx{});
    for (int v = lo; v <= hi; ++v) {
      wk.tmax2 = std::max(wk.tmax2, std::norm(term));
      cplx p = term;
      wk.mom[0] += p;
      for (int k = 1; k <= m; ++k) {
        p *= static_cast<double>(v);
        wk.mom[k] += p;
      }
      term *= q;
      q *= e2A;
    }
    wk.points += hi - lo + 1;
    if (wk.points > opt_.point_budget) throw TruncationOverflow("lattice point budget exceeded");
    // inner = sum_p mom_p (2 pi i w_0)^p / p!; pw[p] starts at order p.
    for (int k = 0; k <= m; ++k) {
      cplx c = 0.0;
      for (int p = 0; p <= k; ++p) c += wk.mom[p] * pw[p * m1 + k];
      wk.inner[k] = c;
    }
    // e = exp(a), a = 2 pi i sum_{j >= 1} n_j w_j, via k e_k = sum_i i a_i e_{k-i}.
    std::fill(wk.a.begin(), wk.a.end(), cplx{});
    for (int j = 1; j < g; ++j)
      if (n[j] != 0)
        for (int k = 1; k <= m; ++k) wk.a[k] += static_cast<double>(n[j]) * wt[j * m1 + k];
    wk.e[0] = 1.0;
    for (int k = 1; k <= m; ++k) {
      cplx c = 0.0;
      for (int i = 1; i <= k; ++i) c += static_cast<double>(i) * wk.a[i] * wk.e[k - i];
      wk.e[k] = c / static_cast<double>(k);
    }
    for (int k = 0; k <= m; ++k) {
      cplx c = 0.0;
      for (int i = 0; i <= k; ++i) c += wk.inner[i] * wk.e[k - i];
      wk.acc[k] += c;
    }
  });
  AlongSeries out;
  out.series = Series(m);
  std::int64_t points = 0;
  for (const auto& wk : work) {
    for (int k = 0; k <= m; ++k) out.series[k] += wk.acc[k];
    out.term_scale = std::max(out.term_scale, std::sqrt(wk.tmax2));
    points += wk.points;
  }
  if (points > opt_.point_budget) throw TruncationOverflow("lattice point budget exceeded");
  const RVector y = z.imag();
  out.log_scale = kPi * y.dot(Yllt_.solve(y));
  return out;
}

}  // namespace hitchin
