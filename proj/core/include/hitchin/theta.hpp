#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "hitchin/series.hpp"
#include "hitchin/types.hpp"

namespace hitchin {

/// Multi-indices in g variables of total degree <= d, graded, and within a
/// degree ordered lexicographically with larger leading exponents first.
class MultiIndexSet {
 public:
  MultiIndexSet(int vars, int degree);

  int vars() const { return g_; }
  int degree() const { return d_; }
  int size() const { return static_cast<int>(count_); }
  /// Exponents of the multi-index with rank r.
  const int* at(int r) const { return &alpha_[static_cast<std::size_t>(r) * g_]; }
  int total(int r) const { return tot_[r]; }
  /// First index of the block of total degree k (begin(d + 1) == size()).
  int begin(int k) const { return start_[k]; }
  int rank(const int* alpha) const;
  /// rank of at(a) + at(b), or -1 if the degree exceeds the ceiling.
  int sum(int a, int b) const;
  /// For r > 0: the rank of at(r) minus e_i, and i, with i its first nonzero slot.
  int parent(int r) const { return parent_[r]; }
  int parent_var(int r) const { return pvar_[r]; }

 private:
  int g_, d_;
  std::size_t count_ = 0;
  std::vector<int> alpha_, tot_, start_, parent_, pvar_;
  std::vector<std::vector<std::int64_t>> cnt_;  // cnt_[k][r]: monomials of degree r in k variables
};

using IndexSetPtr = std::shared_ptr<const MultiIndexSet>;
IndexSetPtr index_set(int vars, int degree);

/// Truncated multivariate Taylor series sum_j c_j w^j, with value
/// exp(log_scale) * sum_j c_j w^j.
class Jet {
 public:
  Jet() = default;
  explicit Jet(IndexSetPtr idx, double log_scale = 0.0);
  static Jet constant(int vars, int degree, cplx value);

  const MultiIndexSet& indices() const { return *idx_; }
  IndexSetPtr index_ptr() const { return idx_; }
  int vars() const { return idx_->vars(); }
  int degree() const { return idx_->degree(); }
  double log_scale() const { return log_scale_; }
  void set_log_scale(double s) { log_scale_ = s; }
  /// Largest lattice-term magnitude that went into the sum (relative to exp(log_scale)).
  double term_scale() const { return term_scale_; }
  void set_term_scale(double s) { term_scale_ = s; }

  cplx& operator[](int r) { return c_[static_cast<std::size_t>(r)]; }
  cplx operator[](int r) const { return c_[static_cast<std::size_t>(r)]; }
  /// Coefficient of a multi-index given by exponents.
  cplx coeff(std::initializer_list<int> alpha) const;
  const std::vector<cplx>& coeffs() const { return c_; }
  /// Base value including the scale.
  cplx value() const { return std::exp(log_scale_) * c_[0]; }

  friend Jet operator*(const Jet& a, const Jet& b);
  Jet& operator+=(const Jet& o);

 private:
  IndexSetPtr idx_;
  std::vector<cplx> c_;
  double log_scale_ = 0.0, term_scale_ = 1.0;
};

/// Formal logarithm; the scale is folded into the constant term. Throws
/// NearThetaDivisor when |c_0| <= floor * term_scale.
Jet log_jet(const Jet& jet, double floor = 1e-12);
/// Formal exponential (scale 0).
Jet exp_jet(const Jet& jet);
/// sum_j c_j w(z)^j for per-variable series w without constant terms, truncated
/// at order m. The scale factor is not applied.
Series compose_series(const Jet& jet, const std::vector<Series>& w, int m);

struct ThetaOptions {
  double target_eps = 1e-14;
  std::int64_t point_budget = 10'000'000;
  int max_degree = 12;
};

/// theta(z) = sum_n exp(pi i n.tau.n + 2 pi i n.z), summed over an ellipsoid with a
/// tail bound below target_eps on the oscillatory factor
/// theta(z) exp(-pi y.Y^-1.y), y = Im z, Y = Im tau.
class ThetaContext {
 public:
  explicit ThetaContext(CMatrix tau, ThetaOptions opt = {});

  const CMatrix& tau() const { return tau_; }
  int dim() const { return static_cast<int>(tau_.rows()); }
  const ThetaOptions& options() const { return opt_; }
  /// Cholesky factor T (upper) with T^T T = pi Im tau, and shortest length of T Z^g.
  const RMatrix& cholesky() const { return T_; }
  double shortest() const { return rho_; }
  /// Ellipsoid radius meeting target_eps for jets of the given degree at z.
  double radius(int degree, const CVector& z) const;

  cplx operator()(const CVector& z) const;
  /// theta(z) = exp(exponent) * oscillatory.
  std::pair<double, cplx> parts(const CVector& z) const;
  /// Taylor coefficients of theta at z up to total degree d.
  Jet jet(const CVector& z, int degree) const;
  /// theta(z + w(t)) = exp(log_scale) * series(t) to order m, for per-variable
  /// series w without constant terms.
  struct AlongSeries {
    double log_scale = 0.0;
    double term_scale = 0.0;
    Series series;
  };
  AlongSeries along(const CVector& z, const std::vector<Series>& w, int m) const;
  /// Lattice points used at z for the given degree (for diagnostics and tests).
  std::int64_t lattice_size(const CVector& z, int degree) const;

 private:
  using RowFn = std::function<void(std::size_t chunk, const std::vector<int>& n, int lo, int hi, cplx term, cplx q)>;
  void for_each_row(const CVector& z, double R, std::size_t chunks, const RowFn& fn) const;
  std::vector<int> ellipsoid(const RVector& c, double R) const;
  CMatrix tau_;
  RMatrix Y_, X_, T_;
  Eigen::LLT<RMatrix> Yllt_;
  double rho_ = 0.0, tinv_norm_ = 0.0, det_t_ = 0.0;
  ThetaOptions opt_;
};

inline cplx theta(const ThetaContext& ctx, const CVector& z) { return ctx(z); }
inline Jet theta_jet(const ThetaContext& ctx, const CVector& z, int degree) { return ctx.jet(z, degree); }

}  // namespace hitchin
