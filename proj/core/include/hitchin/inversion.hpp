#pragma once

#include <vector>

#include "hitchin/periods.hpp"
#include "hitchin/theta.hpp"
#include "hitchin/trajectory.hpp"

namespace hitchin {

/// Points over infinity, one per tau-orbit (tau maps label L0 to -L0), with
/// normalized images and Abel jets. Residues at the two points of an orbit
/// agree, so sums over infinity are twice sums over `points`.
struct InfinityData {
  std::vector<int> points;
  std::vector<CVector> images;
  std::vector<AbelJet> jets;
  std::vector<std::vector<Series>> abel;  // A_s(P(z)) - A_s(Q) per point
  int order = 0;
};
InfinityData infinity_data(const PeriodData& pd, int order);

struct RiemannConstants {
  CVector K;
  double fit_residual = 0.0;
  int seed = -1;       // index of the winning half-period seed
  int converged = 0;   // seeds that reached the tolerance
};

struct CalibrationOptions {
  double tol = 1e-6;
  int max_iter = 80;
  /// Seeds are (m + tau n) / 2 with the bits of m, then n, counting up; -1
  /// uses all 4^h.
  int max_seeds = -1;
};

/// theta(A(P_i) - phi0 - K) = 0 at the h points of gamma0, by damped Newton
/// from half-period seeds. Throws CalibrationFailure.
RiemannConstants calibrate_K(const PeriodData& pd, const ThetaContext& ctx, const PhaseConfiguration& gamma0,
                             const CVector& phi0, const CalibrationOptions& opt = {});

/// max_i |theta(A(P_i) - phi - K)| relative to the largest lattice term.
double divisor_residual(const PeriodData& pd, const ThetaContext& ctx, const PhaseConfiguration& config,
                        const CVector& phi, const CVector& K);

struct CalibrationData {
  RiemannConstants K;
  CVector phi0;
  CVector sigma_ref;  // 2 sum_i x_i^k, k = 1..h
  CVector consts;     // const_k
};

struct ContourOptions {
  /// 0: start at half the distance to the nearest chart singularity and halve
  /// until two radii agree.
  double radius = 0.0;
  int nodes = 32;
};

/// Newton power sums: sigma_k = const_k - sum_Q res_Q x^k dln theta(A(P) - phi - K).
class PrymInverter {
 public:
  PrymInverter(const PeriodData& pd, const ThetaContext& ctx);

  const PeriodData& periods() const { return pd_; }
  const ThetaContext& theta() const { return ctx_; }
  const InfinityData& infinity() const { return inf_; }
  int h() const { return pd_.h(); }

  /// Residue sums for k = 1..kmax from one log-theta series per point;
  /// small jets are composed, otherwise (or above the theta degree ceiling)
  /// the theta series along the curve is summed directly.
  CVector residues(const CVector& phi, const CVector& K, int kmax) const;
  /// Same residues assembled from the explicit coefficients kappa_i^j.
  cplx residue_kappa(const CVector& phi, const CVector& K, int k) const;
  /// kappa_i^j for the point with orbit index q; rows i, columns the multi-indices
  /// of index_set(h, 2k - 1).
  CMatrix kappa(int q, int k) const;
  /// Trapezoidal rule for (1 / 2 pi i) int x^k dln theta on |z| = r around
  /// each point, with A(P(z)) integrated numerically.
  cplx residue_contour(const CVector& phi, const CVector& K, int k, const ContourOptions& opt = {}) const;
  /// sum_Q (sum_i phi_i^(0)(Q) d_i)^2 ln theta(A(Q) - phi - K), with the
  /// directional second derivative taken from theta values on a circle.
  cplx residue_closed_k1(const CVector& phi, const CVector& K) const;
  /// min over points at infinity of |theta(A(Q) - phi - K)| relative to the
  /// largest lattice term; small values mean a configuration point near x = inf.
  double divisor_proximity(const CVector& phi, const CVector& K) const;
  /// Smallest distance from a point over infinity to a chart singularity.
  double chart_radius() const;

  CalibrationData calibrate(const PhaseConfiguration& gamma0, const CalibrationOptions& opt = {}) const;
  CVector sigma(const CalibrationData& cal, const CVector& phi) const;
  cplx sigma_series(const CalibrationData& cal, const CVector& phi, int k) const;
  cplx sigma_kappa(const CalibrationData& cal, const CVector& phi, int k) const;
  cplx sigma_contour(const CalibrationData& cal, const CVector& phi, int k, const ContourOptions& opt = {}) const;

 private:
  const PeriodData& pd_;
  const ThetaContext& ctx_;
  InfinityData inf_;
};

/// 2 sum_i x_i^k for k = 1..h.
CVector power_sums(const CVector& x);

struct RootOptions {
  double max_condition = 1e10;
};
/// Roots of the monic polynomial whose doubled power sums are sigma. Clusters
/// consistent with rounding are returned as repeated means. Throws
/// IllConditionedRoots.
CVector power_sums_to_x(const CVector& sigma, const RootOptions& opt = {});

struct ReconstructOptions {
  double ambiguity = 0.1;  // relative margin between best and runner-up
  double residual_tol = 1e-6;
};
/// Matches x values to the reference slots (least total displacement) and lifts
/// each to the (y, lambda) closest to the reference point; all distances are
/// relative to the magnitudes involved. Throws AmbiguousAssignment, BranchCollision,
/// InconsistentGeometry.
PhaseConfiguration reconstruct_configuration(const SpectralCurve& curve, const CVector& x,
                                             const PhaseConfiguration& reference,
                                             const ReconstructOptions& opt = {});

struct ThetaTrajectoryOptions {
  ReconstructOptions reconstruct;
  RootOptions roots;
  int retries = 3;
  /// Samples with divisor_proximity below this are resampled.
  double divisor_proximity = 1e-6;
};

/// phi(t) = phi0 + nu t with nu the angular velocity under the flow of H_k;
/// per sample sigma, roots and branch lifting against the previous sample.
TrajectoryRecord theta_trajectory(const PrymInverter& inv, const CalibrationData& cal,
                                  const PhaseConfiguration& gamma0, int k, const std::vector<double>& times,
                                  const ThetaTrajectoryOptions& opt = {});

}  // namespace hitchin
