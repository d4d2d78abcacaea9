#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hitchin/curve.hpp"
#include "hitchin/trajectory.hpp"

namespace harness {

using hitchin::cplx;

/// "1.5", "-2j", "0.3-0.2j", "(1+2j)". Throws ConfigError.
cplx parse_complex(const std::string& s);
std::vector<cplx> parse_complex_list(const std::string& s);
/// Inverse of parse_complex, with round-trip precision.
std::string format_complex(cplx z);

struct Tolerances {
  double quadrature = 1e-12;       // absolute and relative, per segment
  double theta_eps = 1e-14;
  std::int64_t theta_budget = 10'000'000;
  double residual = 1e-6;          // reconstruction and calibration
  double ode_rel_tol = 1e-10;
  int calibration_seeds = -1;      // -1: all half periods
};

enum class Method { Ode, Theta, Both };
Method parse_method(const std::string& s);
std::string method_name(Method m);

/// Flat key = value text with [sections]:
///
///   [curve]         family, coefficients (6, ascending) or roots (5), hams
///   [configuration] x, y, lambda (h values each), instead of hams
///   [flow]          hamiltonian, t_max, samples, seed, method
///   [tolerances]    quadrature, theta_eps, theta_budget, residual, ode_rel_tol,
///                   calibration_seeds
///   [output]        dir, cache
///
/// Without hams or a configuration the default Hamiltonians are used and the
/// initial configuration is drawn from `seed`.
struct ExperimentConfig {
  hitchin::Family family = hitchin::Family::SL2;
  hitchin::BaseCurve base;
  std::optional<hitchin::CVector> hams;
  std::optional<hitchin::PhaseConfiguration> configuration;
  unsigned seed = 3;
  int hamiltonian = 0;
  double t_max = 0.2;
  int samples = 20;
  Method method = Method::Both;
  Tolerances tol;
  std::string output_dir = "hitchin-out";
  std::string cache_dir = ".hitchin-cache";

  /// Defaults for the family, with tolerances loosened for SO4 theta sums.
  static ExperimentConfig defaults(hitchin::Family family);
  /// t_max * i / samples; a single point when t_max is 0.
  std::vector<double> times() const;
  /// Curve through the configured Hamiltonians, or through the configuration.
  hitchin::SpectralCurve curve() const;
  /// The configuration, or a random one on curve() drawn from seed.
  hitchin::PhaseConfiguration initial(const hitchin::SpectralCurve& curve) const;
  void validate() const;
};

/// Throws ConfigError with the offending key or line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace harness
