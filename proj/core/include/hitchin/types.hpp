#pragma once

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hitchin {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Structure group of the Hitchin system. Both live over a genus-2 base.
enum class Family { SL2, SO4 };

constexpr std::string_view family_name(Family f) {
  return f == Family::SL2 ? "sl2" : "so4";
}

/// Number of Hamiltonians, i.e. the dimension of the Prym variety.
constexpr int phase_dim(Family f) { return f == Family::SL2 ? 3 : 6; }

/// Sheets of the spectral curve over a generic x (y-sign times lambda-roots).
constexpr int sheet_count(Family f) { return f == Family::SL2 ? 4 : 8; }

/// Number of lambda-roots over a generic x.
constexpr int lambda_count(Family f) { return f == Family::SL2 ? 2 : 4; }

/// Points of the spectral curve over x = infinity.
constexpr int infinity_count(Family f) { return f == Family::SL2 ? 2 : 4; }

}  // namespace hitchin
