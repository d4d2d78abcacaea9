#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace hitchin {

using IMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Frobenius normal form of an integer skew-symmetric form K.
/// Rows of `basis` are e_1..e_p, f_1..f_p, r_1..r_q with
/// K(e_i, f_j) = d_i delta_ij, K(e_i, e_j) = K(f_i, f_j) = 0, r in the radical;
/// `basis` is unimodular.
struct SymplecticReduction {
  IMatrix basis;
  std::vector<std::int64_t> divisors;
  int pairs = 0;
};

SymplecticReduction symplectic_reduce(const IMatrix& K);

/// v^T K w.
std::int64_t form(const IMatrix& K, const IVector& v, const IVector& w);

}  // namespace hitchin
