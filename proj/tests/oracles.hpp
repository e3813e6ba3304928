#pragma once

// Independent test oracles. These deliberately avoid the library's own
// computation paths: coordinates come from a vectorized least-squares solve
// instead of the Killing-metric projection, the split Casimir from the swap
// completeness relation, and so on.

#include <Eigen/SVD>
#include <random>
#include <vector>

#include "kmx/lie_algebra.hpp"
#include "kmx/linalg.hpp"
#include "kmx/tensor.hpp"

namespace oracle {

using kmx::Complex;
using kmx::Index;
using kmx::Matrix;
using kmx::Vector;

/// Coordinates of Z in a matrix basis via a dense least-squares solve.
inline Vector lstsq_coordinates(const std::vector<Matrix>& basis, const Matrix& Z) {
  Matrix A(Z.size(), static_cast<Index>(basis.size()));
  for (Index j = 0; j < A.cols(); ++j) A.col(j) = kmx::vec(basis[static_cast<size_t>(j)]);
  return A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(kmx::vec(Z));
}

/// Killing form recomputed from scratch: ad matrices out of numerical
/// brackets, paired by trace.
inline Matrix killing_by_brackets(const std::vector<Matrix>& basis) {
  const Index dim = static_cast<Index>(basis.size());
  std::vector<Matrix> ad(static_cast<size_t>(dim), Matrix::Zero(dim, dim));
  for (Index A = 0; A < dim; ++A)
    for (Index B = 0; B < dim; ++B) {
      const Matrix br = basis[static_cast<size_t>(A)] * basis[static_cast<size_t>(B)] -
                        basis[static_cast<size_t>(B)] * basis[static_cast<size_t>(A)];
      ad[static_cast<size_t>(A)].col(B) = lstsq_coordinates(basis, br);
    }
  Matrix K(dim, dim);
  for (Index A = 0; A < dim; ++A)
    for (Index B = 0; B < dim; ++B) K(A, B) = (ad[static_cast<size_t>(A)] * ad[static_cast<size_t>(B)]).trace();
  return K;
}

/// Completeness relation for the sl(n) defining pair: C = (P - I/n) / (2n).
inline Matrix casimir_by_swap(int n) {
  const Matrix P = kmx::swap_operator(n, n);
  const Matrix I = Matrix::Identity(n * n, n * n);
  return (P - I / static_cast<double>(n)) / (2.0 * n);
}

inline std::mt19937_64 rng(unsigned seed) { return std::mt19937_64(seed); }

inline Complex random_unit(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  return {d(gen), d(gen)};
}

inline Matrix random_matrix(std::mt19937_64& gen, Index rows, Index cols) {
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = random_unit(gen);
  return M;
}

}  // namespace oracle
