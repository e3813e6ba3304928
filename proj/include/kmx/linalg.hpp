#pragma once

#include <vector>

#include "kmx/types.hpp"

namespace kmx {

/// Rank-revealing SVD cutoff: max(rows, cols) * machine-eps * sigma_max.
double default_svd_cutoff(Index rows, Index cols, double sigma_max);

/// Orthonormal basis of the null space of A (columns). `cutoff < 0` selects
/// the default rank-revealing cutoff.
Matrix kernel_basis(const Matrix& A, double cutoff = -1.0);

/// Orthonormal basis of the column span of A.
Matrix orthonormal_columns(const Matrix& A, double cutoff = -1.0);

Index column_rank(const Matrix& A, double cutoff = -1.0);

/// Largest principal angle (radians) between the column spans of U and V.
/// Returns pi/2 when the spans have different dimensions.
double largest_principal_angle(const Matrix& U, const Matrix& V);

/// Rotates an orthonormal basis to sparse, human-readable representatives
/// (Gauss-Jordan on the transposed basis with full pivoting). Span-preserving
/// and deterministic.
Matrix sparsify_columns(const Matrix& Q);

/// Minimum-norm least-squares solution of A x = b.
Vector solve_least_squares(const Matrix& A, const Vector& b);

bool is_invertible(const Matrix& A, double cutoff = -1.0);

Vector vec(const Matrix& A);
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Frobenius distance of `x` from the column span of the orthonormal basis Q.
double span_residual(const Vector& x, const Matrix& Q);

/// Stacks column vectors into a matrix (empty input gives a rows x 0 matrix).
Matrix stack_columns(const std::vector<Vector>& cols, Index rows);

}  // namespace kmx
