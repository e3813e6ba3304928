#include "kmx/linalg.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

namespace kmx {

double default_svd_cutoff(Index rows, Index cols, double sigma_max) {
  const double eps = std::numeric_limits<double>::epsilon();
  return static_cast<double>(std::max(rows, cols)) * eps * sigma_max;
}

namespace {

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& A) {
  return Eigen::JacobiSVD<Matrix>(A, Eigen::ComputeThinU | Eigen::ComputeFullV);
}

double effective_cutoff(const Matrix& A, const Eigen::JacobiSVD<Matrix>& svd, double cutoff) {
  if (cutoff >= 0) return cutoff;
  const double smax = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return default_svd_cutoff(A.rows(), A.cols(), smax);
}

}  // namespace

Matrix kernel_basis(const Matrix& A, double cutoff) {
  if (A.rows() == 0) return Matrix::Identity(A.cols(), A.cols());
  auto svd = svd_of(A);
  const double tol = effective_cutoff(A, svd, cutoff);
  const auto& sv = svd.singularValues();
  const Index n = A.cols();
  const Index r = std::min<Index>(sv.size(), n);
  Index rank = 0;
  for (Index i = 0; i < r; ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Matrix orthonormal_columns(const Matrix& A, double cutoff) {
  if (A.cols() == 0) return Matrix(A.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double tol = effective_cutoff(A, svd, cutoff);
  const auto& sv = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixU().leftCols(rank);
}

Index column_rank(const Matrix& A, double cutoff) {
  return orthonormal_columns(A, cutoff).cols();
}

double largest_principal_angle(const Matrix& U, const Matrix& V) {
  Matrix Qu = orthonormal_columns(U);
  Matrix Qv = orthonormal_columns(V);
  if (Qu.cols() != Qv.cols()) return M_PI / 2.0;
  if (Qu.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(Qu.adjoint() * Qv);
  const double c = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
  return std::acos(c);
}

Matrix sparsify_columns(const Matrix& Q) {
  // Row-reduce Q^T: row operations mix basis vectors, preserving the span.
  Matrix R = Q.transpose();
  const Index k = R.rows();
  const Index n = R.cols();
  std::vector<bool> used_col(static_cast<size_t>(n), false);
  for (Index i = 0; i < k; ++i) {
    Index piv_row = -1, piv_col = -1;
    double best = 0.0;
    for (Index r = i; r < k; ++r)
      for (Index c = 0; c < n; ++c) {
        if (used_col[static_cast<size_t>(c)]) continue;
        const double a = std::abs(R(r, c));
        if (a > best) {
          best = a;
          piv_row = r;
          piv_col = c;
        }
      }
    if (piv_row < 0 || best < 1e-14) break;
    R.row(i).swap(R.row(piv_row));
    R.row(i) /= R(i, piv_col);
    for (Index r = 0; r < k; ++r)
      if (r != i) R.row(r) -= R(r, piv_col) * R.row(i);
    used_col[static_cast<size_t>(piv_col)] = true;
  }
  Matrix out = R.transpose();
  for (Index j = 0; j < out.cols(); ++j) {
    const double nrm = out.col(j).norm();
    if (nrm > 0) out.col(j) /= nrm;
  }
  return out;
}

Vector solve_least_squares(const Matrix& A, const Vector& b) {
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(Eigen::NumTraits<double>::epsilon() * static_cast<double>(std::max(A.rows(), A.cols())));
  return svd.solve(b);
}

bool is_invertible(const Matrix& A, double cutoff) {
  if (A.rows() != A.cols()) return false;
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return false;
  const double tol = cutoff >= 0 ? cutoff : default_svd_cutoff(A.rows(), A.cols(), sv(0));
  return sv(sv.size() - 1) > tol;
}

Vector vec(const Matrix& A) {
  Vector v(A.size());
  Index k = 0;
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i) v(k++) = A(i, j);
  return v;
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionError("unvec: size mismatch");
  Matrix A(rows, cols);
  Index k = 0;
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) A(i, j) = v(k++);
  return A;
}

double span_residual(const Vector& x, const Matrix& Q) {
  if (Q.cols() == 0) return x.norm();
  return (x - Q * (Q.adjoint() * x)).norm();
}

Matrix stack_columns(const std::vector<Vector>& cols, Index rows) {
  Matrix M(rows, static_cast<Index>(cols.size()));
  for (Index j = 0; j < M.cols(); ++j) M.col(j) = cols[static_cast<size_t>(j)];
  return M;
}

}  // namespace kmx
