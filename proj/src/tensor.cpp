#include "kmx/tensor.hpp"

namespace kmx {

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

Matrix swap_operator(Index d1, Index d2) {
  Matrix P = Matrix::Zero(d1 * d2, d1 * d2);
  for (Index i = 0; i < d1; ++i)
    for (Index j = 0; j < d2; ++j) P(j * d1 + i, i * d2 + j) = 1.0;
  return P;
}

Matrix partial_transpose_first(const Matrix& M, Index d1, Index d2) {
  if (M.rows() != d1 * d2 || M.cols() != d1 * d2) throw DimensionError("partial_transpose_first: shape mismatch");
  Matrix T(M.rows(), M.cols());
  for (Index i = 0; i < d1; ++i)
    for (Index a = 0; a < d2; ++a)
      for (Index j = 0; j < d1; ++j)
        for (Index b = 0; b < d2; ++b) T(j * d2 + a, i * d2 + b) = M(i * d2 + a, j * d2 + b);
  return T;
}

Matrix partial_transpose_second(const Matrix& M, Index d1, Index d2) {
  if (M.rows() != d1 * d2 || M.cols() != d1 * d2) throw DimensionError("partial_transpose_second: shape mismatch");
  Matrix T(M.rows(), M.cols());
  for (Index i = 0; i < d1; ++i)
    for (Index a = 0; a < d2; ++a)
      for (Index j = 0; j < d1; ++j)
        for (Index b = 0; b < d2; ++b) T(i * d2 + b, j * d2 + a) = M(i * d2 + a, j * d2 + b);
  return T;
}

Matrix embed_pair(const Matrix& M, const std::array<Index, 3>& dims, int leg_a, int leg_b) {
  if (leg_a == leg_b || leg_a < 0 || leg_a > 2 || leg_b < 0 || leg_b > 2)
    throw DimensionError("embed_pair: legs must be distinct and in 0..2");
  const Index da = dims[static_cast<size_t>(leg_a)];
  const Index db = dims[static_cast<size_t>(leg_b)];
  if (M.rows() != da * db || M.cols() != da * db) throw DimensionError("embed_pair: operator shape mismatch");
  const Index N = dims[0] * dims[1] * dims[2];
  const int leg_c = 3 - leg_a - leg_b;
  const Index dc = dims[static_cast<size_t>(leg_c)];

  auto global_index = [&dims](const std::array<Index, 3>& idx) {
    return (idx[0] * dims[1] + idx[1]) * dims[2] + idx[2];
  };

  Matrix R = Matrix::Zero(N, N);
  std::array<Index, 3> row{}, col{};
  for (Index ia = 0; ia < da; ++ia)
    for (Index ib = 0; ib < db; ++ib)
      for (Index ja = 0; ja < da; ++ja)
        for (Index jb = 0; jb < db; ++jb) {
          const Complex m = M(ia * db + ib, ja * db + jb);
          if (m == Complex(0, 0)) continue;
          for (Index ic = 0; ic < dc; ++ic) {
            row[static_cast<size_t>(leg_a)] = ia;
            row[static_cast<size_t>(leg_b)] = ib;
            row[static_cast<size_t>(leg_c)] = ic;
            col[static_cast<size_t>(leg_a)] = ja;
            col[static_cast<size_t>(leg_b)] = jb;
            col[static_cast<size_t>(leg_c)] = ic;
            R(global_index(row), global_index(col)) = m;
          }
        }
  return R;
}

}  // namespace kmx
