#include "kmx/lie_algebra.hpp"

#include <algorithm>
#include <cmath>

#include "kmx/linalg.hpp"
#include "kmx/tensor.hpp"

namespace kmx {

Vector LieAlgebra::bracket(const Vector& x, const Vector& y) const {
  Vector out = Vector::Zero(dim);
  for (Index A = 0; A < dim; ++A) {
    if (x(A) == Complex(0, 0)) continue;
    out += x(A) * (ad[static_cast<size_t>(A)] * y);
  }
  return out;
}

Matrix Representation::apply(const Vector& coords) const {
  Matrix out = Matrix::Zero(d, d);
  for (Index A = 0; A < algebra->dim; ++A) out += coords(A) * images[static_cast<size_t>(A)];
  return out;
}

namespace {

/// Exact coordinates of a traceless n x n matrix in the sl(n) basis
/// {E_ij (i != j)} + {E_ii - E_{i+1,i+1}}: off-diagonal entries directly,
/// Cartan coefficients as partial sums of the diagonal.
Vector sl_coordinates(int n, const Matrix& Z) {
  const Index dim = static_cast<Index>(n) * n - 1;
  Vector c = Vector::Zero(dim);
  Index k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      c(k++) = Z(i, j);
    }
  Complex partial = 0;
  for (int i = 0; i + 1 < n; ++i) {
    partial += Z(i, i);
    c(k++) = partial;
  }
  return c;
}

}  // namespace

std::pair<AlgebraPtr, Representation> build_sl(int n) {
  if (n < 2) throw DimensionError("build_sl: n must be >= 2");
  const Index dim = static_cast<Index>(n) * n - 1;

  std::vector<Matrix> basis;
  std::vector<std::string> labels;
  basis.reserve(static_cast<size_t>(dim));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Matrix E = Matrix::Zero(n, n);
      E(i, j) = 1.0;
      basis.push_back(E);
      labels.push_back("E(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    }
  for (int i = 0; i + 1 < n; ++i) {
    Matrix H = Matrix::Zero(n, n);
    H(i, i) = 1.0;
    H(i + 1, i + 1) = -1.0;
    basis.push_back(H);
    labels.push_back("H(" + std::to_string(i + 1) + ")");
  }

  auto g = std::make_shared<LieAlgebra>();
  g->dim = dim;
  g->basis_labels = std::move(labels);
  g->ad.assign(static_cast<size_t>(dim), Matrix::Zero(dim, dim));
  for (Index A = 0; A < dim; ++A)
    for (Index B = 0; B < dim; ++B) {
      const Matrix br = basis[static_cast<size_t>(A)] * basis[static_cast<size_t>(B)] -
                        basis[static_cast<size_t>(B)] * basis[static_cast<size_t>(A)];
      g->ad[static_cast<size_t>(A)].col(B) = sl_coordinates(n, br);
    }

  g->killing = Matrix::Zero(dim, dim);
  for (Index A = 0; A < dim; ++A)
    for (Index B = A; B < dim; ++B) {
      const Complex v = (g->ad[static_cast<size_t>(A)] * g->ad[static_cast<size_t>(B)]).trace();
      g->killing(A, B) = v;
      g->killing(B, A) = v;
    }
  g->killing_inv = g->killing.fullPivLu().inverse();

  Representation rep;
  rep.algebra = g;
  rep.d = n;
  rep.images = std::move(basis);
  rep.kind = RepKind::defining;
  rep.metric_ratio = Complex(1.0 / (2.0 * n), 0.0);
  return {g, rep};
}

Representation contragredient(const Representation& rep) {
  Representation out;
  out.algebra = rep.algebra;
  out.d = rep.d;
  out.kind = RepKind::contragredient;
  out.images.reserve(rep.images.size());
  for (const auto& Y : rep.images) out.images.push_back((-Y.transpose()).eval());
  out.metric_ratio = rep.metric_ratio;
  return out;
}

Vector coordinates(const Representation& rep, const Matrix& Z, double* off_image_residual) {
  const Index dim = rep.algebra->dim;
  Vector traces(dim);
  for (Index B = 0; B < dim; ++B) traces(B) = (rep.images[static_cast<size_t>(B)] * Z).trace();
  Vector coords = (rep.algebra->killing_inv * traces) / rep.metric_ratio;
  if (off_image_residual) *off_image_residual = (Z - rep.apply(coords)).norm();
  return coords;
}

double homomorphism_residual(const Representation& rep) {
  const auto& g = *rep.algebra;
  double worst = 0.0;
  for (Index A = 0; A < g.dim; ++A)
    for (Index B = 0; B < g.dim; ++B) {
      Matrix lhs = rep.images[static_cast<size_t>(A)] * rep.images[static_cast<size_t>(B)] -
                   rep.images[static_cast<size_t>(B)] * rep.images[static_cast<size_t>(A)];
      for (Index C = 0; C < g.dim; ++C) {
        const Complex f = g.structure_constant(A, B, C);
        if (f != Complex(0, 0)) lhs -= f * rep.images[static_cast<size_t>(C)];
      }
      worst = std::max(worst, lhs.norm());
    }
  return worst;
}

bool is_faithful(const Representation& rep) {
  Matrix stacked(rep.d * rep.d, rep.algebra->dim);
  for (Index A = 0; A < rep.algebra->dim; ++A) stacked.col(A) = vec(rep.images[static_cast<size_t>(A)]);
  return column_rank(stacked) == rep.algebra->dim;
}

Matrix split_casimir(const Representation& rep1, const Representation& rep2) {
  if (rep1.algebra != rep2.algebra) throw DimensionError("split_casimir: representations of different algebras");
  const auto& g = *rep1.algebra;
  Matrix C = Matrix::Zero(rep1.d * rep2.d, rep1.d * rep2.d);
  for (Index A = 0; A < g.dim; ++A)
    for (Index B = 0; B < g.dim; ++B) {
      const Complex w = g.killing_inv(A, B);
      if (w == Complex(0, 0)) continue;
      C += w * kron(rep1.images[static_cast<size_t>(A)], rep2.images[static_cast<size_t>(B)]);
    }
  return C;
}

double closure_residual(const SubalgebraBasis& h) {
  if (h.vectors.empty()) return 0.0;
  const auto& g = *h.algebra;
  Matrix span = orthonormal_columns(stack_columns(h.vectors, g.dim));
  double worst = 0.0;
  for (size_t i = 0; i < h.vectors.size(); ++i)
    for (size_t j = i + 1; j < h.vectors.size(); ++j) {
      const Vector br = g.bracket(h.vectors[i], h.vectors[j]);
      worst = std::max(worst, span_residual(br, span));
    }
  return worst;
}

Matrix restricted_killing(const SubalgebraBasis& h) {
  const Index m = h.dim();
  Matrix B(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b)
      B(a, b) = h.vectors[static_cast<size_t>(a)].transpose() * h.algebra->killing * h.vectors[static_cast<size_t>(b)];
  return B;
}

namespace {

Matrix restricted_killing_inverse(const SubalgebraBasis& h) {
  Matrix B = restricted_killing(h);
  if (!is_invertible(B)) throw SingularMetricError("restricted Killing form is degenerate on the subalgebra");
  return B.fullPivLu().inverse();
}

}  // namespace

Matrix restricted_casimir(const Representation& rep1, const Representation& rep2, const SubalgebraBasis& h) {
  if (rep1.algebra != rep2.algebra || rep1.algebra != h.algebra)
    throw DimensionError("restricted_casimir: mismatched algebras");
  const Matrix Binv = restricted_killing_inverse(h);
  const Index m = h.dim();
  Matrix C = Matrix::Zero(rep1.d * rep2.d, rep1.d * rep2.d);
  for (Index a = 0; a < m; ++a) {
    const Matrix Ya = rep1.apply(h.vectors[static_cast<size_t>(a)]);
    for (Index b = 0; b < m; ++b) {
      const Complex w = Binv(a, b);
      if (w == Complex(0, 0)) continue;
      C += w * kron(Ya, rep2.apply(h.vectors[static_cast<size_t>(b)]));
    }
  }
  return C;
}

Matrix casimir_complement(const Representation& rep1, const Representation& rep2, const SubalgebraBasis& h) {
  return split_casimir(rep1, rep2) - restricted_casimir(rep1, rep2, h);
}

Matrix quadratic_casimir(const Representation& rep, const SubalgebraBasis& h) {
  const Matrix Binv = restricted_killing_inverse(h);
  const Index m = h.dim();
  Matrix C = Matrix::Zero(rep.d, rep.d);
  for (Index a = 0; a < m; ++a) {
    const Matrix Ya = rep.apply(h.vectors[static_cast<size_t>(a)]);
    for (Index b = 0; b < m; ++b) {
      const Complex w = Binv(a, b);
      if (w == Complex(0, 0)) continue;
      C += w * Ya * rep.apply(h.vectors[static_cast<size_t>(b)]);
    }
  }
  return C;
}

Matrix boundary_casimir(const Representation& rep, const SubalgebraBasis& h,
                        const std::vector<Matrix>& boundary_images) {
  if (boundary_images.size() != static_cast<size_t>(h.dim()))
    throw DimensionError("boundary_casimir: boundary images not aligned with the subalgebra basis");
  const Matrix Binv = restricted_killing_inverse(h);
  const Index m = h.dim();
  const Index dB = boundary_images.empty() ? 1 : boundary_images.front().rows();
  Matrix C = Matrix::Zero(rep.d * dB, rep.d * dB);
  for (Index a = 0; a < m; ++a) {
    const Matrix Ya = rep.apply(h.vectors[static_cast<size_t>(a)]);
    for (Index b = 0; b < m; ++b) {
      const Complex w = Binv(a, b);
      if (w == Complex(0, 0)) continue;
      C += w * kron(Ya, boundary_images[static_cast<size_t>(b)]);
    }
  }
  return C;
}

SubalgebraBasis centralizer(const Representation& rep, const Matrix& kappa) {
  const Index dim = rep.algebra->dim;
  Matrix L(rep.d * rep.d, dim);
  for (Index A = 0; A < dim; ++A) {
    const Matrix& Y = rep.images[static_cast<size_t>(A)];
    L.col(A) = vec(Y * kappa - kappa * Y);
  }
  Matrix ker = sparsify_columns(kernel_basis(L));
  SubalgebraBasis h;
  h.algebra = rep.algebra;
  for (Index j = 0; j < ker.cols(); ++j) h.vectors.push_back(ker.col(j));
  return h;
}

std::string to_string(AlgebraClass c) {
  switch (c) {
    case AlgebraClass::semisimple: return "semisimple";
    case AlgebraClass::reductive: return "reductive";
    case AlgebraClass::solvable: return "solvable";
    case AlgebraClass::semidirect: return "semidirect(solvable,reductive)";
  }
  return "?";
}

namespace {

std::vector<Vector> derived_subspace(const LieAlgebra& g, const std::vector<Vector>& basis) {
  std::vector<Vector> brackets;
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i + 1; j < basis.size(); ++j) brackets.push_back(g.bracket(basis[i], basis[j]));
  if (brackets.empty()) return {};
  Matrix span = orthonormal_columns(stack_columns(brackets, g.dim));
  std::vector<Vector> out;
  for (Index c = 0; c < span.cols(); ++c) out.push_back(span.col(c));
  return out;
}

}  // namespace

SubalgebraReport classify_subalgebra(const SubalgebraBasis& h) {
  constexpr double kClosureTol = 1e-8;
  if (closure_residual(h) > kClosureTol) throw NotClosedError("classify_subalgebra: input is not closed under the bracket");
  const auto& g = *h.algebra;

  SubalgebraReport rep;
  rep.dim = h.dim();

  // Derived series until the dimension stabilizes.
  rep.derived_series.push_back(rep.dim);
  std::vector<Vector> current = h.vectors;
  while (true) {
    std::vector<Vector> next = derived_subspace(g, current);
    const Index nd = static_cast<Index>(next.size());
    rep.derived_series.push_back(nd);
    if (nd == rep.derived_series[rep.derived_series.size() - 2] || nd == 0) break;
    current = std::move(next);
  }
  const bool solvable = rep.derived_series.back() == 0;

  // Center: elements of h commuting with all of h.
  const Index m = h.dim();
  if (m > 0) {
    Matrix L(g.dim * m, m);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < m; ++j) {
        L.block(j * g.dim, i, g.dim, 1) = g.bracket(h.vectors[static_cast<size_t>(i)], h.vectors[static_cast<size_t>(j)]);
      }
    }
    rep.center_dim = kernel_basis(L).cols();
  }

  // Radical by Cartan's criterion: kill B(x, [h,h]) with the ambient form.
  std::vector<Vector> derived = derived_subspace(g, h.vectors);
  if (derived.empty()) {
    rep.radical_dim = m;
  } else {
    Matrix A(static_cast<Index>(derived.size()), m);
    for (Index j = 0; j < static_cast<Index>(derived.size()); ++j)
      for (Index i = 0; i < m; ++i)
        A(j, i) = derived[static_cast<size_t>(j)].transpose() * g.killing * h.vectors[static_cast<size_t>(i)];
    rep.radical_dim = kernel_basis(A).cols();
  }
  rep.levi_dim = rep.dim - rep.radical_dim;

  if (rep.radical_dim == 0)
    rep.tag = AlgebraClass::semisimple;
  else if (solvable)
    rep.tag = AlgebraClass::solvable;
  else if (rep.radical_dim == rep.center_dim)
    rep.tag = AlgebraClass::reductive;
  else
    rep.tag = AlgebraClass::semidirect;
  return rep;
}

namespace {

EndDecomposition decompose(const Representation& rep, const std::vector<Matrix>& sub) {
  const Index d = rep.d;
  EndDecomposition out;
  out.rep = rep;
  out.sub_basis = sub;
  // Complement w.r.t. the bilinear trace pairing <Y, Z> = Tr(Y Z).
  Matrix A(static_cast<Index>(sub.size()), d * d);
  for (Index i = 0; i < static_cast<Index>(sub.size()); ++i)
    A.row(i) = vec(sub[static_cast<size_t>(i)].transpose()).transpose();
  Matrix ker = kernel_basis(A);
  for (Index j = 0; j < ker.cols(); ++j) out.complement_basis.push_back(unvec(ker.col(j), d, d));
  return out;
}

}  // namespace

EndDecomposition end_decomposition(const Representation& rep) { return decompose(rep, rep.images); }

EndDecomposition end_decomposition(const Representation& rep, const SubalgebraBasis& h) {
  std::vector<Matrix> sub;
  sub.reserve(static_cast<size_t>(h.dim()));
  for (const auto& v : h.vectors) sub.push_back(rep.apply(v));
  return decompose(rep, sub);
}

double jacobi_residual(const LieAlgebra& g) {
  // Jacobi identity is equivalent to ad([X_A, X_B]) = [ad_A, ad_B].
  double worst = 0.0;
  for (Index A = 0; A < g.dim; ++A)
    for (Index B = 0; B < g.dim; ++B) {
      Matrix lhs = Matrix::Zero(g.dim, g.dim);
      for (Index C = 0; C < g.dim; ++C) {
        const Complex f = g.structure_constant(A, B, C);
        if (f != Complex(0, 0)) lhs += f * g.ad[static_cast<size_t>(C)];
      }
      const Matrix rhs = g.ad[static_cast<size_t>(A)] * g.ad[static_cast<size_t>(B)] -
                         g.ad[static_cast<size_t>(B)] * g.ad[static_cast<size_t>(A)];
      worst = std::max(worst, (lhs - rhs).norm());
    }
  return worst;
}

double killing_invariance_residual(const LieAlgebra& g) {
  // B([X,Y],Z) + B(Y,[X,Z]) = 0 on basis triples.
  double worst = 0.0;
  for (Index A = 0; A < g.dim; ++A) {
    const Matrix& adA = g.ad[static_cast<size_t>(A)];
    const Matrix res = adA.transpose() * g.killing + g.killing * adA;
    worst = std::max(worst, res.norm());
  }
  return worst;
}

}  // namespace kmx
