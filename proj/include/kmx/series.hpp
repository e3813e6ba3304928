#pragma once

#include <string>
#include <vector>

#include "kmx/types.hpp"

namespace kmx {

/// Default truncation order for asymptotic expansions.
inline constexpr int kDefaultSeriesOrder = 4;

/// Matrix-valued truncated Laurent series sum_{r=0}^{order} coeff[r] u^{-r}.
struct MatrixSeries {
  Index rows = 0;
  Index cols = 0;
  int order = 0;
  std::vector<Matrix> coeffs;  ///< size order + 1

  const Matrix& coeff(int r) const { return coeffs[static_cast<size_t>(r)]; }

  /// Partial sum evaluated at u.
  Matrix eval(Complex u) const;
};

MatrixSeries identity_series(Index d, int order);
MatrixSeries zero_series(Index rows, Index cols, int order);

MatrixSeries series_add(const MatrixSeries& a, const MatrixSeries& b);
MatrixSeries series_sub(const MatrixSeries& a, const MatrixSeries& b);
MatrixSeries series_scale(const MatrixSeries& a, Complex c);

/// Cauchy product truncated at min(order_a, order_b).
MatrixSeries series_mul(const MatrixSeries& a, const MatrixSeries& b);

/// Multiplicative inverse to the tracked order. Throws NotQuasiClassicalError
/// when the leading coefficient is singular.
MatrixSeries series_inverse(const MatrixSeries& a);

/// Matrix-valued rational function (sum_k N_k u^k) / (sum_k q_k u^k) with a
/// scalar denominator; exact to evaluate away from poles.
struct RationalMatrixFn {
  std::vector<Matrix> numerator;   ///< ascending powers of u, at least one entry
  std::vector<Complex> denominator;  ///< ascending powers of u, not identically 0
  std::string meta;

  Index rows() const { return numerator.front().rows(); }
  Index cols() const { return numerator.front().cols(); }
  int num_degree() const;
  int den_degree() const;

  Complex denominator_at(Complex u) const;

  /// Throws PoleError when u is (numerically) a pole.
  Matrix eval(Complex u) const;
};

RationalMatrixFn constant_fn(const Matrix& M, std::string meta = "");

/// f(u) -> f(alpha + beta * u).
RationalMatrixFn substitute_affine(const RationalMatrixFn& f, Complex alpha, Complex beta);

/// Coefficient-wise transforms (the function argument is untouched).
RationalMatrixFn transpose_fn(const RationalMatrixFn& f);
RationalMatrixFn partial_transpose_first_fn(const RationalMatrixFn& f, Index d1, Index d2);
RationalMatrixFn kron_fn(const RationalMatrixFn& f, const Matrix& right);

/// f(u) * p(u)/q(u) for scalar polynomials p, q (ascending coefficients).
RationalMatrixFn scale_by_rational(const RationalMatrixFn& f, const std::vector<Complex>& p,
                                   const std::vector<Complex>& q);

/// Asymptotic expansion of f at u -> infinity, truncated at `order`. Throws
/// NormalizationRequiredError when f is unbounded at infinity.
MatrixSeries expand(const RationalMatrixFn& f, int order);

/// Scalar polynomial helpers (ascending coefficients).
std::vector<Complex> poly_mul(const std::vector<Complex>& p, const std::vector<Complex>& q);
Complex poly_eval(const std::vector<Complex>& p, Complex u);

}  // namespace kmx
