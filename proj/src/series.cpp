#include "kmx/series.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "kmx/linalg.hpp"
#include "kmx/tensor.hpp"

namespace kmx {

Matrix MatrixSeries::eval(Complex u) const {
  Matrix out = Matrix::Zero(rows, cols);
  Complex p = 1.0;
  for (int r = 0; r <= order; ++r) {
    out += p * coeffs[static_cast<size_t>(r)];
    p /= u;
  }
  return out;
}

MatrixSeries identity_series(Index d, int order) {
  MatrixSeries s;
  s.rows = s.cols = d;
  s.order = order;
  s.coeffs.assign(static_cast<size_t>(order) + 1, Matrix::Zero(d, d));
  s.coeffs[0] = Matrix::Identity(d, d);
  return s;
}

MatrixSeries zero_series(Index rows, Index cols, int order) {
  MatrixSeries s;
  s.rows = rows;
  s.cols = cols;
  s.order = order;
  s.coeffs.assign(static_cast<size_t>(order) + 1, Matrix::Zero(rows, cols));
  return s;
}

namespace {

void check_same_shape(const MatrixSeries& a, const MatrixSeries& b, const char* op) {
  if (a.rows != b.rows || a.cols != b.cols) throw DimensionError(std::string(op) + ": shape mismatch");
}

}  // namespace

MatrixSeries series_add(const MatrixSeries& a, const MatrixSeries& b) {
  check_same_shape(a, b, "series_add");
  MatrixSeries s = zero_series(a.rows, a.cols, std::min(a.order, b.order));
  for (int r = 0; r <= s.order; ++r) s.coeffs[static_cast<size_t>(r)] = a.coeff(r) + b.coeff(r);
  return s;
}

MatrixSeries series_sub(const MatrixSeries& a, const MatrixSeries& b) {
  check_same_shape(a, b, "series_sub");
  MatrixSeries s = zero_series(a.rows, a.cols, std::min(a.order, b.order));
  for (int r = 0; r <= s.order; ++r) s.coeffs[static_cast<size_t>(r)] = a.coeff(r) - b.coeff(r);
  return s;
}

MatrixSeries series_scale(const MatrixSeries& a, Complex c) {
  MatrixSeries s = a;
  for (auto& m : s.coeffs) m *= c;
  return s;
}

MatrixSeries series_mul(const MatrixSeries& a, const MatrixSeries& b) {
  if (a.cols != b.rows) throw DimensionError("series_mul: inner dimensions mismatch");
  MatrixSeries s = zero_series(a.rows, b.cols, std::min(a.order, b.order));
  for (int r = 0; r <= s.order; ++r)
    for (int i = 0; i <= r; ++i) s.coeffs[static_cast<size_t>(r)] += a.coeff(i) * b.coeff(r - i);
  return s;
}

MatrixSeries series_inverse(const MatrixSeries& a) {
  if (a.rows != a.cols) throw DimensionError("series_inverse: series is not square");
  if (!is_invertible(a.coeff(0)))
    throw NotQuasiClassicalError("series_inverse: leading coefficient is singular (not quasi-classical)");
  const Matrix inv0 = a.coeff(0).fullPivLu().inverse();
  MatrixSeries s = zero_series(a.rows, a.cols, a.order);
  s.coeffs[0] = inv0;
  for (int r = 1; r <= a.order; ++r) {
    Matrix acc = Matrix::Zero(a.rows, a.cols);
    for (int i = 1; i <= r; ++i) acc += a.coeff(i) * s.coeffs[static_cast<size_t>(r - i)];
    s.coeffs[static_cast<size_t>(r)] = -inv0 * acc;
  }
  return s;
}

int RationalMatrixFn::num_degree() const {
  for (int k = static_cast<int>(numerator.size()) - 1; k >= 0; --k)
    if (numerator[static_cast<size_t>(k)].norm() != 0.0) return k;
  return 0;
}

int RationalMatrixFn::den_degree() const {
  for (int k = static_cast<int>(denominator.size()) - 1; k >= 0; --k)
    if (denominator[static_cast<size_t>(k)] != Complex(0, 0)) return k;
  return 0;
}

Complex RationalMatrixFn::denominator_at(Complex u) const { return poly_eval(denominator, u); }

Matrix RationalMatrixFn::eval(Complex u) const {
  const Complex q = denominator_at(u);
  double qscale = 0.0;
  for (const auto& c : denominator) qscale = std::max(qscale, std::abs(c));
  const double uscale = std::pow(std::max(1.0, std::abs(u)), den_degree());
  if (std::abs(q) <= 1e-12 * qscale * uscale)
    throw PoleError(meta.empty() ? "rational function evaluated at a pole"
                                 : meta + " evaluated at a pole");
  Matrix N = Matrix::Zero(rows(), cols());
  for (int k = static_cast<int>(numerator.size()) - 1; k >= 0; --k) N = N * u + numerator[static_cast<size_t>(k)];
  return N / q;
}

RationalMatrixFn constant_fn(const Matrix& M, std::string meta) {
  RationalMatrixFn f;
  f.numerator = {M};
  f.denominator = {Complex(1, 0)};
  f.meta = std::move(meta);
  return f;
}

namespace {

// Binomial table up to the needed order; exact in double for small n.
double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

}  // namespace

RationalMatrixFn substitute_affine(const RationalMatrixFn& f, Complex alpha, Complex beta) {
  RationalMatrixFn g;
  g.meta = f.meta;
  const int np = static_cast<int>(f.numerator.size());
  g.numerator.assign(static_cast<size_t>(np), Matrix::Zero(f.rows(), f.cols()));
  for (int k = 0; k < np; ++k) {
    // N_k (alpha + beta u)^k distributed over powers of u.
    for (int m = 0; m <= k; ++m) {
      const Complex c = binomial(k, m) * std::pow(alpha, k - m) * std::pow(beta, m);
      g.numerator[static_cast<size_t>(m)] += c * f.numerator[static_cast<size_t>(k)];
    }
  }
  const int dp = static_cast<int>(f.denominator.size());
  g.denominator.assign(static_cast<size_t>(dp), Complex(0, 0));
  for (int k = 0; k < dp; ++k)
    for (int m = 0; m <= k; ++m)
      g.denominator[static_cast<size_t>(m)] +=
          binomial(k, m) * std::pow(alpha, k - m) * std::pow(beta, m) * f.denominator[static_cast<size_t>(k)];
  return g;
}

RationalMatrixFn transpose_fn(const RationalMatrixFn& f) {
  RationalMatrixFn g = f;
  for (auto& N : g.numerator) N = N.transpose().eval();
  return g;
}

RationalMatrixFn partial_transpose_first_fn(const RationalMatrixFn& f, Index d1, Index d2) {
  RationalMatrixFn g = f;
  for (auto& N : g.numerator) N = partial_transpose_first(N, d1, d2);
  return g;
}

RationalMatrixFn kron_fn(const RationalMatrixFn& f, const Matrix& right) {
  RationalMatrixFn g = f;
  for (auto& N : g.numerator) N = kron(N, right);
  return g;
}

RationalMatrixFn scale_by_rational(const RationalMatrixFn& f, const std::vector<Complex>& p,
                                   const std::vector<Complex>& q) {
  RationalMatrixFn g;
  g.meta = f.meta;
  const int np = static_cast<int>(f.numerator.size());
  const int pp = static_cast<int>(p.size());
  g.numerator.assign(static_cast<size_t>(np + pp - 1), Matrix::Zero(f.rows(), f.cols()));
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < pp; ++j)
      g.numerator[static_cast<size_t>(i + j)] += p[static_cast<size_t>(j)] * f.numerator[static_cast<size_t>(i)];
  g.denominator = poly_mul(f.denominator, q);
  return g;
}

MatrixSeries expand(const RationalMatrixFn& f, int order) {
  const int p = f.num_degree();
  const int q = f.den_degree();
  if (p > q)
    throw NormalizationRequiredError(
        "expand: function is unbounded at infinity; normalize by dividing out u^" + std::to_string(p - q));
  // In t = 1/u: f = t^{q-p} * Ntilde(t) / qtilde(t) with qtilde(0) != 0.
  const int shift = q - p;
  const Complex q0 = f.denominator[static_cast<size_t>(q)];
  MatrixSeries s = zero_series(f.rows(), f.cols(), order);
  std::vector<Matrix> series;  // Ntilde / qtilde power series in t
  series.reserve(static_cast<size_t>(order) + 1);
  for (int r = 0; r + shift <= order; ++r) {
    Matrix num = (p - r >= 0 && p - r < static_cast<int>(f.numerator.size()))
                     ? f.numerator[static_cast<size_t>(p - r)]
                     : Matrix::Zero(f.rows(), f.cols());
    for (int s2 = 1; s2 <= r; ++s2) {
      const int di = q - s2;
      const Complex qs = (di >= 0 && di < static_cast<int>(f.denominator.size()))
                             ? f.denominator[static_cast<size_t>(di)]
                             : Complex(0, 0);
      if (qs != Complex(0, 0)) num -= qs * series[static_cast<size_t>(r - s2)];
    }
    series.push_back(num / q0);
    s.coeffs[static_cast<size_t>(r + shift)] = series.back();
  }
  return s;
}

std::vector<Complex> poly_mul(const std::vector<Complex>& p, const std::vector<Complex>& q) {
  std::vector<Complex> out(p.size() + q.size() - 1, Complex(0, 0));
  for (size_t i = 0; i < p.size(); ++i)
    for (size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  return out;
}

Complex poly_eval(const std::vector<Complex>& p, Complex u) {
  Complex acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * u + *it;
  return acc;
}

}  // namespace kmx
