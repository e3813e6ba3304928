#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kmx/rmatrix.hpp"
#include "kmx/series.hpp"
#include "oracles.hpp"

using namespace kmx;

namespace {

MatrixSeries random_series(std::mt19937_64& gen, Index d, int order, bool quasi_classical) {
  MatrixSeries s = zero_series(d, d, order);
  for (int r = 0; r <= order; ++r) s.coeffs[static_cast<size_t>(r)] = oracle::random_matrix(gen, d, d);
  if (quasi_classical) s.coeffs[0] += 3.0 * Matrix::Identity(d, d);  // keep the leading term invertible
  return s;
}

}  // namespace

TEST_CASE("series product telescopes") {
  auto gen = oracle::rng(1);
  const Matrix A = oracle::random_matrix(gen, 3, 3);
  MatrixSeries p = zero_series(3, 3, 2);
  p.coeffs[0] = Matrix::Identity(3, 3);
  p.coeffs[1] = A;
  MatrixSeries m = p;
  m.coeffs[1] = -A;
  const MatrixSeries prod = series_mul(p, m);
  CHECK((prod.coeff(0) - Matrix::Identity(3, 3)).norm() == 0.0);
  CHECK(prod.coeff(1).norm() == 0.0);
  CHECK((prod.coeff(2) + A * A).norm() == 0.0);
}

TEST_CASE("identity series is a unit") {
  auto gen = oracle::rng(2);
  const MatrixSeries s = random_series(gen, 4, 4, false);
  const MatrixSeries left = series_mul(identity_series(4, 4), s);
  const MatrixSeries right = series_mul(s, identity_series(4, 4));
  for (int r = 0; r <= 4; ++r) {
    CHECK((left.coeff(r) - s.coeff(r)).norm() == 0.0);
    CHECK((right.coeff(r) - s.coeff(r)).norm() == 0.0);
  }
}

TEST_CASE("order-3 product matches numerical evaluation after truncation-error subtraction") {
  auto gen = oracle::rng(3);
  const MatrixSeries a = random_series(gen, 4, 4, false);
  const MatrixSeries b = random_series(gen, 4, 4, false);
  MatrixSeries a3 = a, b3 = b;
  a3.order = b3.order = 3;
  a3.coeffs.resize(4);
  b3.coeffs.resize(4);
  const MatrixSeries prod = series_mul(a3, b3);

  const Complex u(1e3, 0);
  // Partial sums multiplied exactly, with the known above-order cross terms
  // removed, must agree with the truncated Cauchy product.
  Matrix value = a3.eval(u) * b3.eval(u);
  for (int r = 4; r <= 6; ++r) {
    Matrix drop = Matrix::Zero(4, 4);
    for (int i = std::max(0, r - 3); i <= 3 && i <= r; ++i) drop += a3.coeff(i) * b3.coeff(r - i);
    value -= drop / std::pow(u, r);
  }
  CHECK((prod.eval(u) - value).norm() <= 1e-9 * value.norm());
}

TEST_CASE("series product shape mismatch throws") {
  auto gen = oracle::rng(4);
  const MatrixSeries a = random_series(gen, 3, 3, false);
  const MatrixSeries b = random_series(gen, 4, 4, false);
  CHECK_THROWS_AS(series_mul(a, b), DimensionError);
}

TEST_CASE("ring laws at fixed order") {
  auto gen = oracle::rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixSeries a = random_series(gen, 3, 4, false);
    const MatrixSeries b = random_series(gen, 3, 4, false);
    const MatrixSeries c = random_series(gen, 3, 4, false);
    const MatrixSeries assoc_l = series_mul(series_mul(a, b), c);
    const MatrixSeries assoc_r = series_mul(a, series_mul(b, c));
    const MatrixSeries dist_l = series_mul(a, series_add(b, c));
    const MatrixSeries dist_r = series_add(series_mul(a, b), series_mul(a, c));
    for (int r = 0; r <= 4; ++r) {
      CHECK((assoc_l.coeff(r) - assoc_r.coeff(r)).norm() <= 1e-12);
      CHECK((dist_l.coeff(r) - dist_r.coeff(r)).norm() <= 1e-12);
    }
  }
}

TEST_CASE("series inverse") {
  SUBCASE("square-zero correction truncates the geometric series") {
    Matrix N = Matrix::Zero(2, 2);
    N(0, 1) = 1.0;
    MatrixSeries s = identity_series(2, 4);
    s.coeffs[1] = N;
    const MatrixSeries inv = series_inverse(s);
    CHECK((inv.coeff(0) - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK((inv.coeff(1) + N).norm() == 0.0);
    CHECK(inv.coeff(2).norm() == 0.0);  // N^2 = 0
    CHECK(inv.coeff(3).norm() == 0.0);
  }

  SUBCASE("diagonal family inverse matches the pointwise inverse at u = 50") {
    RationalMatrixFn f;
    Matrix J = Matrix::Identity(3, 3);
    J(2, 2) = -1.0;
    f.numerator = {0.7 * Matrix::Identity(3, 3), J};
    f.denominator = {Complex(0, 0), Complex(1, 0)};
    const MatrixSeries s = expand(f, 6);
    const MatrixSeries inv = series_inverse(s);
    const Complex u(50, 0);
    CHECK((inv.eval(u) - f.eval(u).inverse()).norm() <= 1e-10);
  }

  SUBCASE("nilpotent leading coefficient is rejected") {
    MatrixSeries s = identity_series(2, 2);
    s.coeffs[0] = Matrix::Zero(2, 2);
    s.coeffs[0](0, 1) = 1.0;
    CHECK_THROWS_AS(series_inverse(s), NotQuasiClassicalError);
  }

  SUBCASE("double inverse is the identity map on quasi-classical series") {
    auto gen = oracle::rng(6);
    for (int trial = 0; trial < 20; ++trial) {
      const MatrixSeries s = random_series(gen, 3, 4, true);
      const MatrixSeries twice = series_inverse(series_inverse(s));
      for (int r = 0; r <= 4; ++r) CHECK((twice.coeff(r) - s.coeff(r)).norm() <= 1e-11);
    }
  }
}

TEST_CASE("expand") {
  SUBCASE("(u + xi)/u times identity") {
    RationalMatrixFn f;
    f.numerator = {0.7 * Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    f.denominator = {Complex(0, 0), Complex(1, 0)};
    const MatrixSeries s = expand(f, 3);
    CHECK((s.coeff(0) - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK((s.coeff(1) - 0.7 * Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK(s.coeff(2).norm() == 0.0);
  }

  SUBCASE("Yang R-matrix for sl(2) expands to [1, C]") {
    const RMatrix R = yang_r(2);
    const MatrixSeries s = expand(R.fn, 1);
    CHECK((s.coeff(0) - Matrix::Identity(4, 4)).norm() <= 1e-14);
    CHECK((s.coeff(1) - R.casimir).norm() <= 1e-14);
  }

  SUBCASE("geometric series of 1/(u-1)") {
    RationalMatrixFn f;
    f.numerator = {Matrix::Identity(2, 2)};
    f.denominator = {Complex(-1, 0), Complex(1, 0)};
    const MatrixSeries s = expand(f, 3);
    CHECK(s.coeff(0).norm() == 0.0);
    for (int r = 1; r <= 3; ++r) CHECK((s.coeff(r) - Matrix::Identity(2, 2)).norm() <= 1e-14);
  }

  SUBCASE("unbounded functions require normalization") {
    RationalMatrixFn f;
    f.numerator = {Matrix::Zero(2, 2), Matrix::Identity(2, 2)};  // u * I
    f.denominator = {Complex(1, 0)};
    CHECK_THROWS_AS(expand(f, 2), NormalizationRequiredError);
  }

  SUBCASE("tail bound with fitted constant") {
    auto gen = oracle::rng(7);
    RationalMatrixFn f;
    f.numerator = {oracle::random_matrix(gen, 3, 3), oracle::random_matrix(gen, 3, 3),
                   oracle::random_matrix(gen, 3, 3)};
    f.denominator = {Complex(0.3, 0.1), Complex(-0.4, 0), Complex(1, 0)};
    const int R = 4;
    const MatrixSeries s = expand(f, R);
    const double c_fit = (f.eval(Complex(100, 0)) - s.eval(Complex(100, 0))).norm() * std::pow(100.0, R + 1);
    for (double u : {1e3, 1e4}) {
      const double err = (f.eval(Complex(u, 0)) - s.eval(Complex(u, 0))).norm();
      CHECK(err <= 1.5 * c_fit * std::pow(u, -(R + 1)));
    }
  }
}

TEST_CASE("rational function evaluation hits poles loudly") {
  RationalMatrixFn f;
  f.numerator = {Matrix::Identity(2, 2)};
  f.denominator = {Complex(-1, 0), Complex(1, 0)};
  f.meta = "test-fn";
  CHECK_THROWS_AS(f.eval(Complex(1, 0)), PoleError);
  CHECK_NOTHROW(f.eval(Complex(2, 0)));
}

TEST_CASE("affine substitution and coefficient transposes") {
  auto gen = oracle::rng(8);
  RationalMatrixFn f;
  f.numerator = {oracle::random_matrix(gen, 2, 2), oracle::random_matrix(gen, 2, 2),
                 oracle::random_matrix(gen, 2, 2)};
  f.denominator = {Complex(0.5, 0), Complex(0, 0), Complex(1, 0)};
  const Complex gamma(0.7, -0.2);
  const RationalMatrixFn g = substitute_affine(f, gamma, Complex(-1, 0));
  const Complex u(1.3, 0.4);
  CHECK((g.eval(u) - f.eval(gamma - u)).norm() <= 1e-12);
  const RationalMatrixFn t = transpose_fn(f);
  CHECK((t.eval(u) - f.eval(u).transpose()).norm() <= 1e-13);
}
