#include "kmx/rmatrix.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "kmx/tensor.hpp"

namespace kmx {

RMatrix yang_r(int n) {
  if (n < 2) throw DimensionError("yang_r: n must be >= 2");
  auto [g, rep] = build_sl(n);
  const Index d = rep.d;
  const Matrix P = swap_operator(d, d);
  const Matrix I = Matrix::Identity(d * d, d * d);
  const double a = 1.0 / (2.0 * n * n);
  const double b = 1.0 / (2.0 * n);

  // (u - a)(u I + b P) / u^2
  RMatrix R;
  R.fn.numerator = {(-a * b) * P, b * P - a * I, I};
  R.fn.denominator = {Complex(0, 0), Complex(0, 0), Complex(1, 0)};
  R.fn.meta = "yang:sl(" + std::to_string(n) + ")";
  R.rep1 = rep;
  R.rep2 = rep;
  R.casimir = split_casimir(rep, rep);
  return R;
}

namespace {

Matrix eval_factor(const RMatrix& r, Complex arg, const char* name) {
  try {
    return r.fn.eval(arg);
  } catch (const PoleError&) {
    std::ostringstream os;
    os << name << " hit a pole at argument " << arg;
    throw PoleError(os.str());
  }
}

}  // namespace

double ybe_residual(const RMatrix& r12, const RMatrix& r13, const RMatrix& r23, Complex u, Complex v) {
  if (r12.rep1.algebra->dim != r13.rep1.algebra->dim || r12.rep1.algebra->dim != r23.rep1.algebra->dim)
    throw DimensionError("ybe_residual: incompatible algebras");
  const Index d1 = r12.d1(), d2 = r12.d2(), d3 = r13.d2();
  if (r13.d1() != d1 || r23.d1() != d2 || r23.d2() != d3)
    throw DimensionError("ybe_residual: representation triple is inconsistent");
  const std::array<Index, 3> dims{d1, d2, d3};

  const Matrix A = embed_pair(eval_factor(r12, u, "R12"), dims, 0, 1);
  const Matrix B = embed_pair(eval_factor(r13, u + v, "R13"), dims, 0, 2);
  const Matrix C = embed_pair(eval_factor(r23, v, "R23"), dims, 1, 2);
  return (A * B * C - C * B * A).norm();
}

RMatrix crossed_r(const RMatrix& r, Complex gamma) {
  if (r.twisted) throw DimensionError("crossed_r: input is already crossed");
  RMatrix out;
  out.fn = partial_transpose_first_fn(substitute_affine(r.fn, gamma, Complex(-1, 0)), r.d1(), r.d2());
  out.fn.meta = r.fn.meta + ":crossed";
  out.rep1 = r.rep1;
  out.rep2 = contragredient(r.rep2);
  out.casimir = split_casimir(out.rep1, out.rep2);
  out.twisted = true;
  out.crossing = gamma;
  return out;
}

RMatrix transpose_both(const RMatrix& r) {
  RMatrix out;
  out.fn = transpose_fn(r.fn);
  out.fn.meta = r.fn.meta + ":transposed";
  out.rep1 = contragredient(r.rep1);
  out.rep2 = contragredient(r.rep2);
  out.casimir = split_casimir(out.rep1, out.rep2);
  return out;
}

double crossing_defect(const RMatrix& r, Complex gamma, Complex u) {
  const Index d = r.d1();
  const Matrix M = partial_transpose_first(r.fn.eval(gamma - u), d, d) * partial_transpose_first(r.fn.eval(u), d, d);
  const Matrix off = M - (M.trace() / static_cast<double>(d * d)) * Matrix::Identity(d * d, d * d);
  return off.norm();
}

namespace {

// Signed coefficient of the crossed product along the traceless part of
// P^{T1}; vanishes exactly at the crossing point.
Complex crossing_coefficient(const RMatrix& r, Complex gamma, Complex u) {
  const Index d = r.d1();
  const Matrix Q = partial_transpose_first(swap_operator(d, d), d, d);
  const Matrix Q0 = Q - (Q.trace() / static_cast<double>(d * d)) * Matrix::Identity(d * d, d * d);
  const Matrix M = partial_transpose_first(r.fn.eval(gamma - u), d, d) * partial_transpose_first(r.fn.eval(u), d, d);
  return (Q0.adjoint() * M).trace() / (Q0.adjoint() * Q0).trace().real();
}

}  // namespace

Complex find_crossing(int n, const CrossingSearchOptions& opts) {
  const RMatrix R = yang_r(n);
  const Complex u0(0.9, 0.4);

  double best = std::numeric_limits<double>::infinity();
  Complex best_gamma = opts.window_lo;
  std::ostringstream landscape;
  for (double g = opts.window_lo; g <= opts.window_hi + 1e-12; g += opts.grid_step) {
    const double defect = crossing_defect(R, g, u0);
    landscape << "  gamma=" << g << " defect=" << defect << "\n";
    if (defect < best) {
      best = defect;
      best_gamma = g;
    }
  }

  // Secant refinement on the signed coefficient.
  Complex g0 = best_gamma - 0.5 * opts.grid_step;
  Complex g1 = best_gamma + 0.5 * opts.grid_step;
  Complex s0 = crossing_coefficient(R, g0, u0);
  Complex s1 = crossing_coefficient(R, g1, u0);
  for (int it = 0; it < 60 && std::abs(s1) > 1e-16; ++it) {
    if (s1 == s0) break;
    const Complex g2 = g1 - s1 * (g1 - g0) / (s1 - s0);
    g0 = g1;
    s0 = s1;
    g1 = g2;
    s1 = crossing_coefficient(R, g1, u0);
  }

  const bool inside = g1.real() >= opts.window_lo - 1e-9 && g1.real() <= opts.window_hi + 1e-9 &&
                      std::abs(g1.imag()) < 1e-6;
  double refined = 0.0;
  for (const Complex us : {Complex(0.7, 0.6), Complex(1.4, -0.3), Complex(0.45, 0.9)})
    refined = std::max(refined, crossing_defect(R, g1, us));
  if (!inside || refined > opts.tol) {
    throw CrossingNotFoundError("find_crossing: no crossing point in [" + std::to_string(opts.window_lo) + ", " +
                                std::to_string(opts.window_hi) + "]; landscape:\n" + landscape.str());
  }
  return g1;
}

RationalMatrixFn classical_r(const Representation& rep1, const Representation& rep2) {
  RationalMatrixFn f;
  f.numerator = {split_casimir(rep1, rep2)};
  f.denominator = {Complex(0, 0), Complex(1, 0)};
  f.meta = "classical-r";
  return f;
}

double cybe_residual(const RationalMatrixFn& r12, const RationalMatrixFn& r13, const RationalMatrixFn& r23,
                     const std::array<Index, 3>& dims, Complex u, Complex v) {
  const Matrix A = embed_pair(r12.eval(u), dims, 0, 1);
  const Matrix B = embed_pair(r13.eval(u + v), dims, 0, 2);
  const Matrix C = embed_pair(r23.eval(v), dims, 1, 2);
  auto comm = [](const Matrix& X, const Matrix& Y) { return X * Y - Y * X; };
  return (comm(A, B) + comm(A, C) + comm(B, C)).norm();
}

}  // namespace kmx
