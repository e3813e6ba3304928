#pragma once

#include <optional>

#include "kmx/lie_algebra.hpp"
#include "kmx/series.hpp"

namespace kmx {

/// Spectral-parameter-dependent solution of the Yang-Baxter equation on
/// C^{d1} (x) C^{d2}, normalized so that R(u) = 1 + C^{(12)}/u + O(u^-2).
struct RMatrix {
  RationalMatrixFn fn;
  Representation rep1, rep2;
  Matrix casimir;  ///< cached split Casimir of (rep1, rep2)
  bool twisted = false;
  std::optional<Complex> crossing;

  Index d1() const { return rep1.d; }
  Index d2() const { return rep2.d; }
};

/// Rational sl(n) R-matrix in defining (x) defining:
///   R(u) = (1 - 1/(2 n^2 u)) (1 + P/(2 n u)),
/// whose 1/u coefficient is the Killing-normalized split Casimir.
RMatrix yang_r(int n);

/// Frobenius defect of R12(u) R13(u+v) R23(v) = R23(v) R13(u+v) R12(u) with
/// the standard leg embeddings (R13 conjugated through the 2-3 swap).
double ybe_residual(const RMatrix& r12, const RMatrix& r13, const RMatrix& r23, Complex u, Complex v);

/// Crossed R-matrix Rbar(u) = R(Gamma - u)^{T1}; pairs rep1 with the
/// contragredient of rep2.
RMatrix crossed_r(const RMatrix& r, Complex gamma);

/// Both legs transposed: the R-matrix of the contragredient pair.
RMatrix transpose_both(const RMatrix& r);

/// Defect of R(gamma - u)^{T1} R(u)^{T1} from being a scalar multiple of the
/// identity (crossing unitarity) at the spectral point u.
double crossing_defect(const RMatrix& r, Complex gamma, Complex u);

struct CrossingSearchOptions {
  double window_lo = -3.0;
  double window_hi = 3.0;
  double grid_step = 0.25;
  double tol = 1e-12;
};

/// The crossing parameter of the sl(n) R-matrix, located by scanning the
/// crossing-unitarity defect over a grid and refining with a secant iteration
/// on its signed coefficient. Throws CrossingNotFoundError (with the scanned
/// landscape in the message) when no root lies in the window.
Complex find_crossing(int n, const CrossingSearchOptions& opts = {});

/// Classical r-matrix r(u) = C^{(12)}/u.
RationalMatrixFn classical_r(const Representation& rep1, const Representation& rep2);

/// Defect of [r12(u), r13(u+v)] + [r12(u), r23(v)] + [r13(u+v), r23(v)] = 0.
double cybe_residual(const RationalMatrixFn& r12, const RationalMatrixFn& r13, const RationalMatrixFn& r23,
                     const std::array<Index, 3>& dims, Complex u, Complex v);

}  // namespace kmx
