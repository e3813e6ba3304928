#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kmx/types.hpp"

namespace kmx {

/// Complex simple Lie algebra given by structure constants on a fixed basis.
/// f_AB^C is stored through the adjoint matrices: ad[A](C, B) = f_AB^C.
struct LieAlgebra {
  Index dim = 0;
  std::vector<std::string> basis_labels;
  std::vector<Matrix> ad;
  Matrix killing;
  Matrix killing_inv;

  Complex structure_constant(Index A, Index B, Index C) const { return ad[static_cast<size_t>(A)](C, B); }

  /// Bracket of two elements in adjoint-basis coordinates.
  Vector bracket(const Vector& x, const Vector& y) const;
};

using AlgebraPtr = std::shared_ptr<const LieAlgebra>;

enum class RepKind { defining, contragredient, custom };

struct Representation {
  AlgebraPtr algebra;
  Index d = 0;
  std::vector<Matrix> images;  ///< Y_A = rho(X_A), one per basis element
  RepKind kind = RepKind::custom;
  Complex metric_ratio{0, 0};  ///< c with Tr(Y_A Y_B) = c * killing(A, B)

  /// rho applied to the element with the given adjoint-basis coordinates.
  Matrix apply(const Vector& coords) const;
};

/// sl(n) with basis {E_ij (i != j)} followed by {E_ii - E_{i+1,i+1}}, plus its
/// defining representation. Throws DimensionError for n < 2.
std::pair<AlgebraPtr, Representation> build_sl(int n);

/// X -> -rho(X)^T.
Representation contragredient(const Representation& rep);

/// Coordinates of a d x d matrix Z in the image basis {Y_A}, via the trace
/// metric. If `off_image_residual` is given, receives |Z - sum coords Y|.
Vector coordinates(const Representation& rep, const Matrix& Z, double* off_image_residual = nullptr);

double homomorphism_residual(const Representation& rep);
bool is_faithful(const Representation& rep);

/// Split Casimir C^{(12)} = B^{AB} rho1(X_A) (x) rho2(X_B).
Matrix split_casimir(const Representation& rep1, const Representation& rep2);

struct SubalgebraBasis {
  AlgebraPtr algebra;
  std::vector<Vector> vectors;  ///< adjoint-basis coordinate vectors
  std::optional<std::vector<Vector>> complement;

  Index dim() const { return static_cast<Index>(vectors.size()); }
};

/// Frobenius residual of [h, h] against span(h).
double closure_residual(const SubalgebraBasis& h);

/// Killing form of the ambient algebra restricted to h (complex symmetric).
Matrix restricted_killing(const SubalgebraBasis& h);

/// C^{(h,12)} = B^{ab} rho1(X_a) (x) rho2(X_b) with B^{ab} the inverse of the
/// restricted Killing form. Throws SingularMetricError when that form is
/// degenerate on h.
Matrix restricted_casimir(const Representation& rep1, const Representation& rep2, const SubalgebraBasis& h);

/// C^{(f,12)} = C^{(12)} - C^{(h,12)}.
Matrix casimir_complement(const Representation& rep1, const Representation& rep2, const SubalgebraBasis& h);

/// Quadratic Casimir c^{(h,1)} = B^{ab} rho(X_a) rho(X_b).
Matrix quadratic_casimir(const Representation& rep, const SubalgebraBasis& h);

/// Mixed Casimir C^{(h,1B)} = B^{ab} rho(X_a) (x) rhoB(X_b); `boundary_images`
/// is ordered like h's basis.
Matrix boundary_casimir(const Representation& rep, const SubalgebraBasis& h,
                        const std::vector<Matrix>& boundary_images);

/// Basis of {X in g : [rho(X), kappa] = 0}, as the kernel of the commutator
/// map restricted to rho(g).
SubalgebraBasis centralizer(const Representation& rep, const Matrix& kappa);

enum class AlgebraClass { semisimple, reductive, solvable, semidirect };

std::string to_string(AlgebraClass c);

struct SubalgebraReport {
  Index dim = 0;
  std::vector<Index> derived_series;  ///< dims of h, [h,h], ... until stable
  Index center_dim = 0;
  Index radical_dim = 0;
  Index levi_dim = 0;
  AlgebraClass tag = AlgebraClass::solvable;
};

/// Derived series, center, radical (Cartan's criterion with the ambient
/// Killing form) and the class tag. Throws NotClosedError for non-closed h.
SubalgebraReport classify_subalgebra(const SubalgebraBasis& h);

/// Trace-orthogonal decomposition End(C^d) = span (+) complement, where span
/// is rho(g) (no subalgebra given) or rho(h).
struct EndDecomposition {
  Representation rep;
  std::vector<Matrix> sub_basis;
  std::vector<Matrix> complement_basis;
};

EndDecomposition end_decomposition(const Representation& rep);
EndDecomposition end_decomposition(const Representation& rep, const SubalgebraBasis& h);

/// Helpers shared by invariant checks.
double jacobi_residual(const LieAlgebra& g);
double killing_invariance_residual(const LieAlgebra& g);

}  // namespace kmx
