#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kmx/kmatrix.hpp"

namespace kmx {

/// Lie-algebra involution read off a K-matrix leading coefficient; `action`
/// is the coordinate map on the adjoint basis (alpha(x) = action * x).
struct Involution {
  AlgebraPtr algebra;
  Matrix action;
  double n_defect = 0.0;  ///< component off rho1(g), must vanish
  SubalgebraBasis plus_space;   ///< fixed algebra h0
  SubalgebraBasis minus_space;  ///< odd part f
};

/// Extracts alpha from Ad_kappa via the trace-metric Gram projection onto
/// rho1(g). Requires invertible kappa satisfying the constant classical
/// reflection equation; throws otherwise.
Involution extract_involution(const Matrix& kappa, const Representation& rep1, const Representation& rep2,
                              double tol = kDefaultTol);

double involution_squared_residual(const Involution& inv);
double automorphism_residual(const Involution& inv);
/// Killing orthogonality M^T B M = B (equivalently M^{-1} = B M^T B^{-1}).
double killing_orthogonality_residual(const Involution& inv);

struct PairCheckReport {
  double subspace_distance = 0.0;  ///< largest principal angle, radians
  double grading_hf = 0.0;         ///< [h, f] in f
  double grading_ff = 0.0;         ///< [f, f] in h
  bool pass = false;
};

/// Does h_claimed coincide with the fixed algebra of the involution, with the
/// Z2 grading intact?
PairCheckReport symmetric_pair_check(const Involution& inv, const SubalgebraBasis& h_claimed, double tol = 1e-8);

enum class TwistClass { inner_untwisted, outer_twisted, inner_equivalent, non_quasi_classical };

std::string to_string(TwistClass t);

/// Decides the twist class by solvability of the intertwiner equation
/// V rho(alpha(X)) = rho(X) V for the involution extracted from kappa.
TwistClass twist_class(const Matrix& kappa, const Representation& rep1, const Representation& rep2);

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

CheckResult make_check(std::string name, double residual, double tolerance);

/// The graded basis of the residual symmetry of the square-zero family:
/// solvable part h2 + hD + h+ + h- and reductive part hr = sl(n - 2k).
struct SolvableStructure {
  int n = 0, k = 0;
  std::vector<Matrix> h2, hD, hplus, hminus, hr;
  std::vector<CheckResult> checks;
  Index total_dim() const;
  bool all_pass() const;
};

/// Constructs the basis and verifies every bracket relation in its table
/// (exact zeros and exact containments), the derived series of the solvable
/// part, and agreement with the centralizer. Requires 2k < n.
SolvableStructure solvable_structure(int n, int k);

struct ClassificationReport {
  std::string k_family;
  bool quasi_classical = false;
  std::optional<Involution> involution;
  SubalgebraReport residual_algebra;
  TwistClass twist = TwistClass::non_quasi_classical;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

/// Full pipeline: expansion, quasi-classicality, involution extraction and
/// symmetric-pair certification for quasi-classical K; residual symmetry and
/// solvable/reductive analysis otherwise.
ClassificationReport classify_kmatrix(const KMatrix& K);

}  // namespace kmx
