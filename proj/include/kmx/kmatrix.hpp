#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kmx/rmatrix.hpp"

namespace kmx {

/// K-matrix on C^d (x) C^{d_B} (the boundary leg collapses for d_B = 1),
/// normalized so that K(u) = kappa_tilde + O(1/u).
struct KMatrix {
  RationalMatrixFn fn;
  Representation rep1, rep2;
  Index d_B = 1;
  std::optional<std::vector<Matrix>> boundary_rep;
  std::string family;
  std::map<std::string, Complex> params;
  bool twisted = false;

  Index d() const { return rep1.d; }

  /// Leading coefficient of the asymptotic expansion (kappa, or kappa (x) 1).
  Matrix kappa() const;
};

/// K(u) = diag((1 + xi/u) I_p, (-1 + xi/u) I_q) against the untwisted sl(n)
/// reflection equation. Requires p + q = n, p, q >= 1.
KMatrix diagonal_k(int n, int p, int q, Complex xi);

/// Constant K(u) = kappa paired with the contragredient representation and
/// the crossed R-matrix. kappa must be invertible and (anti)symmetric; a
/// skew kappa needs even n.
KMatrix constant_twisted_k(int n, const Matrix& kappa);

/// K(u) = kappa + 1/u with kappa the k-block Jordan form of a square-zero
/// matrix; not quasi-classical. Requires 2k <= n.
KMatrix nilpotent_k(int n, int k);

/// K-matrix from an explicit rational function (d_B inferred from shapes).
KMatrix custom_k(RationalMatrixFn fn, Representation rep1, Representation rep2, Index d_B, bool twisted,
                 std::string family = "custom");

/// K-matrix from a truncated series, read exactly as the rational function
/// sum_r c_r u^{R-r} / u^R over the defining sl(n) pair.
KMatrix custom_k_from_series(const MatrixSeries& s);

/// Boundary leg extension: K (x) I_m (stacks m copies; reducible by design).
KMatrix boundary_extend(const KMatrix& K, Index m);

/// Rescale K by the trace gauge Tr(K(u) kappa^{-1}) = d * d_B.
KMatrix normalized(const KMatrix& K);

/// Multiply by a scalar rational function p(u)/q(u) (gauge redressing).
KMatrix rescaled(const KMatrix& K, const std::vector<Complex>& p, const std::vector<Complex>& q);

/// The R-matrices entering the reflection equation of Def-2 type:
///   r11(u-v) K13(u) [r12]_{21}(u+v) K23(v) = K23(v) [r12]_{12}(u+v) K13(u) [r22]_{21}(u-v).
/// The middle factors share r12; r21-type factors are leg-swapped embeddings.
struct RMatrixQuad {
  RMatrix r11, r12, r22;
};

/// Yang quad for untwisted families; (R, crossed R, transposed R) with the
/// searched crossing parameter for twisted ones.
RMatrixQuad reflection_quad(const KMatrix& K);

/// Frobenius defect of the boundary Yang-Baxter equation at (u, v).
double bybe_residual(const RMatrixQuad& quad, const KMatrix& K, Complex u, Complex v);

/// Spectral-parameter dependent classical kappa-matrix.
struct ClassicalKappa {
  RationalMatrixFn fn;
  std::optional<Complex> a0;
};

/// Exact rational solution of the classical reflection equation whose
/// normalized expansion is kappa + (a0/u) rho(X0) kappa + O(u^-2), with X0
/// the unit-trace-normalized center of s(gl(p) + gl(q)).
ClassicalKappa classical_kappa_family(int n, int p, int q, Complex a0);

ClassicalKappa constant_classical_kappa(const Matrix& kappa);

/// Defect of the classical boundary Yang-Baxter equation at (u, v).
double cbybe_residual(const ClassicalKappa& kt, const Representation& rep1, const Representation& rep2, Complex u,
                      Complex v);

/// Spectral-parameter independent version: the two constant constraints on
/// kappa (Frobenius norms of both, summed).
double constant_cbybe_residual(const Matrix& kappa, const Representation& rep1, const Representation& rep2);

struct PerturbativeResult {
  std::vector<Matrix> particular;                ///< k^(1..order)
  std::vector<int> nullspace_dims;               ///< per order
  std::vector<std::vector<Matrix>> nullspace_bases;
  std::vector<std::string> anomalies;            ///< inconsistencies / rank surprises
};

/// Order-by-order solver for K(u) = kappa + sum_r k^(r) u^{-r} from the
/// reflection equation's coefficient identities, with the trace gauge
/// Tr(k^(r) kappa^{-1}) = 0 imposed at every order. The full set of
/// coefficient identities is assembled and cross-checked against the reduced
/// spectral-structure system; disagreements are reported as anomalies.
PerturbativeResult perturbative_solve(const Matrix& kappa, const RMatrixQuad& quad, int order,
                                      double tol = kDefaultTol);

/// Same machinery for the classical reflection equation (kappa_tilde series).
PerturbativeResult classical_perturbative_solve(const Matrix& kappa, const Representation& rep1,
                                                const Representation& rep2, int order, double tol = kDefaultTol);

/// Defect of rho1(X) K(u) - K(u) rho2(X) + [1 (x) rhoB_X, K(u)] at u, where X
/// is given by adjoint-basis coordinates.
double symmetry_residual(const KMatrix& K, const Vector& x_coords, const Matrix& rhoB_X, Complex u);

struct ResidualSymmetry {
  SubalgebraBasis algebra_part;
  std::vector<Matrix> boundary_images;  ///< aligned with algebra_part.vectors
  Index boundary_only_dim = 0;          ///< kernel directions with no algebra part
};

/// Joint kernel of the symmetry condition over sampled spectral points, with
/// the trivial (0, identity) direction gauged away. Throws SamplingError when
/// adding samples still changes the kernel dimension.
ResidualSymmetry residual_symmetry(const KMatrix& K, int sample_count = 7);

/// True iff the common commutant of the boundary blocks of K over sampled
/// spectral points is trivial (d_B = 1 is vacuously irreducible).
bool irreducibility_check(const KMatrix& K, int sample_count = 7);

struct K1StructureReport {
  double decomposition_defect = 0.0;  ///< distance from (1/2) c^{(h,1)} + D + 2 C^{(h,1B)}
  double x2a_residual = 0.0;          ///< the u^4-coefficient identity
  double boundary_rep_residual = 0.0;
};

/// Structure checks on a candidate first-order coefficient k1 (given on
/// C^d (x) C^{d_B}) against the subalgebra h and boundary representation.
K1StructureReport k1_structure_check(const Representation& rep1, const Matrix& kappa, const SubalgebraBasis& h,
                                     const std::vector<Matrix>& rhoB, const Matrix& k1);

/// Deterministic off-axis spectral sample points shared by kernel solvers.
std::vector<Complex> default_spectral_samples(int count);

}  // namespace kmx
