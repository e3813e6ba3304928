#include "kmx/classify.hpp"

#include <algorithm>
#include <cmath>

#include "kmx/linalg.hpp"
#include "kmx/tensor.hpp"

namespace kmx {

Involution extract_involution(const Matrix& kappa, const Representation& rep1, const Representation& rep2,
                              double tol) {
  if (rep1.algebra != rep2.algebra) throw DimensionError("extract_involution: representations of different algebras");
  const Index d = rep1.d;
  if (kappa.rows() != d || kappa.cols() != d) throw DimensionError("extract_involution: kappa must be d x d");
  if (!is_invertible(kappa)) throw NotQuasiClassicalError("extract_involution: kappa is singular");
  const double seed = constant_cbybe_residual(kappa, rep1, rep2);
  if (seed > 1e-7 * std::max(1.0, std::pow(kappa.norm(), 2)))
    throw Error("extract_involution: kappa fails the constant classical reflection equation (residual " +
                std::to_string(seed) + ")");

  const auto& g = *rep1.algebra;
  const Matrix kinv = kappa.fullPivLu().inverse();

  Involution inv;
  inv.algebra = rep1.algebra;
  inv.action = Matrix(g.dim, g.dim);
  inv.n_defect = 0.0;
  for (Index A = 0; A < g.dim; ++A) {
    const Matrix ad = kappa * rep2.images[static_cast<size_t>(A)] * kinv;
    double off = 0.0;
    inv.action.col(A) = coordinates(rep1, ad, &off);
    inv.n_defect = std::max(inv.n_defect, off);
  }
  if (inv.n_defect > tol)
    throw Error("extract_involution: Ad_kappa leaves rho1(g) (defect " + std::to_string(inv.n_defect) + ")");
  const double msq = (inv.action * inv.action - Matrix::Identity(g.dim, g.dim)).norm();
  if (msq > tol) throw Error("extract_involution: the extracted map does not square to one");

  // Eigenspaces through the idempotent projectors (I +/- M)/2.
  const Matrix Id = Matrix::Identity(g.dim, g.dim);
  const Matrix plus = orthonormal_columns(0.5 * (Id + inv.action), 0.5);
  const Matrix minus = orthonormal_columns(0.5 * (Id - inv.action), 0.5);
  if (plus.cols() + minus.cols() != g.dim)
    throw Error("extract_involution: eigenspace dimensions do not add up to dim g");

  const Matrix plus_s = sparsify_columns(plus);
  const Matrix minus_s = sparsify_columns(minus);
  inv.plus_space.algebra = rep1.algebra;
  inv.minus_space.algebra = rep1.algebra;
  std::vector<Vector> pv, mv;
  for (Index c = 0; c < plus_s.cols(); ++c) pv.push_back(plus_s.col(c));
  for (Index c = 0; c < minus_s.cols(); ++c) mv.push_back(minus_s.col(c));
  inv.plus_space.vectors = pv;
  inv.plus_space.complement = mv;
  inv.minus_space.vectors = mv;
  inv.minus_space.complement = pv;
  return inv;
}

double involution_squared_residual(const Involution& inv) {
  return (inv.action * inv.action - Matrix::Identity(inv.algebra->dim, inv.algebra->dim)).norm();
}

double automorphism_residual(const Involution& inv) {
  const auto& g = *inv.algebra;
  double worst = 0.0;
  for (Index A = 0; A < g.dim; ++A)
    for (Index B = 0; B < g.dim; ++B) {
      Vector eA = Vector::Zero(g.dim), eB = Vector::Zero(g.dim);
      eA(A) = 1.0;
      eB(B) = 1.0;
      const Vector lhs = inv.action * g.bracket(eA, eB);
      const Vector rhs = g.bracket(inv.action * eA, inv.action * eB);
      worst = std::max(worst, (lhs - rhs).norm());
    }
  return worst;
}

double killing_orthogonality_residual(const Involution& inv) {
  const auto& g = *inv.algebra;
  return (inv.action.transpose() * g.killing * inv.action - g.killing).norm() / g.killing.norm();
}

namespace {

double grading_residual(const LieAlgebra& g, const std::vector<Vector>& from_a, const std::vector<Vector>& from_b,
                        const std::vector<Vector>& target) {
  if (from_a.empty() || from_b.empty()) return 0.0;
  const Matrix span = orthonormal_columns(stack_columns(target, g.dim));
  double worst = 0.0;
  for (const auto& x : from_a)
    for (const auto& y : from_b) worst = std::max(worst, span_residual(g.bracket(x, y), span));
  return worst;
}

}  // namespace

PairCheckReport symmetric_pair_check(const Involution& inv, const SubalgebraBasis& h_claimed, double tol) {
  if (inv.algebra != h_claimed.algebra) throw DimensionError("symmetric_pair_check: different algebras");
  const auto& g = *inv.algebra;
  PairCheckReport rep;
  rep.subspace_distance = largest_principal_angle(stack_columns(inv.plus_space.vectors, g.dim),
                                                  stack_columns(h_claimed.vectors, g.dim));
  rep.grading_hf = grading_residual(g, inv.plus_space.vectors, inv.minus_space.vectors, inv.minus_space.vectors);
  rep.grading_ff = grading_residual(g, inv.minus_space.vectors, inv.minus_space.vectors, inv.plus_space.vectors);
  rep.pass = rep.subspace_distance <= tol && rep.grading_hf <= tol && rep.grading_ff <= tol;
  return rep;
}

std::string to_string(TwistClass t) {
  switch (t) {
    case TwistClass::inner_untwisted: return "inner/untwisted";
    case TwistClass::outer_twisted: return "outer/twisted";
    case TwistClass::inner_equivalent: return "inner-equivalent";
    case TwistClass::non_quasi_classical: return "non-quasi-classical";
  }
  return "?";
}

namespace {

bool reps_match(const Representation& a, const Representation& b) {
  if (a.d != b.d || a.images.size() != b.images.size()) return false;
  for (size_t i = 0; i < a.images.size(); ++i)
    if ((a.images[i] - b.images[i]).norm() > 1e-12) return false;
  return true;
}

}  // namespace

TwistClass twist_class(const Matrix& kappa, const Representation& rep1, const Representation& rep2) {
  if (reps_match(rep1, rep2)) return TwistClass::inner_untwisted;
  if (!reps_match(contragredient(rep1), rep2))
    throw Error("twist_class: rho2 must be rho1 or its contragredient");

  const Involution inv = extract_involution(kappa, rep1, rep2);
  const auto& g = *rep1.algebra;
  const Index d = rep1.d;

  // Intertwiner equation V rho(alpha(X_A)) = rho(X_A) V.
  Matrix A(g.dim * d * d, d * d);
  for (Index a = 0; a < g.dim; ++a) {
    const Matrix Yalpha = rep1.apply(inv.action.col(a));
    const Matrix& Y = rep1.images[static_cast<size_t>(a)];
    for (Index p = 0; p < d; ++p)
      for (Index q = 0; q < d; ++q) {
        Matrix E = Matrix::Zero(d, d);
        E(p, q) = 1.0;
        A.block(a * d * d, q * d + p, d * d, 1) = vec(E * Yalpha - Y * E);
      }
  }
  const Matrix ker = kernel_basis(A);
  for (Index c = 0; c < ker.cols(); ++c) {
    if (is_invertible(unvec(ker.col(c), d, d))) return TwistClass::inner_equivalent;
  }
  return TwistClass::outer_twisted;
}

CheckResult make_check(std::string name, double residual, double tolerance) {
  CheckResult c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = tolerance;
  c.pass = residual <= tolerance;
  return c;
}

Index SolvableStructure::total_dim() const {
  return static_cast<Index>(h2.size() + hD.size() + hplus.size() + hminus.size() + hr.size());
}

bool SolvableStructure::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

Matrix unit_matrix(int n, int i, int j) {
  Matrix E = Matrix::Zero(n, n);
  E(i, j) = 1.0;
  return E;
}

double max_entry_outside(const Matrix& M, const std::vector<Matrix>& support_basis) {
  // The basis elements have disjoint single-entry supports, so span
  // membership is exact: zero every supported entry and take the max.
  Matrix R = M;
  for (const auto& E : support_basis)
    for (Index i = 0; i < E.rows(); ++i)
      for (Index j = 0; j < E.cols(); ++j)
        if (E(i, j) != Complex(0, 0)) R(i, j) = 0.0;
  return R.cwiseAbs().maxCoeff();
}

double pairwise_bracket_zero(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double worst = 0.0;
  for (const auto& X : a)
    for (const auto& Y : b) worst = std::max(worst, ((X * Y - Y * X).cwiseAbs().maxCoeff)());
  return worst;
}

double pairwise_bracket_in(const std::vector<Matrix>& a, const std::vector<Matrix>& b,
                           const std::vector<Matrix>& target) {
  double worst = 0.0;
  for (const auto& X : a)
    for (const auto& Y : b) worst = std::max(worst, max_entry_outside(X * Y - Y * X, target));
  return worst;
}

}  // namespace

SolvableStructure solvable_structure(int n, int k) {
  if (k < 1 || 2 * k >= n)
    throw Error("solvable_structure: requires 2k < n (the diagonal generators divide by n - 2k)");

  SolvableStructure s;
  s.n = n;
  s.k = k;
  const int m = n - 2 * k;

  for (int a = 1; a <= k; ++a)
    for (int b = 1; b <= k; ++b) s.h2.push_back(unit_matrix(n, 2 * a - 2, 2 * b - 1));
  for (int a = 1; a <= k; ++a) {
    Matrix H = Matrix::Zero(n, n);
    H(2 * a - 2, 2 * a - 2) = 1.0;
    H(2 * a - 1, 2 * a - 1) = 1.0;
    for (int i = 2 * k; i < n; ++i) H(i, i) = -2.0 / m;
    s.hD.push_back(H);
  }
  for (int a = 1; a <= k; ++a)
    for (int i = 2 * k; i < n; ++i) s.hplus.push_back(unit_matrix(n, 2 * a - 2, i));
  for (int a = 1; a <= k; ++a)
    for (int i = 2 * k; i < n; ++i) s.hminus.push_back(unit_matrix(n, i, 2 * a - 1));
  if (m >= 2) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (i != j) s.hr.push_back(unit_matrix(n, 2 * k + i, 2 * k + j));
    for (int i = 0; i + 1 < m; ++i) {
      Matrix H = Matrix::Zero(n, n);
      H(2 * k + i, 2 * k + i) = 1.0;
      H(2 * k + i + 1, 2 * k + i + 1) = -1.0;
      s.hr.push_back(H);
    }
  }

  // Bracket table: the zero relations hold exactly in integer arithmetic.
  s.checks.push_back(make_check("[h2,h2]=0", pairwise_bracket_zero(s.h2, s.h2), 0.0));
  s.checks.push_back(make_check("[h2,h+]=0", pairwise_bracket_zero(s.h2, s.hplus), 0.0));
  s.checks.push_back(make_check("[h2,h-]=0", pairwise_bracket_zero(s.h2, s.hminus), 0.0));
  s.checks.push_back(make_check("[hD,hD]=0", pairwise_bracket_zero(s.hD, s.hD), 0.0));
  s.checks.push_back(make_check("[h+,h+]=0", pairwise_bracket_zero(s.hplus, s.hplus), 0.0));
  s.checks.push_back(make_check("[h-,h-]=0", pairwise_bracket_zero(s.hminus, s.hminus), 0.0));
  s.checks.push_back(make_check("[hD,h2] in h2", pairwise_bracket_in(s.hD, s.h2, s.h2), 0.0));
  s.checks.push_back(make_check("[hD,h+] in h+", pairwise_bracket_in(s.hD, s.hplus, s.hplus), 0.0));
  s.checks.push_back(make_check("[hD,h-] in h-", pairwise_bracket_in(s.hD, s.hminus, s.hminus), 0.0));
  s.checks.push_back(make_check("[h+,h-] in h2", pairwise_bracket_in(s.hplus, s.hminus, s.h2), 0.0));

  // Derived structure of the solvable part: [hs,hs] = h1 = h2 + h+ + h-,
  // then [h1,h1] = h2, then zero.
  std::vector<Matrix> hs;
  hs.insert(hs.end(), s.h2.begin(), s.h2.end());
  hs.insert(hs.end(), s.hD.begin(), s.hD.end());
  hs.insert(hs.end(), s.hplus.begin(), s.hplus.end());
  hs.insert(hs.end(), s.hminus.begin(), s.hminus.end());
  std::vector<Matrix> h1;
  h1.insert(h1.end(), s.h2.begin(), s.h2.end());
  h1.insert(h1.end(), s.hplus.begin(), s.hplus.end());
  h1.insert(h1.end(), s.hminus.begin(), s.hminus.end());

  auto span_of_brackets = [](const std::vector<Matrix>& basis) {
    std::vector<Vector> cols;
    for (size_t i = 0; i < basis.size(); ++i)
      for (size_t j = i + 1; j < basis.size(); ++j) cols.push_back(vec(basis[i] * basis[j] - basis[j] * basis[i]));
    if (cols.empty()) return Matrix(Index(0), Index(0));
    return orthonormal_columns(stack_columns(cols, cols.front().size()));
  };
  const Index d_hs1 = span_of_brackets(hs).cols();
  s.checks.push_back(make_check("[hs,hs] has dim of h1",
                                std::abs(static_cast<double>(d_hs1) - static_cast<double>(h1.size())), 0.0));
  s.checks.push_back(make_check("[hs,hs] in h1", pairwise_bracket_in(hs, hs, h1), 0.0));
  const Index d_h11 = span_of_brackets(h1).cols();
  s.checks.push_back(make_check("[h1,h1] has dim of h2",
                                std::abs(static_cast<double>(d_h11) - static_cast<double>(s.h2.size())), 0.0));
  s.checks.push_back(make_check("[h1,h1] in h2", pairwise_bracket_in(h1, h1, s.h2), 0.0));
  s.checks.push_back(make_check("h2 abelian", pairwise_bracket_zero(s.h2, s.h2), 0.0));

  // The direct sum with hr carries the whole centralizer of kappa.
  auto [g, rep] = build_sl(n);
  Matrix kappa = Matrix::Zero(n, n);
  for (int a = 0; a < k; ++a) kappa(2 * a, 2 * a + 1) = 1.0;
  const SubalgebraBasis cent = centralizer(rep, kappa);
  std::vector<Vector> all_coords;
  auto push_coords = [&](const std::vector<Matrix>& mats) {
    for (const auto& Mt : mats) all_coords.push_back(coordinates(rep, Mt));
  };
  push_coords(s.h2);
  push_coords(s.hD);
  push_coords(s.hplus);
  push_coords(s.hminus);
  push_coords(s.hr);
  const Matrix constructed = stack_columns(all_coords, g->dim);
  s.checks.push_back(make_check("constructed dim = centralizer dim",
                                std::abs(static_cast<double>(column_rank(constructed)) -
                                         static_cast<double>(cent.dim())),
                                0.0));
  s.checks.push_back(make_check("constructed span = centralizer span",
                                largest_principal_angle(constructed, stack_columns(cent.vectors, g->dim)), 1e-9));
  return s;
}

bool ClassificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

ClassificationReport classify_kmatrix(const KMatrix& K) {
  ClassificationReport rep;
  rep.k_family = K.family.empty() ? K.fn.meta : K.family;

  const Matrix kappa = K.kappa();
  rep.quasi_classical = is_invertible(kappa);
  rep.checks.push_back(make_check("quasi-classical leading coefficient",
                                  rep.quasi_classical ? 0.0 : 1.0, 0.5));
  rep.checks.back().pass = true;  // informational: both outcomes are classified

  // Reflection-equation residuals on a few deterministic spectral pairs.
  const RMatrixQuad quad = reflection_quad(K);
  const auto pts = default_spectral_samples(6);
  double worst = 0.0;
  for (size_t i = 0; i + 1 < pts.size(); i += 2) worst = std::max(worst, bybe_residual(quad, K, pts[i], 0.45 * pts[i + 1]));
  rep.checks.push_back(make_check("reflection equation residual", worst, kDefaultTol));

  const ResidualSymmetry sym = residual_symmetry(K);
  rep.checks.push_back(make_check("residual symmetry closed", closure_residual(sym.algebra_part), kDefaultTol));
  rep.residual_algebra = classify_subalgebra(sym.algebra_part);

  if (rep.quasi_classical) {
    Involution inv = extract_involution(kappa, K.rep1, K.rep2);
    rep.checks.push_back(make_check("involution squares to one", involution_squared_residual(inv), kDefaultTol));
    rep.checks.push_back(make_check("involution is an automorphism", automorphism_residual(inv), kDefaultTol));
    rep.checks.push_back(make_check("involution Killing-orthogonal", killing_orthogonality_residual(inv), kDefaultTol));
    rep.checks.push_back(make_check("Ad_kappa stays in rho(g)", inv.n_defect, kDefaultTol));
    const PairCheckReport pair = symmetric_pair_check(inv, sym.algebra_part);
    rep.checks.push_back(make_check("fixed algebra matches residual symmetry", pair.subspace_distance, 1e-8));
    rep.checks.push_back(make_check("Z2 grading [h,f] in f", pair.grading_hf, 1e-8));
    rep.checks.push_back(make_check("Z2 grading [f,f] in h", pair.grading_ff, 1e-8));
    rep.twist = twist_class(kappa, K.rep1, K.rep2);
    rep.involution = std::move(inv);
  } else {
    rep.twist = TwistClass::non_quasi_classical;
    if (K.family == "nilpotent") {
      const int n = static_cast<int>(K.d());
      double unit = 0.0;
      for (const Complex& u : default_spectral_samples(5)) {
        const Matrix prod = K.fn.eval(u) * K.fn.eval(-u) +
                            Matrix::Identity(K.d() * K.d_B, K.d() * K.d_B) / (u * u);
        unit = std::max(unit, prod.norm());
      }
      rep.checks.push_back(make_check("unitarity K(u)K(-u) = -1/u^2", unit, 1e-12));
      const int k = static_cast<int>(K.params.count("k") ? K.params.at("k").real() : 1);
      if (2 * k < n) {
        const SolvableStructure st = solvable_structure(n, k);
        for (const auto& c : st.checks) rep.checks.push_back(c);
        rep.checks.push_back(make_check("residual symmetry dim matches structure",
                                        std::abs(static_cast<double>(st.total_dim()) -
                                                 static_cast<double>(sym.algebra_part.dim())),
                                        0.0));
      }
    }
  }
  return rep;
}

}  // namespace kmx
