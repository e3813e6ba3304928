#include "kmx/kmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "kmx/linalg.hpp"
#include "kmx/tensor.hpp"

namespace kmx {

Matrix KMatrix::kappa() const { return expand(fn, 0).coeff(0); }

KMatrix diagonal_k(int n, int p, int q, Complex xi) {
  if (p < 1 || q < 1 || p + q != n) throw DimensionError("diagonal_k: need p, q >= 1 with p + q = n");
  auto [g, rep] = build_sl(n);
  Matrix J = Matrix::Identity(n, n);
  J.bottomRightCorner(q, q) *= -1.0;

  KMatrix K;
  K.fn.numerator = {xi * Matrix::Identity(n, n), J};
  K.fn.denominator = {Complex(0, 0), Complex(1, 0)};
  K.fn.meta = "diag:sl(" + std::to_string(n) + "):" + std::to_string(p) + "," + std::to_string(q);
  K.rep1 = rep;
  K.rep2 = rep;
  K.family = "diag";
  K.params["p"] = static_cast<double>(p);
  K.params["q"] = static_cast<double>(q);
  K.params["xi"] = xi;
  return K;
}

KMatrix constant_twisted_k(int n, const Matrix& kappa) {
  if (kappa.rows() != n || kappa.cols() != n) throw DimensionError("constant_twisted_k: kappa must be n x n");
  if (!is_invertible(kappa)) throw NotQuasiClassicalError("constant_twisted_k: kappa is singular");
  const double sym = (kappa - kappa.transpose()).norm();
  const double skew = (kappa + kappa.transpose()).norm();
  if (sym > 1e-12 * kappa.norm() && skew > 1e-12 * kappa.norm())
    throw Error("constant_twisted_k: kappa must satisfy kappa^T = +/- kappa");
  if (skew <= 1e-12 * kappa.norm() && n % 2 != 0)
    throw Error("constant_twisted_k: skew kappa requires even n");

  auto [g, rep] = build_sl(n);
  KMatrix K;
  K.fn = constant_fn(kappa, "twist-const:sl(" + std::to_string(n) + ")");
  K.rep1 = rep;
  K.rep2 = contragredient(rep);
  K.family = "twist-const";
  K.twisted = true;
  return K;
}

KMatrix nilpotent_k(int n, int k) {
  if (k < 1 || 2 * k > n) throw DimensionError("nilpotent_k: need 1 <= k with 2k <= n");
  auto [g, rep] = build_sl(n);
  Matrix kappa = Matrix::Zero(n, n);
  for (int a = 0; a < k; ++a) kappa(2 * a, 2 * a + 1) = 1.0;

  KMatrix K;
  K.fn.numerator = {Matrix::Identity(n, n), kappa};
  K.fn.denominator = {Complex(0, 0), Complex(1, 0)};
  K.fn.meta = "nilpotent:sl(" + std::to_string(n) + "):k=" + std::to_string(k);
  K.rep1 = rep;
  K.rep2 = rep;
  K.family = "nilpotent";
  K.params["k"] = static_cast<double>(k);
  return K;
}

KMatrix custom_k(RationalMatrixFn fn, Representation rep1, Representation rep2, Index d_B, bool twisted,
                 std::string family) {
  if (fn.rows() != rep1.d * d_B || fn.cols() != rep2.d * d_B)
    throw DimensionError("custom_k: function shape does not match representations");
  KMatrix K;
  K.fn = std::move(fn);
  K.rep1 = std::move(rep1);
  K.rep2 = std::move(rep2);
  K.d_B = d_B;
  K.twisted = twisted;
  K.family = std::move(family);
  return K;
}

KMatrix custom_k_from_series(const MatrixSeries& s) {
  if (s.rows != s.cols) throw DimensionError("custom_k_from_series: series must be square");
  const int n = static_cast<int>(s.rows);
  if (n < 2) throw DimensionError("custom_k_from_series: dimension must be >= 2");
  auto [g, rep] = build_sl(n);
  RationalMatrixFn fn;
  fn.numerator.resize(static_cast<size_t>(s.order) + 1);
  for (int r = 0; r <= s.order; ++r) fn.numerator[static_cast<size_t>(s.order - r)] = s.coeff(r);
  fn.denominator.assign(static_cast<size_t>(s.order) + 1, Complex(0, 0));
  fn.denominator.back() = Complex(1, 0);
  fn.meta = "custom";
  return custom_k(std::move(fn), rep, rep, 1, false);
}

KMatrix boundary_extend(const KMatrix& K, Index m) {
  if (K.d_B != 1) throw DimensionError("boundary_extend: base K-matrix must have d_B = 1");
  KMatrix out = K;
  out.fn = kron_fn(K.fn, Matrix::Identity(m, m));
  out.d_B = m;
  out.family = K.family + ":xI" + std::to_string(m);
  return out;
}

KMatrix normalized(const KMatrix& K) {
  const Matrix kap = K.kappa();
  if (!is_invertible(kap)) throw NotQuasiClassicalError("normalized: leading coefficient is singular");
  const Matrix kinv = kap.fullPivLu().inverse();
  const double D = static_cast<double>(K.d() * K.d_B);
  // Tr(K(u) kappa^{-1}) / D = p(u) / (D q(u)); dividing K by it leaves
  // numerator D N(u) over denominator p(u).
  std::vector<Complex> p(K.fn.numerator.size());
  for (size_t k = 0; k < K.fn.numerator.size(); ++k) p[k] = (K.fn.numerator[k] * kinv).trace();
  KMatrix out = K;
  for (auto& N : out.fn.numerator) N *= D;
  out.fn.denominator = p;
  return out;
}

KMatrix rescaled(const KMatrix& K, const std::vector<Complex>& p, const std::vector<Complex>& q) {
  KMatrix out = K;
  out.fn = scale_by_rational(K.fn, p, q);
  return out;
}

RMatrixQuad reflection_quad(const KMatrix& K) {
  const int n = static_cast<int>(K.rep1.d);
  RMatrix R = yang_r(n);
  if (!K.twisted) return {R, R, R};
  const Complex gamma = find_crossing(n);
  return {R, crossed_r(R, gamma), transpose_both(R)};
}

namespace {

Matrix eval_named(const RationalMatrixFn& fn, Complex arg, const std::string& name) {
  try {
    return fn.eval(arg);
  } catch (const PoleError&) {
    std::ostringstream os;
    os << name << " hit a pole at argument " << arg;
    throw PoleError(os.str());
  }
}

}  // namespace

double bybe_residual(const RMatrixQuad& quad, const KMatrix& K, Complex u, Complex v) {
  const Index d = K.d();
  if (quad.r11.d1() != d || quad.r12.d1() != d || quad.r22.d1() != d)
    throw DimensionError("bybe_residual: R-matrix and K-matrix dimensions do not match");
  const std::array<Index, 3> dims{d, d, K.d_B};

  const Matrix R11 = embed_pair(eval_named(quad.r11.fn, u - v, "R^(11)"), dims, 0, 1);
  const Matrix K13 = embed_pair(eval_named(K.fn, u, "K1"), dims, 0, 2);
  const Matrix R12_21 = embed_pair(eval_named(quad.r12.fn, u + v, "R^(12)"), dims, 1, 0);
  const Matrix K23 = embed_pair(eval_named(K.fn, v, "K2"), dims, 1, 2);
  const Matrix R12_12 = embed_pair(eval_named(quad.r12.fn, u + v, "R^(12)"), dims, 0, 1);
  const Matrix R22_21 = embed_pair(eval_named(quad.r22.fn, u - v, "R^(22)"), dims, 1, 0);

  return (R11 * K13 * R12_21 * K23 - K23 * R12_12 * K13 * R22_21).norm();
}

ClassicalKappa classical_kappa_family(int n, int p, int q, Complex a0) {
  if (p < 1 || q < 1 || p + q != n) throw DimensionError("classical_kappa_family: need p, q >= 1 with p + q = n");
  Matrix J = Matrix::Identity(n, n);
  J.bottomRightCorner(q, q) *= -1.0;
  const double tau = static_cast<double>(p - q);
  const Complex c = a0 * static_cast<double>(n) / (2.0 * std::sqrt(static_cast<double>(p) * q * n));

  ClassicalKappa kt;
  kt.fn.numerator = {c * Matrix::Identity(n, n), J};
  kt.fn.denominator = {c * tau / static_cast<double>(n), Complex(1, 0)};
  kt.fn.meta = "classical-kappa:sl(" + std::to_string(n) + "):" + std::to_string(p) + "," + std::to_string(q);
  kt.a0 = a0;
  return kt;
}

ClassicalKappa constant_classical_kappa(const Matrix& kappa) {
  ClassicalKappa kt;
  kt.fn = constant_fn(kappa, "classical-kappa:const");
  return kt;
}

double cbybe_residual(const ClassicalKappa& kt, const Representation& rep1, const Representation& rep2, Complex u,
                      Complex v) {
  const Index d = rep1.d;
  if (rep2.d != d || kt.fn.rows() != d) throw DimensionError("cbybe_residual: dimension mismatch");
  if (std::abs(u - v) < 1e-9 || std::abs(u + v) < 1e-9) throw PoleError("cbybe_residual: u = +/- v is a pole");
  const std::array<Index, 3> dims{d, d, 1};

  const Matrix C11 = split_casimir(rep1, rep1);
  const Matrix C22 = split_casimir(rep2, rep2);
  const Matrix C12 = split_casimir(rep1, rep2);
  const Matrix C12_21 = embed_pair(C12, dims, 1, 0);

  const Matrix I = Matrix::Identity(d, d);
  const Matrix K1 = kron(kt.fn.eval(u), I);
  const Matrix K2 = kron(I, kt.fn.eval(v));

  const Matrix t1 = (C11 * K1 * K2 - K1 * K2 * C22) / (u - v);
  const Matrix t2 = (K1 * C12_21 * K2 - K2 * C12 * K1) / (u + v);
  return (t1 + t2).norm();
}

double constant_cbybe_residual(const Matrix& kappa, const Representation& rep1, const Representation& rep2) {
  const Index d = rep1.d;
  const std::array<Index, 3> dims{d, d, 1};
  const Matrix C11 = split_casimir(rep1, rep1);
  const Matrix C22 = split_casimir(rep2, rep2);
  const Matrix C12 = split_casimir(rep1, rep2);
  const Matrix C12_21 = embed_pair(C12, dims, 1, 0);
  const Matrix I = Matrix::Identity(d, d);
  const Matrix K1 = kron(kappa, I);
  const Matrix K2 = kron(I, kappa);
  return (C11 * K1 * K2 - K1 * K2 * C22).norm() + (K1 * C12_21 * K2 - K2 * C12 * K1).norm();
}

// ---------------------------------------------------------------------------
// Order-by-order assembly for the perturbative solvers.
// ---------------------------------------------------------------------------

namespace {

/// Bivariate polynomial sum_{ij} c(i, j) u^i v^j with small integer entries.
struct Poly2 {
  Eigen::MatrixXd c;

  static Poly2 one() {
    Poly2 p;
    p.c = Eigen::MatrixXd::Ones(1, 1);
    return p;
  }

  Poly2 times(const Poly2& o) const {
    Poly2 r;
    r.c = Eigen::MatrixXd::Zero(c.rows() + o.c.rows() - 1, c.cols() + o.c.cols() - 1);
    for (Index i = 0; i < c.rows(); ++i)
      for (Index j = 0; j < c.cols(); ++j) {
        if (c(i, j) == 0.0) continue;
        r.c.block(i, j, o.c.rows(), o.c.cols()) += c(i, j) * o.c;
      }
    return r;
  }
};

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

/// u^pu * v^pv * (u - v)^pm * (u + v)^pp
Poly2 spectral_poly(int pu, int pv, int pm, int pp) {
  Poly2 p;
  p.c = Eigen::MatrixXd::Zero(pu + 1, pv + 1);
  p.c(pu, pv) = 1.0;
  Poly2 minus;
  minus.c = Eigen::MatrixXd::Zero(pm + 1, pm + 1);
  for (int t = 0; t <= pm; ++t) minus.c(pm - t, t) = binom(pm, t) * ((t % 2 == 0) ? 1.0 : -1.0);
  Poly2 plus;
  plus.c = Eigen::MatrixXd::Zero(pp + 1, pp + 1);
  for (int t = 0; t <= pp; ++t) plus.c(pp - t, t) = binom(pp, t);
  return p.times(minus).times(plus);
}

/// Accumulates monomial-wise matrix equations, linear in one vec'd unknown.
class OrderAssembler {
 public:
  OrderAssembler(Index block_rows, Index n_unknowns) : block_rows_(block_rows), n_unknowns_(n_unknowns) {}

  void add_unknown(const Poly2& p, const Matrix& pattern) {
    for_each_monomial(p, [&](Index i, Index j, double w) { block(i, j).A += w * pattern; });
  }

  void add_known(const Poly2& p, const Matrix& term) {
    const Vector t = vec(term);
    for_each_monomial(p, [&](Index i, Index j, double w) { block(i, j).b -= w * t; });
  }

  /// Stacked system plus extra rows; drops all-zero rows but records the
  /// worst inconsistency among dropped ones.
  void finalize(const Matrix& extra_rows, const Vector& extra_b, Matrix& A, Vector& b, double& dropped_defect) const {
    std::vector<const Block*> ordered;
    for (const auto& kv : blocks_) ordered.push_back(&kv.second);
    Index rows = 0;
    dropped_defect = 0.0;
    for (const auto* blk : ordered) {
      if (blk->A.norm() == 0.0) {
        dropped_defect = std::max(dropped_defect, blk->b.norm());
        continue;
      }
      rows += block_rows_;
    }
    A.resize(rows + extra_rows.rows(), n_unknowns_);
    b.resize(rows + extra_rows.rows());
    Index at = 0;
    for (const auto* blk : ordered) {
      if (blk->A.norm() == 0.0) continue;
      A.middleRows(at, block_rows_) = blk->A;
      b.segment(at, block_rows_) = blk->b;
      at += block_rows_;
    }
    A.bottomRows(extra_rows.rows()) = extra_rows;
    b.tail(extra_b.size()) = extra_b;
  }

 private:
  struct Block {
    Matrix A;
    Vector b;
  };

  Block& block(Index i, Index j) {
    auto it = blocks_.find({i, j});
    if (it == blocks_.end()) {
      Block blk;
      blk.A = Matrix::Zero(block_rows_, n_unknowns_);
      blk.b = Vector::Zero(block_rows_);
      it = blocks_.emplace(std::make_pair(i, j), std::move(blk)).first;
    }
    return it->second;
  }

  template <typename F>
  static void for_each_monomial(const Poly2& p, F&& f) {
    for (Index i = 0; i < p.c.rows(); ++i)
      for (Index j = 0; j < p.c.cols(); ++j)
        if (p.c(i, j) != 0.0) f(i, j, p.c(i, j));
  }

  Index block_rows_;
  Index n_unknowns_;
  std::map<std::pair<Index, Index>, Block> blocks_;
};

/// d^4 x d^2 matrix of a linear map on d x d unknowns.
Matrix linear_pattern(Index d, const std::function<Matrix(const Matrix&)>& map) {
  Matrix P(d * d * d * d, d * d);
  Matrix E = Matrix::Zero(d, d);
  Index col = 0;
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      E(i, j) = 1.0;
      P.col(col++) = vec(map(E));
      E(i, j) = 0.0;
    }
  return P;
}

struct SolveContext {
  Index d = 0;
  Matrix kappa;
  Matrix trace_row;  // Tr(k kappa^{-1}) = 0 gauge
  std::vector<Matrix> known;

  void init(const Matrix& kap) {
    d = kap.rows();
    kappa = kap;
    const Matrix kinv = kap.fullPivLu().inverse();
    trace_row = vec(kinv.transpose()).transpose();
    known = {kap};
  }
};

struct OrderOutcome {
  Matrix particular;
  int nullspace_dim = 0;
  std::vector<Matrix> nullspace;
  double inconsistency = 0.0;
  int reduced_nullspace_dim = 0;
};

OrderOutcome solve_block_system(const SolveContext& ctx, OrderAssembler& assembler,
                                const std::vector<Matrix>& raw_patterns, int r) {
  const Index d = ctx.d;
  Matrix A;
  Vector b;
  double dropped = 0.0;
  assembler.finalize(ctx.trace_row, Vector::Zero(1), A, b, dropped);

  OrderOutcome out;
  const Vector x = solve_least_squares(A, b);
  out.particular = unvec(x, d, d);
  out.inconsistency = std::max(dropped, (A * x - b).norm());
  Matrix ker = kernel_basis(A);
  out.nullspace_dim = static_cast<int>(ker.cols());
  ker = sparsify_columns(ker);
  for (Index c = 0; c < ker.cols(); ++c) out.nullspace.push_back(unvec(ker.col(c), d, d));

  // Reduced system: the spectral structures isolated in the r = 1 and r > 1
  // analyses (three independent combinations at r = 1, all four beyond).
  std::vector<Matrix> reduced;
  if (r == 1) {
    reduced = {raw_patterns[0] + raw_patterns[1], raw_patterns[1] + raw_patterns[2],
               raw_patterns[1] + raw_patterns[3]};
  } else {
    reduced = raw_patterns;
  }
  Matrix Ar(static_cast<Index>(reduced.size()) * d * d * d * d + 1, d * d);
  for (size_t i = 0; i < reduced.size(); ++i) Ar.middleRows(static_cast<Index>(i) * d * d * d * d, d * d * d * d) = reduced[i];
  Ar.bottomRows(1) = ctx.trace_row;
  out.reduced_nullspace_dim = static_cast<int>(kernel_basis(Ar).cols());
  return out;
}

}  // namespace

PerturbativeResult perturbative_solve(const Matrix& kappa, const RMatrixQuad& quad, int order, double tol) {
  const Index d = kappa.rows();
  if (quad.r11.d1() != d) throw DimensionError("perturbative_solve: kappa and R-matrices mismatch");
  if (!is_invertible(kappa)) throw NotQuasiClassicalError("perturbative_solve: kappa is singular");
  const double seed = constant_cbybe_residual(kappa, quad.r12.rep1, quad.r12.rep2);
  if (seed > 1e-8 * std::max(1.0, std::pow(kappa.norm(), 2)))
    throw InvalidSeedError("perturbative_solve: kappa does not satisfy the constant classical reflection equation (residual " +
                           std::to_string(seed) + ")");

  const std::array<Index, 3> dims{d, d, 1};
  const MatrixSeries s11 = expand(quad.r11.fn, order + 1);
  const MatrixSeries s12 = expand(quad.r12.fn, order + 1);
  const MatrixSeries s22 = expand(quad.r22.fn, order + 1);
  // Leg embeddings fixed once: R factors sit on legs (1,2) or (2,1).
  std::vector<Matrix> e11_12(static_cast<size_t>(order) + 2), e12_12(static_cast<size_t>(order) + 2),
      e12_21(static_cast<size_t>(order) + 2), e22_21(static_cast<size_t>(order) + 2);
  for (int c = 0; c <= order + 1; ++c) {
    e11_12[static_cast<size_t>(c)] = embed_pair(s11.coeff(c), dims, 0, 1);
    e12_12[static_cast<size_t>(c)] = embed_pair(s12.coeff(c), dims, 0, 1);
    e12_21[static_cast<size_t>(c)] = embed_pair(s12.coeff(c), dims, 1, 0);
    e22_21[static_cast<size_t>(c)] = embed_pair(s22.coeff(c), dims, 1, 0);
  }
  const Matrix I = Matrix::Identity(d, d);
  auto leg1 = [&](const Matrix& k) { return kron(k, I); };
  auto leg2 = [&](const Matrix& k) { return kron(I, k); };

  SolveContext ctx;
  ctx.init(kappa);

  PerturbativeResult result;
  for (int r = 1; r <= order; ++r) {
    const int m = r + 1;
    OrderAssembler assembler(d * d * d * d, d * d);

    const Matrix K2kap = leg2(kappa);
    const Matrix K1kap = leg1(kappa);
    // Unknown-bearing spectral structures; ordered as the (4)..(7) maps.
    const Matrix P4 = linear_pattern(d, [&](const Matrix& Z) {
      return (e11_12[1] * leg1(Z) * K2kap - K2kap * leg1(Z) * e22_21[1]).eval();
    });
    const Matrix P5 = linear_pattern(d, [&](const Matrix& Z) {
      return (e11_12[1] * K1kap * leg2(Z) - leg2(Z) * K1kap * e22_21[1]).eval();
    });
    const Matrix P6 = linear_pattern(d, [&](const Matrix& Z) {
      return (leg1(Z) * e12_21[1] * K2kap - K2kap * e12_12[1] * leg1(Z)).eval();
    });
    const Matrix P7 = linear_pattern(d, [&](const Matrix& Z) {
      return (K1kap * e12_21[1] * leg2(Z) - leg2(Z) * e12_12[1] * K1kap).eval();
    });

    assembler.add_unknown(spectral_poly(m - r, m, m - 1, m), P4);
    assembler.add_unknown(spectral_poly(m, m - r, m - 1, m), P5);
    assembler.add_unknown(spectral_poly(m - r, m, m, m - 1), P6);
    assembler.add_unknown(spectral_poly(m, m - r, m, m - 1), P7);

    // All remaining coefficient identities at this order.
    for (int a = 0; a <= std::min(r - 1, m); ++a)
      for (int b = 0; b <= std::min(r - 1, m - a); ++b)
        for (int c = 0; c <= m - a - b; ++c) {
          const int d4 = m - a - b - c;
          if (c == 0 && d4 == 0) continue;  // leg-disjoint K factors commute
          const Matrix& ka = ctx.known[static_cast<size_t>(a)];
          const Matrix& kb = ctx.known[static_cast<size_t>(b)];
          const Matrix lhs = e11_12[static_cast<size_t>(c)] * leg1(ka) * e12_21[static_cast<size_t>(d4)] * leg2(kb);
          const Matrix rhs = leg2(kb) * e12_12[static_cast<size_t>(d4)] * leg1(ka) * e22_21[static_cast<size_t>(c)];
          assembler.add_known(spectral_poly(m - a, m - b, m - c, m - d4), lhs - rhs);
        }

    OrderOutcome oc = solve_block_system(ctx, assembler, {P4, P5, P6, P7}, r);
    if (oc.inconsistency > tol * 10)
      result.anomalies.push_back("order " + std::to_string(r) + ": inconsistent system, residual " +
                                 std::to_string(oc.inconsistency));
    if (oc.reduced_nullspace_dim != oc.nullspace_dim)
      result.anomalies.push_back("order " + std::to_string(r) + ": full coefficient set changes nullspace (" +
                                 std::to_string(oc.nullspace_dim) + " vs reduced " +
                                 std::to_string(oc.reduced_nullspace_dim) + ")");
    result.particular.push_back(oc.particular);
    result.nullspace_dims.push_back(oc.nullspace_dim);
    result.nullspace_bases.push_back(oc.nullspace);
    ctx.known.push_back(oc.particular);
  }
  return result;
}

PerturbativeResult classical_perturbative_solve(const Matrix& kappa, const Representation& rep1,
                                                const Representation& rep2, int order, double tol) {
  const Index d = kappa.rows();
  if (rep1.d != d || rep2.d != d) throw DimensionError("classical_perturbative_solve: dimension mismatch");
  if (!is_invertible(kappa)) throw NotQuasiClassicalError("classical_perturbative_solve: kappa is singular");
  const double seed = constant_cbybe_residual(kappa, rep1, rep2);
  if (seed > 1e-8 * std::max(1.0, std::pow(kappa.norm(), 2)))
    throw InvalidSeedError("classical_perturbative_solve: kappa fails the constant classical reflection equation");

  const std::array<Index, 3> dims{d, d, 1};
  const Matrix C11 = split_casimir(rep1, rep1);
  const Matrix C22 = split_casimir(rep2, rep2);
  const Matrix C12 = split_casimir(rep1, rep2);
  const Matrix C12_21 = embed_pair(C12, dims, 1, 0);
  const Matrix I = Matrix::Identity(d, d);
  auto leg1 = [&](const Matrix& k) { return kron(k, I); };
  auto leg2 = [&](const Matrix& k) { return kron(I, k); };

  SolveContext ctx;
  ctx.init(kappa);

  PerturbativeResult result;
  for (int r = 1; r <= order; ++r) {
    OrderAssembler assembler(d * d * d * d, d * d);

    const Matrix K1kap = leg1(kappa);
    const Matrix K2kap = leg2(kappa);
    const Matrix P4 = linear_pattern(d, [&](const Matrix& Z) {
      return (C11 * leg1(Z) * K2kap - leg1(Z) * K2kap * C22).eval();
    });
    const Matrix P5 = linear_pattern(d, [&](const Matrix& Z) {
      return (C11 * K1kap * leg2(Z) - K1kap * leg2(Z) * C22).eval();
    });
    const Matrix P6 = linear_pattern(d, [&](const Matrix& Z) {
      return (leg1(Z) * C12_21 * K2kap - K2kap * C12 * leg1(Z)).eval();
    });
    const Matrix P7 = linear_pattern(d, [&](const Matrix& Z) {
      return (K1kap * C12_21 * leg2(Z) - leg2(Z) * C12 * K1kap).eval();
    });

    // Multiplying the order-x^{r+1} identity by u^r v^r (u-v)(u+v).
    assembler.add_unknown(spectral_poly(0, r, 0, 1), P4);
    assembler.add_unknown(spectral_poly(r, 0, 0, 1), P5);
    assembler.add_unknown(spectral_poly(0, r, 1, 0), P6);
    assembler.add_unknown(spectral_poly(r, 0, 1, 0), P7);

    for (int a = 1; a < r; ++a) {
      const int b = r - a;
      const Matrix& ka = ctx.known[static_cast<size_t>(a)];
      const Matrix& kb = ctx.known[static_cast<size_t>(b)];
      const Matrix tm = C11 * leg1(ka) * leg2(kb) - leg1(ka) * leg2(kb) * C22;
      const Matrix tp = leg1(ka) * C12_21 * leg2(kb) - leg2(kb) * C12 * leg1(ka);
      assembler.add_known(spectral_poly(r - a, r - b, 0, 1), tm);
      assembler.add_known(spectral_poly(r - a, r - b, 1, 0), tp);
    }

    OrderOutcome oc = solve_block_system(ctx, assembler, {P4, P5, P6, P7}, r);
    if (oc.inconsistency > tol * 10)
      result.anomalies.push_back("order " + std::to_string(r) + ": inconsistent system, residual " +
                                 std::to_string(oc.inconsistency));
    result.particular.push_back(oc.particular);
    result.nullspace_dims.push_back(oc.nullspace_dim);
    result.nullspace_bases.push_back(oc.nullspace);
    ctx.known.push_back(oc.particular);
  }
  return result;
}

double symmetry_residual(const KMatrix& K, const Vector& x_coords, const Matrix& rhoB_X, Complex u) {
  if (rhoB_X.rows() != K.d_B || rhoB_X.cols() != K.d_B)
    throw DimensionError("symmetry_residual: boundary image must be d_B x d_B");
  const Matrix Ku = K.fn.eval(u);
  const Matrix IB = Matrix::Identity(K.d_B, K.d_B);
  const Matrix lhs = kron(K.rep1.apply(x_coords), IB) * Ku - Ku * kron(K.rep2.apply(x_coords), IB);
  const Matrix Zfull = kron(Matrix::Identity(K.d(), K.d()), rhoB_X);
  return (lhs + Zfull * Ku - Ku * Zfull).norm();
}

std::vector<Complex> default_spectral_samples(int count) {
  std::vector<Complex> out;
  out.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) out.push_back(1.1 * std::exp(Complex(0, 0.4 + 0.55 * k)));
  return out;
}

namespace {

struct SymmetryKernel {
  Matrix kernel;      // columns (x; vec Z) with Tr Z = 0
  Index algebra_rank = 0;
};

SymmetryKernel symmetry_kernel(const KMatrix& K, int sample_count) {
  const Index d = K.d();
  const Index dB = K.d_B;
  const Index dim = K.rep1.algebra->dim;
  const Index nz = dB * dB;
  const auto samples = default_spectral_samples(sample_count);

  const Matrix IB = Matrix::Identity(dB, dB);
  const Matrix Id = Matrix::Identity(d, d);
  Matrix A(static_cast<Index>(sample_count) * d * dB * d * dB + 1, dim + nz);
  Index at = 0;
  for (const Complex& u : samples) {
    const Matrix Ku = K.fn.eval(u);
    for (Index a = 0; a < dim; ++a) {
      const Matrix Y1 = kron(K.rep1.images[static_cast<size_t>(a)], IB);
      const Matrix Y2 = kron(K.rep2.images[static_cast<size_t>(a)], IB);
      A.block(at, a, Ku.size(), 1) = vec(Y1 * Ku - Ku * Y2);
    }
    for (Index p = 0; p < dB; ++p)
      for (Index q = 0; q < dB; ++q) {
        Matrix Z = Matrix::Zero(dB, dB);
        Z(p, q) = 1.0;
        const Matrix Zf = kron(Id, Z);
        A.block(at, dim + q * dB + p, Ku.size(), 1) = vec(Zf * Ku - Ku * Zf);
      }
    at += Ku.size();
  }
  // Gauge: Tr Z = 0 removes the trivial (0, identity) direction.
  A.row(at).setZero();
  for (Index p = 0; p < dB; ++p) A(at, dim + p * dB + p) = 1.0;

  SymmetryKernel out;
  out.kernel = kernel_basis(A);
  out.algebra_rank = column_rank(out.kernel.topRows(dim));
  return out;
}

}  // namespace

ResidualSymmetry residual_symmetry(const KMatrix& K, int sample_count) {
  const SymmetryKernel base = symmetry_kernel(K, sample_count);
  const SymmetryKernel refined = symmetry_kernel(K, sample_count + 4);
  if (base.kernel.cols() != refined.kernel.cols() || base.algebra_rank != refined.algebra_rank)
    throw SamplingError("residual_symmetry: kernel dimension not stabilized; increase sample_count");

  const Index dim = K.rep1.algebra->dim;
  ResidualSymmetry out;
  out.algebra_part.algebra = K.rep1.algebra;
  out.boundary_only_dim = base.kernel.cols() - base.algebra_rank;

  const Matrix xspan = sparsify_columns(orthonormal_columns(base.kernel.topRows(dim)));
  const Matrix IB = Matrix::Identity(K.d_B, K.d_B);
  for (Index c = 0; c < xspan.cols(); ++c) {
    const Vector x = xspan.col(c);
    out.algebra_part.vectors.push_back(x);
    // The boundary image is the least-squares completion of x to a kernel
    // pair; unique modulo boundary-only directions.
    const auto samples = default_spectral_samples(sample_count);
    Matrix Az(static_cast<Index>(sample_count) * K.d() * K.d_B * K.d() * K.d_B + 1, K.d_B * K.d_B);
    Vector bz(Az.rows());
    Index at = 0;
    const Matrix R1 = kron(K.rep1.apply(x), IB);
    const Matrix R2 = kron(K.rep2.apply(x), IB);
    const Matrix Id = Matrix::Identity(K.d(), K.d());
    for (const Complex& u : samples) {
      const Matrix Ku = K.fn.eval(u);
      for (Index p = 0; p < K.d_B; ++p)
        for (Index q = 0; q < K.d_B; ++q) {
          Matrix Z = Matrix::Zero(K.d_B, K.d_B);
          Z(p, q) = 1.0;
          const Matrix Zf = kron(Id, Z);
          Az.block(at, q * K.d_B + p, Ku.size(), 1) = vec(Zf * Ku - Ku * Zf);
        }
      bz.segment(at, Ku.size()) = -vec(R1 * Ku - Ku * R2);
      at += Ku.size();
    }
    Az.row(at).setZero();
    for (Index p = 0; p < K.d_B; ++p) Az(at, p * K.d_B + p) = 1.0;
    bz(at) = 0.0;
    out.boundary_images.push_back(unvec(solve_least_squares(Az, bz), K.d_B, K.d_B));
  }
  return out;
}

bool irreducibility_check(const KMatrix& K, int sample_count) {
  if (K.d_B == 1) return true;
  const Index dB = K.d_B;
  const auto samples = default_spectral_samples(sample_count);
  std::vector<Matrix> blocks;
  for (const Complex& u : samples) {
    const Matrix Ku = K.fn.eval(u);
    for (Index i = 0; i < K.d(); ++i)
      for (Index j = 0; j < K.d(); ++j) {
        Matrix psi = Ku.block(i * dB, j * dB, dB, dB);
        if (psi.norm() > 1e-14) blocks.push_back(std::move(psi));
      }
  }
  Matrix A(static_cast<Index>(blocks.size()) * dB * dB, dB * dB);
  Index at = 0;
  for (const auto& psi : blocks) {
    for (Index p = 0; p < dB; ++p)
      for (Index q = 0; q < dB; ++q) {
        Matrix Z = Matrix::Zero(dB, dB);
        Z(p, q) = 1.0;
        A.block(at, q * dB + p, dB * dB, 1) = vec(Z * psi - psi * Z);
      }
    at += dB * dB;
  }
  return kernel_basis(A).cols() == 1;
}

K1StructureReport k1_structure_check(const Representation& rep1, const Matrix& kappa, const SubalgebraBasis& h,
                                     const std::vector<Matrix>& rhoB, const Matrix& k1) {
  if (rhoB.size() != static_cast<size_t>(h.dim()))
    throw DimensionError("k1_structure_check: boundary images not aligned with the subalgebra basis");
  const Index d = rep1.d;
  const Index dB = rhoB.empty() ? 1 : rhoB.front().rows();
  if (k1.rows() != d * dB || k1.cols() != d * dB) throw DimensionError("k1_structure_check: k1 has the wrong shape");

  K1StructureReport report;

  // rhoB must represent h: compare [Z_a, Z_b] with the h-structure constants.
  const auto& g = *h.algebra;
  const Matrix hstack = stack_columns(h.vectors, g.dim);
  double rep_residual = 0.0;
  for (Index a = 0; a < h.dim(); ++a)
    for (Index b = 0; b < h.dim(); ++b) {
      const Vector br = g.bracket(h.vectors[static_cast<size_t>(a)], h.vectors[static_cast<size_t>(b)]);
      const Vector coeff = solve_least_squares(hstack, br);
      Matrix expect = Matrix::Zero(dB, dB);
      for (Index e = 0; e < h.dim(); ++e) expect += coeff(e) * rhoB[static_cast<size_t>(e)];
      const Matrix Za = rhoB[static_cast<size_t>(a)];
      const Matrix Zb = rhoB[static_cast<size_t>(b)];
      rep_residual = std::max(rep_residual, (Za * Zb - Zb * Za - expect).norm());
    }
  report.boundary_rep_residual = rep_residual;
  if (rep_residual > 1e-8) throw Error("k1_structure_check: rhoB is not a representation of h");

  const Matrix kinv = kappa.fullPivLu().inverse();
  const Matrix IB = Matrix::Identity(dB, dB);
  const Matrix k1t = k1 * kron(kinv, IB);

  // Lemma decomposition: k1t = (1/2) c^{(h,1)} (x) 1 + 2 C^{(h,1B)} + D (x) 1,
  // D ranging over the commutant of rep1 inside End(C^d).
  const Matrix base = 0.5 * kron(quadratic_casimir(rep1, h), IB) + 2.0 * boundary_casimir(rep1, h, rhoB);
  Matrix Lc(rep1.algebra->dim * d * d, d * d);
  for (Index a = 0; a < rep1.algebra->dim; ++a) {
    const Matrix& Y = rep1.images[static_cast<size_t>(a)];
    for (Index p = 0; p < d; ++p)
      for (Index q = 0; q < d; ++q) {
        Matrix E = Matrix::Zero(d, d);
        E(p, q) = 1.0;
        Lc.block(a * d * d, q * d + p, d * d, 1) = vec(E * Y - Y * E);
      }
  }
  const Matrix commutant = kernel_basis(Lc);
  Matrix fit(k1t.size(), commutant.cols());
  for (Index c = 0; c < commutant.cols(); ++c) fit.col(c) = vec(kron(unvec(commutant.col(c), d, d), IB));
  const Vector resid = vec(k1t - base);
  const Vector coef = solve_least_squares(fit, resid);
  report.decomposition_defect = (resid - fit * coef).norm();

  // u^4-coefficient identity: 2 [C^{(h,11)}, k1t_{23}] + [k1t_{13}, k1t_{23}] = 0.
  const std::array<Index, 3> dims{d, d, dB};
  const Matrix Ch3 = embed_pair(restricted_casimir(rep1, rep1, h), dims, 0, 1);
  const Matrix k13 = embed_pair(k1t, dims, 0, 2);
  const Matrix k23 = embed_pair(k1t, dims, 1, 2);
  auto comm = [](const Matrix& X, const Matrix& Y) { return X * Y - Y * X; };
  report.x2a_residual = (2.0 * comm(Ch3, k23) + comm(k13, k23)).norm();
  return report;
}

}  // namespace kmx
