#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kmx/lie_algebra.hpp"
#include "kmx/linalg.hpp"
#include "kmx/tensor.hpp"
#include "oracles.hpp"

using namespace kmx;

namespace {

SubalgebraBasis span_of(const Representation& rep, const std::vector<Matrix>& mats) {
  SubalgebraBasis h;
  h.algebra = rep.algebra;
  for (const auto& M : mats) h.vectors.push_back(coordinates(rep, M));
  return h;
}

Matrix unit(int n, int i, int j) {
  Matrix E = Matrix::Zero(n, n);
  E(i, j) = 1.0;
  return E;
}

// Fixed algebra of the diag(I_p, -I_q) involution: block-traceless matrices.
SubalgebraBasis aiii_subalgebra(const Representation& rep, int p, int q) {
  const int n = p + q;
  std::vector<Matrix> mats;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i != j) mats.push_back(unit(n, i, j));
  for (int i = p; i < n; ++i)
    for (int j = p; j < n; ++j)
      if (i != j) mats.push_back(unit(n, i, j));
  for (int i = 0; i + 1 < p; ++i) mats.push_back(unit(n, i, i) - unit(n, i + 1, i + 1));
  for (int i = p; i + 1 < n; ++i) mats.push_back(unit(n, i, i) - unit(n, i + 1, i + 1));
  Matrix xc = Matrix::Zero(n, n);
  for (int i = 0; i < p; ++i) xc(i, i) = q;
  for (int i = p; i < n; ++i) xc(i, i) = -p;
  mats.push_back(xc);
  return span_of(rep, mats);
}

}  // namespace

TEST_CASE("sl(n) construction and invariants") {
  for (int n : {2, 3, 4, 5}) {
    CAPTURE(n);
    auto [g, rep] = build_sl(n);
    CHECK(g->dim == n * n - 1);
    CHECK(rep.d == n);
    CHECK(jacobi_residual(*g) <= 1e-12);
    CHECK(killing_invariance_residual(*g) <= 1e-12);
    CHECK(homomorphism_residual(rep) <= 1e-12);
    CHECK((g->killing * g->killing_inv - Matrix::Identity(g->dim, g->dim)).norm() <= 1e-12);
    // Antisymmetry f_AB^C = -f_BA^C.
    double anti = 0.0;
    for (Index A = 0; A < g->dim; ++A)
      for (Index B = 0; B < g->dim; ++B)
        for (Index C = 0; C < g->dim; ++C)
          anti = std::max(anti, std::abs(g->structure_constant(A, B, C) + g->structure_constant(B, A, C)));
    CHECK(anti == 0.0);
  }
  CHECK_THROWS_AS(build_sl(1), DimensionError);
}

TEST_CASE("sl(2) Killing values frozen from the ad-trace oracle") {
  auto [g, rep] = build_sl(2);
  // Basis order: E(1,2), E(2,1), H(1).
  const Index E = 0, F = 1, H = 2;
  CHECK(std::abs(g->killing(H, H) - Complex(8, 0)) <= 1e-13);
  CHECK(std::abs(g->killing(E, F) - Complex(4, 0)) <= 1e-13);
  CHECK(std::abs(g->killing(E, E)) <= 1e-13);

  const Matrix K_oracle = oracle::killing_by_brackets(rep.images);
  CHECK((g->killing - K_oracle).norm() <= 1e-10);
}

TEST_CASE("Killing matches the independent oracle for sl(3)") {
  auto [g, rep] = build_sl(3);
  CHECK((g->killing - oracle::killing_by_brackets(rep.images)).norm() <= 1e-9);
}

TEST_CASE("metric proportionality Tr(Y_A Y_B) = c B_AB") {
  for (int n : {2, 3, 4}) {
    auto [g, rep] = build_sl(n);
    double lo = 1e300, hi = 0.0;
    for (Index A = 0; A < g->dim; ++A)
      for (Index B = 0; B < g->dim; ++B) {
        if (std::abs(g->killing(A, B)) < 1e-9) continue;
        const Complex ratio =
            (rep.images[static_cast<size_t>(A)] * rep.images[static_cast<size_t>(B)]).trace() / g->killing(A, B);
        lo = std::min(lo, std::abs(ratio));
        hi = std::max(hi, std::abs(ratio));
      }
    CHECK((hi - lo) / hi <= 1e-10);
    CHECK(std::abs(hi - 1.0 / (2.0 * n)) <= 1e-12);  // the stored metric_ratio
  }
}

TEST_CASE("contragredient representation") {
  auto [g2, rep2] = build_sl(2);
  const Representation cg = contragredient(rep2);
  Matrix mH(2, 2);
  mH << -1, 0, 0, 1;
  CHECK((cg.images[2] - mH).norm() == 0.0);  // Y_H -> -Y_H^T
  CHECK(cg.kind == RepKind::contragredient);

  auto [g3, rep3] = build_sl(3);
  CHECK(homomorphism_residual(contragredient(rep3)) <= 1e-14);

  const Representation twice = contragredient(contragredient(rep3));
  double diff = 0.0;
  for (size_t i = 0; i < rep3.images.size(); ++i) diff = std::max(diff, (twice.images[i] - rep3.images[i]).norm());
  CHECK(diff == 0.0);
}

TEST_CASE("split Casimir against the swap-operator oracle") {
  for (int n : {2, 3, 4}) {
    CAPTURE(n);
    auto [g, rep] = build_sl(n);
    const Matrix C = split_casimir(rep, rep);
    CHECK((C - oracle::casimir_by_swap(n)).norm() <= 1e-12);
  }
}

TEST_CASE("split Casimir sl(2) closed form (1/4)(P - 1/2)") {
  auto [g, rep] = build_sl(2);
  const Matrix C = split_casimir(rep, rep);
  const Matrix expected = 0.25 * (swap_operator(2, 2) - 0.5 * Matrix::Identity(4, 4));
  CHECK((C - expected).norm() <= 1e-14);
}

TEST_CASE("split Casimir invariance and swap symmetry") {
  auto [g, rep] = build_sl(3);
  const Matrix C = split_casimir(rep, rep);
  const Matrix I3 = Matrix::Identity(3, 3);
  double worst = 0.0;
  for (const auto& Y : rep.images) {
    const Matrix D = kron(Y, I3) + kron(I3, Y);
    worst = std::max(worst, (C * D - D * C).norm());
  }
  CHECK(worst <= 1e-13);

  const Matrix P = swap_operator(3, 3);
  CHECK((P * C * P - C).norm() <= 1e-13);
}

TEST_CASE("split Casimir rejects mismatched algebras") {
  auto [g2, rep2] = build_sl(2);
  auto [g3, rep3] = build_sl(3);
  CHECK_THROWS_AS(split_casimir(rep2, rep3), DimensionError);
}

TEST_CASE("restricted Casimir") {
  auto [g, rep] = build_sl(3);

  SUBCASE("h = g reproduces the split Casimir") {
    SubalgebraBasis full;
    full.algebra = g;
    for (Index A = 0; A < g->dim; ++A) {
      Vector e = Vector::Zero(g->dim);
      e(A) = 1.0;
      full.vectors.push_back(e);
    }
    CHECK((restricted_casimir(rep, rep, full) - split_casimir(rep, rep)).norm() <= 1e-11);
  }

  SUBCASE("AIII split C = C_h + C_f and central quadratic Casimir") {
    const SubalgebraBasis h = aiii_subalgebra(rep, 2, 1);
    CHECK(h.dim() == 4);
    CHECK(closure_residual(h) <= 1e-12);
    const Matrix Ch = restricted_casimir(rep, rep, h);
    const Matrix Cf = casimir_complement(rep, rep, h);
    CHECK((Ch + Cf - split_casimir(rep, rep)).norm() <= 1e-12);

    const Matrix ch1 = quadratic_casimir(rep, h);
    double worst = 0.0;
    for (const auto& v : h.vectors) {
      const Matrix Y = rep.apply(v);
      worst = std::max(worst, (ch1 * Y - Y * ch1).norm());
    }
    CHECK(worst <= 1e-12);
  }

  SUBCASE("degenerate restricted metric is an error") {
    const SubalgebraBasis line = span_of(rep, {unit(3, 0, 1)});
    CHECK_THROWS_AS(restricted_casimir(rep, rep, line), SingularMetricError);
  }
}

TEST_CASE("centralizer") {
  SUBCASE("sl(2), kappa = E12") {
    auto [g, rep] = build_sl(2);
    const SubalgebraBasis h = centralizer(rep, unit(2, 0, 1));
    CHECK(h.dim() == 1);
    const Vector e12 = coordinates(rep, unit(2, 0, 1));
    CHECK(largest_principal_angle(stack_columns(h.vectors, g->dim), stack_columns({e12}, g->dim)) <= 1e-10);
  }
  SUBCASE("sl(2), kappa = I") {
    auto [g, rep] = build_sl(2);
    CHECK(centralizer(rep, Matrix::Identity(2, 2)).dim() == 3);
  }
  SUBCASE("sl(4), one Jordan block") {
    auto [g, rep] = build_sl(4);
    CHECK(centralizer(rep, unit(4, 0, 1)).dim() == 9);
  }
  SUBCASE("closure property over random kappa") {
    auto gen = oracle::rng(20240811);
    for (int n : {2, 3, 4}) {
      auto [g, rep] = build_sl(n);
      for (int trial = 0; trial < 50; ++trial) {
        const Matrix kappa = oracle::random_matrix(gen, n, n);
        const SubalgebraBasis h = centralizer(rep, kappa);
        CHECK(closure_residual(h) <= 1e-10);
      }
    }
  }
}

TEST_CASE("classify_subalgebra") {
  SUBCASE("s(gl(2)+gl(1)) in sl(3) is reductive") {
    auto [g, rep] = build_sl(3);
    const SubalgebraReport r = classify_subalgebra(aiii_subalgebra(rep, 2, 1));
    CHECK(r.dim == 4);
    CHECK(r.tag == AlgebraClass::reductive);
    CHECK(r.center_dim == 1);
    CHECK(r.radical_dim == 1);
  }
  SUBCASE("one nilpotent line is solvable") {
    auto [g, rep] = build_sl(2);
    const SubalgebraReport r = classify_subalgebra(span_of(rep, {unit(2, 0, 1)}));
    CHECK(r.dim == 1);
    CHECK(r.tag == AlgebraClass::solvable);
  }
  SUBCASE("centralizer of E12 in sl(4) is semidirect") {
    auto [g, rep] = build_sl(4);
    const SubalgebraReport r = classify_subalgebra(centralizer(rep, unit(4, 0, 1)));
    CHECK(r.dim == 9);
    CHECK(r.tag == AlgebraClass::semidirect);
    CHECK(r.radical_dim == 6);
    CHECK(r.levi_dim == 3);
  }
  SUBCASE("full sl(n) is semisimple") {
    for (int n : {2, 3, 4, 5}) {
      auto [g, rep] = build_sl(n);
      SubalgebraBasis full;
      full.algebra = g;
      for (Index A = 0; A < g->dim; ++A) {
        Vector e = Vector::Zero(g->dim);
        e(A) = 1.0;
        full.vectors.push_back(e);
      }
      CHECK(classify_subalgebra(full).tag == AlgebraClass::semisimple);
    }
  }
  SUBCASE("Cartan subalgebra is solvable (abelian)") {
    auto [g, rep] = build_sl(3);
    const SubalgebraReport r =
        classify_subalgebra(span_of(rep, {unit(3, 0, 0) - unit(3, 1, 1), unit(3, 1, 1) - unit(3, 2, 2)}));
    CHECK(r.tag == AlgebraClass::solvable);
    CHECK(r.derived_series.back() == 0);
    CHECK(r.center_dim == 2);
  }
  SUBCASE("non-closed input throws") {
    auto [g, rep] = build_sl(3);
    CHECK_THROWS_AS(classify_subalgebra(span_of(rep, {unit(3, 0, 1), unit(3, 1, 2)})), NotClosedError);
  }
}

TEST_CASE("trace-orthogonal decompositions of End(C^d)") {
  auto [g, rep] = build_sl(3);

  SUBCASE("V and its complement") {
    const EndDecomposition dec = end_decomposition(rep);
    CHECK(static_cast<Index>(dec.sub_basis.size() + dec.complement_basis.size()) == 9);
    double worst = 0.0;
    for (const auto& Y : dec.sub_basis)
      for (const auto& Z : dec.complement_basis) worst = std::max(worst, std::abs((Y * Z).trace()));
    CHECK(worst <= 1e-12);
    std::vector<Vector> all;
    for (const auto& Y : dec.sub_basis) all.push_back(vec(Y));
    for (const auto& Z : dec.complement_basis) all.push_back(vec(Z));
    CHECK(column_rank(stack_columns(all, 9)) == 9);
  }

  SUBCASE("W = rho(h) and its complement") {
    const EndDecomposition dec = end_decomposition(rep, aiii_subalgebra(rep, 2, 1));
    CHECK(static_cast<Index>(dec.sub_basis.size()) == 4);
    CHECK(static_cast<Index>(dec.complement_basis.size()) == 5);
    double worst = 0.0;
    for (const auto& Y : dec.sub_basis)
      for (const auto& Z : dec.complement_basis) worst = std::max(worst, std::abs((Y * Z).trace()));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("faithfulness and coordinates") {
  auto [g, rep] = build_sl(3);
  CHECK(is_faithful(rep));
  auto gen = oracle::rng(7);
  Matrix Z = oracle::random_matrix(gen, 3, 3);
  Z -= (Z.trace() / 3.0) * Matrix::Identity(3, 3);
  double off = 0.0;
  const Vector c = coordinates(rep, Z, &off);
  CHECK(off <= 1e-12);
  CHECK((rep.apply(c) - Z).norm() <= 1e-12);
  const Vector c_oracle = oracle::lstsq_coordinates(rep.images, Z);
  CHECK((c - c_oracle).norm() <= 1e-10);
}
