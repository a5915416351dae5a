#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ffqls/opspace.hpp"
#include "test_support.hpp"

using namespace ffqls;
using namespace testsupport;

namespace {
const Tolerances tol{};

OperatorSubspace span_of(std::vector<Matrix> ops) {
  return orthonormalize(ops, tol.rank_tol);
}

Matrix sep_line_density(int n) {
  const int D = 1 << n;
  Matrix rho = Matrix::Zero(D, D);
  rho(0, 0) = 0.5;
  rho(D - 1, D - 1) = 0.5;
  return rho;
}
}  // namespace

TEST_CASE("orthonormalize drops scalar multiples and dependencies") {
  const Matrix I = Matrix::Identity(2, 2);
  const auto one = span_of({I, 2.0 * I});
  CHECK(one.dim() == 1);
  CHECK((one.basis()[0] - I / std::sqrt(2.0)).norm() <= 1e-12);

  const auto two = span_of({pauli_x(), pauli_y(), pauli_x() + pauli_y()});
  CHECK(two.dim() == 2);
  CHECK(two.orthonormality_residual() <= tol.tol_lin);
}

TEST_CASE("orthonormalize of generic random set has full rank") {
  std::mt19937_64 rng(101);
  std::vector<Matrix> spanners;
  for (int k = 0; k < 64; ++k) spanners.push_back(random_matrix(4, 4, rng));
  CHECK(orthonormalize(spanners, tol.rank_tol).dim() == 16);

  const std::vector<Matrix> zeros = {Matrix::Zero(3, 3)};
  CHECK(orthonormalize(zeros, tol.rank_tol).dim() == 0);
}

TEST_CASE("schmidt span of a pure product state is one-dimensional") {
  SubsystemLayout layout({2, 2, 2});
  std::mt19937_64 rng(103);
  const Vector a = random_pure(2, rng), b = random_pure(2, rng), c = random_pure(2, rng);
  const Vector psi = kron(kron(a, b), c);
  const Matrix rho = psi * psi.adjoint();
  const std::vector<int> nb{0, 1};
  CHECK(schmidt_span(rho, nb, layout, tol).dim() == 1);
}

TEST_CASE("schmidt span of the separable line state on a pair") {
  SubsystemLayout layout({2, 2, 2});
  const Matrix rho = sep_line_density(3);
  const std::vector<int> nb{1, 2};
  const auto span = schmidt_span(rho, nb, layout, tol);
  CHECK(span.dim() == 2);
  // span{|00><00|, |11><11|}
  Matrix p00 = Matrix::Zero(4, 4), p11 = Matrix::Zero(4, 4);
  p00(0, 0) = 1.0;
  p11(3, 3) = 1.0;
  CHECK(contains(span, p00, tol.member_tol).member);
  CHECK(contains(span, p11, tol.member_tol).member);
  CHECK_FALSE(contains(span, pauli_x(), 1.0).member);  // wrong shape guard
}

TEST_CASE("schmidt span dimension equals reshuffle-SVD rank on random states") {
  SubsystemLayout layout({2, 2, 2, 2});
  std::mt19937_64 rng(107);
  for (int draw = 0; draw < 5; ++draw) {
    const Matrix rho = random_density(16, rng);
    const std::vector<int> nb{1, 2};
    CHECK(schmidt_span(rho, nb, layout, tol).dim() ==
          operator_schmidt_rank(rho, nb, layout, tol.rank_tol));
  }
}

TEST_CASE("schmidt span basis reproduces partial inner products") {
  SubsystemLayout layout({2, 2, 2});
  std::mt19937_64 rng(109);
  const Matrix rho = random_density(8, rng);
  const std::vector<int> nb{0, 2};
  const auto span = schmidt_span(rho, nb, layout, tol);
  // every Tr_comp((I kron B) rho) must be a member
  for (int draw = 0; draw < 8; ++draw) {
    const Matrix B = random_matrix(2, 2, rng);
    const Matrix probe =
        partial_trace(embed_neighborhood(B, std::vector<int>{1}, layout) * rho, nb, layout);
    CHECK(contains(span, probe, tol.member_tol).member);
  }
}

TEST_CASE("subspace intersection basics") {
  const Matrix I = Matrix::Identity(2, 2);
  const std::vector<OperatorSubspace> pair = {span_of({I, pauli_z()}), span_of({I, pauli_x()})};
  const auto meet = subspace_intersection(pair, tol);
  CHECK(meet.dim() == 1);
  CHECK(contains(meet, I, tol.member_tol).member);

  const std::vector<OperatorSubspace> disjoint = {span_of({pauli_x()}), span_of({pauli_y()})};
  CHECK(subspace_intersection(disjoint, tol).dim() == 0);
}

TEST_CASE("subspace intersection is contained in every argument") {
  std::mt19937_64 rng(113);
  std::vector<Matrix> a_ops, b_ops;
  const Matrix shared = random_matrix(3, 3, rng);
  a_ops.push_back(shared);
  b_ops.push_back(shared);
  for (int k = 0; k < 3; ++k) {
    a_ops.push_back(random_matrix(3, 3, rng));
    b_ops.push_back(random_matrix(3, 3, rng));
  }
  const std::vector<OperatorSubspace> spaces = {span_of(a_ops), span_of(b_ops)};
  const auto meet = subspace_intersection(spaces, tol);
  CHECK(meet.dim() >= 1);
  for (const auto& B : meet.basis()) {
    CHECK(contains(spaces[0], B, tol.member_tol).member);
    CHECK(contains(spaces[1], B, tol.member_tol).member);
  }
  // order independence as projectors
  const std::vector<OperatorSubspace> swapped = {spaces[1], spaces[0]};
  const auto meet2 = subspace_intersection(swapped, tol);
  CHECK((meet.vec_projector() - meet2.vec_projector()).norm() <= 1e-8);
}

TEST_CASE("GHZ extended schmidt spans contain both classical branches") {
  SubsystemLayout layout({2, 2, 2, 2});
  Vector ghz = Vector::Zero(16);
  ghz(0) = ghz(15) = 1.0 / std::sqrt(2.0);
  const Matrix rho = ghz * ghz.adjoint();
  const std::vector<std::vector<int>> nbs = {{0, 1, 2}, {1, 2, 3}};
  std::vector<OperatorSubspace> extended;
  for (const auto& nb : nbs)
    extended.push_back(extend_to_global(schmidt_span(rho, nb, layout, tol), nb, layout, tol));
  const auto meet = subspace_intersection(extended, tol);
  CHECK(meet.dim() >= 2);
  Matrix p0 = Matrix::Zero(16, 16), p1 = Matrix::Zero(16, 16);
  p0(0, 0) = 1.0;
  p1(15, 15) = 1.0;
  CHECK(contains(meet, p0, tol.member_tol).member);
  CHECK(contains(meet, p1, tol.member_tol).member);
}

TEST_CASE("extend_to_global dimensions and membership") {
  SubsystemLayout layout({2, 2, 2});
  const std::vector<int> nb{0};
  const auto local = span_of({Matrix::Identity(2, 2)});
  const auto ext = extend_to_global(local, nb, layout, tol);
  CHECK(ext.dim() == 16);  // d_comp^2
  CHECK(ext.orthonormality_residual() <= 1e-10);

  // I kron B must be members, X kron B must not
  std::mt19937_64 rng(127);
  const Matrix B = random_matrix(4, 4, rng);
  CHECK(contains(ext, tensor_interleave(Matrix::Identity(2, 2), B, nb, layout), tol.member_tol)
            .member);
  CHECK_FALSE(
      contains(ext, tensor_interleave(pauli_x(), B, nb, layout), tol.member_tol).member);

  const auto full = span_of({Matrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()});
  CHECK(extend_to_global(full, nb, layout, tol).dim() == 64);

  Tolerances capped = tol;
  capped.extension_cap = 8;
  CHECK_THROWS(extend_to_global(full, nb, layout, capped));
}

TEST_CASE("extension of the separable-state schmidt span matches kron enumeration") {
  SubsystemLayout layout({2, 2, 2});
  const Matrix rho = sep_line_density(3);
  const std::vector<int> nb{0, 1};
  const auto span = schmidt_span(rho, nb, layout, tol);
  const auto ext = extend_to_global(span, nb, layout, tol);
  CHECK(ext.dim() == 2 * 4);
  // brute-force kron enumeration spans the same projector
  std::vector<Matrix> brute;
  Matrix unit = Matrix::Zero(2, 2);
  for (const auto& B : span.basis())
    for (int r = 0; r < 2; ++r)
      for (int s = 0; s < 2; ++s) {
        unit(r, s) = 1.0;
        brute.push_back(kron(B, unit));
        unit(r, s) = 0.0;
      }
  const auto brute_span = span_of(brute);
  CHECK((ext.vec_projector() - brute_span.vec_projector()).norm() <= 1e-9);
}

TEST_CASE("support projectors") {
  Matrix k01 = Matrix::Zero(2, 2);
  k01(0, 1) = 1.0;
  const auto off = span_of({k01});
  // |0><1| has row and column space together spanning the whole qubit
  CHECK((support_of(off, tol.rank_tol) - Matrix::Identity(2, 2)).norm() <= 1e-12);

  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  CHECK((support_of(span_of({p0}), tol.rank_tol) - p0).norm() <= 1e-12);
}

TEST_CASE("support of schmidt span equals support of the reduced state") {
  std::mt19937_64 rng(131);
  SubsystemLayout layout({2, 2, 2});
  const std::vector<std::vector<int>> nbs = {{0}, {1, 2}, {0, 2}};
  for (int draw = 0; draw < 20; ++draw) {
    Matrix rho;
    if (draw % 2 == 0) {
      rho = random_density(8, rng);
    } else {
      const Vector psi = random_pure(8, rng);  // rank-deficient case
      rho = psi * psi.adjoint();
    }
    const auto& nb = nbs[draw % nbs.size()];
    const Matrix lhs = support_projector(partial_trace(rho, nb, layout), tol.rank_tol);
    const Matrix rhs = support_of(schmidt_span(rho, nb, layout, tol), tol.rank_tol);
    CHECK((lhs - rhs).norm() <= 1e-7);
  }
}

TEST_CASE("membership reporting") {
  const auto iz = span_of({Matrix::Identity(2, 2), pauli_z()});
  const auto hit = contains(iz, pauli_z(), tol.member_tol);
  CHECK(hit.member);
  CHECK(hit.residual <= 1e-12);

  const auto miss = contains(span_of({Matrix::Identity(2, 2)}), pauli_x(), tol.member_tol);
  CHECK_FALSE(miss.member);
  CHECK(miss.residual == doctest::Approx(1.0));

  CHECK(contains(iz, Matrix::Zero(2, 2), tol.member_tol).member);
}

TEST_CASE("projector intersection of Hilbert subspaces") {
  Matrix p01 = Matrix::Zero(3, 3), p12 = Matrix::Zero(3, 3);
  p01(0, 0) = p01(1, 1) = 1.0;
  p12(1, 1) = p12(2, 2) = 1.0;
  const std::vector<Matrix> ps = {p01, p12};
  Matrix want = Matrix::Zero(3, 3);
  want(1, 1) = 1.0;
  CHECK((projector_intersection(ps, tol) - want).norm() <= 1e-10);
}
