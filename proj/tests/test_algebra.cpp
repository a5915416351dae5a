#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ffqls/algebra.hpp"
#include "test_support.hpp"

using namespace ffqls;
using namespace testsupport;

namespace {
const Tolerances tol{};

OperatorSubspace span_of(std::vector<Matrix> ops) { return orthonormalize(ops, tol.rank_tol); }

// Brute-force closure oracle: repeatedly append adjoints and modified
// products of ALL pairs, re-orthonormalizing, until the dimension stops
// growing. Independent of the one-sided generator scheme under test.
OperatorSubspace closure_oracle(std::vector<Matrix> seed, const Matrix& rho_pinv) {
  OperatorSubspace cur = span_of(seed);
  while (true) {
    std::vector<Matrix> cand = cur.basis();
    for (const auto& X : cur.basis()) {
      cand.push_back(X.adjoint());
      for (const auto& Y : cur.basis()) {
        Matrix P = X * rho_pinv * Y;
        const double n = P.norm();
        if (n > 0) P /= n;
        cand.push_back(P);
      }
    }
    OperatorSubspace next = span_of(cand);
    if (next.dim() == cur.dim()) return next;
    cur = std::move(next);
  }
}
}  // namespace

TEST_CASE("modular map trivial for the maximally mixed reference") {
  std::mt19937_64 rng(201);
  const Matrix X = random_matrix(3, 3, rng);
  const Matrix rho = Matrix::Identity(3, 3) / 3.0;
  CHECK((modular_map(X, rho, 0.5, tol) - X).norm() <= 1e-12);
}

TEST_CASE("modular map rescales coherences by sqrt of population ratio") {
  const double p = 0.3;
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = p;
  rho(1, 1) = 1 - p;
  Matrix X = Matrix::Zero(2, 2);
  X(0, 1) = 1.0;
  const Matrix got = modular_map(X, rho, 0.5, tol);
  CHECK((got - std::sqrt(p / (1 - p)) * X).norm() <= 1e-12);
}

TEST_CASE("modular map rejects operators leaking outside the support") {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  CHECK_THROWS(modular_map(pauli_x(), rho, 0.5, tol));
  // on-support operator passes and is fixed
  Matrix X = Matrix::Zero(2, 2);
  X(0, 0) = 1.0;
  CHECK((modular_map(X, rho, 0.5, tol) - X).norm() <= 1e-12);
}

TEST_CASE("distorted algebra generated by the state alone stays one-dimensional") {
  std::mt19937_64 rng(203);
  const Matrix rho = random_density(4, rng);
  const auto alg = gen_distorted_algebra(span_of({rho}), rho, tol);
  CHECK(alg.space.dim() == 1);
  CHECK(contains(alg.space, rho, tol.member_tol).member);
  CHECK(alg.product_residual <= tol.member_tol);
}

TEST_CASE("closure of {I, X} under the modified product is the abelian span") {
  // X*X = I keeps the span closed; the oracle agrees
  const Matrix rho = Matrix::Identity(2, 2) / 2.0;
  const auto alg = gen_distorted_algebra(span_of({Matrix::Identity(2, 2), pauli_x()}), rho, tol);
  const auto oracle = closure_oracle({Matrix::Identity(2, 2), pauli_x()}, 2.0 * Matrix::Identity(2, 2));
  CHECK(oracle.dim() == 2);
  CHECK(alg.space.dim() == oracle.dim());
}

TEST_CASE("adjoint closure blows a raising operator up to the full algebra") {
  Matrix raise = Matrix::Zero(2, 2);
  raise(0, 1) = 1.0;
  const Matrix rho = Matrix::Identity(2, 2) / 2.0;
  const auto alg = gen_distorted_algebra(span_of({Matrix::Identity(2, 2), raise}), rho, tol);
  const auto oracle =
      closure_oracle({Matrix::Identity(2, 2), raise, raise.adjoint()}, 2.0 * Matrix::Identity(2, 2));
  CHECK(oracle.dim() == 4);
  CHECK(alg.space.dim() == 4);
  CHECK(alg.adjoint_residual <= tol.member_tol);
  CHECK(alg.product_residual <= tol.member_tol);
}

TEST_CASE("distorted closure of distorted generators matches the oracle") {
  std::mt19937_64 rng(207);
  for (int draw = 0; draw < 4; ++draw) {
    const Matrix rho = random_density(4, rng);
    const DensityPowers dp(rho, tol.rank_tol);
    const Matrix G = random_matrix(4, 4, rng);
    const Matrix gen = dp.power(0.5) * G * dp.power(0.5);
    const auto alg = gen_distorted_algebra(span_of({rho, gen}), rho, tol);
    const auto oracle = closure_oracle({rho, gen, gen.adjoint()}, dp.power(-1.0));
    CHECK(alg.space.dim() == oracle.dim());
    CHECK((alg.space.vec_projector() - oracle.vec_projector()).norm() <= 1e-6);
  }
}

TEST_CASE("minimal fixed point set of an already-invariant span") {
  // the separable-line Schmidt span: diagonal projectors, already closed
  Matrix p00 = Matrix::Zero(4, 4), p11 = Matrix::Zero(4, 4);
  p00(0, 0) = 1.0;
  p11(3, 3) = 1.0;
  const Matrix rho_pair = 0.5 * p00 + 0.5 * p11;
  const auto F = minimal_fixed_point_set(span_of({p00, p11}), rho_pair, tol);
  CHECK(F.space.dim() == 2);
  CHECK(F.modular_residual <= tol.member_tol);
}

TEST_CASE("minimal fixed point set of the full algebra is the full algebra") {
  std::mt19937_64 rng(211);
  const Matrix rho = random_density(3, rng);
  std::vector<Matrix> all;
  for (int k = 0; k < 9; ++k) all.push_back(random_matrix(3, 3, rng));
  const auto F = minimal_fixed_point_set(span_of(all), rho, tol);
  CHECK(F.space.dim() == 9);
}

TEST_CASE("minimal fixed point set is idempotent and modular invariant") {
  std::mt19937_64 rng(213);
  for (int draw = 0; draw < 5; ++draw) {
    const Matrix rho = random_density(4, rng);
    const Matrix G = random_matrix(4, 4, rng);
    const auto F = minimal_fixed_point_set(span_of({rho, G + G.adjoint()}), rho, tol);
    const auto F2 = minimal_fixed_point_set(F.space, rho, tol);
    CHECK(F2.space.dim() == F.space.dim());
    CHECK((F.space.vec_projector() - F2.space.vec_projector()).norm() <= 1e-6);
    // modular invariance residual
    const DensityPowers dp(rho, tol.rank_tol);
    for (const auto& X : F.space.basis()) {
      const Matrix MX = modular_map(X, dp, 0.5, tol.member_tol);
      CHECK(contains(F.space, MX, tol.member_tol).residual <= tol.member_tol);
    }
    // contains the generators and the state
    CHECK(contains(F.space, rho, tol.member_tol).member);
  }
}

TEST_CASE("wedderburn of the full matrix algebra is a single trivial block") {
  std::mt19937_64 rng(217);
  const int d = 3;
  std::vector<Matrix> all;
  for (int k = 0; k < d * d + 3; ++k) all.push_back(random_matrix(d, d, rng));
  const Matrix rho = Matrix::Identity(d, d) / d;
  const auto F = minimal_fixed_point_set(span_of(all), rho, tol);
  const auto blocks = wedderburn_decompose(F, tol);
  REQUIRE(blocks.blocks.size() == 1);
  CHECK(blocks.blocks[0].d_A == d);
  CHECK(blocks.blocks[0].d_B == 1);
  CHECK(blocks.blocks[0].tau(0, 0).real() == doctest::Approx(1.0));
  CHECK(blocks.residual <= tol.block_tol);
}

TEST_CASE("wedderburn of the diagonal algebra splits into scalar blocks") {
  const int d = 4;
  std::vector<Matrix> diag;
  for (int k = 0; k < d; ++k) {
    Matrix E = Matrix::Zero(d, d);
    E(k, k) = 1.0;
    diag.push_back(E);
  }
  const Matrix rho = Matrix::Identity(d, d) / d;
  const auto F = minimal_fixed_point_set(span_of(diag), rho, tol);
  REQUIRE(F.space.dim() == d);
  const auto blocks = wedderburn_decompose(F, tol);
  CHECK(blocks.blocks.size() == d);
  for (const auto& b : blocks.blocks) {
    CHECK(b.d_A == 1);
    CHECK(b.d_B == 1);
  }
  CHECK(blocks.algebra_dim() == F.space.dim());
}

TEST_CASE("wedderburn recovers a planted tensor-factor structure") {
  std::mt19937_64 rng(219);
  // algebra B(C^2) kron tau on C^4, planted via distortion of sigma kron I
  const Matrix rho_A = random_density(2, rng);
  const Matrix tau_B = random_density(2, rng);
  const Matrix rho = kron(rho_A, tau_B);
  const DensityPowers dp(rho, tol.rank_tol);
  std::vector<Matrix> gens;
  const std::vector<Matrix> paulis = {Matrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()};
  for (const auto& s : paulis)
    gens.push_back(dp.power(0.5) * kron(s, Matrix::Identity(2, 2)) * dp.power(0.5));
  const auto F = minimal_fixed_point_set(span_of(gens), rho, tol);
  REQUIRE(F.space.dim() == 4);

  const auto blocks = wedderburn_decompose(F, tol);
  REQUIRE(blocks.blocks.size() == 1);
  CHECK(blocks.blocks[0].d_A == 2);
  CHECK(blocks.blocks[0].d_B == 2);
  // tau is basis-dependent; its spectrum is not
  Eigen::SelfAdjointEigenSolver<Matrix> got(blocks.blocks[0].tau), want(tau_B);
  CHECK((got.eigenvalues() - want.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-7);

  // the state itself reconstructs as a direct sum of rho_A kron tau factors
  CHECK((blocks.assemble(blocks.project_factors(rho)) - rho).norm() <= tol.block_tol);
  // and the recovered A factor of rho carries rho_A's spectrum
  const auto factors = blocks.project_factors(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> fa(factors[0]), wa(rho_A);
  CHECK((fa.eigenvalues() - wa.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("wedderburn handles singular reference states via the support") {
  std::mt19937_64 rng(223);
  // rank-2 rho on C^3: algebra lives on the support only
  Matrix rho = Matrix::Zero(3, 3);
  rho(0, 0) = 0.4;
  rho(1, 1) = 0.6;
  std::vector<Matrix> gens = {rho};
  Matrix flip = Matrix::Zero(3, 3);
  flip(0, 1) = 1.0;
  gens.push_back(0.5 * (flip + flip.adjoint()));
  const auto F = minimal_fixed_point_set(span_of(gens), rho, tol);
  const auto blocks = wedderburn_decompose(F, tol);
  CHECK(blocks.algebra_dim() == F.space.dim());
  int carrier = 0;
  for (const auto& b : blocks.blocks) carrier += b.d_A * b.d_B;
  CHECK(carrier == 2);  // support rank, not the full space
  CHECK(blocks.residual <= tol.block_tol);
}
