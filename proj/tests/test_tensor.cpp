#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "ffqls/tensor.hpp"
#include "test_support.hpp"

using namespace ffqls;
using namespace testsupport;

namespace {
const Tolerances tol{};

Matrix ketbra(const Vector& a, const Vector& b) { return a * b.adjoint(); }
}  // namespace

TEST_CASE("layout invariants") {
  SubsystemLayout layout({2, 3, 2});
  CHECK(layout.count() == 3);
  CHECK(layout.total_dim() == 12);
  const std::vector<int> sub{0, 2};
  CHECK(layout.subset_dim(sub) == 4);
  CHECK(layout.complement(sub) == std::vector<int>{1});
  CHECK_THROWS(SubsystemLayout({1, 2}));
}

TEST_CASE("neighborhood normalization and connectedness") {
  SubsystemLayout layout({2, 2, 2, 2});
  NeighborhoodStructure nn(layout, {{0, 1}, {1, 2}, {2, 3}, {1}});
  CHECK(nn.count() == 3);  // {1} is contained in {0,1}
  CHECK(nn.connected());

  NeighborhoodStructure split(layout, {{0, 1}, {2, 3}});
  CHECK_FALSE(split.connected());
}

TEST_CASE("embed_neighborhood on single site") {
  SubsystemLayout layout({2, 2});
  const Matrix X = pauli_x();
  const std::vector<int> n1{0};
  CHECK((embed_neighborhood(X, n1, layout) - kron(X, Matrix::Identity(2, 2))).norm() ==
        doctest::Approx(0.0));
}

TEST_CASE("embed_neighborhood contiguous block") {
  SubsystemLayout layout({2, 2, 2, 2});
  const Matrix ZZ = kron(pauli_z(), pauli_z());
  const std::vector<int> nb{1, 2};
  const Matrix got = embed_neighborhood(ZZ, nb, layout);
  const Matrix want = kron(kron(Matrix::Identity(2, 2), ZZ), Matrix::Identity(2, 2));
  CHECK((got - want).norm() == doctest::Approx(0.0));
}

TEST_CASE("embed_neighborhood non-contiguous matches index oracle") {
  SubsystemLayout layout({2, 2, 2});
  const Matrix XY = kron(pauli_x(), pauli_y());
  const std::vector<int> nb{0, 2};
  const Matrix got = embed_neighborhood(XY, nb, layout);
  const Matrix want = embed_oracle(XY, {0, 2}, {2, 2, 2});
  CHECK((got - want).norm() <= tol.tol_lin);

  // mixed dimensions too
  SubsystemLayout mixed({2, 3, 2});
  std::mt19937_64 rng(7);
  const Matrix op = random_matrix(4, 4, rng);
  const Matrix got2 = embed_neighborhood(op, nb, mixed);
  const Matrix want2 = embed_oracle(op, {0, 2}, {2, 3, 2});
  CHECK((got2 - want2).norm() <= tol.tol_lin);
}

TEST_CASE("partial_trace product and Bell states") {
  SubsystemLayout layout({2, 2});
  const Vector e0 = basis_ket(2, 0);
  Matrix rho00 = Matrix::Zero(4, 4);
  rho00(0, 0) = 1.0;
  const std::vector<int> keep{0};
  CHECK((partial_trace(rho00, keep, layout) - ketbra(e0, e0)).norm() <= tol.tol_lin);

  Vector bell = Vector::Zero(4);
  bell(0) = 1.0 / std::sqrt(2.0);
  bell(3) = 1.0 / std::sqrt(2.0);
  const Matrix rho_bell = bell * bell.adjoint();
  CHECK((partial_trace(rho_bell, keep, layout) - 0.5 * Matrix::Identity(2, 2)).norm() <=
        tol.tol_lin);
}

TEST_CASE("partial_trace of the two-branch separable line state") {
  // 1/2(|000><000| + |111><111|), keep {0,1}
  SubsystemLayout layout({2, 2, 2});
  Matrix rho = Matrix::Zero(8, 8);
  rho(0, 0) = 0.5;
  rho(7, 7) = 0.5;
  const std::vector<int> keep{0, 1};
  Matrix want = Matrix::Zero(4, 4);
  want(0, 0) = 0.5;
  want(3, 3) = 0.5;
  CHECK((partial_trace(rho, keep, layout) - want).norm() <= tol.tol_lin);
  CHECK((partial_trace(rho, keep, layout) - partial_trace_oracle(rho, {0, 1}, {2, 2, 2})).norm() <=
        tol.tol_lin);
}

TEST_CASE("partial_trace is trace preserving and linear on random input") {
  SubsystemLayout layout({2, 3, 2});
  std::mt19937_64 rng(11);
  const Matrix M = random_matrix(12, 12, rng);
  const std::vector<int> keep{1};
  const Matrix out = partial_trace(M, keep, layout);
  CHECK(std::abs(out.trace() - M.trace()) <= tol.tol_lin);
  CHECK((out - partial_trace_oracle(M, {1}, {2, 3, 2})).norm() <= tol.tol_lin);
}

TEST_CASE("partial trace is adjoint of identity tensoring") {
  SubsystemLayout layout({2, 2, 3});
  std::mt19937_64 rng(13);
  const std::vector<int> nb{0, 2};
  for (int draw = 0; draw < 20; ++draw) {
    const Matrix M = random_matrix(12, 12, rng);
    const Matrix A = random_matrix(6, 6, rng);
    const cxd lhs = (M * embed_neighborhood(A, nb, layout)).trace();
    const cxd rhs = (partial_trace(M, nb, layout) * A).trace();
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("embed then trace scales by complement dimension") {
  SubsystemLayout layout({2, 2, 2, 2});
  std::mt19937_64 rng(17);
  const std::vector<int> nb{1, 3};
  const Matrix op = random_matrix(4, 4, rng);
  const Matrix got = partial_trace(embed_neighborhood(op, nb, layout), nb, layout);
  CHECK((got - 4.0 * op).norm() <= 1e-9);
}

TEST_CASE("permute_subsystems basics") {
  SubsystemLayout layout({2, 2});
  const Matrix XI = kron(pauli_x(), Matrix::Identity(2, 2));
  const Matrix IX = kron(Matrix::Identity(2, 2), pauli_x());
  const std::vector<int> swap{1, 0};
  CHECK((permute_subsystems(XI, swap, layout) - IX).norm() <= tol.tol_lin);

  std::mt19937_64 rng(3);
  const Matrix M = random_matrix(4, 4, rng);
  const std::vector<int> id{0, 1};
  CHECK((permute_subsystems(M, id, layout) - M).norm() <= tol.tol_lin);
  // involutive for transpositions
  CHECK((permute_subsystems(permute_subsystems(M, swap, layout), swap, layout) - M).norm() <=
        tol.tol_lin);
}

TEST_CASE("permute_subsystems cycle moves basis states per index map") {
  SubsystemLayout layout({2, 2, 2});
  Matrix rho = Matrix::Zero(8, 8);
  rho(3, 3) = 1.0;  // |011><011|
  const std::vector<int> cycle{1, 2, 0};  // subsystem a -> slot a+1 mod 3
  Matrix want = Matrix::Zero(8, 8);
  want(5, 5) = 1.0;  // |101><101|
  CHECK((permute_subsystems(rho, cycle, layout) - want).norm() <= tol.tol_lin);

  // composition law on random input
  std::mt19937_64 rng(5);
  const Matrix M = random_matrix(8, 8, rng);
  const std::vector<int> p{2, 0, 1};
  const std::vector<int> q{1, 2, 0};
  std::vector<int> qp(3);
  for (int a = 0; a < 3; ++a) qp[a] = q[p[a]];
  const Matrix two_step = permute_subsystems(permute_subsystems(M, p, layout), q, layout);
  CHECK((two_step - permute_subsystems(M, qp, layout)).norm() <= 1e-9);
}

TEST_CASE("liouvillian of a pure Hamiltonian Z") {
  const Matrix H = pauli_z();
  const Matrix L = liouvillian_matrix(&H, {});
  Eigen::ComplexEigenSolver<Matrix> es(L);
  std::vector<double> imacts;
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(es.eigenvalues()(k).real()) <= 1e-12);
    imacts.push_back(es.eigenvalues()(k).imag());
  }
  std::sort(imacts.begin(), imacts.end());
  CHECK(imacts[0] == doctest::Approx(-2.0));
  CHECK(imacts[1] == doctest::Approx(0.0));
  CHECK(imacts[2] == doctest::Approx(0.0));
  CHECK(imacts[3] == doctest::Approx(2.0));
}

TEST_CASE("liouvillian of amplitude damping") {
  const std::vector<Matrix> Ls = {sigma_minus()};
  const Matrix L = liouvillian_matrix(nullptr, Ls);

  Eigen::ComplexEigenSolver<Matrix> es(L);
  std::vector<double> re;
  for (int k = 0; k < 4; ++k) re.push_back(es.eigenvalues()(k).real());
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-1.0));
  CHECK(re[1] == doctest::Approx(-0.5));
  CHECK(re[2] == doctest::Approx(-0.5));
  CHECK(re[3] == doctest::Approx(0.0).epsilon(1e-12));

  // unique fixed point |0><0|
  const auto kernel = null_space_oracle(L);
  REQUIRE(kernel.size() == 1);
  Matrix fp = devectorize(kernel[0], 2, 2);
  fp /= fp.trace();
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 1.0;
  CHECK((fp - want).norm() <= 1e-10);
}

TEST_CASE("liouvillian matches direct rhs evaluation and preserves trace") {
  SubsystemLayout layout({2, 2});
  std::mt19937_64 rng(23);
  Matrix H = random_matrix(4, 4, rng);
  H = 0.5 * (H + H.adjoint()).eval();
  const std::vector<Matrix> Ls = {random_matrix(4, 4, rng), random_matrix(4, 4, rng)};
  const Matrix L = liouvillian_matrix(&H, Ls);

  CHECK(trace_preservation_residual(L, 4) <= 1e-10);
  for (int draw = 0; draw < 5; ++draw) {
    const Matrix rho = random_density(4, rng);
    const Matrix direct = lindblad_rhs_oracle(&H, Ls, rho);
    CHECK((apply_superop(L, rho) - direct).norm() <= 1e-10);
  }
  CHECK_THROWS(liouvillian_matrix(&Ls[0], {}));  // non-Hermitian H
}

TEST_CASE("generator additivity") {
  std::mt19937_64 rng(29);
  Matrix H = random_matrix(4, 4, rng);
  H = 0.5 * (H + H.adjoint()).eval();
  const Matrix L1 = random_matrix(4, 4, rng);
  const Matrix L2 = random_matrix(4, 4, rng);
  const std::vector<Matrix> first = {L1};
  const std::vector<Matrix> second = {L2};
  const std::vector<Matrix> both = {L1, L2};
  const Matrix sum = liouvillian_matrix(&H, first) + liouvillian_matrix(nullptr, second);
  CHECK((sum - liouvillian_matrix(&H, both)).norm() <= 1e-10);
}

TEST_CASE("cptp map of identity and replacement channels") {
  const std::vector<Matrix> id_kraus = {Matrix::Identity(2, 2)};
  CHECK((cptp_map_matrix(id_kraus) - Matrix::Identity(4, 4)).norm() <= tol.tol_lin);

  // {|0><0|, |0><1|} sends every state to |0><0|
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k1(0, 1) = 1.0;
  const std::vector<Matrix> replace = {k0, k1};
  const Matrix S = cptp_map_matrix(replace);
  std::mt19937_64 rng(31);
  const Matrix rho = random_density(2, rng);
  Matrix want = Matrix::Zero(2, 2);
  want(0, 0) = 1.0;
  CHECK((apply_superop(S, rho) - want).norm() <= 1e-12);
}

TEST_CASE("cptp dephasing scales off-diagonals by 2p-1") {
  const double p = 0.75;
  const std::vector<Matrix> kraus = {std::sqrt(p) * Matrix::Identity(2, 2),
                                     std::sqrt(1 - p) * pauli_z()};
  const Matrix S = cptp_map_matrix(kraus);
  // fixes span{I, Z}
  CHECK((apply_superop(S, Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)).norm() <= 1e-12);
  CHECK((apply_superop(S, pauli_z()) - pauli_z()).norm() <= 1e-12);
  Matrix offdiag = Matrix::Zero(2, 2);
  offdiag(0, 1) = 1.0;
  CHECK((apply_superop(S, offdiag) - 0.5 * offdiag).norm() <= 1e-12);

  Matrix bad = Matrix::Identity(2, 2) * 1.1;
  const std::vector<Matrix> bad_kraus = {bad};
  CHECK_THROWS(cptp_map_matrix(bad_kraus));
}

TEST_CASE("superop_embed agrees with embedding Kraus operators") {
  SubsystemLayout layout({2, 2, 2});
  std::mt19937_64 rng(37);
  const std::vector<int> nb{0, 2};
  // a CPTP map on the pair from two random Kraus ops, normalized
  Matrix A = random_matrix(4, 4, rng);
  Matrix B = random_matrix(4, 4, rng);
  Matrix norm = A.adjoint() * A + B.adjoint() * B;
  Eigen::SelfAdjointEigenSolver<Matrix> es(norm);
  const Matrix half_inv = es.operatorInverseSqrt();
  A = (A * half_inv).eval();
  B = (B * half_inv).eval();
  const std::vector<Matrix> local_kraus = {A, B};
  const Matrix local = cptp_map_matrix(local_kraus);

  const std::vector<Matrix> global_kraus = {embed_neighborhood(A, nb, layout),
                                            embed_neighborhood(B, nb, layout)};
  const Matrix want = cptp_map_matrix(global_kraus);
  CHECK((superop_embed(local, nb, layout) - want).norm() <= 1e-9);
}

TEST_CASE("density validation") {
  std::mt19937_64 rng(41);
  CHECK(is_density(random_density(4, rng), tol));
  Matrix not_psd = Matrix::Identity(2, 2);
  not_psd(1, 1) = -0.5;
  not_psd(0, 0) = 1.5;
  CHECK_FALSE(is_density(not_psd, tol));
  CHECK_FALSE(is_density(2.0 * random_density(3, rng), tol));
}
