#include "ffqls/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ffqls {

namespace {

double support_leak(const Matrix& X, const Matrix& P) {
  const double n = X.norm();
  if (n == 0.0) return 0.0;
  return (X - P * X * P).norm() / n;
}

std::vector<Matrix> adjoints_of(const std::vector<Matrix>& ops) {
  std::vector<Matrix> out;
  out.reserve(ops.size());
  for (const auto& M : ops) out.push_back(M.adjoint());
  return out;
}

// Appends P normalized, unless it is numerically zero at the scale set by
// the factors that produced it (a vanishing product must not be inflated
// into a spurious basis direction).
void push_scaled(std::vector<Matrix>& out, const Matrix& P, double zero_floor) {
  const double n = P.norm();
  if (n > zero_floor) out.push_back(P / n);
}

}  // namespace

DensityPowers::DensityPowers(const Matrix& rho, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  const auto& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  std::vector<int> kept;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (top > 0.0 && ev(k) > rank_tol * top) kept.push_back(static_cast<int>(k));
  eigenvalues_.resize(static_cast<Eigen::Index>(kept.size()));
  vectors_.resize(rho.rows(), static_cast<Eigen::Index>(kept.size()));
  for (size_t i = 0; i < kept.size(); ++i) {
    eigenvalues_(static_cast<Eigen::Index>(i)) = ev(kept[i]);
    vectors_.col(static_cast<Eigen::Index>(i)) = es.eigenvectors().col(kept[i]);
  }
  support_ = vectors_ * vectors_.adjoint();
  isometry_ = vectors_;
}

Matrix DensityPowers::power(double alpha) const {
  Eigen::VectorXd powered(eigenvalues_.size());
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k)
    powered(k) = std::pow(eigenvalues_(k), alpha);
  return vectors_ * powered.asDiagonal() * vectors_.adjoint();
}

Matrix modular_map(const Matrix& X, const DensityPowers& rho, double lambda, double member_tol) {
  const double leak = support_leak(X, rho.support());
  if (leak > member_tol)
    throw std::invalid_argument("modular_map: operator leaks outside supp(rho), residual " +
                                std::to_string(leak));
  return rho.power(lambda) * X * rho.power(-lambda);
}

Matrix modular_map(const Matrix& X, const Matrix& rho, double lambda, const Tolerances& tol) {
  return modular_map(X, DensityPowers(rho, tol.rank_tol), lambda, tol.member_tol);
}

DistortedAlgebra gen_distorted_algebra(const OperatorSubspace& W, const Matrix& rho,
                                       const Tolerances& tol) {
  if (W.dim() == 0) throw std::invalid_argument("gen_distorted_algebra: empty generating space");
  const DensityPowers dp(rho, tol.rank_tol);
  for (const auto& B : W.basis()) {
    const double leak = support_leak(B, dp.support());
    if (leak > tol.member_tol)
      throw std::invalid_argument("gen_distorted_algebra: generator leaks outside supp(rho), residual " +
                                  std::to_string(leak));
  }
  const Matrix rho_pinv = dp.power(-1.0);
  const double zero_floor = 1e-13 * std::max(1.0, rho_pinv.norm());

  std::vector<Matrix> generators = W.basis();
  for (const auto& M : adjoints_of(W.basis())) generators.push_back(M);

  OperatorSubspace current = orthonormalize(generators, tol.rank_tol);
  int iterations = 0;
  while (true) {
    if (++iterations > tol.max_closure_iter)
      throw std::runtime_error("gen_distorted_algebra: no closure after " +
                               std::to_string(tol.max_closure_iter) +
                               " sweeps (dim " + std::to_string(current.dim()) + ")");
    std::vector<Matrix> candidates = current.basis();
    for (const auto& X : current.basis()) {
      candidates.push_back(X.adjoint());
      for (const auto& G : generators) {
        push_scaled(candidates, X * rho_pinv * G, zero_floor);
        push_scaled(candidates, G * rho_pinv * X, zero_floor);
      }
    }
    OperatorSubspace next = orthonormalize(candidates, tol.rank_tol);
    if (next.dim() == current.dim()) {
      current = std::move(next);
      break;
    }
    current = std::move(next);
  }

  DistortedAlgebra out;
  out.rho = rho;
  out.iterations = iterations;
  double adj_res = 0.0, prod_res = 0.0;
  const int dim = current.dim();
  for (const auto& X : current.basis())
    adj_res = std::max(adj_res, contains(current, X.adjoint(), tol.member_tol).residual);
  if (dim <= 48) {
    for (const auto& X : current.basis())
      for (const auto& Y : current.basis())
        prod_res = std::max(prod_res, contains(current, X * rho_pinv * Y, tol.member_tol).residual);
  } else {
    // audit a seeded sample of product pairs; closure is already a fixed
    // point of the iteration above
    std::mt19937_64 rng(0xa1d17ULL);
    std::uniform_int_distribution<int> pick(0, dim - 1);
    for (int draw = 0; draw < 2048; ++draw) {
      const Matrix& X = current.basis()[pick(rng)];
      const Matrix& Y = current.basis()[pick(rng)];
      prod_res = std::max(prod_res, contains(current, X * rho_pinv * Y, tol.member_tol).residual);
    }
  }
  out.adjoint_residual = adj_res;
  out.product_residual = prod_res;
  out.space = std::move(current);
  return out;
}

DistortedAlgebra minimal_fixed_point_set(const OperatorSubspace& W, const Matrix& rho,
                                         const Tolerances& tol) {
  const DensityPowers dp(rho, tol.rank_tol);
  DistortedAlgebra F = gen_distorted_algebra(W, rho, tol);
  int sweeps = F.iterations;
  while (true) {
    if (sweeps > tol.max_closure_iter)
      throw std::runtime_error("minimal_fixed_point_set: no convergence after " +
                               std::to_string(tol.max_closure_iter) + " sweeps (dim " +
                               std::to_string(F.space.dim()) + ")");
    std::vector<Matrix> candidates = F.space.basis();
    const double zero_floor = 1e-13 * std::max(1.0, dp.power(0.5).norm() * dp.power(-0.5).norm());
    double mod_res = 0.0;
    for (const auto& X : F.space.basis()) {
      const Matrix MX = modular_map(X, dp, 0.5, tol.member_tol);
      mod_res = std::max(mod_res, contains(F.space, MX, tol.member_tol).residual);
      push_scaled(candidates, MX, zero_floor);
    }
    if (mod_res <= tol.member_tol) {
      F.modular_residual = mod_res;
      F.iterations = sweeps;
      return F;
    }
    OperatorSubspace enlarged = orthonormalize(candidates, tol.rank_tol);
    DistortedAlgebra next = gen_distorted_algebra(enlarged, rho, tol);
    sweeps += next.iterations;
    F = std::move(next);
  }
}

int BlockDecomposition::algebra_dim() const {
  int dim = 0;
  for (const auto& b : blocks) dim += b.d_A * b.d_A;
  return dim;
}

Matrix BlockDecomposition::assemble(const std::vector<Matrix>& a_factors) const {
  if (a_factors.size() != blocks.size())
    throw std::invalid_argument("assemble: factor count mismatch");
  Matrix out = Matrix::Zero(carrier_dim, carrier_dim);
  for (size_t l = 0; l < blocks.size(); ++l) {
    const Matrix iso = blocks[l].aligned_isometry();
    out += iso * kron(a_factors[l], blocks[l].tau) * iso.adjoint();
  }
  return out;
}

std::vector<Matrix> BlockDecomposition::project_factors(const Matrix& X) const {
  std::vector<Matrix> a_factors;
  a_factors.reserve(blocks.size());
  for (const auto& blk : blocks) {
    const Matrix iso = blk.aligned_isometry();
    const Matrix T = iso.adjoint() * X * iso;
    const double tau_norm2 = blk.tau.squaredNorm();
    Matrix a(blk.d_A, blk.d_A);
    for (int i = 0; i < blk.d_A; ++i)
      for (int j = 0; j < blk.d_A; ++j) {
        const Matrix sub = T.block(i * blk.d_B, j * blk.d_B, blk.d_B, blk.d_B);
        a(i, j) = (blk.tau.adjoint() * sub).trace() / tau_norm2;
      }
    a_factors.push_back(std::move(a));
  }
  return a_factors;
}

namespace {

// eigen-cluster boundaries of an ascending eigenvalue list
std::vector<std::pair<int, int>> cluster_ranges(const Eigen::VectorXd& vals, double rel_gap) {
  std::vector<std::pair<int, int>> ranges;
  const double scale = std::max(vals.cwiseAbs().maxCoeff(), 1.0);
  int start = 0;
  for (int k = 1; k <= vals.size(); ++k) {
    if (k == vals.size() || vals(k) - vals(k - 1) > rel_gap * scale) {
      ranges.emplace_back(start, k);
      start = k;
    }
  }
  return ranges;
}

Matrix random_hermitian_combination(const std::vector<Matrix>& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix Z = Matrix::Zero(basis[0].rows(), basis[0].cols());
  for (const auto& B : basis) Z += gauss(rng) * B + gauss(rng) * cxd(0, 1) * B;
  return 0.5 * (Z + Z.adjoint());
}

struct FactorSplit {
  int d_A = 0, d_B = 0;
  Matrix factor_basis;  // block_dim x block_dim unitary
};

// Tensor factorization of a matrix factor-algebra on its block: locate a
// minimal projection from a generic Hermitian element, then rebuild the
// product basis by transporting its range with algebra elements.
FactorSplit split_factor(const std::vector<Matrix>& alg_basis, int block_dim,
                         std::mt19937_64& rng, const Tolerances& tol) {
  const int m = static_cast<int>(alg_basis.size());
  const int d_A = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  if (d_A * d_A != m || block_dim % d_A != 0)
    throw std::runtime_error("block algebra dimension is not a perfect square");
  const int d_B = block_dim / d_A;

  const Matrix Y = random_hermitian_combination(alg_basis, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> es(Y);
  const auto ranges = cluster_ranges(es.eigenvalues(), tol.cluster_tol);
  if (static_cast<int>(ranges.size()) != d_A) throw std::runtime_error("degenerate central draw");
  for (const auto& r : ranges)
    if (r.second - r.first != d_B) throw std::runtime_error("degenerate central draw");

  // range of a minimal projection: a_1 kron H_B
  const Matrix u = es.eigenvectors().middleCols(ranges[0].first, d_B);

  // orbit of u_1 under the algebra: H_A kron b_1, with u_1 as first vector
  Matrix orbit(block_dim, m + 1);
  orbit.col(0) = u.col(0);
  for (int i = 0; i < m; ++i) orbit.col(i + 1) = alg_basis[i] * u.col(0);
  Eigen::HouseholderQR<Matrix> qr(orbit);
  const Matrix q = qr.householderQ() * Matrix::Identity(block_dim, d_A);

  // algebra elements X_i with X_i u_1 = v_i; then X_i u_k = a_i kron b_k
  Matrix action(block_dim, m);
  for (int i = 0; i < m; ++i) action.col(i) = alg_basis[i] * u.col(0);
  const auto solver = action.completeOrthogonalDecomposition();

  Matrix F(block_dim, block_dim);
  for (int i = 0; i < d_A; ++i) {
    const Vector coeff = solver.solve(q.col(i));
    Matrix Xi = Matrix::Zero(block_dim, block_dim);
    for (int t = 0; t < m; ++t) Xi += coeff(t) * alg_basis[t];
    if ((Xi * u.col(0) - q.col(i)).norm() > tol.block_tol) throw std::runtime_error("degenerate central draw");
    for (int k = 0; k < d_B; ++k) F.col(i * d_B + k) = Xi * u.col(k);
  }
  if ((F.adjoint() * F - Matrix::Identity(block_dim, block_dim)).cwiseAbs().maxCoeff() >
      tol.block_tol)
    throw std::runtime_error("degenerate central draw");
  return {d_A, d_B, F};
}

BlockDecomposition decompose_once(const DistortedAlgebra& A, const Tolerances& tol,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int d = A.space.factor_dim();
  const DensityPowers dp(A.rho, tol.rank_tol);
  const Matrix V = dp.support_isometry();
  const int r = dp.rank();

  // undistort on the support
  const Matrix rho_r = V.adjoint() * A.rho * V;
  Eigen::SelfAdjointEigenSolver<Matrix> res(0.5 * (rho_r + rho_r.adjoint()));
  const Matrix inv_sqrt =
      res.eigenvectors() *
      res.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix() *
      res.eigenvectors().adjoint();
  std::vector<Matrix> undist;
  undist.reserve(A.space.basis().size());
  for (const auto& B : A.space.basis())
    undist.push_back(inv_sqrt * (V.adjoint() * B * V) * inv_sqrt);
  const OperatorSubspace alg = orthonormalize(undist, tol.rank_tol);
  const int m = alg.dim();
  if (m != A.space.dim())
    throw std::runtime_error("wedderburn_decompose: undistortion changed the dimension");
  const auto ident = contains(alg, Matrix::Identity(r, r), tol.member_tol);
  if (!ident.member)
    throw std::runtime_error("wedderburn_decompose: algebra lacks the identity on supp(rho) "
                             "(is rho in the space?), residual " + std::to_string(ident.residual));

  // center of the undistorted algebra
  Matrix K(static_cast<Eigen::Index>(m) * r * r, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Matrix comm = alg.basis()[i] * alg.basis()[j] - alg.basis()[j] * alg.basis()[i];
      K.block(static_cast<Eigen::Index>(j) * r * r, i, r * r, 1) = vectorize(comm);
    }
  }
  Eigen::JacobiSVD<Matrix> ksvd(K, Eigen::ComputeThinV);
  std::vector<Matrix> center;
  const auto& ksig = ksvd.singularValues();
  const double ktop = std::max(ksig.size() > 0 ? ksig(0) : 0.0, 1.0);
  for (Eigen::Index k = 0; k < ksig.size(); ++k) {
    if (ksig(k) <= tol.rank_tol * ktop) {
      Matrix C = Matrix::Zero(r, r);
      for (int i = 0; i < m; ++i) C += ksvd.matrixV()(i, k) * alg.basis()[i];
      center.push_back(C);
    }
  }
  if (center.empty()) throw std::runtime_error("wedderburn_decompose: empty center");

  // split along a generic Hermitian central element
  const Matrix Z = random_hermitian_combination(center, rng);
  Eigen::SelfAdjointEigenSolver<Matrix> zes(Z);
  const auto ranges = cluster_ranges(zes.eigenvalues(), tol.cluster_tol);
  if (static_cast<int>(ranges.size()) != static_cast<int>(center.size()))
    throw std::runtime_error("degenerate central draw");

  BlockDecomposition out;
  out.seed = seed;
  out.carrier_dim = d;

  for (const auto& range : ranges) {
    const int block_dim = range.second - range.first;
    const Matrix W = zes.eigenvectors().middleCols(range.first, block_dim);

    std::vector<Matrix> restricted;
    for (const auto& B : alg.basis()) restricted.push_back(W.adjoint() * B * W);
    const OperatorSubspace block_alg = orthonormalize(restricted, tol.rank_tol);

    FactorSplit split = split_factor(block_alg.basis(), block_dim, rng, tol);

    // tau from the compatible block structure of rho
    const Matrix R = split.factor_basis.adjoint() * (W.adjoint() * rho_r * W) * split.factor_basis;
    Matrix tau = Matrix::Zero(split.d_B, split.d_B);
    for (int i = 0; i < split.d_A; ++i)
      tau += R.block(i * split.d_B, i * split.d_B, split.d_B, split.d_B);
    tau /= tau.trace();

    WedderburnBlock blk;
    blk.isometry = V * W;
    blk.d_A = split.d_A;
    blk.d_B = split.d_B;
    blk.tau = tau;
    blk.factor_basis = split.factor_basis;
    out.blocks.push_back(std::move(blk));
  }

  if (out.algebra_dim() != m)
    throw std::runtime_error("degenerate central draw");

  // worst reconstruction residual over the original basis
  double worst = 0.0;
  for (const auto& B : A.space.basis()) {
    const double n = B.norm();
    if (n > 0.0) worst = std::max(worst, (B - out.assemble(out.project_factors(B))).norm() / n);
  }
  out.residual = worst;
  if (worst > tol.block_tol)
    throw std::runtime_error("wedderburn_decompose: not an algebra at tolerance, residual " +
                             std::to_string(worst));
  return out;
}

}  // namespace

BlockDecomposition wedderburn_decompose(const DistortedAlgebra& A, const Tolerances& tol,
                                        std::uint64_t seed) {
  std::string last_error;
  for (int attempt = 0; attempt < 8; ++attempt) {
    try {
      return decompose_once(A, tol, seed + static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL);
    } catch (const std::runtime_error& err) {
      last_error = err.what();
      if (last_error.find("degenerate central draw") == std::string::npos) throw;
    }
  }
  throw std::runtime_error("wedderburn_decompose: failed after 8 seeded retries: " + last_error);
}

}  // namespace ffqls
