#pragma once

#include <cstdint>
#include <vector>

#include "ffqls/opspace.hpp"

namespace ffqls {

/// Spectral data of a positive-semidefinite reference operator; powers are
/// Moore-Penrose on the support (eigenvalues below rank_tol * max treated
/// as exact zeros).
class DensityPowers {
 public:
  DensityPowers(const Matrix& rho, double rank_tol);

  /// rho^alpha on the support; negative alpha uses the pseudo-inverse.
  Matrix power(double alpha) const;
  const Matrix& support() const { return support_; }
  /// Isometry whose columns span the support.
  const Matrix& support_isometry() const { return isometry_; }
  int rank() const { return static_cast<int>(eigenvalues_.size()); }
  int dim() const { return static_cast<int>(support_.rows()); }

 private:
  Eigen::VectorXd eigenvalues_;  // kept eigenvalues, ascending
  Matrix vectors_;               // matching eigenvectors
  Matrix support_;
  Matrix isometry_;
};

/// rho^lambda X rho^(-lambda) with Moore-Penrose powers on the support.
/// Errors if X has weight outside supp(rho) beyond member_tol.
Matrix modular_map(const Matrix& X, const DensityPowers& rho, double lambda, double member_tol);
Matrix modular_map(const Matrix& X, const Matrix& rho, double lambda, const Tolerances& tol);

/// Operator subspace closed under adjoint and the modified product
/// X rho^+ Y, together with the reference state and closure diagnostics.
struct DistortedAlgebra {
  OperatorSubspace space;
  Matrix rho;
  double adjoint_residual = 0.0;
  double product_residual = 0.0;
  double modular_residual = 0.0;  ///< only meaningful after the modular closure
  int iterations = 0;             ///< closure sweeps used
};

/// Smallest subspace containing W closed under adjoint and X rho^+ Y,
/// via iterated products against the generating set with per-round
/// orthonormalization. supp(W) must lie inside supp(rho).
DistortedAlgebra gen_distorted_algebra(const OperatorSubspace& W, const Matrix& rho,
                                       const Tolerances& tol);

/// Minimal distorted algebra containing W that is also invariant under the
/// modular map M_{1/2}; fixed point of the closure/modular iteration.
DistortedAlgebra minimal_fixed_point_set(const OperatorSubspace& W, const Matrix& rho,
                                         const Tolerances& tol);

struct WedderburnBlock {
  Matrix isometry;      ///< carrier_dim x (d_A*d_B); orthonormal columns spanning the block
  int d_A = 0;
  int d_B = 0;
  Matrix tau;           ///< d_B x d_B full-rank density on the B factor
  Matrix factor_basis;  ///< (d_A*d_B) square unitary aligning block coords with A kron B

  /// isometry * factor_basis: columns are the product basis a_i kron b_k.
  Matrix aligned_isometry() const { return isometry * factor_basis; }
};

/// Block data of a closed distorted algebra: every element reconstructs as
/// a direct sum of (A_l kron tau_l) over the blocks.
struct BlockDecomposition {
  std::vector<WedderburnBlock> blocks;
  double residual = 0.0;  ///< worst relative reconstruction error over the basis
  std::uint64_t seed = 0;
  int carrier_dim = 0;

  int algebra_dim() const;

  /// Reconstruct an algebra element from its per-block A factors.
  Matrix assemble(const std::vector<Matrix>& a_factors) const;

  /// Per-block A factors of X under the block model (tau-weighted partial
  /// trace over each B factor); assemble(project_factors(X)) == X exactly
  /// when X lies in the decomposed algebra.
  std::vector<Matrix> project_factors(const Matrix& X) const;
};

/// Undistorts the algebra on the support of rho, splits it along its center
/// (eigen-decomposition of a seeded random Hermitian central element),
/// extracts each block's tensor factorization from a minimal projection,
/// and recovers the tau factors by re-distortion. Degenerate random draws
/// are retried with a fresh seed (up to 8 times).
BlockDecomposition wedderburn_decompose(const DistortedAlgebra& A, const Tolerances& tol,
                                        std::uint64_t seed = 0x5eed);

}  // namespace ffqls
