#pragma once

#include <span>
#include <string>
#include <vector>

#include "ffqls/tensor.hpp"

namespace ffqls {

/// Subspace of B(C^d) with a Hilbert-Schmidt-orthonormal basis.
class OperatorSubspace {
 public:
  OperatorSubspace() = default;
  OperatorSubspace(int factor_dim, std::vector<Matrix> basis, std::string label = "");

  int factor_dim() const { return factor_dim_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Matrix>& basis() const { return basis_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  /// Gram-matrix deviation from the identity.
  double orthonormality_residual() const;

  /// Orthogonal projector onto the subspace in the vectorized picture,
  /// a d^2 x d^2 matrix.
  Matrix vec_projector() const;

  /// HS projection of M onto the subspace.
  Matrix project(const Matrix& M) const;

 private:
  int factor_dim_ = 0;
  std::vector<Matrix> basis_;
  std::string label_;
};

/// Orthonormal basis of the span of `spanners`; numerical rank decided by
/// singular values relative to the largest (keep sigma > rank_tol * sigma_max).
/// All-zero input yields the empty subspace.
OperatorSubspace orthonormalize(std::span<const Matrix> spanners, double rank_tol,
                                std::string label = "");

/// Operator-Schmidt span of rho on the `nbhd` factor:
/// span{ Tr_comp((I_N kron B) rho) : B over a basis of the complement },
/// computed by reshuffling rho into a (d_N^2 x d_comp^2) coefficient matrix
/// and orthonormalizing the neighborhood-side singular factors.
OperatorSubspace schmidt_span(const Matrix& rho, std::span<const int> nbhd,
                              const SubsystemLayout& layout, const Tolerances& tol);

/// Operator-Schmidt rank from an independent reshuffle-SVD (no basis kept).
int operator_schmidt_rank(const Matrix& rho, std::span<const int> nbhd,
                          const SubsystemLayout& layout, double rank_tol);

/// Intersection of subspaces sharing a carrier, via the eigenspace of the
/// averaged projectors at eigenvalue within intersect_tol of 1.
OperatorSubspace subspace_intersection(std::span<const OperatorSubspace> spaces,
                                       const Tolerances& tol);

/// Tensor the basis with a full HS-orthonormal basis of the complement
/// factor, reordered to global indexing. dim(out) = dim(sub) * d_comp^2.
OperatorSubspace extend_to_global(const OperatorSubspace& sub, std::span<const int> nbhd,
                                  const SubsystemLayout& layout, const Tolerances& tol);

/// Hermitian projector onto the union of supports of the basis elements,
/// the range projector of sum_i (B_i B_i^dag + B_i^dag B_i).
Matrix support_of(const OperatorSubspace& sub, double rank_tol);

/// Projector onto the support (range) of a positive-semidefinite operator.
Matrix support_projector(const Matrix& psd, double rank_tol);

struct MembershipResult {
  bool member = false;
  double residual = 0.0;  ///< ||M - P(M)||_F / ||M||_F
};

/// True iff the relative HS-projection residual is within member_tol.
/// Zero M is a member by convention.
MembershipResult contains(const OperatorSubspace& sub, const Matrix& M, double member_tol);

/// Intersection of Hilbert-space subspaces given by Hermitian projectors,
/// as a projector (eigenvectors of the averaged projectors near 1).
Matrix projector_intersection(std::span<const Matrix> projectors, const Tolerances& tol);

}  // namespace ffqls
