#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "ffqls/tolerances.hpp"

namespace ffqls {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Tensor factorization (d_1,...,d_n) of the global Hilbert space.
/// Subsystem 0 is the leftmost (most significant) factor; external
/// interfaces use 1-based indices, everything here is 0-based.
class SubsystemLayout {
 public:
  explicit SubsystemLayout(std::vector<int> dims);

  int count() const { return static_cast<int>(dims_.size()); }
  int dim(int a) const { return dims_.at(a); }
  int total_dim() const { return total_; }
  const std::vector<int>& dims() const { return dims_; }

  /// Product of dims over a (sorted, in-range) index subset.
  int subset_dim(std::span<const int> subset) const;
  std::vector<int> complement(std::span<const int> subset) const;

  bool operator==(const SubsystemLayout& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  int total_;
};

/// List of index subsets N_j defining quasi-locality over a layout.
/// Construction sorts each neighborhood, validates bounds and drops
/// neighborhoods contained in another (normalized form).
class NeighborhoodStructure {
 public:
  NeighborhoodStructure(SubsystemLayout layout, std::vector<std::vector<int>> neighborhoods);

  const SubsystemLayout& layout() const { return layout_; }
  const std::vector<std::vector<int>>& neighborhoods() const { return neighborhoods_; }
  int count() const { return static_cast<int>(neighborhoods_.size()); }

  /// True if every bipartition of the subsystems is straddled by some
  /// neighborhood (equivalently: the neighborhood hypergraph is connected
  /// and covers every subsystem).
  bool connected() const;

 private:
  SubsystemLayout layout_;
  std::vector<std::vector<int>> neighborhoods_;
};

// ---- validation helpers ----------------------------------------------------

double hermiticity_residual(const Matrix& M);
bool is_hermitian(const Matrix& M, double tol);
/// Hermitian + eigenvalues >= -tol_psd + unit trace within tol_trace.
bool is_density(const Matrix& M, const Tolerances& tol);

// ---- vectorization (column-stacking convention) ------------------------------
//
// vec stacks columns: vec(M)[i + j*rows] = M(i,j), matching Eigen's
// column-major storage, so vec(A X B) = (B^T kron A) vec(X).

Vector vectorize(const Matrix& M);
Matrix devectorize(const Vector& v, int rows, int cols);
Matrix kron(const Matrix& A, const Matrix& B);

// ---- multipartite index plumbing ---------------------------------------------

/// Lookup tables between global basis indices and (subset, complement)
/// index pairs for one bipartition of the layout.
class BipartitionIndex {
 public:
  BipartitionIndex(std::span<const int> subset, const SubsystemLayout& layout);

  int subset_dim() const { return subset_dim_; }
  int comp_dim() const { return comp_dim_; }
  const std::vector<int>& subset() const { return subset_; }
  const std::vector<int>& complement() const { return comp_; }
  int global(int subset_idx, int comp_idx) const {
    return table_[subset_idx * comp_dim_ + comp_idx];
  }

 private:
  std::vector<int> subset_, comp_;
  int subset_dim_, comp_dim_;
  std::vector<int> table_;
};

/// Basis-permutation unitary: U|i_1,...,i_n> = |j_1,...,j_n> with
/// j_{perm[a]} = i_a (subsystem a moves to slot perm[a]).
Matrix permutation_unitary(std::span<const int> perm, const SubsystemLayout& layout);

/// Conjugation by the subsystem-permutation unitary, U M U^dag.
/// Co-dimensional subsystems only (otherwise the layout would change shape).
Matrix permute_subsystems(const Matrix& M, std::span<const int> perm, const SubsystemLayout& layout);

/// Global operator acting as `op` on the factors in `nbhd` (ascending order)
/// and as identity elsewhere: permutes the neighborhood to the front,
/// tensors with the identity, and permutes back.
Matrix embed_neighborhood(const Matrix& op, std::span<const int> nbhd, const SubsystemLayout& layout);

/// Tr over the complement of `keep`; output indexed by `keep` ascending.
Matrix partial_trace(const Matrix& M, std::span<const int> keep, const SubsystemLayout& layout);

/// Global matrix equal to A on the `nbhd` factors and B on the complement,
/// with the interleaving dictated by the layout (A indexed by ascending
/// nbhd, B by ascending complement).
Matrix tensor_interleave(const Matrix& A, const Matrix& B, std::span<const int> nbhd,
                         const SubsystemLayout& layout);

// ---- superoperators -----------------------------------------------------------

/// D^2 x D^2 matrix of rho -> -i[H,rho] + sum_k (L_k rho L_k^dag - {L_k^dag L_k, rho}/2)
/// under column vectorization. H may be null (dissipative-only).
Matrix liouvillian_matrix(const Matrix* H, std::span<const Matrix> lindblads,
                          const Tolerances& tol = {});

/// Vectorized matrix of rho -> sum_k M_k rho M_k^dag. If `require_tp`,
/// sum M_k^dag M_k = I is enforced within tol.tol_lin.
Matrix cptp_map_matrix(std::span<const Matrix> kraus, const Tolerances& tol = {},
                       bool require_tp = true);

/// Extend a superoperator on B(H_N) to one on B(H) acting trivially on the
/// complement factors.
Matrix superop_embed(const Matrix& local_superop, std::span<const int> nbhd,
                     const SubsystemLayout& layout);

/// Apply a vectorized superoperator to an operator.
Matrix apply_superop(const Matrix& superop, const Matrix& M);

/// Apply the embedding of a local superoperator to a global operator
/// without materializing the D^2 x D^2 matrix.
Matrix apply_embedded_superop(const Matrix& local_superop, std::span<const int> nbhd,
                              const SubsystemLayout& layout, const Matrix& M);

/// Residual of trace preservation, |vec(I)^dag S| for a generator
/// (max-abs over the row), 0 for exact Liouvillians.
double trace_preservation_residual(const Matrix& superop_generator, int dim);

}  // namespace ffqls
