#include "ffqls/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <set>
#include <stdexcept>

namespace ffqls {

namespace {

void check_subset(std::span<const int> subset, int n) {
  if (subset.empty()) throw std::invalid_argument("subsystem subset must be nonempty");
  for (size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= n) throw std::out_of_range("subsystem index out of range");
    if (i > 0 && subset[i] <= subset[i - 1])
      throw std::invalid_argument("subsystem subset must be strictly ascending");
  }
}

std::vector<int> sorted_copy(std::span<const int> subset) {
  std::vector<int> s(subset.begin(), subset.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Digit strides for the mixed-radix basis index, subsystem 0 most significant.
std::vector<int> strides_of(const std::vector<int>& dims) {
  std::vector<int> strides(dims.size());
  int acc = 1;
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    strides[a] = acc;
    acc *= dims[a];
  }
  return strides;
}

void decode_index(int idx, const std::vector<int>& dims, const std::vector<int>& strides,
                  std::vector<int>& digits) {
  for (size_t a = 0; a < dims.size(); ++a) {
    digits[a] = (idx / strides[a]) % dims[a];
  }
}

}  // namespace

SubsystemLayout::SubsystemLayout(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw std::invalid_argument("layout needs at least one subsystem");
  total_ = 1;
  for (int d : dims_) {
    if (d < 2) throw std::invalid_argument("subsystem dimensions must be >= 2");
    total_ *= d;
  }
}

int SubsystemLayout::subset_dim(std::span<const int> subset) const {
  check_subset(subset, count());
  int d = 1;
  for (int a : subset) d *= dims_[a];
  return d;
}

std::vector<int> SubsystemLayout::complement(std::span<const int> subset) const {
  check_subset(subset, count());
  std::vector<int> comp;
  size_t k = 0;
  for (int a = 0; a < count(); ++a) {
    if (k < subset.size() && subset[k] == a) {
      ++k;
    } else {
      comp.push_back(a);
    }
  }
  return comp;
}

NeighborhoodStructure::NeighborhoodStructure(SubsystemLayout layout,
                                             std::vector<std::vector<int>> neighborhoods)
    : layout_(std::move(layout)) {
  if (neighborhoods.empty()) throw std::invalid_argument("need at least one neighborhood");
  for (auto& nb : neighborhoods) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    check_subset(nb, layout_.count());
  }
  // normalized form: drop any neighborhood contained in another
  for (size_t j = 0; j < neighborhoods.size(); ++j) {
    bool contained = false;
    for (size_t k = 0; k < neighborhoods.size() && !contained; ++k) {
      if (j == k || neighborhoods[j].size() > neighborhoods[k].size()) continue;
      if (neighborhoods[j] == neighborhoods[k] && j > k) {
        contained = true;
      } else if (neighborhoods[j] != neighborhoods[k] &&
                 std::includes(neighborhoods[k].begin(), neighborhoods[k].end(),
                               neighborhoods[j].begin(), neighborhoods[j].end())) {
        contained = true;
      }
    }
    if (!contained) neighborhoods_.push_back(neighborhoods[j]);
  }
}

bool NeighborhoodStructure::connected() const {
  const int n = layout_.count();
  std::set<int> covered;
  for (const auto& nb : neighborhoods_) covered.insert(nb.begin(), nb.end());
  if (static_cast<int>(covered.size()) != n) return false;
  // union-find over subsystems, merging along neighborhoods
  std::vector<int> parent(n);
  for (int a = 0; a < n; ++a) parent[a] = a;
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& nb : neighborhoods_) {
    for (size_t i = 1; i < nb.size(); ++i) parent[find(nb[i])] = find(nb[0]);
  }
  int root = find(0);
  for (int a = 1; a < n; ++a)
    if (find(a) != root) return false;
  return true;
}

BipartitionIndex::BipartitionIndex(std::span<const int> subset, const SubsystemLayout& layout)
    : subset_(sorted_copy(subset)) {
  check_subset(subset_, layout.count());
  comp_ = layout.complement(subset_);
  subset_dim_ = layout.subset_dim(subset_);
  comp_dim_ = layout.total_dim() / subset_dim_;

  const auto strides = strides_of(layout.dims());
  std::vector<int> sub_dims, comp_dims;
  for (int a : subset_) sub_dims.push_back(layout.dim(a));
  for (int a : comp_) comp_dims.push_back(layout.dim(a));
  const auto sub_strides = strides_of(sub_dims);
  const auto comp_strides = strides_of(comp_dims);

  table_.resize(static_cast<size_t>(subset_dim_) * comp_dim_);
  for (int s = 0; s < subset_dim_; ++s)
    for (int c = 0; c < comp_dim_; ++c) {
      int g = 0;
      for (size_t t = 0; t < subset_.size(); ++t)
        g += ((s / sub_strides[t]) % sub_dims[t]) * strides[subset_[t]];
      for (size_t t = 0; t < comp_.size(); ++t)
        g += ((c / comp_strides[t]) % comp_dims[t]) * strides[comp_[t]];
      table_[s * comp_dim_ + c] = g;
    }
}

double hermiticity_residual(const Matrix& M) {
  return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& M, double tol) {
  return M.rows() == M.cols() && hermiticity_residual(M) <= tol;
}

bool is_density(const Matrix& M, const Tolerances& tol) {
  if (!is_hermitian(M, tol.tol_herm)) return false;
  if (std::abs(M.trace().real() - 1.0) > tol.tol_trace || std::abs(M.trace().imag()) > tol.tol_trace)
    return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol.tol_psd;
}

Vector vectorize(const Matrix& M) {
  return Eigen::Map<const Vector>(M.data(), M.size());
}

Matrix devectorize(const Vector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols)
    throw std::invalid_argument("devectorize: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

Matrix permutation_unitary(std::span<const int> perm, const SubsystemLayout& layout) {
  const int n = layout.count();
  if (static_cast<int>(perm.size()) != n) throw std::invalid_argument("permutation size mismatch");
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw std::invalid_argument("invalid permutation");
    seen[p] = true;
  }
  std::vector<int> new_dims(n);
  for (int a = 0; a < n; ++a) new_dims[perm[a]] = layout.dim(a);
  const auto old_strides = strides_of(layout.dims());
  const auto new_strides = strides_of(new_dims);

  const int D = layout.total_dim();
  Matrix U = Matrix::Zero(D, D);
  std::vector<int> digits(n);
  for (int i = 0; i < D; ++i) {
    decode_index(i, layout.dims(), old_strides, digits);
    int j = 0;
    for (int a = 0; a < n; ++a) j += digits[a] * new_strides[perm[a]];
    U(j, i) = 1.0;
  }
  return U;
}

Matrix permute_subsystems(const Matrix& M, std::span<const int> perm,
                          const SubsystemLayout& layout) {
  const int n = layout.count();
  for (int a = 1; a < n; ++a)
    if (layout.dim(a) != layout.dim(0))
      throw std::invalid_argument("permute_subsystems requires co-dimensional subsystems");
  Matrix U = permutation_unitary(perm, layout);
  return U * M * U.adjoint();
}

Matrix embed_neighborhood(const Matrix& op, std::span<const int> nbhd,
                          const SubsystemLayout& layout) {
  const auto nb = sorted_copy(nbhd);
  check_subset(nb, layout.count());
  const int dN = layout.subset_dim(nb);
  if (op.rows() != dN || op.cols() != dN)
    throw std::invalid_argument("embed_neighborhood: operator dimension mismatch");

  // permutation moving the neighborhood to the leading slots
  const auto comp = layout.complement(nb);
  std::vector<int> perm(layout.count());
  for (size_t k = 0; k < nb.size(); ++k) perm[nb[k]] = static_cast<int>(k);
  for (size_t m = 0; m < comp.size(); ++m) perm[comp[m]] = static_cast<int>(nb.size() + m);

  const int dComp = layout.total_dim() / dN;
  Matrix front = kron(op, Matrix::Identity(dComp, dComp));
  Matrix U = permutation_unitary(perm, layout);
  return U.adjoint() * front * U;
}

Matrix partial_trace(const Matrix& M, std::span<const int> keep, const SubsystemLayout& layout) {
  const int D = layout.total_dim();
  if (M.rows() != D || M.cols() != D) throw std::invalid_argument("partial_trace: shape mismatch");
  const BipartitionIndex bp(keep, layout);

  Matrix out = Matrix::Zero(bp.subset_dim(), bp.subset_dim());
  for (int i = 0; i < bp.subset_dim(); ++i)
    for (int j = 0; j < bp.subset_dim(); ++j) {
      cxd acc = 0.0;
      for (int c = 0; c < bp.comp_dim(); ++c) acc += M(bp.global(i, c), bp.global(j, c));
      out(i, j) = acc;
    }
  return out;
}

Matrix tensor_interleave(const Matrix& A, const Matrix& B, std::span<const int> nbhd,
                         const SubsystemLayout& layout) {
  const BipartitionIndex bp(nbhd, layout);
  const int dN = bp.subset_dim();
  const int dC = bp.comp_dim();
  if (A.rows() != dN || A.cols() != dN || B.rows() != dC || B.cols() != dC)
    throw std::invalid_argument("tensor_interleave: factor shape mismatch");

  const int D = layout.total_dim();
  Matrix out = Matrix::Zero(D, D);
  for (int i = 0; i < dN; ++i)
    for (int j = 0; j < dN; ++j) {
      if (A(i, j) == cxd(0, 0)) continue;
      for (int r = 0; r < dC; ++r)
        for (int s = 0; s < dC; ++s) out(bp.global(i, r), bp.global(j, s)) = A(i, j) * B(r, s);
    }
  return out;
}

Matrix liouvillian_matrix(const Matrix* H, std::span<const Matrix> lindblads,
                          const Tolerances& tol) {
  int D = -1;
  if (H != nullptr) D = static_cast<int>(H->rows());
  for (const auto& L : lindblads) {
    if (D < 0) D = static_cast<int>(L.rows());
    if (L.rows() != D || L.cols() != D)
      throw std::invalid_argument("liouvillian_matrix: operator shape mismatch");
  }
  if (D < 0) throw std::invalid_argument("liouvillian_matrix: no operators given");

  const Matrix I = Matrix::Identity(D, D);
  Matrix S = Matrix::Zero(D * D, D * D);
  if (H != nullptr) {
    if (H->cols() != D) throw std::invalid_argument("liouvillian_matrix: H not square");
    if (hermiticity_residual(*H) > tol.tol_herm)
      throw std::invalid_argument("liouvillian_matrix: H not Hermitian within tolerance");
    S += cxd(0, -1) * (kron(I, *H) - kron(H->transpose(), I));
  }
  for (const auto& L : lindblads) {
    const Matrix LdL = L.adjoint() * L;
    S += kron(L.conjugate(), L);
    S -= 0.5 * kron(I, LdL);
    S -= 0.5 * kron(LdL.transpose(), I);
  }
  return S;
}

Matrix cptp_map_matrix(std::span<const Matrix> kraus, const Tolerances& tol, bool require_tp) {
  if (kraus.empty()) throw std::invalid_argument("cptp_map_matrix: empty Kraus list");
  const int D = static_cast<int>(kraus[0].rows());
  Matrix tp = Matrix::Zero(D, D);
  Matrix S = Matrix::Zero(D * D, D * D);
  for (const auto& M : kraus) {
    if (M.rows() != D || M.cols() != D)
      throw std::invalid_argument("cptp_map_matrix: Kraus shape mismatch");
    tp += M.adjoint() * M;
    S += kron(M.conjugate(), M);
  }
  if (require_tp) {
    const double residual = (tp - Matrix::Identity(D, D)).cwiseAbs().maxCoeff();
    if (residual > tol.tol_lin)
      throw std::invalid_argument("cptp_map_matrix: trace preservation violated, residual " +
                                  std::to_string(residual));
  }
  return S;
}

Matrix superop_embed(const Matrix& local_superop, std::span<const int> nbhd,
                     const SubsystemLayout& layout) {
  const BipartitionIndex bp(nbhd, layout);
  const int dN = bp.subset_dim();
  const int dC = bp.comp_dim();
  const int D = layout.total_dim();
  if (local_superop.rows() != dN * dN || local_superop.cols() != dN * dN)
    throw std::invalid_argument("superop_embed: local superoperator shape mismatch");

  Matrix S = Matrix::Zero(D * D, D * D);
  // nonzeros: row pair (i,j), column pair (k,l) with matching complement digits
  for (int iN = 0; iN < dN; ++iN)
    for (int jN = 0; jN < dN; ++jN)
      for (int kN = 0; kN < dN; ++kN)
        for (int lN = 0; lN < dN; ++lN) {
          const cxd s = local_superop(iN + jN * dN, kN + lN * dN);
          if (s == cxd(0, 0)) continue;
          for (int cr = 0; cr < dC; ++cr)
            for (int cc = 0; cc < dC; ++cc) {
              const int i = bp.global(iN, cr);
              const int j = bp.global(jN, cc);
              const int k = bp.global(kN, cr);
              const int l = bp.global(lN, cc);
              S(i + j * D, k + l * D) = s;
            }
        }
  return S;
}

Matrix apply_superop(const Matrix& superop, const Matrix& M) {
  return devectorize(superop * vectorize(M), static_cast<int>(M.rows()),
                     static_cast<int>(M.cols()));
}

Matrix apply_embedded_superop(const Matrix& local_superop, std::span<const int> nbhd,
                              const SubsystemLayout& layout, const Matrix& M) {
  const BipartitionIndex bp(nbhd, layout);
  const int dN = bp.subset_dim();
  const int dC = bp.comp_dim();
  const int D = layout.total_dim();
  if (M.rows() != D || M.cols() != D)
    throw std::invalid_argument("apply_embedded_superop: operand shape mismatch");

  Matrix out = Matrix::Zero(D, D);
  Matrix slice(dN, dN);
  for (int cr = 0; cr < dC; ++cr)
    for (int cc = 0; cc < dC; ++cc) {
      for (int i = 0; i < dN; ++i)
        for (int j = 0; j < dN; ++j) slice(i, j) = M(bp.global(i, cr), bp.global(j, cc));
      const Matrix mapped = apply_superop(local_superop, slice);
      for (int i = 0; i < dN; ++i)
        for (int j = 0; j < dN; ++j) out(bp.global(i, cr), bp.global(j, cc)) = mapped(i, j);
    }
  return out;
}

double trace_preservation_residual(const Matrix& superop_generator, int dim) {
  const Vector trace_vec = vectorize(Matrix::Identity(dim, dim));
  return (trace_vec.adjoint() * superop_generator).cwiseAbs().maxCoeff();
}

}  // namespace ffqls
