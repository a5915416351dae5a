#include "ffqls/opspace.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <stdexcept>

namespace ffqls {

namespace {

// columns = vectorized basis elements
Matrix stack_basis(std::span<const Matrix> basis) {
  if (basis.empty()) return Matrix(0, 0);
  Matrix B(basis[0].size(), static_cast<Eigen::Index>(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k) B.col(static_cast<Eigen::Index>(k)) = vectorize(basis[k]);
  return B;
}

}  // namespace

OperatorSubspace::OperatorSubspace(int factor_dim, std::vector<Matrix> basis, std::string label)
    : factor_dim_(factor_dim), basis_(std::move(basis)), label_(std::move(label)) {
  for (const auto& B : basis_)
    if (B.rows() != factor_dim_ || B.cols() != factor_dim_)
      throw std::invalid_argument("OperatorSubspace: basis element shape mismatch");
}

double OperatorSubspace::orthonormality_residual() const {
  if (basis_.empty()) return 0.0;
  const Matrix B = stack_basis(basis_);
  return (B.adjoint() * B - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

Matrix OperatorSubspace::vec_projector() const {
  const int d2 = factor_dim_ * factor_dim_;
  if (basis_.empty()) return Matrix::Zero(d2, d2);
  const Matrix B = stack_basis(basis_);
  return B * B.adjoint();
}

Matrix OperatorSubspace::project(const Matrix& M) const {
  Matrix out = Matrix::Zero(factor_dim_, factor_dim_);
  for (const auto& B : basis_) out += (vectorize(B).adjoint() * vectorize(M)).value() * B;
  return out;
}

OperatorSubspace orthonormalize(std::span<const Matrix> spanners, double rank_tol,
                                std::string label) {
  if (spanners.empty()) throw std::invalid_argument("orthonormalize: empty spanner list");
  const int d = static_cast<int>(spanners[0].rows());
  for (const auto& M : spanners)
    if (M.rows() != d || M.cols() != d)
      throw std::invalid_argument("orthonormalize: spanner shape mismatch");

  const Matrix B = stack_basis(spanners);
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  std::vector<Matrix> basis;
  if (sigma.size() > 0 && sigma(0) > 0.0) {
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
      if (sigma(k) > rank_tol * sigma(0)) basis.push_back(devectorize(svd.matrixU().col(k), d, d));
    }
  }
  return OperatorSubspace(d, std::move(basis), std::move(label));
}

OperatorSubspace schmidt_span(const Matrix& rho, std::span<const int> nbhd,
                              const SubsystemLayout& layout, const Tolerances& tol) {
  const int D = layout.total_dim();
  if (rho.rows() != D || rho.cols() != D) throw std::invalid_argument("schmidt_span: shape mismatch");
  const BipartitionIndex bp(nbhd, layout);
  const int dN = bp.subset_dim();
  const int dC = bp.comp_dim();

  // reshuffle: R[(iN,jN),(iC,jC)] = rho[(iN,iC),(jN,jC)]
  Matrix R(dN * dN, dC * dC);
  for (int iN = 0; iN < dN; ++iN)
    for (int jN = 0; jN < dN; ++jN)
      for (int iC = 0; iC < dC; ++iC)
        for (int jC = 0; jC < dC; ++jC)
          R(iN + jN * dN, iC + jC * dC) = rho(bp.global(iN, iC), bp.global(jN, jC));

  Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  std::vector<Matrix> basis;
  if (sigma.size() > 0 && sigma(0) > 0.0) {
    for (Eigen::Index k = 0; k < sigma.size(); ++k)
      if (sigma(k) > tol.rank_tol * sigma(0)) basis.push_back(devectorize(svd.matrixU().col(k), dN, dN));
  }
  return OperatorSubspace(dN, std::move(basis));
}

int operator_schmidt_rank(const Matrix& rho, std::span<const int> nbhd,
                          const SubsystemLayout& layout, double rank_tol) {
  const BipartitionIndex bp(nbhd, layout);
  const int dN = bp.subset_dim();
  const int dC = bp.comp_dim();
  Matrix R(dN * dN, dC * dC);
  for (int iN = 0; iN < dN; ++iN)
    for (int jN = 0; jN < dN; ++jN)
      for (int iC = 0; iC < dC; ++iC)
        for (int jC = 0; jC < dC; ++jC)
          R(iN + jN * dN, iC + jC * dC) = rho(bp.global(iN, iC), bp.global(jN, jC));
  Eigen::JacobiSVD<Matrix> svd(R);
  const auto& sigma = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(0) > 0.0 && sigma(k) > rank_tol * sigma(0)) ++rank;
  return rank;
}

OperatorSubspace subspace_intersection(std::span<const OperatorSubspace> spaces,
                                       const Tolerances& tol) {
  if (spaces.empty()) throw std::invalid_argument("subspace_intersection: no spaces");
  const int d = spaces[0].factor_dim();
  for (const auto& S : spaces)
    if (S.factor_dim() != d)
      throw std::invalid_argument("subspace_intersection: carrier dimension mismatch");

  const int d2 = d * d;
  Matrix avg = Matrix::Zero(d2, d2);
  for (const auto& S : spaces) avg += S.vec_projector();
  avg /= static_cast<double>(spaces.size());

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (avg + avg.adjoint()));
  std::vector<Matrix> basis;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) >= 1.0 - tol.intersect_tol)
      basis.push_back(devectorize(es.eigenvectors().col(k), d, d));
  }
  return OperatorSubspace(d, std::move(basis));
}

OperatorSubspace extend_to_global(const OperatorSubspace& sub, std::span<const int> nbhd,
                                  const SubsystemLayout& layout, const Tolerances& tol) {
  const BipartitionIndex bp(nbhd, layout);
  if (sub.factor_dim() != bp.subset_dim())
    throw std::invalid_argument("extend_to_global: carrier mismatch");
  const int dC = bp.comp_dim();
  const long out_dim = static_cast<long>(sub.dim()) * dC * dC;
  if (out_dim > tol.extension_cap)
    throw std::runtime_error("extend_to_global: extended dimension " + std::to_string(out_dim) +
                             " exceeds cap " + std::to_string(tol.extension_cap) +
                             "; reduce the system size or raise extension_cap");

  std::vector<Matrix> basis;
  basis.reserve(static_cast<size_t>(out_dim));
  Matrix unit = Matrix::Zero(dC, dC);
  for (const auto& B : sub.basis())
    for (int r = 0; r < dC; ++r)
      for (int s = 0; s < dC; ++s) {
        unit(r, s) = 1.0;
        basis.push_back(tensor_interleave(B, unit, nbhd, layout));
        unit(r, s) = 0.0;
      }
  return OperatorSubspace(layout.total_dim(), std::move(basis), sub.label());
}

Matrix support_of(const OperatorSubspace& sub, double rank_tol) {
  if (sub.dim() == 0) throw std::invalid_argument("support_of: empty subspace");
  const int d = sub.factor_dim();
  Matrix S = Matrix::Zero(d, d);
  for (const auto& B : sub.basis()) S += B * B.adjoint() + B.adjoint() * B;
  return support_projector(S, rank_tol);
}

Matrix support_projector(const Matrix& psd, double rank_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (psd + psd.adjoint()));
  const auto& ev = es.eigenvalues();
  const double top = ev.cwiseAbs().maxCoeff();
  Matrix P = Matrix::Zero(psd.rows(), psd.cols());
  if (top == 0.0) return P;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev(k) > rank_tol * top) P += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  return P;
}

MembershipResult contains(const OperatorSubspace& sub, const Matrix& M, double member_tol) {
  const double norm = M.norm();
  if (norm == 0.0) return {true, 0.0};
  const double residual = (M - sub.project(M)).norm() / norm;
  return {residual <= member_tol, residual};
}

Matrix projector_intersection(std::span<const Matrix> projectors, const Tolerances& tol) {
  if (projectors.empty()) throw std::invalid_argument("projector_intersection: no projectors");
  Matrix avg = Matrix::Zero(projectors[0].rows(), projectors[0].cols());
  for (const auto& P : projectors) avg += P;
  avg /= static_cast<double>(projectors.size());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (avg + avg.adjoint()));
  Matrix P = Matrix::Zero(avg.rows(), avg.cols());
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (es.eigenvalues()(k) >= 1.0 - tol.intersect_tol)
      P += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  return P;
}

}  // namespace ffqls
