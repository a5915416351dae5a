#include "ffqls/check.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>

#include "ffqls/hashing.hpp"

namespace ffqls {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::CERTIFIED_FULL_RANK: return "CERTIFIED_FULL_RANK";
    case Classification::CERTIFIED_GENERAL: return "CERTIFIED_GENERAL";
    case Classification::NOT_FFQLS: return "NOT_FFQLS";
    case Classification::UNDETERMINED: return "UNDETERMINED";
  }
  return "UNDETERMINED";
}

NecessaryResult necessary_condition(const Matrix& rho, const NeighborhoodStructure& ns,
                                    const Tolerances& tol) {
  const auto& layout = ns.layout();
  NecessaryResult result;
  std::vector<OperatorSubspace> extended;
  for (const auto& nb : ns.neighborhoods()) {
    NeighborhoodData data;
    data.neighborhood = nb;
    data.reduced_state = partial_trace(rho, nb, layout);
    const OperatorSubspace span = schmidt_span(rho, nb, layout, tol);
    data.schmidt_dim = span.dim();
    data.fixed_point_set = minimal_fixed_point_set(span, data.reduced_state, tol);
    data.fixed_point_dim = data.fixed_point_set.space.dim();
    OperatorSubspace ext = extend_to_global(data.fixed_point_set.space, nb, layout, tol);
    data.extended_dim = ext.dim();
    extended.push_back(std::move(ext));
    result.per_neighborhood.push_back(std::move(data));
  }
  result.intersection = subspace_intersection(extended, tol);
  const auto membership = contains(result.intersection, rho, tol.member_tol);
  result.target_residual = membership.residual;
  result.ok = result.intersection.dim() == 1 && membership.member;
  return result;
}

SupportResult support_condition(const Matrix& rho, const NeighborhoodStructure& ns,
                                const Tolerances& tol) {
  const auto& layout = ns.layout();
  std::vector<Matrix> projectors;
  for (const auto& nb : ns.neighborhoods()) {
    const Matrix P = support_projector(partial_trace(rho, nb, layout), tol.rank_tol);
    const Matrix comp_id = Matrix::Identity(layout.total_dim() / layout.subset_dim(nb),
                                            layout.total_dim() / layout.subset_dim(nb));
    projectors.push_back(tensor_interleave(P, comp_id, nb, layout));
  }
  SupportResult result;
  result.intersection_projector = projector_intersection(projectors, tol);
  result.intersection_rank =
      static_cast<int>(std::lround(result.intersection_projector.trace().real()));
  const Matrix target = support_projector(rho, tol.rank_tol);
  result.target_rank = static_cast<int>(std::lround(target.trace().real()));
  result.mismatch = (result.intersection_projector - target).norm();
  result.ok = result.mismatch <= 1e-7;
  return result;
}

bool dqls_condition(const Vector& psi, const NeighborhoodStructure& ns, const Tolerances& tol) {
  if (std::abs(psi.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("dqls_condition: state vector not normalized");
  const Matrix rho = psi * psi.adjoint();
  return support_condition(rho, ns, tol).ok;
}

CheckReport classify(const Matrix& rho, const NeighborhoodStructure& ns, const Tolerances& tol) {
  if (!is_density(rho, tol)) throw std::invalid_argument("classify: target is not a density matrix");

  CheckReport report;
  report.tolerances = tol;
  report.target_hash = operator_hash(rho);
  report.neighborhoods = ns.neighborhoods();

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  report.smallest_eigenvalue = es.eigenvalues().minCoeff();
  report.largest_eigenvalue = es.eigenvalues().maxCoeff();
  report.full_rank = report.smallest_eigenvalue > tol.rank_tol * report.largest_eigenvalue;

  NecessaryResult necessary = necessary_condition(rho, ns, tol);
  report.necessary_ok = necessary.ok;
  report.intersection_dim = necessary.intersection.dim();
  report.intersection = std::move(necessary.intersection);
  report.per_neighborhood = std::move(necessary.per_neighborhood);

  if (!report.necessary_ok) {
    report.classification = Classification::NOT_FFQLS;
    return report;
  }
  if (report.full_rank) {
    report.classification = Classification::CERTIFIED_FULL_RANK;
    return report;
  }
  report.support = support_condition(rho, ns, tol);
  report.support_ok = report.support->ok;
  report.classification =
      report.support_ok ? Classification::CERTIFIED_GENERAL : Classification::UNDETERMINED;
  return report;
}

}  // namespace ffqls
