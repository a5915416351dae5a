#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffqls/algebra.hpp"

namespace ffqls {

enum class Classification { CERTIFIED_FULL_RANK, CERTIFIED_GENERAL, NOT_FFQLS, UNDETERMINED };

std::string to_string(Classification c);

/// Per-neighborhood pipeline data: Schmidt span, its minimal modular-invariant
/// closure, and the dimensions a report needs.
struct NeighborhoodData {
  std::vector<int> neighborhood;
  int schmidt_dim = 0;
  int fixed_point_dim = 0;
  int extended_dim = 0;
  Matrix reduced_state;
  DistortedAlgebra fixed_point_set;  ///< on the neighborhood factor
};

struct NecessaryResult {
  bool ok = false;
  OperatorSubspace intersection;  ///< global operator subspace
  double target_residual = 0.0;   ///< membership residual of rho in the intersection
  std::vector<NeighborhoodData> per_neighborhood;
};

/// Computes the neighborhood Schmidt spans, closes each into its minimal
/// modular-invariant distorted algebra, extends by the complement operator
/// algebra, and intersects globally; passes iff the intersection is exactly
/// the line through rho.
NecessaryResult necessary_condition(const Matrix& rho, const NeighborhoodStructure& ns,
                                    const Tolerances& tol);

struct SupportResult {
  bool ok = false;
  Matrix intersection_projector;
  int intersection_rank = 0;
  int target_rank = 0;
  double mismatch = 0.0;  ///< norm of the projector difference
};

/// supp(rho) versus the intersection of the embedded reduced-state supports.
SupportResult support_condition(const Matrix& rho, const NeighborhoodStructure& ns,
                                const Tolerances& tol);

/// Pure-state specialization: supp(psi) equals the intersection of the
/// embedded reduced-support projectors.
bool dqls_condition(const Vector& psi, const NeighborhoodStructure& ns, const Tolerances& tol);

struct CheckReport {
  std::string target_hash;
  std::vector<std::vector<int>> neighborhoods;  ///< 0-based
  std::vector<NeighborhoodData> per_neighborhood;
  int intersection_dim = 0;
  OperatorSubspace intersection;
  bool necessary_ok = false;
  bool support_ok = false;
  bool full_rank = false;
  Classification classification = Classification::UNDETERMINED;
  double smallest_eigenvalue = 0.0;  ///< full-rank audit data
  double largest_eigenvalue = 0.0;
  std::optional<SupportResult> support;
  Tolerances tolerances;
  bool upgraded_by_construction = false;  ///< set by callers after a verified synthesis
};

/// Full decision pipeline. Classification:
///   necessary fails                  -> NOT_FFQLS
///   necessary ok and rho full-rank   -> CERTIFIED_FULL_RANK
///   necessary ok and support ok      -> CERTIFIED_GENERAL
///   otherwise                        -> UNDETERMINED
CheckReport classify(const Matrix& rho, const NeighborhoodStructure& ns, const Tolerances& tol);

}  // namespace ffqls
