#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace ffqls {

/// Shared numerical tolerances. One instance is threaded through a whole
/// pipeline run and echoed into every report so results are auditable.
struct Tolerances {
  double tol_lin = 1e-10;     ///< absolute, linear-algebra residuals on unit-scaled matrices
  double tol_herm = 1e-10;    ///< Hermiticity residual max|M - M^dag|
  double tol_psd = 1e-9;      ///< eigenvalue floor for positive-semidefinite checks
  double tol_trace = 1e-10;   ///< |Tr - 1| for density operators
  double rank_tol = 1e-9;     ///< relative singular-value cutoff for numerical rank
  double member_tol = 1e-8;   ///< relative residual for subspace membership
  double intersect_tol = 1e-8;///< eigenvalue window around 1 in projector intersections
  double block_tol = 1e-7;    ///< reconstruction residual for block decompositions
  double spec_tol = 1e-7;     ///< spectrum comparisons and kernel eigenvalue cut
  double cluster_tol = 1e-7;  ///< relative gap for merging eigenvalue clusters
  int extension_cap = 65536;  ///< max basis size of an extended operator subspace
  int max_closure_iter = 64;  ///< iteration bound for algebra closures

  void set(const std::string& key, double value);
  std::map<std::string, double> as_map() const;
};

inline void Tolerances::set(const std::string& key, double value) {
  if (key == "tol_lin") tol_lin = value;
  else if (key == "tol_herm") tol_herm = value;
  else if (key == "tol_psd") tol_psd = value;
  else if (key == "tol_trace") tol_trace = value;
  else if (key == "rank_tol") rank_tol = value;
  else if (key == "member_tol") member_tol = value;
  else if (key == "intersect_tol") intersect_tol = value;
  else if (key == "block_tol") block_tol = value;
  else if (key == "spec_tol") spec_tol = value;
  else if (key == "cluster_tol") cluster_tol = value;
  else if (key == "extension_cap") extension_cap = static_cast<int>(value);
  else if (key == "max_closure_iter") max_closure_iter = static_cast<int>(value);
  else throw std::invalid_argument("unknown tolerance key: " + key);
}

inline std::map<std::string, double> Tolerances::as_map() const {
  return {
      {"tol_lin", tol_lin},
      {"tol_herm", tol_herm},
      {"tol_psd", tol_psd},
      {"tol_trace", tol_trace},
      {"rank_tol", rank_tol},
      {"member_tol", member_tol},
      {"intersect_tol", intersect_tol},
      {"block_tol", block_tol},
      {"spec_tol", spec_tol},
      {"cluster_tol", cluster_tol},
      {"extension_cap", static_cast<double>(extension_cap)},
      {"max_closure_iter", static_cast<double>(max_closure_iter)},
  };
}

}  // namespace ffqls
