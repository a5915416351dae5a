#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ffqls/synthesis.hpp"

namespace ffqls {

struct KernelResult {
  OperatorSubspace space;      ///< devectorized, orthonormal
  double cut_below = 0.0;      ///< largest singular value counted as zero
  double cut_above = 0.0;      ///< smallest singular value kept
  double worst_residual = 0.0; ///< max ||L vec(B)|| over the basis
};

/// Null space of a vectorized generator via a rank-revealing SVD; the two
/// singular values bracketing the cut are reported for auditability.
KernelResult kernel(const Matrix& superop, int dim, const Tolerances& tol);

struct FrustrationResult {
  bool ok = false;
  std::vector<double> residuals;  ///< worst per component over the kernel basis
};

/// True iff every global-kernel element is annihilated by every component.
FrustrationResult is_frustration_free(const GeneratorBundle& bundle, const Tolerances& tol);

struct GapResult {
  bool defined = false;     ///< false for the zero generator
  double raw = 0.0;         ///< min -Re(lambda) over nonzero eigenvalues
  double normalized = 0.0;  ///< same after scaling L to unit spectral norm
  double frobenius_normalized = 0.0;
  double spectral_norm = 0.0;
  double frobenius_norm = 0.0;
};

/// Spectral gap of a generator. Both the spectral-norm-normalized and the
/// raw value are always computed (plus the Frobenius reading, since the
/// normalization convention is not canonical); eigenvalues within spec_tol
/// of zero (relative to the spectral norm) count as kernel.
GapResult spectral_gap(const Matrix& superop, const Tolerances& tol);

struct DualKernelResult {
  bool ok = false;
  double residual = 0.0;       ///< projector mismatch between the two sides
  bool full_rank_branch = true;
  std::optional<double> commutant_residual;  ///< only when noise operators are supplied
};

/// Checks ker(L) against rho^{1/2} ker(L^dag) rho^{1/2} (full-rank branch) or
/// its support-restricted form (general branch). When the generator's noise
/// operators are supplied, also checks that the commutant of the generated
/// algebra sits inside ker(L^dag).
DualKernelResult dual_kernel_check(const Matrix& superop, const Matrix& rho, const Tolerances& tol,
                                   const std::vector<Matrix>& noise_ops = {});

struct TrajectorySample {
  double t = 0.0;
  Matrix state;
  double trace_distance = 0.0;  ///< to the target, when one is given
  std::optional<double> lyapunov;  ///< 1 - Tr(Pi state), when Pi is given
};

/// e^{Lt}(rho0) on an increasing time grid, by eigendecomposition when the
/// eigenbasis is well-conditioned and scaling-and-squaring otherwise. Every
/// output is re-validated as a density matrix at 1e-8.
std::vector<TrajectorySample> evolve(const Matrix& superop, const Matrix& rho0,
                                     const std::vector<double>& t_grid,
                                     const Matrix* target = nullptr,
                                     const Matrix* support_proj = nullptr);

/// Trace distance ||a - b||_1 / 2.
double trace_distance(const Matrix& a, const Matrix& b);

struct VerifyReport {
  int kernel_dim = 0;
  std::string kernel_hash;
  double kernel_cut_below = 0.0;
  double kernel_cut_above = 0.0;
  bool ff_ok = false;
  std::vector<double> ff_residuals;
  bool gas_ok = false;
  bool kernel_is_target = false;   ///< kernel = span{rho}
  double kernel_target_distance = 0.0;  ///< trace distance of the kernel representative to rho
  GapResult gap;
  bool dual_kernel_ok = false;
  double dual_kernel_residual = 0.0;
  std::vector<std::pair<double, double>> convergence;  ///< (t, trace distance), per initial state
  bool converged = false;
  Tolerances tolerances;
};

/// Full post-hoc verification: kernel, frustration-freeness, gap, dual-kernel
/// identity, and trajectories from the maximally mixed state, a random pure
/// product state and a random density (seeded).
VerifyReport verify_bundle(const GeneratorBundle& bundle, const Matrix& rho, const Tolerances& tol,
                           std::uint64_t seed = 0x5eed);

/// Largest superoperator commutator norm between embedded components.
double component_commutation_residual(const GeneratorBundle& bundle);

}  // namespace ffqls
