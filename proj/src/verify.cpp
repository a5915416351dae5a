#include "ffqls/verify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "ffqls/hashing.hpp"

namespace ffqls {

KernelResult kernel(const Matrix& superop, int dim, const Tolerances& tol) {
  Eigen::BDCSVD<Matrix> svd(superop, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double top = s.size() > 0 ? s(0) : 0.0;
  // a numerically-zero generator has only roundoff singular values; its
  // kernel is the whole space, not nothing
  if (top <= 1e-12) top = 0.0;

  KernelResult out;
  std::vector<Matrix> basis;
  for (Eigen::Index k = 0; k < svd.matrixV().cols(); ++k) {
    const double sv = k < s.size() ? s(k) : 0.0;
    if (top == 0.0 || sv <= tol.rank_tol * top) {
      basis.push_back(devectorize(svd.matrixV().col(k), dim, dim));
      out.cut_below = std::max(out.cut_below, sv);
    } else {
      out.cut_above = sv;  // singular values are descending; the last kept is smallest
    }
  }
  for (const auto& B : basis)
    out.worst_residual = std::max(out.worst_residual, (superop * vectorize(B)).norm());
  out.space = OperatorSubspace(dim, std::move(basis), "ker");
  return out;
}

FrustrationResult is_frustration_free(const GeneratorBundle& bundle, const Tolerances& tol) {
  const int D = bundle.layout.total_dim();
  const KernelResult ker = kernel(bundle.assemble_global(), D, tol);

  FrustrationResult out;
  out.ok = true;
  for (const auto& comp : bundle.components) {
    double worst = 0.0;
    for (const auto& B : ker.space.basis())
      worst = std::max(
          worst,
          apply_embedded_superop(comp.local_superop, comp.neighborhood, bundle.layout, B).norm());
    out.residuals.push_back(worst);
    if (worst > tol.tol_lin) out.ok = false;
  }
  return out;
}

namespace {

GapResult gap_from_spectrum(const Vector& eigenvalues, double spectral_norm, double frobenius_norm,
                            const Tolerances& tol) {
  GapResult out;
  out.frobenius_norm = frobenius_norm;
  out.spectral_norm = spectral_norm;
  if (frobenius_norm == 0.0) return out;  // zero generator: gap undefined
  double min_decay = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    const cxd ev = eigenvalues(k);
    if (std::abs(ev) <= tol.spec_tol * spectral_norm) continue;  // kernel cluster
    min_decay = std::min(min_decay, -ev.real());
  }
  if (!std::isfinite(min_decay)) return out;  // nothing outside the kernel
  out.defined = true;
  out.raw = min_decay;
  out.normalized = min_decay / spectral_norm;
  out.frobenius_normalized = min_decay / frobenius_norm;
  return out;
}

}  // namespace

GapResult spectral_gap(const Matrix& superop, const Tolerances& tol) {
  const double frob = superop.norm();
  if (frob == 0.0) return GapResult{};
  Eigen::BDCSVD<Matrix> svd(superop);
  Eigen::ComplexEigenSolver<Matrix> es(superop, /*computeEigenvectors=*/false);
  return gap_from_spectrum(es.eigenvalues(), svd.singularValues()(0), frob, tol);
}

namespace {

// orthonormal projector onto the span of mapped kernel elements
Matrix mapped_kernel_projector(const std::vector<Matrix>& mapped, int dim, double rank_tol) {
  if (mapped.empty()) return Matrix::Zero(dim * dim, dim * dim);
  const OperatorSubspace space = orthonormalize(mapped, rank_tol);
  return space.vec_projector();
}

}  // namespace

DualKernelResult dual_kernel_check(const Matrix& superop, const Matrix& rho, const Tolerances& tol,
                                   const std::vector<Matrix>& noise_ops) {
  const int D = static_cast<int>(rho.rows());
  const double invariance = (superop * vectorize(rho)).norm();
  if (invariance > 1e-8)
    throw std::invalid_argument("dual_kernel_check: rho is not invariant, residual " +
                                std::to_string(invariance));

  const DensityPowers dp(rho, tol.rank_tol);
  DualKernelResult out;
  out.full_rank_branch = dp.rank() == D;

  const KernelResult ker = kernel(superop, D, tol);
  Matrix rhs_projector;
  if (out.full_rank_branch) {
    const Matrix sqrt = dp.power(0.5);
    const KernelResult dual = kernel(superop.adjoint(), D, tol);
    std::vector<Matrix> mapped;
    for (const auto& B : dual.space.basis()) mapped.push_back(sqrt * B * sqrt);
    rhs_projector = mapped_kernel_projector(mapped, D, tol.rank_tol);
  } else {
    // restrict the generator to the support of rho, flip to the dual there,
    // then push back and re-distort
    const Matrix V = dp.support_isometry();
    const Matrix Vvec = kron(V.conjugate(), V);  // vec of X -> vec of V X V^dag compressions
    const Matrix reduced = Vvec.adjoint() * superop * Vvec;
    const KernelResult dual = kernel(reduced.adjoint(), dp.rank(), tol);
    const Matrix sqrt = dp.power(0.5);
    std::vector<Matrix> mapped;
    for (const auto& B : dual.space.basis()) mapped.push_back(sqrt * (V * B * V.adjoint()) * sqrt);
    rhs_projector = mapped_kernel_projector(mapped, D, tol.rank_tol);
  }
  out.residual = (ker.space.vec_projector() - rhs_projector).norm();
  out.ok = out.residual <= 1e-7;

  if (!noise_ops.empty()) {
    // the commutant of the generated algebra is the joint commutant of the
    // generators and their adjoints: one PSD null-space problem. With
    // N = I kron A - A^T kron I, the Gram term N^dag N expands into four
    // Kronecker products of D x D factors, so no D^2 x D^2 product is needed.
    const Matrix I = Matrix::Identity(D, D);
    Matrix psd = Matrix::Zero(D * D, D * D);
    for (const auto& L : noise_ops) {
      for (const Matrix& A : {L, Matrix(L.adjoint())}) {
        const Matrix AdA = A.adjoint() * A;
        psd += kron(I, AdA) + kron((A * A.adjoint()).transpose(), I) -
               kron(A.transpose(), A.adjoint()) - kron(A.conjugate(), A);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(psd);
    const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-30);
    double worst = 0.0;
    const Matrix dual_gen = superop.adjoint();
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (es.eigenvalues()(k) > tol.rank_tol * top) continue;
      worst = std::max(worst, (dual_gen * es.eigenvectors().col(k)).norm());
    }
    out.commutant_residual = worst;
    if (worst > 1e-7) out.ok = false;
  }
  return out;
}

double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * ((a - b) + (a - b).adjoint()));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

namespace {

// one-time spectral setup reused across initial states; falls back to
// scaling-and-squaring when the eigenbasis is ill-conditioned
class Propagator {
 public:
  explicit Propagator(const Matrix& superop) : superop_(superop), es_(superop) {
    Eigen::JacobiSVD<Matrix> cond_svd(es_.eigenvectors());
    const auto& sv = cond_svd.singularValues();
    const double cond =
        sv(0) / std::max(sv(sv.size() - 1), std::numeric_limits<double>::min());
    spectral_route_ = std::isfinite(cond) && cond < 1e9;
    if (spectral_route_) lu_.compute(es_.eigenvectors());
  }

  const Eigen::ComplexEigenSolver<Matrix>::EigenvalueType& eigenvalues() const {
    return es_.eigenvalues();
  }

  std::vector<TrajectorySample> run(const Matrix& rho0, const std::vector<double>& t_grid,
                                    const Matrix* target, const Matrix* support_proj) const {
    const int D = static_cast<int>(rho0.rows());
    for (size_t i = 1; i < t_grid.size(); ++i)
      if (t_grid[i] < t_grid[i - 1] || t_grid[0] < 0.0)
        throw std::invalid_argument("evolve: time grid must be nonnegative and increasing");

    Vector coeffs;
    if (spectral_route_) coeffs = lu_.solve(vectorize(rho0));

    std::vector<TrajectorySample> samples;
    for (double t : t_grid) {
      Vector vec_state;
      if (spectral_route_) {
        Vector scaled = coeffs;
        for (Eigen::Index k = 0; k < scaled.size(); ++k)
          scaled(k) *= std::exp(es_.eigenvalues()(k) * t);
        vec_state = es_.eigenvectors() * scaled;
      } else {
        const Matrix propagator = (superop_ * t).exp();
        vec_state = propagator * vectorize(rho0);
      }
      TrajectorySample sample;
      sample.t = t;
      sample.state = devectorize(vec_state, D, D);
      // numerical drift check
      Tolerances relaxed;
      relaxed.tol_herm = 1e-8;
      relaxed.tol_psd = 1e-8;
      relaxed.tol_trace = 1e-8;
      if (!is_density(sample.state, relaxed))
        throw std::runtime_error("evolve: trajectory left the density manifold at t = " +
                                 std::to_string(t));
      if (target != nullptr) sample.trace_distance = trace_distance(sample.state, *target);
      if (support_proj != nullptr)
        sample.lyapunov = 1.0 - ((*support_proj) * sample.state).trace().real();
      samples.push_back(std::move(sample));
    }
    return samples;
  }

 private:
  Matrix superop_;
  Eigen::ComplexEigenSolver<Matrix> es_;
  bool spectral_route_ = false;
  Eigen::PartialPivLU<Matrix> lu_;
};

}  // namespace

std::vector<TrajectorySample> evolve(const Matrix& superop, const Matrix& rho0,
                                     const std::vector<double>& t_grid, const Matrix* target,
                                     const Matrix* support_proj) {
  return Propagator(superop).run(rho0, t_grid, target, support_proj);
}

VerifyReport verify_bundle(const GeneratorBundle& bundle, const Matrix& rho, const Tolerances& tol,
                           std::uint64_t seed) {
  const int D = bundle.layout.total_dim();
  const Matrix global = bundle.assemble_global();

  VerifyReport report;
  report.tolerances = tol;

  const KernelResult ker = kernel(global, D, tol);
  report.kernel_dim = ker.space.dim();
  report.kernel_cut_below = ker.cut_below;
  report.kernel_cut_above = ker.cut_above;
  {
    Matrix stacked(D, D * std::max(report.kernel_dim, 1));
    stacked.setZero();
    for (int k = 0; k < report.kernel_dim; ++k)
      stacked.middleCols(k * D, D) = ker.space.basis()[k];
    report.kernel_hash = operator_hash(stacked);
  }

  if (report.kernel_dim == 1) {
    Matrix rep = ker.space.basis()[0];
    rep = 0.5 * (rep + rep.adjoint()).eval();
    const cxd tr = rep.trace();
    if (std::abs(tr) > 1e-12) rep /= tr;
    report.kernel_target_distance = trace_distance(rep, rho);
    report.kernel_is_target = report.kernel_target_distance <= 1e-7;
  } else {
    report.kernel_is_target = false;
    report.kernel_target_distance = std::numeric_limits<double>::infinity();
  }

  // frustration-freeness against the already-computed kernel
  report.ff_ok = true;
  for (const auto& comp : bundle.components) {
    double worst = 0.0;
    for (const auto& B : ker.space.basis())
      worst = std::max(
          worst,
          apply_embedded_superop(comp.local_superop, comp.neighborhood, bundle.layout, B).norm());
    report.ff_residuals.push_back(worst);
    if (worst > tol.tol_lin) report.ff_ok = false;
  }

  // one spectral decomposition shared by the gap and the trajectories
  const Propagator propagator(global);
  {
    Eigen::BDCSVD<Matrix> svd(global);
    report.gap = gap_from_spectrum(propagator.eigenvalues(),
                                   global.norm() == 0.0 ? 0.0 : svd.singularValues()(0),
                                   global.norm(), tol);
  }

  std::vector<Matrix> noise;
  for (const auto& comp : bundle.components)
    for (const auto& lb : comp.lindblads)
      noise.push_back(embed_neighborhood(lb, comp.neighborhood, bundle.layout));
  try {
    const DualKernelResult dual = dual_kernel_check(global, rho, tol, noise);
    report.dual_kernel_ok = dual.ok;
    report.dual_kernel_residual = dual.residual;
  } catch (const std::invalid_argument&) {
    report.dual_kernel_ok = false;  // rho not invariant
    report.dual_kernel_residual = std::numeric_limits<double>::infinity();
  }

  // trajectories from three canonical starts
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_pure_product = [&]() {
    Matrix state(1, 1);
    state(0, 0) = 1.0;
    for (int a = 0; a < bundle.layout.count(); ++a) {
      Vector v(bundle.layout.dim(a));
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cxd(gauss(rng), gauss(rng));
      v.normalize();
      state = kron(state, Matrix(v * v.adjoint())).eval();
    }
    return state;
  };
  auto random_density = [&]() {
    Matrix G(D, D);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) G(i, j) = cxd(gauss(rng), gauss(rng));
    Matrix out = G * G.adjoint();
    out /= out.trace();
    return out;
  };

  const double horizon = report.gap.defined ? 40.0 / std::max(report.gap.raw, 1e-3) : 40.0;
  const std::vector<double> grid = {0.0, horizon / 8, horizon / 4, horizon / 2, horizon};
  const std::vector<Matrix> starts = {Matrix::Identity(D, D) / D, random_pure_product(),
                                      random_density()};
  report.converged = true;
  for (const auto& start : starts) {
    const auto samples = propagator.run(start, grid, &rho, nullptr);
    report.convergence.emplace_back(samples.back().t, samples.back().trace_distance);
    if (samples.back().trace_distance > 1e-6) report.converged = false;
  }
  report.gas_ok = report.kernel_dim == 1 && report.kernel_is_target && report.converged;
  return report;
}

double component_commutation_residual(const GeneratorBundle& bundle) {
  std::vector<Matrix> embedded;
  for (int k = 0; k < static_cast<int>(bundle.components.size()); ++k)
    embedded.push_back(bundle.embedded_component(k));
  double worst = 0.0;
  for (size_t a = 0; a < embedded.size(); ++a)
    for (size_t b = a + 1; b < embedded.size(); ++b)
      worst = std::max(worst, (embedded[a] * embedded[b] - embedded[b] * embedded[a]).norm());
  return worst;
}

}  // namespace ffqls
