#include "ffqls/synthesis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <set>
#include <stdexcept>

#include "ffqls/hashing.hpp"

namespace ffqls {

std::string to_string(ConstructionTag t) {
  switch (t) {
    case ConstructionTag::COND_EXP: return "COND_EXP";
    case ConstructionTag::COND_EXP_COMPOSED: return "COND_EXP_COMPOSED";
    case ConstructionTag::GRAPH_PRODUCT: return "GRAPH_PRODUCT";
    case ConstructionTag::CUSTOM: return "CUSTOM";
  }
  return "CUSTOM";
}

Matrix GeneratorBundle::assemble_global() const {
  const int D = layout.total_dim();
  Matrix global = Matrix::Zero(D * D, D * D);
  for (const auto& c : components) global += superop_embed(c.local_superop, c.neighborhood, layout);
  return global;
}

Matrix GeneratorBundle::embedded_component(int index) const {
  const auto& c = components.at(index);
  return superop_embed(c.local_superop, c.neighborhood, layout);
}

std::string GeneratorBundle::global_hash() const { return operator_hash(assemble_global()); }

Matrix conditional_expectation(const BlockDecomposition& blocks, const Tolerances& tol) {
  if (blocks.blocks.empty()) throw std::invalid_argument("conditional_expectation: no blocks");
  const int d = blocks.carrier_dim;
  std::vector<Matrix> kraus;
  Matrix carrier = Matrix::Zero(d, d);
  for (const auto& blk : blocks.blocks) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(blk.tau);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw std::invalid_argument("conditional_expectation: tau factor not full-rank");
    const Matrix tau_sqrt = es.operatorSqrt();
    const Matrix iso = blk.aligned_isometry();
    carrier += iso * iso.adjoint();
    const Matrix idA = Matrix::Identity(blk.d_A, blk.d_A);
    for (int k = 0; k < blk.d_B; ++k)
      for (int m = 0; m < blk.d_B; ++m) {
        Matrix unit = Matrix::Zero(blk.d_B, blk.d_B);
        unit.col(m) = tau_sqrt.col(k);
        kraus.push_back(iso * kron(idA, unit) * iso.adjoint());
      }
  }
  const Matrix E = cptp_map_matrix(kraus, tol, /*require_tp=*/false);

  // trace preserving exactly on the carrier of the blocks
  Matrix tp = Matrix::Zero(d, d);
  for (const auto& K : kraus) tp += K.adjoint() * K;
  if ((tp - carrier).cwiseAbs().maxCoeff() > tol.block_tol)
    throw std::runtime_error("conditional_expectation: trace defect on the block carrier");
  const double idem = (E * E - E).cwiseAbs().maxCoeff();
  if (idem > tol.block_tol)
    throw std::runtime_error("conditional_expectation: not idempotent, residual " +
                             std::to_string(idem));
  return E;
}

Matrix neighborhood_generator(const Matrix& cptp_superop) {
  return cptp_superop - Matrix::Identity(cptp_superop.rows(), cptp_superop.cols());
}

Matrix support_herding_map(const Matrix& projector, const Tolerances& tol) {
  const int d = static_cast<int>(projector.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (projector + projector.adjoint()));
  std::vector<Matrix> inside, outside;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double ev = es.eigenvalues()(k);
    if (std::abs(ev - 1.0) <= 1e-7) {
      inside.push_back(es.eigenvectors().col(k));
    } else if (std::abs(ev) <= 1e-7) {
      outside.push_back(es.eigenvectors().col(k));
    } else {
      throw std::invalid_argument("support_herding_map: input is not a projector");
    }
  }
  if (inside.empty()) throw std::invalid_argument("support_herding_map: zero projector");

  std::vector<Matrix> kraus = {projector};
  const double scale = 1.0 / std::sqrt(static_cast<double>(inside.size()));
  for (const auto& w : inside)
    for (const auto& v : outside) kraus.push_back(scale * (w * v.adjoint()));
  return cptp_map_matrix(kraus, tol, /*require_tp=*/true);
}

Matrix choi_of_superop(const Matrix& superop, int dim) {
  Matrix J(dim * dim, dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l)
          J(i + k * dim, j + l * dim) = superop(i + j * dim, k + l * dim);
  return J;
}

std::vector<Matrix> kraus_from_superop(const Matrix& superop, int dim, double rank_tol) {
  const Matrix J = choi_of_superop(superop, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (J + J.adjoint()));
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<Matrix> kraus;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double ev = es.eigenvalues()(k);
    if (top > 0.0 && ev > rank_tol * top)
      kraus.push_back(std::sqrt(ev) * devectorize(es.eigenvectors().col(k), dim, dim));
  }
  return kraus;
}

GeneratorBundle synthesize(const Matrix& rho, const NeighborhoodStructure& ns, SynthesisMode mode,
                           const Tolerances& tol, std::uint64_t seed) {
  const auto& layout = ns.layout();
  GeneratorBundle bundle{layout, {}, seed};

  int j = 0;
  for (const auto& nb : ns.neighborhoods()) {
    const Matrix reduced = partial_trace(rho, nb, layout);
    const OperatorSubspace span = schmidt_span(rho, nb, layout, tol);
    DistortedAlgebra F;
    BlockDecomposition blocks;
    try {
      F = minimal_fixed_point_set(span, reduced, tol);
      blocks = wedderburn_decompose(F, tol, seed + static_cast<std::uint64_t>(j) * 0x9e37ULL);
    } catch (const std::exception& err) {
      std::string sites;
      for (int a : nb) sites += std::to_string(a + 1) + ",";
      throw std::runtime_error("synthesize: neighborhood {" + sites + "}: " + err.what());
    }

    const Matrix E = conditional_expectation(blocks, tol);
    BundleComponent component;
    component.neighborhood = nb;
    if (mode == SynthesisMode::GENERAL) {
      const Matrix P = support_of(F.space, tol.rank_tol);
      const Matrix cptp = E * support_herding_map(P, tol);
      component.local_superop = neighborhood_generator(cptp);
      component.lindblads = kraus_from_superop(cptp, static_cast<int>(P.rows()), tol.rank_tol);
      component.tag = ConstructionTag::COND_EXP_COMPOSED;
    } else {
      const int dN = layout.subset_dim(nb);
      if (trace_preservation_residual(neighborhood_generator(E), dN) > tol.tol_lin)
        throw std::runtime_error(
            "synthesize: FULL_RANK mode on a rank-deficient reduced state; use GENERAL");
      component.local_superop = neighborhood_generator(E);
      component.lindblads = kraus_from_superop(E, dN, tol.rank_tol);
      component.tag = ConstructionTag::COND_EXP;
    }

    // frustration-freeness by construction: the component annihilates the target
    const double ff = apply_embedded_superop(component.local_superop, nb, layout, rho).norm();
    if (ff > tol.tol_lin)
      throw std::runtime_error("synthesize: component fails to annihilate the target, residual " +
                               std::to_string(ff));
    bundle.components.push_back(std::move(component));
    ++j;
  }
  return bundle;
}

namespace {

SubsystemLayout sub_layout(const std::vector<int>& sites, const SubsystemLayout& layout) {
  std::vector<int> dims;
  for (int s : sites) dims.push_back(layout.dim(s));
  return SubsystemLayout(dims);
}

std::vector<int> positions_within(const std::vector<int>& subset, const std::vector<int>& sites) {
  std::vector<int> pos;
  for (int s : subset) {
    const auto it = std::find(sites.begin(), sites.end(), s);
    if (it == sites.end()) throw std::logic_error("positions_within: site not present");
    pos.push_back(static_cast<int>(it - sites.begin()));
  }
  return pos;
}

}  // namespace

GeneratorBundle circuit_conjugate(const GeneratorBundle& bundle,
                                  const std::vector<CircuitGate>& circuit, const Tolerances& tol) {
  const auto& layout = bundle.layout;
  // gate sanity: unitary, pairwise commuting once embedded
  std::vector<Matrix> embedded;
  for (const auto& g : circuit) {
    const int dg = layout.subset_dim(g.sites);
    if ((g.op.adjoint() * g.op - Matrix::Identity(dg, dg)).cwiseAbs().maxCoeff() > tol.tol_lin)
      throw std::invalid_argument("circuit_conjugate: gate is not unitary");
    embedded.push_back(embed_neighborhood(g.op, g.sites, layout));
  }
  for (size_t a = 0; a < embedded.size(); ++a)
    for (size_t b = a + 1; b < embedded.size(); ++b) {
      const double res = (embedded[a] * embedded[b] - embedded[b] * embedded[a]).cwiseAbs().maxCoeff();
      if (res > tol.tol_lin)
        throw std::invalid_argument("circuit_conjugate: gates " + std::to_string(a) + " and " +
                                    std::to_string(b) + " do not commute, residual " +
                                    std::to_string(res));
    }

  GeneratorBundle out{layout, {}, bundle.seed};
  for (const auto& comp : bundle.components) {
    // gates overlapping this component enlarge its neighborhood
    std::set<int> sites(comp.neighborhood.begin(), comp.neighborhood.end());
    std::vector<const CircuitGate*> overlapping;
    for (const auto& g : circuit) {
      const bool touches = std::any_of(g.sites.begin(), g.sites.end(), [&](int s) {
        return std::find(comp.neighborhood.begin(), comp.neighborhood.end(), s) !=
               comp.neighborhood.end();
      });
      if (touches) {
        overlapping.push_back(&g);
        sites.insert(g.sites.begin(), g.sites.end());
      }
    }
    std::vector<int> enlarged(sites.begin(), sites.end());
    const SubsystemLayout local = sub_layout(enlarged, layout);

    Matrix U = Matrix::Identity(local.total_dim(), local.total_dim());
    for (const auto* g : overlapping)
      U = (embed_neighborhood(g->op, positions_within(g->sites, enlarged), local) * U).eval();

    const Matrix lifted =
        superop_embed(comp.local_superop, positions_within(comp.neighborhood, enlarged), local);
    const Matrix Uvec = kron(U.conjugate(), U);

    BundleComponent next;
    next.neighborhood = enlarged;
    next.local_superop = Uvec * lifted * Uvec.adjoint();
    next.tag = comp.tag;
    for (const auto& lb : comp.lindblads)
      next.lindblads.push_back(
          U * embed_neighborhood(lb, positions_within(comp.neighborhood, enlarged), local) *
          U.adjoint());
    out.components.push_back(std::move(next));
  }
  return out;
}

GeneratorBundle graph_product_lindblads(const Graph& graph, const Matrix& hadamard,
                                        const std::vector<Matrix>& local_states,
                                        const SubsystemLayout& layout, const Tolerances& tol) {
  if (!is_hadamard(hadamard, tol.tol_lin))
    throw std::invalid_argument("graph_product_lindblads: invalid Hadamard matrix");
  if (static_cast<int>(local_states.size()) != graph.n)
    throw std::invalid_argument("graph_product_lindblads: one local state per vertex required");
  const int d = static_cast<int>(hadamard.rows());

  GeneratorBundle bundle{layout, {}, 0};
  for (int j = 0; j < graph.n; ++j) {
    if (!is_density(local_states[j], tol))
      throw std::invalid_argument("graph_product_lindblads: local state " + std::to_string(j + 1) +
                                  " is not a density matrix");
    std::vector<int> nb = graph.adjacency(j);
    nb.push_back(j);
    std::sort(nb.begin(), nb.end());
    const SubsystemLayout local = sub_layout(nb, layout);

    // descending eigenbasis of the local target
    Eigen::SelfAdjointEigenSolver<Matrix> es(local_states[j]);
    Matrix V(d, d);
    Eigen::VectorXd gamma(d);
    for (int i = 0; i < d; ++i) {
      V.col(i) = es.eigenvectors().col(d - 1 - i);
      gamma(i) = std::max(es.eigenvalues()(d - 1 - i), 0.0);
    }

    // site circuit inside the neighborhood; the edge gate is symmetric in
    // its two legs (H = H^T), so ascending site order loses nothing
    Matrix U = Matrix::Identity(local.total_dim(), local.total_dim());
    for (int k : graph.adjacency(j)) {
      const std::vector<int> pair = {std::min(j, k), std::max(j, k)};
      const Matrix gate = edge_gate(hadamard, 0, 1, sub_layout(pair, layout));
      U = (embed_neighborhood(gate, positions_within(pair, nb), local) * U).eval();
    }

    const int site_pos = static_cast<int>(std::find(nb.begin(), nb.end(), j) - nb.begin());
    std::vector<Matrix> lindblads;
    for (int i = 0; i + 1 < d; ++i) {
      Matrix down = Matrix::Zero(d, d), up = Matrix::Zero(d, d);
      down(i, i + 1) = 1.0;
      up(i + 1, i) = 1.0;
      const std::vector<int> self = {site_pos};
      if (gamma(i) > 0.0)
        lindblads.push_back(std::sqrt(gamma(i)) * U *
                            embed_neighborhood(V * down * V.adjoint(), self, local) * U.adjoint());
      if (gamma(i + 1) > 0.0)
        lindblads.push_back(std::sqrt(gamma(i + 1)) * U *
                            embed_neighborhood(V * up * V.adjoint(), self, local) * U.adjoint());
    }

    BundleComponent component;
    component.neighborhood = nb;
    component.local_superop = liouvillian_matrix(nullptr, lindblads, tol);
    component.lindblads = std::move(lindblads);
    component.tag = ConstructionTag::GRAPH_PRODUCT;
    bundle.components.push_back(std::move(component));
  }
  return bundle;
}

}  // namespace ffqls
