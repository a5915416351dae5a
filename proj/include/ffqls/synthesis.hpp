#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffqls/algebra.hpp"
#include "ffqls/states.hpp"

namespace ffqls {

enum class ConstructionTag { COND_EXP, COND_EXP_COMPOSED, GRAPH_PRODUCT, CUSTOM };
enum class SynthesisMode { FULL_RANK, GENERAL };

std::string to_string(ConstructionTag t);

struct BundleComponent {
  std::vector<int> neighborhood;     ///< 0-based, ascending
  Matrix local_superop;              ///< generator on B(H_N)
  std::vector<Matrix> lindblads;     ///< neighborhood-local noise operators (inspection only)
  ConstructionTag tag = ConstructionTag::CUSTOM;
};

/// A global Liouvillian carried as its neighborhood components.
struct GeneratorBundle {
  SubsystemLayout layout;
  std::vector<BundleComponent> components;
  std::uint64_t seed = 0;

  /// Sum of the embedded components, a D^2 x D^2 generator matrix.
  Matrix assemble_global() const;
  Matrix embedded_component(int index) const;
  std::string global_hash() const;
};

// ---- building blocks -----------------------------------------------------------

/// The dual-conditional-expectation projection attached to a block
/// decomposition: rho -> direct sum over blocks of Tr_B(Pi^dag rho Pi) kron tau.
/// CP and idempotent; trace preserving on operators supported in the union
/// of the blocks (everywhere, when the blocks span the carrier).
Matrix conditional_expectation(const BlockDecomposition& blocks, const Tolerances& tol);

/// E - I; for idempotent CPTP E this is a valid purely dissipative generator
/// whose nonzero spectrum is exactly {-1}.
Matrix neighborhood_generator(const Matrix& cptp_superop);

/// CPTP map P(.)P + P/Tr(P) Tr(Pperp .): herds all mass into range(P) and
/// fixes anything already supported there. P = I gives the identity map.
Matrix support_herding_map(const Matrix& projector, const Tolerances& tol);

/// Kraus operators of a CP map from the eigendecomposition of its Choi
/// matrix, keeping eigenvalues above rank_tol * max.
std::vector<Matrix> kraus_from_superop(const Matrix& superop, int dim, double rank_tol);

/// Choi matrix of a superoperator (column-vectorization reshuffle).
Matrix choi_of_superop(const Matrix& superop, int dim);

// ---- synthesis pipelines ---------------------------------------------------------

/// Stabilizing bundle for a target satisfying the intersection condition:
/// per neighborhood, minimal fixed-point set -> block decomposition ->
/// conditional expectation (composed with the support-herding map in
/// GENERAL mode) -> generator E - I. Purely dissipative by construction.
GeneratorBundle synthesize(const Matrix& rho, const NeighborhoodStructure& ns, SynthesisMode mode,
                           const Tolerances& tol, std::uint64_t seed = 0x5eed);

struct CircuitGate {
  std::vector<int> sites;  ///< 0-based, ascending
  Matrix op;               ///< unitary on the listed sites
};

/// Conjugate every component by a commuting circuit of neighborhood
/// unitaries; neighborhoods grow by the union of overlapping gate supports,
/// the spectrum of the global generator is preserved.
GeneratorBundle circuit_conjugate(const GeneratorBundle& bundle,
                                  const std::vector<CircuitGate>& circuit, const Tolerances& tol);

/// Ladder Lindblad operators stabilizing a graph product state: per site,
/// the local ladder pair conjugated by the diagonalizing unitary and the
/// site's edge gates. Components pairwise commute as superoperators.
GeneratorBundle graph_product_lindblads(const Graph& graph, const Matrix& hadamard,
                                        const std::vector<Matrix>& local_states,
                                        const SubsystemLayout& layout, const Tolerances& tol);

}  // namespace ffqls
