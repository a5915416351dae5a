#pragma once

#include <utility>
#include <vector>

#include "ffqls/tensor.hpp"

namespace ffqls {

enum class Boundary { OPEN, PERIODIC };

/// Simple undirected graph on n vertices (0-based).
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<int> adjacency(int vertex) const;
  static Graph line(int n);
};

// ---- symmetric states ---------------------------------------------------------

/// Normalized symmetrized occupation state |Lambda>: occupation[l] copies of
/// level l distributed over the n co-dimensional qudits, summed over all
/// distinct arrangements.
Vector dicke(const SubsystemLayout& layout, const std::vector<int>& occupation);

/// The occupancy-limited instance: occupation (m-1,...,m-1,r) on d levels
/// with r = n - (d-1)(m-1). Requires d(m-1) >= n and r >= 1.
Vector big_dicke(int n, int d, int m);
std::vector<int> big_dicke_occupation(int n, int d, int m);

Vector ghz(int n, int d);

// ---- mixed-state families -----------------------------------------------------

/// (|0...0><0...0| + |1...1><1...1|)/2 on n qubits.
Matrix sep_line(int n);

/// (1-eps)|psi><psi| + eps I/D.
Matrix pseudo_pure(const Vector& psi, double epsilon);

/// (1-eps)|(0011)><(0011)| + eps |GHZ><GHZ| on 4 qubits; rank 2 for
/// eps in (0,1), degenerate (pure) at the endpoints.
Matrix rho_epsilon(double epsilon);

// ---- Hamiltonians --------------------------------------------------------------

struct LocalHamiltonian {
  Matrix total;
  struct Term {
    std::vector<int> sites;
    Matrix op;  ///< operator on the listed sites (ascending order)
  };
  std::vector<Term> terms;

  /// Largest commutator norm between embedded term pairs.
  double commutation_residual(const SubsystemLayout& layout) const;
};

/// sum_j Z_j Z_{j+1} on n qubits (periodic closes the ring).
LocalHamiltonian ising_hamiltonian(int n, Boundary boundary = Boundary::PERIODIC);

/// -sum_j Z_j Z_{j+1} - g sum_j X_j on n qubits.
LocalHamiltonian transverse_ising_hamiltonian(int n, double g, Boundary boundary = Boundary::OPEN);

/// -sum_j X_j prod_{k in adj(j)} Z_k on qubits (one commuting term per vertex).
LocalHamiltonian graph_hamiltonian(const Graph& graph);

/// exp(-beta H)/Tr exp(-beta H); full-rank and commuting with H.
Matrix gibbs(const Matrix& H, double beta);

// ---- graph product machinery ---------------------------------------------------

/// d-dimensional discrete Fourier matrix, the default symmetric Hadamard.
Matrix fourier_hadamard(int d);

/// H^dag H = d I, H = H^T, |h_ij| = 1, all within tol.
bool is_hadamard(const Matrix& H, double tol);

/// Edge gate C^H|ij> = h_ij |ij>, embedded on sites (a,b) of the layout.
Matrix edge_gate(const Matrix& hadamard, int a, int b, const SubsystemLayout& layout);

/// Commuting circuit U_G = prod over edges of the edge gates.
Matrix graph_circuit(const Graph& graph, const Matrix& hadamard, const SubsystemLayout& layout);

/// Circuit factor attached to one site: prod_{k in adj(site)} C^H_(site,k).
Matrix site_circuit(const Graph& graph, const Matrix& hadamard, int site,
                    const SubsystemLayout& layout);

/// U_G (local_states[0] kron ... kron local_states[n-1]) U_G^dag.
Matrix graph_product(const Graph& graph, const Matrix& hadamard,
                     const std::vector<Matrix>& local_states, const SubsystemLayout& layout);

/// Neighborhoods induced by the graph: N_j = {j} union adj(j).
NeighborhoodStructure graph_neighborhoods(const Graph& graph, const SubsystemLayout& layout);

}  // namespace ffqls
