#include "ffqls/states.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ffqls {

std::vector<int> Graph::adjacency(int vertex) const {
  std::vector<int> adj;
  for (const auto& [a, b] : edges) {
    if (a == vertex) adj.push_back(b);
    if (b == vertex) adj.push_back(a);
  }
  std::sort(adj.begin(), adj.end());
  adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  return adj;
}

Graph Graph::line(int n) {
  Graph g;
  g.n = n;
  for (int j = 0; j + 1 < n; ++j) g.edges.emplace_back(j, j + 1);
  return g;
}

Vector dicke(const SubsystemLayout& layout, const std::vector<int>& occupation) {
  const int n = layout.count();
  const int d = layout.dim(0);
  for (int a = 1; a < n; ++a)
    if (layout.dim(a) != d) throw std::invalid_argument("dicke: co-dimensional layout required");
  if (static_cast<int>(occupation.size()) != d)
    throw std::invalid_argument("dicke: occupation length must match local dimension");
  int total = 0;
  for (int k : occupation) {
    if (k < 0) throw std::invalid_argument("dicke: negative occupation");
    total += k;
  }
  if (total != n) throw std::invalid_argument("dicke: occupations must sum to the qudit count");

  std::vector<int> word;
  for (int level = 0; level < d; ++level)
    for (int k = 0; k < occupation[level]; ++k) word.push_back(level);

  Vector psi = Vector::Zero(layout.total_dim());
  int arrangements = 0;
  do {
    int idx = 0;
    for (int a = 0; a < n; ++a) idx = idx * d + word[a];
    psi(idx) = 1.0;
    ++arrangements;
  } while (std::next_permutation(word.begin(), word.end()));
  psi /= std::sqrt(static_cast<double>(arrangements));
  return psi;
}

std::vector<int> big_dicke_occupation(int n, int d, int m) {
  const int r = n - (d - 1) * (m - 1);
  if (r < 1 || d * (m - 1) < n)
    throw std::invalid_argument("big_dicke: infeasible (n,d,m), need d(m-1) >= n and r >= 1");
  std::vector<int> occupation(d, m - 1);
  occupation[d - 1] = r;
  return occupation;
}

Vector big_dicke(int n, int d, int m) {
  return dicke(SubsystemLayout(std::vector<int>(n, d)), big_dicke_occupation(n, d, m));
}

Vector ghz(int n, int d) {
  int D = 1;
  for (int a = 0; a < n; ++a) D *= d;
  Vector psi = Vector::Zero(D);
  int stride = 0;
  for (int a = 0; a < n; ++a) stride = stride * d + 1;
  for (int level = 0; level < d; ++level) psi(level * stride) = 1.0 / std::sqrt(double(d));
  return psi;
}

Matrix sep_line(int n) {
  const int D = 1 << n;
  Matrix rho = Matrix::Zero(D, D);
  rho(0, 0) = 0.5;
  rho(D - 1, D - 1) = 0.5;
  return rho;
}

Matrix pseudo_pure(const Vector& psi, double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("pseudo_pure: epsilon outside [0,1]");
  const int D = static_cast<int>(psi.size());
  return (1.0 - epsilon) * (psi * psi.adjoint()) + epsilon / D * Matrix::Identity(D, D);
}

Matrix rho_epsilon(double epsilon) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("rho_epsilon: epsilon outside [0,1]");
  const Vector dicke4 = big_dicke(4, 2, 3);
  const Vector cat = ghz(4, 2);
  return (1.0 - epsilon) * (dicke4 * dicke4.adjoint()) + epsilon * (cat * cat.adjoint());
}

namespace {

Matrix pauli(char which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case 'x': m(0, 1) = 1; m(1, 0) = 1; break;
    case 'z': m(0, 0) = 1; m(1, 1) = -1; break;
    default: throw std::logic_error("unknown pauli");
  }
  return m;
}

}  // namespace

double LocalHamiltonian::commutation_residual(const SubsystemLayout& layout) const {
  double worst = 0.0;
  std::vector<Matrix> embedded;
  for (const auto& t : terms) embedded.push_back(embed_neighborhood(t.op, t.sites, layout));
  for (size_t i = 0; i < embedded.size(); ++i)
    for (size_t j = i + 1; j < embedded.size(); ++j)
      worst = std::max(worst, (embedded[i] * embedded[j] - embedded[j] * embedded[i]).norm());
  return worst;
}

LocalHamiltonian ising_hamiltonian(int n, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("ising_hamiltonian: need n >= 2");
  const SubsystemLayout layout(std::vector<int>(n, 2));
  const Matrix ZZ = kron(pauli('z'), pauli('z'));
  LocalHamiltonian H;
  H.total = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int j = 0; j + 1 < n; ++j) {
    H.terms.push_back({{j, j + 1}, ZZ});
  }
  if (boundary == Boundary::PERIODIC && n > 2) {
    // wrap term acts on sites {0, n-1}; ZZ is symmetric under the site swap
    H.terms.push_back({{0, n - 1}, ZZ});
  }
  for (const auto& t : H.terms) H.total += embed_neighborhood(t.op, t.sites, layout);
  return H;
}

LocalHamiltonian transverse_ising_hamiltonian(int n, double g, Boundary boundary) {
  if (n < 2) throw std::invalid_argument("transverse_ising_hamiltonian: need n >= 2");
  const SubsystemLayout layout(std::vector<int>(n, 2));
  const Matrix ZZ = kron(pauli('z'), pauli('z'));
  LocalHamiltonian H;
  H.total = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int j = 0; j + 1 < n; ++j) H.terms.push_back({{j, j + 1}, -ZZ});
  if (boundary == Boundary::PERIODIC && n > 2) H.terms.push_back({{0, n - 1}, -ZZ});
  for (int j = 0; j < n; ++j) H.terms.push_back({{j}, -g * pauli('x')});
  for (const auto& t : H.terms) H.total += embed_neighborhood(t.op, t.sites, layout);
  return H;
}

LocalHamiltonian graph_hamiltonian(const Graph& graph) {
  const SubsystemLayout layout(std::vector<int>(graph.n, 2));
  LocalHamiltonian H;
  H.total = Matrix::Zero(layout.total_dim(), layout.total_dim());
  for (int j = 0; j < graph.n; ++j) {
    std::vector<int> sites = graph.adjacency(j);
    sites.push_back(j);
    std::sort(sites.begin(), sites.end());
    Matrix term(1, 1);
    term(0, 0) = -1.0;
    for (int site : sites) term = kron(term, site == j ? pauli('x') : pauli('z')).eval();
    H.terms.push_back({sites, term});
  }
  for (const auto& t : H.terms) H.total += embed_neighborhood(t.op, t.sites, layout);
  return H;
}

Matrix gibbs(const Matrix& H, double beta) {
  if (beta < 0.0) throw std::invalid_argument("gibbs: beta must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.adjoint()));
  // shift by the ground energy before exponentiating
  const Eigen::VectorXd shifted = -beta * (es.eigenvalues().array() - es.eigenvalues().minCoeff());
  Eigen::VectorXd weights = shifted.array().exp();
  weights /= weights.sum();
  return es.eigenvectors() * weights.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix fourier_hadamard(int d) {
  Matrix H(d, d);
  const double theta = 2.0 * std::numbers::pi / d;
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) H(j, k) = std::polar(1.0, theta * j * k);
  return H;
}

bool is_hadamard(const Matrix& H, double tol) {
  if (H.rows() != H.cols()) return false;
  const int d = static_cast<int>(H.rows());
  if ((H.adjoint() * H - double(d) * Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol) return false;
  if ((H - H.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  return (H.cwiseAbs().array() - 1.0).abs().maxCoeff() <= tol;
}

Matrix edge_gate(const Matrix& hadamard, int a, int b, const SubsystemLayout& layout) {
  if (a == b) throw std::invalid_argument("edge_gate: loop edge");
  const int d = static_cast<int>(hadamard.rows());
  if (layout.dim(a) != d || layout.dim(b) != d)
    throw std::invalid_argument("edge_gate: Hadamard dimension mismatch");
  std::vector<int> pair = {std::min(a, b), std::max(a, b)};
  Matrix local = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) local(i * d + j, i * d + j) = hadamard(i, j);
  return embed_neighborhood(local, pair, layout);
}

Matrix graph_circuit(const Graph& graph, const Matrix& hadamard, const SubsystemLayout& layout) {
  Matrix U = Matrix::Identity(layout.total_dim(), layout.total_dim());
  for (const auto& [a, b] : graph.edges) U = (edge_gate(hadamard, a, b, layout) * U).eval();
  return U;
}

Matrix site_circuit(const Graph& graph, const Matrix& hadamard, int site,
                    const SubsystemLayout& layout) {
  Matrix U = Matrix::Identity(layout.total_dim(), layout.total_dim());
  for (int k : graph.adjacency(site)) U = (edge_gate(hadamard, site, k, layout) * U).eval();
  return U;
}

Matrix graph_product(const Graph& graph, const Matrix& hadamard,
                     const std::vector<Matrix>& local_states, const SubsystemLayout& layout) {
  if (static_cast<int>(local_states.size()) != graph.n)
    throw std::invalid_argument("graph_product: one local state per vertex required");
  Matrix prod(1, 1);
  prod(0, 0) = 1.0;
  for (const auto& rho_j : local_states) prod = kron(prod, rho_j).eval();
  const Matrix U = graph_circuit(graph, hadamard, layout);
  return U * prod * U.adjoint();
}

NeighborhoodStructure graph_neighborhoods(const Graph& graph, const SubsystemLayout& layout) {
  std::vector<std::vector<int>> nbs;
  for (int j = 0; j < graph.n; ++j) {
    std::vector<int> nb = graph.adjacency(j);
    nb.push_back(j);
    std::sort(nb.begin(), nb.end());
    nbs.push_back(std::move(nb));
  }
  return NeighborhoodStructure(layout, std::move(nbs));
}

}  // namespace ffqls
