#include "ffqls/json_io.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include "ffqls/hashing.hpp"

namespace ffqls {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw std::invalid_argument("schema: " + what);
}

int require_int(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) schema_error(std::string(key) + " (int) required");
  return j[key].get<int>();
}

double require_num(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) schema_error(std::string(key) + " (number) required");
  return j[key].get<double>();
}

std::vector<int> one_based(const std::vector<int>& zero_based) {
  std::vector<int> out;
  for (int a : zero_based) out.push_back(a + 1);
  return out;
}

}  // namespace

ordered_json matrix_to_json(const Matrix& M) {
  ordered_json j;
  j["rows"] = M.rows();
  j["cols"] = M.cols();
  std::vector<double> re, im;
  re.reserve(M.size());
  im.reserve(M.size());
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index k = 0; k < M.cols(); ++k) {
      re.push_back(M(i, k).real());
      im.push_back(M(i, k).imag());
    }
  j["re"] = re;
  j["im"] = im;
  return j;
}

Matrix matrix_from_json(const ordered_json& j) {
  const int rows = require_int(j, "rows");
  const int cols = require_int(j, "cols");
  if (!j.contains("re") || !j.contains("im")) schema_error("matrix needs re/im arrays");
  const auto re = j["re"].get<std::vector<double>>();
  const auto im = j["im"].get<std::vector<double>>();
  if (static_cast<int>(re.size()) != rows * cols || im.size() != re.size())
    schema_error("matrix re/im length mismatch");
  Matrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) M(i, k) = cxd(re[i * cols + k], im[i * cols + k]);
  return M;
}

ordered_json subspace_to_json(const OperatorSubspace& sub) {
  ordered_json j;
  j["label"] = sub.label();
  j["dim"] = sub.dim();
  ordered_json basis = ordered_json::array();
  for (const auto& B : sub.basis()) basis.push_back(matrix_to_json(B));
  j["basis"] = basis;
  return j;
}

OperatorSubspace subspace_from_json(const ordered_json& j) {
  std::vector<Matrix> basis;
  for (const auto& bj : j.at("basis")) basis.push_back(matrix_from_json(bj));
  const int d = basis.empty() ? 0 : static_cast<int>(basis[0].rows());
  return OperatorSubspace(d, std::move(basis), j.value("label", ""));
}

ordered_json blocks_to_json(const BlockDecomposition& blocks) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& b : blocks.blocks) {
    ordered_json bj;
    bj["dA"] = b.d_A;
    bj["dB"] = b.d_B;
    bj["isometry"] = matrix_to_json(b.isometry);
    bj["tau"] = matrix_to_json(b.tau);
    bj["factor_basis"] = matrix_to_json(b.factor_basis);
    arr.push_back(std::move(bj));
  }
  j["blocks"] = arr;
  j["residual"] = blocks.residual;
  j["seed"] = blocks.seed;
  return j;
}

ordered_json tolerances_to_json(const Tolerances& tol) {
  ordered_json j;
  for (const auto& [key, value] : tol.as_map()) j[key] = value;
  return j;
}

void apply_tolerance_overrides(Tolerances& tol, const ordered_json& overrides) {
  for (const auto& [key, value] : overrides.items()) {
    if (!value.is_number()) schema_error("tolerance override " + key + " must be a number");
    tol.set(key, value.get<double>());
  }
}

ordered_json bundle_to_json(const GeneratorBundle& bundle) {
  ordered_json j;
  j["layout"] = bundle.layout.dims();
  ordered_json comps = ordered_json::array();
  for (const auto& c : bundle.components) {
    ordered_json cj;
    cj["neighborhood"] = one_based(c.neighborhood);
    cj["superop"] = matrix_to_json(c.local_superop);
    ordered_json lbs = ordered_json::array();
    for (const auto& lb : c.lindblads) lbs.push_back(matrix_to_json(lb));
    cj["lindblads"] = lbs;
    cj["tag"] = to_string(c.tag);
    comps.push_back(std::move(cj));
  }
  j["components"] = comps;
  j["seed"] = bundle.seed;
  j["global_hash"] = bundle.global_hash();
  return j;
}

GeneratorBundle bundle_from_json(const ordered_json& j) {
  const auto dims = j.at("layout").get<std::vector<int>>();
  GeneratorBundle bundle{SubsystemLayout(dims), {}, j.value("seed", std::uint64_t{0})};
  for (const auto& cj : j.at("components")) {
    BundleComponent c;
    for (int a : cj.at("neighborhood").get<std::vector<int>>()) c.neighborhood.push_back(a - 1);
    c.local_superop = matrix_from_json(cj.at("superop"));
    if (cj.contains("lindblads"))
      for (const auto& lb : cj["lindblads"]) c.lindblads.push_back(matrix_from_json(lb));
    const std::string tag = cj.value("tag", "CUSTOM");
    if (tag == "COND_EXP") c.tag = ConstructionTag::COND_EXP;
    else if (tag == "COND_EXP_COMPOSED") c.tag = ConstructionTag::COND_EXP_COMPOSED;
    else if (tag == "GRAPH_PRODUCT") c.tag = ConstructionTag::GRAPH_PRODUCT;
    else c.tag = ConstructionTag::CUSTOM;
    bundle.components.push_back(std::move(c));
  }
  if (j.contains("global_hash") && j["global_hash"].get<std::string>() != bundle.global_hash())
    schema_error("bundle global_hash mismatch (corrupted or edited dump)");
  return bundle;
}

ordered_json check_report_to_json(const CheckReport& report, std::uint64_t seed) {
  ordered_json j;
  j["target_hash"] = report.target_hash;
  ordered_json nbs = ordered_json::array();
  for (const auto& nb : report.neighborhoods) nbs.push_back(one_based(nb));
  j["neighborhoods"] = nbs;
  ordered_json per = ordered_json::array();
  for (const auto& data : report.per_neighborhood) {
    ordered_json dj;
    dj["neighborhood"] = one_based(data.neighborhood);
    dj["schmidt_dim"] = data.schmidt_dim;
    dj["fixed_point_dim"] = data.fixed_point_dim;
    dj["extended_dim"] = data.extended_dim;
    dj["closure_iterations"] = data.fixed_point_set.iterations;
    per.push_back(std::move(dj));
  }
  j["per_neighborhood"] = per;
  j["intersection_dim"] = report.intersection_dim;
  j["necessary_ok"] = report.necessary_ok;
  j["support_ok"] = report.support_ok;
  j["full_rank"] = report.full_rank;
  j["eigenvalues"] = {{"smallest", report.smallest_eigenvalue},
                      {"largest", report.largest_eigenvalue}};
  if (report.support.has_value()) {
    j["support_intersection"] = {{"rank", report.support->intersection_rank},
                                 {"target_rank", report.support->target_rank},
                                 {"mismatch", report.support->mismatch}};
  }
  j["classification"] = to_string(report.classification);
  j["upgraded_by_construction"] = report.upgraded_by_construction;
  j["seed"] = seed;
  j["tolerances"] = tolerances_to_json(report.tolerances);
  return j;
}

ordered_json verify_report_to_json(const VerifyReport& report, std::uint64_t seed) {
  ordered_json j;
  j["kernel_dim"] = report.kernel_dim;
  j["kernel_hash"] = report.kernel_hash;
  j["kernel_cut"] = {{"below", report.kernel_cut_below}, {"above", report.kernel_cut_above}};
  j["ff_ok"] = report.ff_ok;
  j["ff_residuals"] = report.ff_residuals;
  j["gas_ok"] = report.gas_ok;
  j["kernel_is_target"] = report.kernel_is_target;
  j["kernel_target_distance"] = report.kernel_target_distance;
  j["gap"] = {{"defined", report.gap.defined},
              {"raw", report.gap.raw},
              {"normalized_spectral", report.gap.normalized},
              {"normalized_frobenius", report.gap.frobenius_normalized},
              {"spectral_norm", report.gap.spectral_norm},
              {"frobenius_norm", report.gap.frobenius_norm}};
  j["dual_kernel_ok"] = report.dual_kernel_ok;
  j["dual_kernel_residual"] = report.dual_kernel_residual;
  ordered_json conv = ordered_json::array();
  for (const auto& [t, dist] : report.convergence) conv.push_back({t, dist});
  j["convergence"] = conv;
  j["converged"] = report.converged;
  j["seed"] = seed;
  j["tolerances"] = tolerances_to_json(report.tolerances);
  return j;
}

Graph graph_from_json(const ordered_json& j) {
  Graph g;
  g.n = require_int(j, "n");
  if (g.n < 1) schema_error("graph needs n >= 1");
  if (j.contains("edges")) {
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2) schema_error("graph edge must be a pair");
      const int a = e[0].get<int>() - 1, b = e[1].get<int>() - 1;
      if (a < 0 || b < 0 || a >= g.n || b >= g.n || a == b) schema_error("graph edge out of range");
      g.edges.emplace_back(a, b);
    }
  }
  return g;
}

namespace {

Vector build_pure(const ordered_json& spec) {
  const std::string family = spec.at("family").get<std::string>();
  if (family == "DICKE") {
    const int n = require_int(spec, "n"), d = require_int(spec, "d");
    const auto occ = spec.at("occupation").get<std::vector<int>>();
    return dicke(SubsystemLayout(std::vector<int>(n, d)), occ);
  }
  if (family == "BIG_DICKE")
    return big_dicke(require_int(spec, "n"), require_int(spec, "d"), require_int(spec, "m"));
  if (family == "GHZ") return ghz(require_int(spec, "n"), require_int(spec, "d"));
  schema_error("pure family must be DICKE, BIG_DICKE or GHZ, got " + family);
}

LocalHamiltonian build_hamiltonian(const ordered_json& spec) {
  const std::string tag = spec.at("tag").get<std::string>();
  const Boundary boundary = spec.value("boundary", std::string("default")) == "open"
                                ? Boundary::OPEN
                                : spec.value("boundary", std::string("default")) == "periodic"
                                      ? Boundary::PERIODIC
                                      : (tag == "ISING" ? Boundary::PERIODIC : Boundary::OPEN);
  if (tag == "ISING") return ising_hamiltonian(require_int(spec, "n"), boundary);
  if (tag == "TRANSVERSE_ISING")
    return transverse_ising_hamiltonian(require_int(spec, "n"), require_num(spec, "g"), boundary);
  if (tag == "GRAPH_H") return graph_hamiltonian(graph_from_json(spec.at("graph")));
  if (tag == "CUSTOM") {
    LocalHamiltonian H;
    H.total = matrix_from_json(spec.at("matrix"));
    return H;
  }
  schema_error("hamiltonian tag must be ISING, TRANSVERSE_ISING, GRAPH_H or CUSTOM");
}

}  // namespace

BuiltState build_state(const ordered_json& spec, const Tolerances& tol) {
  const std::string family = spec.at("family").get<std::string>();

  if (family == "PRODUCT") {
    std::vector<Matrix> locals;
    if (spec.contains("locals")) {
      for (const auto& mj : spec["locals"]) locals.push_back(matrix_from_json(mj));
    } else {
      const int n = require_int(spec, "n"), d = require_int(spec, "d");
      std::mt19937_64 rng(spec.value("seed", std::uint64_t{1}));
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (int a = 0; a < n; ++a) {
        Matrix G(d, d);
        for (int i = 0; i < d; ++i)
          for (int k = 0; k < d; ++k) G(i, k) = cxd(gauss(rng), gauss(rng));
        Matrix rho_a = G * G.adjoint();
        rho_a /= rho_a.trace();
        locals.push_back(std::move(rho_a));
      }
    }
    std::vector<int> dims;
    Matrix rho(1, 1);
    rho(0, 0) = 1.0;
    for (const auto& rho_a : locals) {
      dims.push_back(static_cast<int>(rho_a.rows()));
      rho = kron(rho, rho_a).eval();
    }
    return {SubsystemLayout(dims), rho, std::nullopt, spec};
  }
  if (family == "SEP_LINE") {
    const int n = require_int(spec, "n");
    return {SubsystemLayout(std::vector<int>(n, 2)), sep_line(n), std::nullopt, spec};
  }
  if (family == "DICKE" || family == "BIG_DICKE" || family == "GHZ") {
    const Vector psi = build_pure(spec);
    const int n = require_int(spec, "n"), d = require_int(spec, "d");
    return {SubsystemLayout(std::vector<int>(n, d)), Matrix(psi * psi.adjoint()), psi, spec};
  }
  if (family == "PSEUDO_PURE") {
    const Vector psi = build_pure(spec.at("base"));
    const double eps = require_num(spec, "epsilon");
    const int n = require_int(spec.at("base"), "n"), d = require_int(spec.at("base"), "d");
    return {SubsystemLayout(std::vector<int>(n, d)), pseudo_pure(psi, eps), std::nullopt, spec};
  }
  if (family == "RHO_EPSILON") {
    return {SubsystemLayout({2, 2, 2, 2}), rho_epsilon(require_num(spec, "epsilon")), std::nullopt,
            spec};
  }
  if (family == "GIBBS") {
    const LocalHamiltonian H = build_hamiltonian(spec.at("hamiltonian"));
    const Matrix rho = gibbs(H.total, require_num(spec, "beta"));
    const int D = static_cast<int>(rho.rows());
    int n = 0;
    while ((1 << n) < D) ++n;
    if ((1 << n) != D) schema_error("GIBBS family currently targets qubit chains");
    return {SubsystemLayout(std::vector<int>(n, 2)), rho, std::nullopt, spec};
  }
  if (family == "GRAPH_PRODUCT") {
    const Graph graph = graph_from_json(spec.at("graph"));
    const int d = spec.value("d", 2);
    const SubsystemLayout layout(std::vector<int>(graph.n, d));
    Matrix H;
    if (!spec.contains("hadamard") || spec["hadamard"] == "fourier") {
      H = fourier_hadamard(d);
    } else {
      H = matrix_from_json(spec["hadamard"]);
      if (!is_hadamard(H, tol.tol_lin)) schema_error("hadamard matrix fails the defining conditions");
    }
    std::vector<Matrix> locals;
    if (spec.contains("locals") && spec["locals"].is_array()) {
      for (const auto& mj : spec["locals"]) locals.push_back(matrix_from_json(mj));
    } else {
      const std::string kind = spec.value("locals", std::string("plus"));
      if (kind == "plus") {
        Vector plus = Vector::Ones(d) / std::sqrt(double(d));
        for (int v = 0; v < graph.n; ++v) locals.push_back(plus * plus.adjoint());
      } else if (kind == "thermal") {
        if (d != 2) schema_error("thermal graph locals are defined for qubits");
        const double beta = require_num(spec, "beta");
        Matrix X = Matrix::Zero(2, 2);
        X(0, 1) = X(1, 0) = 1.0;
        for (int v = 0; v < graph.n; ++v) locals.push_back(gibbs(Matrix(-X), beta));
      } else {
        schema_error("locals must be \"plus\", \"thermal\" or an array of matrices");
      }
    }
    return {layout, graph_product(graph, H, locals, layout), std::nullopt, spec};
  }
  schema_error("unknown state family " + family);
}

NeighborhoodStructure neighborhoods_from_json(const ordered_json& j,
                                              const SubsystemLayout& layout) {
  const int n = layout.count();
  std::vector<std::vector<int>> nbs;
  if (j.contains("explicit")) {
    for (const auto& nb : j["explicit"]) {
      std::vector<int> sites;
      for (const auto& s : nb) sites.push_back(s.get<int>() - 1);
      nbs.push_back(std::move(sites));
    }
    return NeighborhoodStructure(layout, std::move(nbs));
  }
  const std::string tag = j.at("tag").get<std::string>();
  const bool periodic = j.value("periodic", false);
  if (tag == "NN_PAIRS") {
    for (int a = 0; a + 1 < n; ++a) nbs.push_back({a, a + 1});
    if (periodic && n > 2) nbs.push_back({0, n - 1});
  } else if (tag == "NNN_TRIPLES") {
    if (periodic) {
      for (int a = 0; a < n; ++a) nbs.push_back({a, (a + 1) % n, (a + 2) % n});
    } else {
      for (int a = 0; a + 2 < n; ++a) nbs.push_back({a, a + 1, a + 2});
    }
  } else if (tag == "K_BODY") {
    const int k = require_int(j, "k");
    if (k < 1 || k > n) schema_error("K_BODY needs 1 <= k <= n");
    if (periodic) {
      for (int a = 0; a < n; ++a) {
        std::vector<int> sites;
        for (int t = 0; t < k; ++t) sites.push_back((a + t) % n);
        nbs.push_back(std::move(sites));
      }
    } else {
      for (int a = 0; a + k <= n; ++a) {
        std::vector<int> sites;
        for (int t = 0; t < k; ++t) sites.push_back(a + t);
        nbs.push_back(std::move(sites));
      }
    }
  } else if (tag == "GRAPH_INDUCED") {
    return graph_neighborhoods(graph_from_json(j.at("graph")), layout);
  } else {
    schema_error("neighborhood tag must be NN_PAIRS, NNN_TRIPLES, K_BODY or GRAPH_INDUCED");
  }
  return NeighborhoodStructure(layout, std::move(nbs));
}

Problem problem_from_json(const ordered_json& j) {
  if (!j.contains("state")) schema_error("problem needs a \"state\" object");
  if (!j.contains("neighborhoods")) schema_error("problem needs a \"neighborhoods\" object");
  Tolerances tol;
  if (j.contains("tolerances")) apply_tolerance_overrides(tol, j["tolerances"]);
  BuiltState state = build_state(j["state"], tol);
  NeighborhoodStructure ns = neighborhoods_from_json(j["neighborhoods"], state.layout);
  Problem problem{std::move(state), std::move(ns), tol, j.value("seed", std::uint64_t{0x5eed}), j};
  return problem;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open problem file: " + path);
  ordered_json j;
  in >> j;
  return problem_from_json(j);
}

void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ffqls
