#include "ffqls/suite.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

namespace ffqls {

namespace {

const Tolerances kTol{};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

NeighborhoodStructure structure(const SubsystemLayout& layout,
                                std::vector<std::vector<int>> nbs) {
  return NeighborhoodStructure(layout, std::move(nbs));
}

NeighborhoodStructure two_triples_on_four() {
  return structure(SubsystemLayout({2, 2, 2, 2}), {{0, 1, 2}, {1, 2, 3}});
}

// ---- criterion 1: the separable two-branch line state is not stabilizable ----

FixtureResult separable_counterexample() {
  FixtureResult r{"1_separable_counterexample", false, ""};
  const Matrix rho = sep_line(4);
  SubsystemLayout layout({2, 2, 2, 2});
  const auto ns = structure(layout, {{0, 1}, {1, 2}, {2, 3}});
  const auto report = classify(rho, ns, kTol);

  Matrix p0 = Matrix::Zero(16, 16), p1 = Matrix::Zero(16, 16);
  p0(0, 0) = 1.0;
  p1(15, 15) = 1.0;
  const OperatorSubspace branches =
      orthonormalize(std::vector<Matrix>{p0, p1}, kTol.rank_tol);
  const double projector_gap =
      (report.intersection.vec_projector() - branches.vec_projector()).norm();

  r.passed = report.classification == Classification::NOT_FFQLS &&
             report.intersection_dim == 2 && projector_gap <= 1e-8;
  r.detail = "classification=" + to_string(report.classification) +
             " intersection_dim=" + std::to_string(report.intersection_dim) +
             " branch_projector_gap=" + fmt(projector_gap);
  return r;
}

// ---- criterion 2: the occupancy-limited four-qubit state is purely stabilizable ----

FixtureResult dicke_dqls() {
  FixtureResult r{"2_dicke_dqls", false, ""};
  const Vector psi = big_dicke(4, 2, 3);
  const Matrix rho = psi * psi.adjoint();
  const auto ns = two_triples_on_four();

  const bool pure_ok = dqls_condition(psi, ns, kTol);
  const auto bundle = synthesize(rho, ns, SynthesisMode::GENERAL, kTol);
  const auto ker = kernel(bundle.assemble_global(), 16, kTol);
  const auto ff = is_frustration_free(bundle, kTol);
  double worst_ff = 0.0;
  for (double res : ff.residuals) worst_ff = std::max(worst_ff, res);

  r.passed = pure_ok && ker.space.dim() == 1 &&
             contains(ker.space, rho, kTol.member_tol).member && worst_ff <= 1e-10;
  r.detail = std::string("dqls=") + (pure_ok ? "true" : "false") +
             " kernel_dim=" + std::to_string(ker.space.dim()) + " ff_residual=" + fmt(worst_ff);
  return r;
}

// ---- criterion 3: pseudo-pure mixtures fail with a two-dimensional margin ----

FixtureResult pseudo_pure_failure() {
  FixtureResult r{"3_pseudo_pure_failure", false, ""};
  const Matrix rho = pseudo_pure(big_dicke(4, 2, 3), 0.3);
  const auto ns = two_triples_on_four();
  const auto report = classify(rho, ns, kTol);

  const OperatorSubspace expected = orthonormalize(
      std::vector<Matrix>{Matrix::Identity(16, 16), rho}, kTol.rank_tol);
  const double projector_gap =
      (report.intersection.vec_projector() - expected.vec_projector()).norm();

  r.passed = report.classification == Classification::NOT_FFQLS &&
             report.intersection_dim == 2 && projector_gap <= 1e-7;
  r.detail = "classification=" + to_string(report.classification) +
             " intersection_dim=" + std::to_string(report.intersection_dim) +
             " span{I,rho}_projector_gap=" + fmt(projector_gap);
  return r;
}

// ---- criterion 4: the entangled rank-2 family ----

FixtureResult rho_eps_check() {
  FixtureResult r{"4a_rho_eps_check", false, ""};
  const auto ns = two_triples_on_four();
  bool ok = true;
  std::string detail;
  for (double eps : {0.25, 0.5, 0.75}) {
    const auto report = classify(rho_epsilon(eps), ns, kTol);
    const bool here = report.classification == Classification::UNDETERMINED &&
                      report.support.has_value() && !report.support->ok &&
                      report.support->intersection_rank == 5;
    ok = ok && here;
    detail += "eps=" + fmt(eps) + ":" + to_string(report.classification) + "/suppdim=" +
              std::to_string(report.support ? report.support->intersection_rank : -1) + " ";
  }
  r.passed = ok;
  r.detail = detail;
  return r;
}

FixtureResult rho_eps_stabilize() {
  FixtureResult r{"4b_rho_eps_stabilize", false, ""};
  const auto ns = two_triples_on_four();
  bool ok = true;
  std::string detail;
  for (double eps : {0.25, 0.5, 0.75}) {
    const Matrix rho = rho_epsilon(eps);
    const auto bundle = synthesize(rho, ns, SynthesisMode::GENERAL, kTol);
    const auto report = verify_bundle(bundle, rho, kTol);
    ok = ok && report.gas_ok && report.ff_ok;
    detail += "eps=" + fmt(eps) + ":gas=" + (report.gas_ok ? "1" : "0") +
              ",ff=" + (report.ff_ok ? "1" : "0") + " ";
  }
  r.passed = ok;
  r.detail = detail;
  return r;
}

FixtureResult rho_eps_gap_law(const std::string& csv_dir) {
  FixtureResult r{"4c_rho_eps_gap_law", false, ""};
  const auto ns = two_triples_on_four();

  std::vector<double> eps_grid, gaps;
  for (int k = 1; k <= 9; ++k) eps_grid.push_back(k / 10.0);
  for (double eps : eps_grid) {
    const auto bundle = synthesize(rho_epsilon(eps), ns, SynthesisMode::GENERAL, kTol);
    gaps.push_back(spectral_gap(bundle.assemble_global(), kTol).normalized);
  }
  if (!csv_dir.empty()) {
    std::ofstream csv(csv_dir + "/gap_sweep.csv");
    csv << "epsilon,normalized_gap\n";
    for (size_t k = 0; k < eps_grid.size(); ++k)
      csv << eps_grid[k] << "," << gaps[k] << "\n";
  }

  // absolute law at the three midpoints
  bool absolute_ok = true;
  for (size_t k = 0; k < eps_grid.size(); ++k) {
    const double eps = eps_grid[k];
    if (eps != 0.25 && eps != 0.5 && eps != 0.75) continue;
    const double want = 0.049 * (1.0 - eps);
    if (std::abs(gaps[k] - want) > 0.15 * want) absolute_ok = false;
  }

  // least-squares fit of gap against (1 - eps)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(eps_grid.size());
  for (size_t k = 0; k < eps_grid.size(); ++k) {
    const double x = 1.0 - eps_grid[k];
    sx += x;
    sy += gaps[k];
    sxx += x * x;
    sxy += x * gaps[k];
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  const bool fit_ok = std::abs(slope - 0.049) <= 0.15 * 0.049 && std::abs(intercept) <= 0.005;

  r.passed = absolute_ok && fit_ok;
  r.detail = "slope=" + fmt(slope) + " intercept=" + fmt(intercept) +
             " gap(0.5)=" + fmt(gaps[4]) + " want(0.5)=" + fmt(0.049 * 0.5) +
             (r.passed ? "" : "  [the 0.049 constant is construction-dependent; "
                              "this bundle follows a different curve -- see ledger]");
  return r;
}

// ---- criterion 5: thermal chain states, pair versus triple constraints ----

FixtureResult gibbs_nn_vs_nnn() {
  FixtureResult r{"5_gibbs_nn_vs_nnn", false, ""};
  bool ok = true;
  std::string detail;
  for (int n : {4, 5}) {
    SubsystemLayout layout(std::vector<int>(n, 2));
    std::vector<std::vector<int>> pairs, triples;
    for (int a = 0; a < n; ++a)
      pairs.push_back({std::min(a, (a + 1) % n), std::max(a, (a + 1) % n)});
    for (int a = 0; a < n; ++a) triples.push_back({a, (a + 1) % n, (a + 2) % n});
    const auto H = ising_hamiltonian(n, Boundary::PERIODIC);
    for (double beta : {0.5, 1.0}) {
      const Matrix rho = gibbs(H.total, beta);
      const auto nn = classify(rho, structure(layout, pairs), kTol);
      const bool nn_ok = nn.classification == Classification::NOT_FFQLS &&
                         nn.intersection_dim == (1 << n);

      const auto nnn_structure = structure(layout, triples);
      const auto nnn = classify(rho, nnn_structure, kTol);
      bool nnn_ok = nnn.classification == Classification::CERTIFIED_FULL_RANK;
      double kernel_dist = -1.0;
      if (nnn_ok) {
        const auto bundle = synthesize(rho, nnn_structure, SynthesisMode::FULL_RANK, kTol);
        const auto report = verify_bundle(bundle, rho, kTol);
        kernel_dist = report.kernel_target_distance;
        nnn_ok = report.gas_ok && report.kernel_dim == 1 && kernel_dist <= 1e-8;
      }
      ok = ok && nn_ok && nnn_ok;
      detail += "n=" + std::to_string(n) + ",b=" + fmt(beta) + ":" + (nn_ok ? "nn" : "NN!") + "/" +
                (nnn_ok ? "nnn" : "NNN!") + ",kd=" + fmt(kernel_dist) + " ";
    }
  }
  r.passed = ok;
  r.detail = detail;
  return r;
}

// ---- criterion 6: transverse-field chain needs wider neighborhoods as it grows ----

FixtureResult transverse_ising() {
  FixtureResult r{"6_transverse_ising", false, ""};
  const double g = 1.0, beta = 1.0;

  const Matrix rho4 = gibbs(transverse_ising_hamiltonian(4, g, Boundary::OPEN).total, beta);
  SubsystemLayout l4({2, 2, 2, 2});
  const auto c4 = classify(rho4, structure(l4, {{0, 1, 2}, {1, 2, 3}}), kTol);

  const Matrix rho5 = gibbs(transverse_ising_hamiltonian(5, g, Boundary::OPEN).total, beta);
  SubsystemLayout l5({2, 2, 2, 2, 2});
  const auto c5_three = classify(rho5, structure(l5, {{0, 1, 2}, {1, 2, 3}, {2, 3, 4}}), kTol);
  const auto c5_four = classify(rho5, structure(l5, {{0, 1, 2, 3}, {1, 2, 3, 4}}), kTol);

  r.passed = c4.classification == Classification::CERTIFIED_FULL_RANK &&
             c5_three.classification == Classification::NOT_FFQLS &&
             c5_four.classification == Classification::CERTIFIED_FULL_RANK;
  r.detail = "n4_3body=" + to_string(c4.classification) +
             " n5_3body=" + to_string(c5_three.classification) +
             " n5_4body=" + to_string(c5_four.classification);
  return r;
}

// ---- criterion 7: ladder stabilizers for graph product states ----

FixtureResult graph_product_fixture() {
  FixtureResult r{"7_graph_product", false, ""};
  const Graph line = Graph::line(4);
  SubsystemLayout layout({2, 2, 2, 2});
  const Matrix H = fourier_hadamard(2);

  // thermal locals at beta = 1
  Matrix X = Matrix::Zero(2, 2);
  X(0, 1) = X(1, 0) = 1.0;
  const Matrix thermal = gibbs(Matrix(-X), 1.0);
  const std::vector<Matrix> locals(4, thermal);
  const Matrix target = graph_product(line, H, locals, layout);
  const auto bundle = graph_product_lindblads(line, H, locals, layout, kTol);
  const auto report = verify_bundle(bundle, target, kTol);
  const double commutation = component_commutation_residual(bundle);

  // pure limit: plus-state locals drive toward the cluster state
  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const std::vector<Matrix> pure_locals(4, Matrix(plus * plus.adjoint()));
  const Matrix cluster = graph_product(line, H, pure_locals, layout);
  const auto pure_bundle = graph_product_lindblads(line, H, pure_locals, layout, kTol);
  const auto samples =
      evolve(pure_bundle.assemble_global(), Matrix::Identity(16, 16) / 16.0, {0.0, 50.0}, &cluster);
  // fidelity with the pure target
  const double fidelity = (cluster * samples.back().state).trace().real();

  r.passed = report.gas_ok && report.ff_ok && commutation <= 1e-9 && fidelity >= 1.0 - 1e-8;
  r.detail = std::string("thermal_gas=") + (report.gas_ok ? "1" : "0") +
             " commutation=" + fmt(commutation) + " cluster_fidelity_at_t50=" + fmt(fidelity);
  return r;
}

// ---- criterion 8: structure-theorem property sweep ----

FixtureResult structure_properties() {
  FixtureResult r{"8_structure_properties", false, ""};
  std::mt19937_64 rng(0xacce5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto rnd_matrix = [&](int d) {
    Matrix G(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) G(i, j) = cxd(gauss(rng), gauss(rng));
    return G;
  };
  auto rnd_density = [&](int d) {
    Matrix G = rnd_matrix(d);
    Matrix rho = G * G.adjoint();
    rho /= rho.trace();
    return Matrix(rho);
  };

  bool dual_ok = true, mixture_ok = true, support_ok = true, closure_ok = true;
  double worst_dual = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const int d = 2 + instance % 3;

    // (a) kernel duality for a projection-type generator; tensor-planted
    // algebras on the composite dimension, generic draws otherwise
    {
      Matrix rho, seed_op;
      if (d == 4) {
        rho = kron(rnd_density(2), rnd_density(2));
        Matrix x = Matrix::Zero(2, 2);
        x(0, 1) = x(1, 0) = 1.0;
        seed_op = kron(x, Matrix::Identity(2, 2));
      } else {
        rho = rnd_density(d);
        seed_op = rnd_matrix(d);
        seed_op = 0.5 * (seed_op + seed_op.adjoint()).eval();
      }
      const DensityPowers dp(rho, kTol.rank_tol);
      const Matrix planted = dp.power(0.5) * seed_op * dp.power(0.5);
      const auto F = minimal_fixed_point_set(
          orthonormalize(std::vector<Matrix>{rho, planted}, kTol.rank_tol), rho, kTol);
      const Matrix E = conditional_expectation(wedderburn_decompose(F, kTol), kTol);
      const auto dual = dual_kernel_check(neighborhood_generator(E), rho, kTol);
      worst_dual = std::max(worst_dual, dual.residual);
      if (!dual.ok || dual.residual > 1e-7) dual_ok = false;
    }

    // (b) fixed points of channel mixtures meet the component fixed points
    {
      const Matrix rho_a = rnd_density(2), tau_b = rnd_density(2);
      const Matrix rho = kron(rho_a, tau_b);
      const DensityPowers dp(rho, kTol.rank_tol);
      const Matrix I2 = Matrix::Identity(2, 2);
      std::vector<Matrix> maps;
      std::vector<OperatorSubspace> fixed;
      Matrix x = Matrix::Zero(2, 2);
      x(0, 1) = x(1, 0) = 1.0;
      for (const Matrix& gen : {kron(x, I2), kron(I2, x)}) {
        const Matrix planted = dp.power(0.5) * gen * dp.power(0.5);
        const auto F = minimal_fixed_point_set(
            orthonormalize(std::vector<Matrix>{rho, planted}, kTol.rank_tol), rho, kTol);
        maps.push_back(conditional_expectation(wedderburn_decompose(F, kTol), kTol));
        fixed.push_back(F.space);
      }
      std::uniform_real_distribution<double> unif(0.2, 0.8);
      const double p = unif(rng);
      const Matrix T = p * maps[0] + (1 - p) * maps[1];
      const auto fix_T = kernel(T - Matrix::Identity(16, 16), 4, kTol);
      const auto meet = subspace_intersection(fixed, kTol);
      if (fix_T.space.dim() != meet.dim() ||
          (fix_T.space.vec_projector() - meet.vec_projector()).norm() > 1e-7)
        mixture_ok = false;
    }

    // (c) reduced-state support equals the Schmidt-span support
    {
      SubsystemLayout layout({d, 2});
      const int D = layout.total_dim();
      Matrix rho;
      if (instance % 2 == 0) {
        rho = rnd_density(D);
      } else {
        Vector psi(D);
        for (int i = 0; i < D; ++i) psi(i) = cxd(gauss(rng), gauss(rng));
        psi.normalize();
        rho = psi * psi.adjoint();
      }
      const std::vector<int> nb{0};
      const Matrix lhs = support_projector(partial_trace(rho, nb, layout), kTol.rank_tol);
      const Matrix rhs = support_of(schmidt_span(rho, nb, layout, kTol), kTol.rank_tol);
      if ((lhs - rhs).norm() > 1e-7) support_ok = false;
    }

    // (d) closure idempotence and modular invariance
    {
      const Matrix rho = rnd_density(d);
      Matrix gen = rnd_matrix(d);
      const auto F = minimal_fixed_point_set(
          orthonormalize(std::vector<Matrix>{rho, gen}, kTol.rank_tol), rho, kTol);
      const auto F2 = minimal_fixed_point_set(F.space, rho, kTol);
      if (F2.space.dim() != F.space.dim() ||
          (F.space.vec_projector() - F2.space.vec_projector()).norm() > 1e-6)
        closure_ok = false;
      const DensityPowers dp(rho, kTol.rank_tol);
      for (const auto& B : F.space.basis()) {
        const Matrix MB = modular_map(B, dp, 0.5, kTol.member_tol);
        if (contains(F.space, MB, kTol.member_tol).residual > kTol.member_tol) closure_ok = false;
      }
    }
  }

  // (e) pure-state agreement between the two decision routes
  bool agreement_ok = true;
  SubsystemLayout layout({2, 2, 2});
  const std::vector<NeighborhoodStructure> nss = {
      structure(layout, {{0, 1}, {1, 2}}),
      structure(layout, {{0}, {1}, {2}}),
  };
  for (int draw = 0; draw < 10; ++draw) {
    Vector psi;
    if (draw % 2 == 0) {
      psi = Vector(8);
      for (int i = 0; i < 8; ++i) psi(i) = cxd(gauss(rng), gauss(rng));
      psi.normalize();
    } else {
      Vector a(2), b(2), c(2);
      for (Vector* v : {&a, &b, &c}) {
        (*v)(0) = cxd(gauss(rng), gauss(rng));
        (*v)(1) = cxd(gauss(rng), gauss(rng));
        v->normalize();
      }
      psi = kron(kron(a, b), c);
    }
    const auto& ns = nss[draw % nss.size()];
    const bool pure_verdict = dqls_condition(psi, ns, kTol);
    const bool mixed_verdict = necessary_condition(Matrix(psi * psi.adjoint()), ns, kTol).ok;
    if (pure_verdict != mixed_verdict) agreement_ok = false;
  }

  r.passed = dual_ok && mixture_ok && support_ok && closure_ok && agreement_ok;
  r.detail = std::string("dual=") + (dual_ok ? "1" : "0") + " mixtures=" + (mixture_ok ? "1" : "0") +
             " supports=" + (support_ok ? "1" : "0") + " closures=" + (closure_ok ? "1" : "0") +
             " pure_agreement=" + (agreement_ok ? "1" : "0") +
             " worst_dual_residual=" + fmt(worst_dual);
  return r;
}

// ---- criterion 9: the four-qubit cat state stays out of reach ----

FixtureResult ghz_control() {
  FixtureResult r{"9_ghz_control", false, ""};
  const auto ns = two_triples_on_four();
  const Vector cat = ghz(4, 2);
  const bool pure_fails = !dqls_condition(cat, ns, kTol);
  const auto report = classify(rho_epsilon(1.0), ns, kTol);
  r.passed = pure_fails && report.classification == Classification::NOT_FFQLS;
  r.detail = std::string("dqls=") + (pure_fails ? "false" : "true") +
             " eps1_classification=" + to_string(report.classification);
  return r;
}

}  // namespace

bool SuiteResult::all_passed() const {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

SuiteResult run_acceptance_suite(const std::vector<std::string>& only, const std::string& csv_dir) {
  const std::vector<std::pair<std::string, std::function<FixtureResult()>>> fixtures = {
      {"1_separable_counterexample", separable_counterexample},
      {"2_dicke_dqls", dicke_dqls},
      {"3_pseudo_pure_failure", pseudo_pure_failure},
      {"4a_rho_eps_check", rho_eps_check},
      {"4b_rho_eps_stabilize", rho_eps_stabilize},
      {"4c_rho_eps_gap_law", [&csv_dir]() { return rho_eps_gap_law(csv_dir); }},
      {"5_gibbs_nn_vs_nnn", gibbs_nn_vs_nnn},
      {"6_transverse_ising", transverse_ising},
      {"7_graph_product", graph_product_fixture},
      {"8_structure_properties", structure_properties},
      {"9_ghz_control", ghz_control},
  };

  SuiteResult suite;
  for (const auto& [name, fixture] : fixtures) {
    if (!only.empty()) {
      bool wanted = false;
      for (const auto& pattern : only)
        if (name.find(pattern) != std::string::npos) wanted = true;
      if (!wanted) continue;
    }
    try {
      suite.results.push_back(fixture());
    } catch (const std::exception& err) {
      suite.results.push_back({name, false, std::string("exception: ") + err.what()});
    }
  }
  return suite;
}

ordered_json suite_to_json(const SuiteResult& suite) {
  ordered_json j;
  ordered_json arr = ordered_json::array();
  for (const auto& r : suite.results)
    arr.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
  j["fixtures"] = arr;
  j["all_passed"] = suite.all_passed();
  return j;
}

std::string suite_to_text(const SuiteResult& suite) {
  std::ostringstream os;
  int passed = 0;
  for (const auto& r : suite.results) {
    os << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  " << r.detail << "\n";
    if (r.passed) ++passed;
  }
  os << passed << "/" << suite.results.size() << " fixtures passed\n";
  return os.str();
}

}  // namespace ffqls
