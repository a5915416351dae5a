#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "ffqls/json_io.hpp"
#include "ffqls/suite.hpp"

using namespace ffqls;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotStabilizable = 2;
constexpr int kExitUndetermined = 3;

struct CommonOptions {
  std::string problem_path;
  std::string out_path;
  std::vector<std::string> tol_overrides;
  std::optional<std::uint64_t> seed;
  bool json_stdout = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool needs_problem = true) {
  auto* p = cmd->add_option("--problem", opts.problem_path, "problem JSON file");
  if (needs_problem) p->required();
  cmd->add_option("--out", opts.out_path, "write the report JSON here");
  cmd->add_option("--tol", opts.tol_overrides, "tolerance override KEY=VAL (repeatable)");
  cmd->add_option("--seed", opts.seed, "seed override for randomized steps");
  cmd->add_flag("--json", opts.json_stdout, "emit the report JSON on stdout");
}

Problem load_with_overrides(const CommonOptions& opts) {
  Problem problem = load_problem(opts.problem_path);
  for (const auto& kv : opts.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--tol expects KEY=VAL, got " + kv);
    problem.tolerances.set(kv.substr(0, eq), std::stod(kv.substr(eq + 1)));
  }
  if (opts.seed.has_value()) problem.seed = *opts.seed;
  return problem;
}

void emit(const ordered_json& j, const CommonOptions& opts) {
  if (!opts.out_path.empty()) write_json(opts.out_path, j);
  if (opts.json_stdout || opts.out_path.empty()) std::cout << j.dump(2) << "\n";
}

int classification_exit_code(Classification c) {
  switch (c) {
    case Classification::CERTIFIED_FULL_RANK:
    case Classification::CERTIFIED_GENERAL: return kExitOk;
    case Classification::NOT_FFQLS: return kExitNotStabilizable;
    case Classification::UNDETERMINED: return kExitUndetermined;
  }
  return kExitError;
}

int run_check(const CommonOptions& opts) {
  const Problem problem = load_with_overrides(opts);
  const CheckReport report =
      classify(problem.state.density, problem.neighborhoods, problem.tolerances);
  emit(check_report_to_json(report, problem.seed), opts);
  return classification_exit_code(report.classification);
}

int run_synthesize(const CommonOptions& opts, bool force) {
  const Problem problem = load_with_overrides(opts);
  const CheckReport report =
      classify(problem.state.density, problem.neighborhoods, problem.tolerances);
  if (report.classification == Classification::NOT_FFQLS && !force) {
    ordered_json err;
    err["error"] = "target is not stabilizable under this neighborhood structure; "
                   "pass --force to synthesize anyway";
    err["classification"] = to_string(report.classification);
    std::cout << err.dump(2) << "\n";
    return kExitNotStabilizable;
  }
  const SynthesisMode mode =
      report.full_rank ? SynthesisMode::FULL_RANK : SynthesisMode::GENERAL;
  const GeneratorBundle bundle =
      synthesize(problem.state.density, problem.neighborhoods, mode, problem.tolerances,
                 problem.seed);
  emit(bundle_to_json(bundle), opts);
  return kExitOk;
}

int run_verify(const CommonOptions& opts, const std::string& bundle_path,
               const std::string& trajectory_csv) {
  const Problem problem = load_with_overrides(opts);
  std::ifstream in(bundle_path);
  if (!in) throw std::invalid_argument("cannot open bundle file: " + bundle_path);
  ordered_json bj;
  in >> bj;
  const GeneratorBundle bundle = bundle_from_json(bj);
  if (!(bundle.layout == problem.state.layout))
    throw std::invalid_argument("bundle layout does not match the problem layout");

  VerifyReport report =
      verify_bundle(bundle, problem.state.density, problem.tolerances, problem.seed);
  ordered_json j = verify_report_to_json(report, problem.seed);

  // an undetermined target verified to be stabilized is certified by construction
  const CheckReport check =
      classify(problem.state.density, problem.neighborhoods, problem.tolerances);
  j["base_classification"] = to_string(check.classification);
  j["upgraded_by_construction"] = check.classification == Classification::UNDETERMINED &&
                                  report.gas_ok && report.ff_ok;

  if (!trajectory_csv.empty()) {
    const Matrix global = bundle.assemble_global();
    const int D = bundle.layout.total_dim();
    const double horizon = report.gap.defined ? 40.0 / std::max(report.gap.raw, 1e-3) : 40.0;
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(k * horizon / 40.0);
    const Matrix support = support_projector(problem.state.density, problem.tolerances.rank_tol);
    const auto samples = evolve(global, Matrix::Identity(D, D) / D, grid,
                                &problem.state.density, &support);
    std::ofstream csv(trajectory_csv);
    csv << "t,trace_distance,V\n";
    for (const auto& s : samples)
      csv << s.t << "," << s.trace_distance << "," << (s.lyapunov ? *s.lyapunov : 0.0) << "\n";
  }

  emit(j, opts);
  return report.gas_ok && report.ff_ok ? kExitOk : kExitNotStabilizable;
}

int run_suite(const CommonOptions& opts, const std::vector<std::string>& fixtures,
              const std::string& csv_dir) {
  const SuiteResult suite = run_acceptance_suite(fixtures, csv_dir);
  if (opts.json_stdout || !opts.out_path.empty()) {
    emit(suite_to_json(suite), opts);
  }
  if (!opts.json_stdout) std::cout << suite_to_text(suite);
  return suite.all_passed() ? kExitOk : kExitNotStabilizable;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("FFQLS_THREADS")) {
    const int count = std::atoi(threads);
    if (count > 0) Eigen::setNbThreads(count);
  }

  CLI::App app{"quasi-local frustration-free stabilizability toolkit"};
  app.require_subcommand(1);

  CommonOptions check_opts, synth_opts, verify_opts, suite_opts;
  bool force = false;
  std::string bundle_path, trajectory_csv, csv_dir;
  std::vector<std::string> fixtures;

  auto* check_cmd = app.add_subcommand("check", "decide stabilizability of the target state");
  add_common(check_cmd, check_opts);

  auto* synth_cmd = app.add_subcommand("synthesize", "construct a stabilizing generator bundle");
  add_common(synth_cmd, synth_opts);
  synth_cmd->add_flag("--force", force, "synthesize even when the check refuses");

  auto* verify_cmd = app.add_subcommand("verify", "verify a bundle against the target state");
  add_common(verify_cmd, verify_opts);
  verify_cmd->add_option("--bundle", bundle_path, "bundle JSON file")->required();
  verify_cmd->add_option("--trajectory", trajectory_csv, "write a trajectory CSV here");

  auto* suite_cmd = app.add_subcommand("suite", "run the release fixtures end-to-end");
  add_common(suite_cmd, suite_opts, /*needs_problem=*/false);
  suite_cmd->add_option("--fixture", fixtures, "run only fixtures matching this name (repeatable)");
  suite_cmd->add_option("--csv-dir", csv_dir, "directory for sweep CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check_cmd->parsed()) return run_check(check_opts);
    if (synth_cmd->parsed()) return run_synthesize(synth_opts, force);
    if (verify_cmd->parsed()) return run_verify(verify_opts, bundle_path, trajectory_csv);
    if (suite_cmd->parsed()) return run_suite(suite_opts, fixtures, csv_dir);
  } catch (const std::exception& err) {
    ordered_json body;
    body["error"] = err.what();
    std::cout << body.dump(2) << "\n";
    std::cerr << "error: " << err.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
