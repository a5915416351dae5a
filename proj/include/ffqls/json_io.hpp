#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "ffqls/check.hpp"
#include "ffqls/synthesis.hpp"
#include "ffqls/verify.hpp"

namespace ffqls {

using ordered_json = nlohmann::ordered_json;

// ---- matrix / subspace / decomposition dumps -----------------------------------

/// {"rows":int,"cols":int,"re":[row-major],"im":[row-major]}
ordered_json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const ordered_json& j);

/// {"label":str,"dim":int,"basis":[matrix...]}
ordered_json subspace_to_json(const OperatorSubspace& sub);
OperatorSubspace subspace_from_json(const ordered_json& j);

/// {"blocks":[{"dA","dB","isometry","tau","factor_basis"}],"residual","seed"}
ordered_json blocks_to_json(const BlockDecomposition& blocks);

ordered_json tolerances_to_json(const Tolerances& tol);
void apply_tolerance_overrides(Tolerances& tol, const ordered_json& overrides);

// ---- bundle and reports ---------------------------------------------------------

ordered_json bundle_to_json(const GeneratorBundle& bundle);
GeneratorBundle bundle_from_json(const ordered_json& j);

ordered_json check_report_to_json(const CheckReport& report, std::uint64_t seed);
ordered_json verify_report_to_json(const VerifyReport& report, std::uint64_t seed);

// ---- problem files --------------------------------------------------------------

/// Graph input {"n":int,"edges":[[i,j]]} with 1-based vertices.
Graph graph_from_json(const ordered_json& j);

struct BuiltState {
  SubsystemLayout layout;
  Matrix density;
  std::optional<Vector> pure;  ///< set for pure families
  ordered_json spec;           ///< the spec it was built from
};

/// Builds the target state from its family spec. Families:
///   PRODUCT       {"n","d","seed"} or {"locals":[matrix...]}
///   SEP_LINE      {"n"}
///   DICKE         {"n","d","occupation":[...]}
///   BIG_DICKE     {"n","d","m"}
///   GHZ           {"n","d"}
///   PSEUDO_PURE   {"epsilon","base":<pure family spec>}
///   RHO_EPSILON   {"epsilon"}
///   GIBBS         {"beta","hamiltonian":{"tag","n","g","boundary","graph","matrix"}}
///   GRAPH_PRODUCT {"d","graph","hadamard":"fourier"|matrix,
///                  "locals":"plus"|"thermal"|[matrix...],"beta"}
BuiltState build_state(const ordered_json& spec, const Tolerances& tol);

/// Neighborhood spec: {"explicit":[[1-based sites]...]} or
/// {"tag":"NN_PAIRS"|"NNN_TRIPLES"|"K_BODY"|"GRAPH_INDUCED",
///  "k":int,"periodic":bool,"graph":...}.
NeighborhoodStructure neighborhoods_from_json(const ordered_json& j, const SubsystemLayout& layout);

struct Problem {
  BuiltState state;
  NeighborhoodStructure neighborhoods;
  Tolerances tolerances;
  std::uint64_t seed = 0x5eed;
  ordered_json raw;
};

/// Parses and validates a full problem file:
/// {"state":..., "neighborhoods":..., "tolerances":{...}, "seed":int}.
Problem problem_from_json(const ordered_json& j);
Problem load_problem(const std::string& path);

void write_json(const std::string& path, const ordered_json& j);

}  // namespace ffqls
