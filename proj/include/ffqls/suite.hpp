#pragma once

#include <string>
#include <vector>

#include "ffqls/json_io.hpp"

namespace ffqls {

struct FixtureResult {
  std::string name;
  bool passed = false;
  std::string detail;  ///< measured values, one line
};

struct SuiteResult {
  std::vector<FixtureResult> results;
  bool all_passed() const;
};

/// Runs the release acceptance fixtures end-to-end. `only` filters by
/// substring match on fixture names (empty = everything). When `csv_dir`
/// is nonempty, sweep fixtures drop their CSV data there.
SuiteResult run_acceptance_suite(const std::vector<std::string>& only = {},
                                 const std::string& csv_dir = "");

ordered_json suite_to_json(const SuiteResult& suite);

/// One "name: PASS/FAIL  detail" line per fixture plus a tally.
std::string suite_to_text(const SuiteResult& suite);

}  // namespace ffqls
