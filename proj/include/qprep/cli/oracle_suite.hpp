#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace qprep::cli {

struct OracleResult {
  std::string name;
  std::string description;
  bool pass = false;
  /// The measured quantity and the bound it is compared against.
  double measured = 0.0;
  double tolerance = 0.0;
  /// "<=", ">=", "<" or ">".
  std::string relation;
  std::string detail;
  double seconds = 0.0;
  /// Runtime budget in seconds; 0 means none. Exceeding it fails the check.
  double time_limit = 0.0;
};

/// Registered checks in their default order.
std::vector<std::string> oracle_names();

/// Runs one check; an exception inside the check is reported as a failure.
OracleResult run_oracle(const std::string& name);

/// Empty `names` runs every check.
std::vector<OracleResult> run_oracles(const std::vector<std::string>& names = {});

nlohmann::json oracle_json(const std::vector<OracleResult>& results);

/// "PASS name: measured <= tolerance (1.2 s) detail".
std::string oracle_line(const OracleResult& r);

}  // namespace qprep::cli
