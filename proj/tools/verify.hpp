#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace euler2c::cli {

struct VerifyOptions {
  std::string suite = "all";
  int points = 0;  ///< 0: per-suite default
  unsigned long seed = 20240601;
};

struct SuiteResult {
  std::string name;
  bool passed = false;
  int points = 0;
  nlohmann::json residuals;   ///< measured maxima
  nlohmann::json thresholds;  ///< limits they are held to
  double seconds = 0.0;
  std::string error;  ///< set when the suite threw
};

/// Names accepted by --suite besides "all".
const std::vector<std::string>& suite_names();

/// Runs one suite or all of them. Throws std::invalid_argument for an unknown
/// suite name.
std::vector<SuiteResult> run_verify(const VerifyOptions& opt);

nlohmann::json to_json(const SuiteResult& r);

}  // namespace euler2c::cli
