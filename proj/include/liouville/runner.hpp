#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "liouville/config.hpp"

namespace liouville {

// One measured quantity against its bound. relation is "<=", ">=" or "in"
// (bound <= value <= bound_hi). NaN values never pass.
struct Check {
  std::string name;
  double value = 0.0;
  std::string relation = "<=";
  double bound = 0.0;
  double bound_hi = 0.0;
  bool pass = false;
  std::string detail;
};

Check make_check(std::string name, double value, std::string relation, double bound,
                 double bound_hi = 0.0, std::string detail = {});
Json check_json(const Check& c);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 failed check or library error, 2 config error
  std::vector<Check> checks;
  std::vector<std::string> files;  // relative to the output directory, manifest excluded
  Json summary;                    // command-specific results (also written to summary.json)
  std::string error;               // library or config error message, if any
  std::string error_code;

  const Check* find(const std::string& name) const;
};

// Runs one experiment and writes its artifacts (CSV, JSON, binary grids),
// summary.json, failure_report.json on failure and manifest.json into
// config.output_dir. Progress goes to log.
RunOutcome run(const ExperimentConfig& config, std::ostream& log);

// liouville_lab <command> [--config FILE] [--output-dir DIR] [--seed N]
//               [--threads N] [--<param> VALUE ...]
// Command-line values override file values. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Files whose bytes must not depend on anything but (config, seed).
bool is_data_artifact(const std::string& file);

}  // namespace liouville
