#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "galab/cli/json_writer.hpp"
#include "galab/cli/scenario.hpp"
#include "galab/field.hpp"

namespace galab::cli {

/// One assertion of a pipeline: `value relation tol`.
struct Check {
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  std::string relation = "<=";
  bool passed = false;
};

struct PipelineOutcome {
  Json results = Json::object();
  std::vector<Check> checks;
  /// Grids written as `<name>.<key>.csv`.
  std::vector<std::pair<std::string, Field>> grids;
  /// Overrides the generated verdict when set.
  std::string verdict;

  bool passed() const;
  void add(std::string name, double value, double tol, const std::string& relation = "<=");
};

/// Scenario with the command-line overrides applied (resolution, primary
/// tolerance, series order). Throws ConfigError when they do not fit.
Scenario apply_overrides(Scenario scn, const Overrides& ov);

/// Runs the scenario's pipeline. Module errors propagate unchanged;
/// missing keys raise ConfigError.
PipelineOutcome run_pipeline(const Scenario& scn);

/// Class name of a library error, e.g. "ZeroPotentialError".
std::string error_name(const std::exception& e);

struct RunResult {
  int exit_code = 0;  // 0 pass, 2 failed assertion or module error, 1 configuration error
  std::string status;  // "pass", "fail", "error" or "config-error"
  std::string verdict;
  std::filesystem::path report;
};

/// Runs the pipeline, writes `<out>/<name>.report.json` plus the CSV grids
/// and returns the exit code. Configuration errors produce no report.
RunResult run_scenario(const Scenario& scn, const std::filesystem::path& out_dir);

/// Report document of a finished run; deterministic for identical input.
Json report_json(const Scenario& scn, const PipelineOutcome& outcome, const std::string& status,
                 const std::string& verdict);

}  // namespace galab::cli
