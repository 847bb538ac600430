#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "galab/cli/expression.hpp"
#include "galab/error.hpp"
#include "galab/field.hpp"
#include "galab/function_on_interval.hpp"
#include "galab/series.hpp"

namespace galab::cli {

/// Problem with a scenario file or command line; maps to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Pipeline { residual, potential, transform, compose, invert, conformal, series, remove_pole };

std::optional<Pipeline> pipeline_from_string(const std::string& s);
std::string to_string(Pipeline p);
const std::vector<std::string>& pipeline_names();

/// One verification run read from an INI file:
///
///   [scenario]   name, pipeline, description, covers
///   [grid]       x_min, x_max, y_min, y_max, nx, ny, excluded_band
///   [fields]     expressions in x, y, z, zbar (u, f1, f1_plus, psi, ...)
///   [constants]  imaginary integration constants as expressions
///   [profile]    phi, r_m1, r0, r1, ..., beta_minus1, ... (functions of y)
///   [chart]      kind and parameters of a holomorphic chart
///   [options]    pipeline switches
///   [tolerances] numeric overrides
///   [expect]     expected outcomes other than plain success
struct Scenario {
  std::string name;
  std::string description;
  std::string covers;
  std::filesystem::path source;
  Pipeline pipeline = Pipeline::residual;
  GridSpec grid;
  std::map<std::string, Expression> fields;
  std::map<std::string, cplx> constants;
  std::map<std::string, std::string> profile;
  std::map<std::string, std::string> chart;
  std::map<std::string, std::string> options;
  std::map<std::string, double> tolerances;
  std::map<std::string, std::string> expect;

  const Expression& field(const std::string& key) const;
  bool has_field(const std::string& key) const { return fields.count(key) > 0; }
  cplx constant(const std::string& key) const;
  double tolerance(const std::string& key, double fallback) const;
  std::optional<std::string> option(const std::string& key) const;
  std::optional<std::string> expectation(const std::string& key) const;
};

/// Throws ConfigError on unreadable files, syntax errors, unknown sections,
/// unparsable expressions or an invalid grid.
Scenario load_scenario(const std::filesystem::path& file);
Scenario parse_scenario(const std::string& text, const std::string& source_name);

/// Command-line adjustments applied on top of a scenario.
struct Overrides {
  std::optional<std::pair<int, int>> grid;
  std::optional<double> tol;
  std::optional<int> order;
};

/// Samples every field expression on the scenario grid.
Field sample_field(const Scenario& scn, const std::string& key, FieldRole role = FieldRole::generic);

/// Function of y on [a, b]: exact polynomial when the formula is a
/// polynomial in y and `mode` allows it, otherwise 201 samples.
FunctionOnInterval function_of_y(const Expression& e, double a, double b, const std::string& mode = "auto",
                                 int samples = 201);

/// Pole profile from the [profile] section. `r_m1` defaults to -1/2 and
/// `phi` to 0.
PoleProfile profile_from_scenario(const Scenario& scn);
FunctionOnInterval profile_function(const Scenario& scn, const std::string& key, const std::string& fallback);

/// Bundled scenario files (*.ini) in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir);

}  // namespace galab::cli
