#include "galab/cli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace galab::cli {

namespace pt = boost::property_tree;

namespace {

const std::vector<std::string> kPipelineNames{"residual", "potential", "transform", "compose",
                                              "invert",   "conformal", "series",    "remove-pole"};

const std::set<std::string> kSections{"scenario", "grid",    "fields",     "constants", "profile",
                                      "chart",    "options", "tolerances", "expect"};

std::string context(const std::string& source, const std::string& section, const std::string& key) {
  return source + ": [" + section + "] " + key;
}

double parse_double(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size() || v < -1000000000L || v > 1000000000L) throw std::invalid_argument("trailing");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an integer, got '" + text + "'");
  }
}

Expression parse_at(const std::string& text, const std::string& where) {
  try {
    return parse_expression(text);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::string strip_hash_comments(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first != std::string::npos && line[first] == '#') line.clear();
    out << line << '\n';
  }
  return out.str();
}

std::map<std::string, std::string> raw_section(const pt::ptree& tree, const std::string& name) {
  std::map<std::string, std::string> out;
  if (auto sec = tree.get_child_optional(pt::ptree::path_type(name, '\0'))) {
    for (const auto& [key, node] : *sec) out[key] = node.data();
  }
  return out;
}

void require_keys_known(const std::map<std::string, std::string>& sec, const std::set<std::string>& known,
                        const std::string& source, const std::string& section) {
  for (const auto& [key, value] : sec) {
    if (!known.count(key)) throw ConfigError(context(source, section, key) + ": unknown key");
  }
}

GridSpec parse_grid(const std::map<std::string, std::string>& sec, const std::string& source) {
  require_keys_known(sec, {"x_min", "x_max", "y_min", "y_max", "nx", "ny", "excluded_band"}, source, "grid");
  GridSpec g;
  auto need = [&](const char* key) -> const std::string& {
    auto it = sec.find(key);
    if (it == sec.end()) throw ConfigError(context(source, "grid", key) + ": missing");
    return it->second;
  };
  g.x_min = parse_double(need("x_min"), context(source, "grid", "x_min"));
  g.x_max = parse_double(need("x_max"), context(source, "grid", "x_max"));
  g.y_min = parse_double(need("y_min"), context(source, "grid", "y_min"));
  g.y_max = parse_double(need("y_max"), context(source, "grid", "y_max"));
  g.nx = parse_int(need("nx"), context(source, "grid", "nx"));
  g.ny = parse_int(need("ny"), context(source, "grid", "ny"));
  if (auto it = sec.find("excluded_band"); it != sec.end()) {
    g.excluded_band = parse_double(it->second, context(source, "grid", "excluded_band"));
  }
  try {
    g.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(source + ": [grid] " + e.what());
  }
  return g;
}

}  // namespace

std::optional<Pipeline> pipeline_from_string(const std::string& s) {
  for (std::size_t k = 0; k < kPipelineNames.size(); ++k) {
    if (kPipelineNames[k] == s) return static_cast<Pipeline>(k);
  }
  return std::nullopt;
}

std::string to_string(Pipeline p) { return kPipelineNames.at(static_cast<std::size_t>(p)); }

const std::vector<std::string>& pipeline_names() { return kPipelineNames; }

const Expression& Scenario::field(const std::string& key) const {
  auto it = fields.find(key);
  if (it == fields.end()) {
    throw ConfigError(source.string() + ": pipeline " + to_string(pipeline) + " needs [fields] " + key);
  }
  return it->second;
}

cplx Scenario::constant(const std::string& key) const {
  auto it = constants.find(key);
  return it == constants.end() ? cplx{} : it->second;
}

double Scenario::tolerance(const std::string& key, double fallback) const {
  auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

std::optional<std::string> Scenario::option(const std::string& key) const {
  auto it = options.find(key);
  if (it == options.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Scenario::expectation(const std::string& key) const {
  auto it = expect.find(key);
  if (it == expect.end()) return std::nullopt;
  return it->second;
}

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  pt::ptree tree;
  try {
    std::istringstream in(strip_hash_comments(text));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source_name + ": line " + std::to_string(e.line()) + ": " + e.message());
  }
  for (const auto& [name, sec] : tree) {
    if (!kSections.count(name)) throw ConfigError(source_name + ": unknown section [" + name + "]");
    if (sec.empty() && !sec.data().empty()) throw ConfigError(source_name + ": key '" + name + "' outside a section");
  }

  Scenario scn;
  scn.source = source_name;

  const auto head = raw_section(tree, "scenario");
  require_keys_known(head, {"name", "pipeline", "description", "covers"}, source_name, "scenario");
  auto head_key = [&](const char* key, bool required) -> std::string {
    auto it = head.find(key);
    if (it == head.end() || it->second.empty()) {
      if (required) throw ConfigError(context(source_name, "scenario", key) + ": missing");
      return {};
    }
    return it->second;
  };
  scn.name = head_key("name", true);
  if (scn.name.find_first_of("/\\ ") != std::string::npos) {
    throw ConfigError(context(source_name, "scenario", "name") + ": must not contain spaces or slashes");
  }
  const std::string pipeline = head_key("pipeline", true);
  const auto p = pipeline_from_string(pipeline);
  if (!p) throw ConfigError(context(source_name, "scenario", "pipeline") + ": unknown pipeline '" + pipeline + "'");
  scn.pipeline = *p;
  scn.description = head_key("description", false);
  scn.covers = head_key("covers", false);

  const auto grid = raw_section(tree, "grid");
  if (!grid.empty()) {
    scn.grid = parse_grid(grid, source_name);
  } else if (scn.pipeline != Pipeline::series) {
    throw ConfigError(source_name + ": pipeline " + pipeline + " needs a [grid] section");
  }

  for (const auto& [key, value] : raw_section(tree, "fields")) {
    scn.fields.emplace(key, parse_at(value, context(source_name, "fields", key)));
  }
  for (const auto& [key, value] : raw_section(tree, "constants")) {
    const std::string where = context(source_name, "constants", key);
    const Expression e = parse_at(value, where);
    if (!e.is_constant()) throw ConfigError(where + ": integration constants must not depend on position");
    const cplx c = e(0.0, 0.0);
    if (std::abs(c.real()) > 1e-14 * std::max(1.0, std::abs(c))) {
      throw ConfigError(where + ": integration constants must be imaginary");
    }
    scn.constants[key] = {0.0, c.imag()};
  }
  for (const auto& [key, value] : raw_section(tree, "tolerances")) {
    const double v = parse_double(value, context(source_name, "tolerances", key));
    if (!(v > 0.0)) throw ConfigError(context(source_name, "tolerances", key) + ": must be positive");
    scn.tolerances[key] = v;
  }
  scn.profile = raw_section(tree, "profile");
  scn.chart = raw_section(tree, "chart");
  scn.options = raw_section(tree, "options");
  scn.expect = raw_section(tree, "expect");
  for (const auto& [key, value] : scn.profile) {
    if (key != "mode" && key != "normalize" && key != "samples") parse_at(value, context(source_name, "profile", key));
  }
  return scn;
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read scenario file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), file.string());
}

Field sample_field(const Scenario& scn, const std::string& key, FieldRole role) {
  const Expression& e = scn.field(key);
  try {
    Field f = Field::sample(scn.grid, [&](double x, double y) { return e(x, y); }, role);
    f.check_finite(key.c_str());
    return f;
  } catch (const EvalError& err) {
    throw ConfigError(context(scn.source.string(), "fields", key) + ": " + err.what());
  } catch (const InvalidArgument& err) {
    throw ConfigError(context(scn.source.string(), "fields", key) + ": " + err.what());
  }
}

FunctionOnInterval function_of_y(const Expression& e, double a, double b, const std::string& mode, int samples) {
  if (mode != "auto" && mode != "polynomial" && mode != "sampled") {
    throw ConfigError("profile mode must be auto, polynomial or sampled, got '" + mode + "'");
  }
  const auto poly = e.as_polynomial_in_y();
  if (poly && mode != "sampled") {
    if (static_cast<int>(poly->size()) - 1 <= FunctionOnInterval::kMaxDegree) {
      return FunctionOnInterval::polynomial(a, b, *poly);
    }
  }
  if (mode == "polynomial") throw ConfigError("'" + e.source() + "' is not a polynomial in y of supported degree");
  if (samples < 8) throw ConfigError("profile sampling needs at least 8 samples");
  for (double y : {a, 0.5 * (a + b), b}) {
    if (std::abs(e(0.0, y) - e(0.61803, y)) > 1e-14 * std::max(1.0, std::abs(e(0.0, y)))) {
      throw ConfigError("'" + e.source() + "' must be a function of y only");
    }
  }
  try {
    return FunctionOnInterval::sample(a, b, samples, [&](double y) { return e(0.0, y); });
  } catch (const EvalError& err) {
    throw ConfigError("'" + e.source() + "': " + err.what());
  }
}

FunctionOnInterval profile_function(const Scenario& scn, const std::string& key, const std::string& fallback) {
  double a = scn.grid.y_min;
  double b = scn.grid.y_max;
  const std::string src = scn.source.string();
  if (auto it = scn.profile.find("a"); it != scn.profile.end()) a = parse_double(it->second, context(src, "profile", "a"));
  if (auto it = scn.profile.find("b"); it != scn.profile.end()) b = parse_double(it->second, context(src, "profile", "b"));
  if (!(a < b)) throw ConfigError(src + ": [profile] needs an interval a < b (or a [grid] section)");
  const std::string mode = scn.profile.count("mode") ? scn.profile.at("mode") : "auto";
  const int samples = scn.profile.count("samples")
                          ? parse_int(scn.profile.at("samples"), context(src, "profile", "samples"))
                          : 201;
  auto it = scn.profile.find(key);
  const std::string text = it == scn.profile.end() ? fallback : it->second;
  if (text.empty()) throw ConfigError(context(src, "profile", key) + ": missing");
  try {
    return function_of_y(parse_at(text, context(src, "profile", key)), a, b, mode, samples);
  } catch (const ConfigError& e) {
    throw ConfigError(context(src, "profile", key) + ": " + e.what());
  }
}

PoleProfile profile_from_scenario(const Scenario& scn) {
  const std::string src = scn.source.string();
  PoleProfile p;
  p.n = scn.profile.count("n") ? parse_int(scn.profile.at("n"), context(src, "profile", "n")) : 1;
  if (p.n < 1 || p.n > 4) throw ConfigError(context(src, "profile", "n") + ": pole order must be 1 ... 4");
  p.phi = profile_function(scn, "phi", "0");
  int top = -1;
  for (const auto& [key, value] : scn.profile) {
    if (key.size() >= 2 && key[0] == 'r' && std::isdigit(static_cast<unsigned char>(key[1]))) {
      top = std::max(top, parse_int(key.substr(1), context(src, "profile", key)));
    } else if (key.size() >= 3 && key.rfind("r_m", 0) == 0) {
      const int k = parse_int(key.substr(3), context(src, "profile", key));
      if (k < 1 || k > p.n) throw ConfigError(context(src, "profile", key) + ": order outside the pole order");
    }
  }
  for (int j = -p.n; j <= top; ++j) {
    const std::string key = j < 0 ? "r_m" + std::to_string(-j) : "r" + std::to_string(j);
    const std::string fallback = (j == -1 && p.n == 1) ? "-1/2" : "0";
    p.r.push_back(profile_function(scn, key, fallback));
  }
  return p;
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".ini") out.push_back(entry.path());
  }
  if (ec) throw ConfigError("cannot list scenarios in " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace galab::cli
