#include "galab/cli/app.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "galab/cli/pipelines.hpp"
#include "galab/cli/scenario.hpp"

namespace galab::cli {

namespace {

struct Outcome {
  int code = 0;
  std::string line;
  std::string error;
};

std::pair<int, int> parse_grid_flag(const std::string& s) {
  const auto comma = s.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument("comma");
    std::size_t a = 0;
    std::size_t b = 0;
    const std::string left = s.substr(0, comma);
    const std::string right = s.substr(comma + 1);
    const int nx = std::stoi(left, &a);
    const int ny = std::stoi(right, &b);
    if (a != left.size() || b != right.size()) throw std::invalid_argument("trailing");
    return {nx, ny};
  } catch (const std::exception&) {
    throw ConfigError("--grid expects NX,NY, got '" + s + "'");
  }
}

Outcome run_one(const std::string& file, const std::string& pipeline, const Overrides& ov,
                const std::filesystem::path& out_dir) {
  Outcome o;
  try {
    Scenario scn = load_scenario(file);
    if (pipeline != "run" && pipeline != to_string(scn.pipeline)) {
      throw ConfigError(file + ": scenario runs pipeline " + to_string(scn.pipeline) + ", not " + pipeline);
    }
    scn = apply_overrides(std::move(scn), ov);
    const RunResult r = run_scenario(scn, out_dir);
    const char* tag = r.status == "pass" ? "PASS " : r.status == "fail" ? "FAIL " : "ERROR";
    o.code = r.exit_code;
    o.line = std::string(tag) + "  " + scn.name + "  [" + to_string(scn.pipeline) + "]  " + r.verdict;
  } catch (const ConfigError& e) {
    o.code = 1;
    o.error = std::string("configuration error: ") + e.what();
  } catch (const Error& e) {
    o.code = 1;
    o.error = file + ": " + error_name(e) + ": " + e.what();
  }
  return o;
}

std::filesystem::path default_scenario_dir() {
  if (const char* env = std::getenv("GALAB_SCENARIO_DIR")) return env;
#ifdef GALAB_DEFAULT_SCENARIO_DIR
  return GALAB_DEFAULT_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

int list(const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
  int code = 0;
  for (const auto& file : list_scenarios(dir)) {
    try {
      const Scenario s = load_scenario(file);
      out << s.name << "  [" << to_string(s.pipeline) << "]  " << s.covers << "\n";
    } catch (const ConfigError& e) {
      err << "configuration error: " << e.what() << "\n";
      code = 1;
    }
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Verification pipelines for Moutard-type transforms of generalized analytic functions", "galab"};
  std::string pipeline;
  std::vector<std::string> files;
  std::string out_dir;
  std::string grid;
  std::optional<double> tol;
  std::optional<int> order;
  int jobs = 1;
  bool list_flag = false;
  std::string scenario_dir;

  std::vector<std::string> choices = pipeline_names();
  choices.push_back("run");
  app.add_option("pipeline", pipeline, "Pipeline to run, or 'run' for the scenario's own")
      ->check(CLI::IsMember(choices));
  app.add_option("--scenario,-s", files, "Scenario file(s)")->expected(1, -1);
  app.add_option("--out,-o", out_dir, "Output directory (default $GALAB_OUT or ./galab_out)");
  app.add_option("--grid", grid, "Override grid resolution as NX,NY");
  app.add_option("--tol", tol, "Override the pipeline's primary tolerance");
  app.add_option("--order", order, "Override the series order K");
  app.add_option("--jobs,-j", jobs, "Run scenarios concurrently")->check(CLI::Range(1, 256));
  app.add_flag("--list-scenarios", list_flag, "List bundled scenarios");
  app.add_option("--scenario-dir", scenario_dir, "Directory searched by --list-scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (list_flag) return list(scenario_dir.empty() ? default_scenario_dir() : std::filesystem::path(scenario_dir), out, err);
    if (pipeline.empty()) throw ConfigError("a pipeline is required");
    if (files.empty()) throw ConfigError("at least one --scenario is required");
    Overrides ov;
    if (!grid.empty()) ov.grid = parse_grid_flag(grid);
    ov.tol = tol;
    ov.order = order;
    if (out_dir.empty()) {
      const char* env = std::getenv("GALAB_OUT");
      out_dir = env && *env ? env : "galab_out";
    }

    std::vector<Outcome> results(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < files.size(); k = next++) results[k] = run_one(files[k], pipeline, ov, out_dir);
    };
    const int n = std::min<int>(jobs, static_cast<int>(files.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = 0;
    bool failed = false;
    for (const Outcome& o : results) {
      if (!o.line.empty()) out << o.line << "\n";
      if (!o.error.empty()) err << o.error << "\n";
      if (o.code == 1) code = 1;
      if (o.code == 2) failed = true;
    }
    if (code == 0 && failed) code = 2;
    return code;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace galab::cli
