#include "galab/cli/pipelines.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "galab/conformal.hpp"
#include "galab/moutard.hpp"
#include "galab/potential.hpp"
#include "galab/series.hpp"
#include "galab/singularity.hpp"

namespace galab::cli {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Json vector_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(x);
  return out;
}

Json grid_json(const GridSpec& g) {
  Json out = Json::object();
  out["x_min"] = g.x_min;
  out["x_max"] = g.x_max;
  out["y_min"] = g.y_min;
  out["y_max"] = g.y_max;
  out["nx"] = g.nx;
  out["ny"] = g.ny;
  out["excluded_band"] = g.excluded_band ? Json(*g.excluded_band) : Json(nullptr);
  return out;
}

bool truthy(const std::string& s, const std::string& where) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(where + ": expected true or false, got '" + s + "'");
}

bool expect_flag(const Scenario& scn, const std::string& key) {
  const auto v = scn.expectation(key);
  return v && truthy(*v, scn.source.string() + ": [expect] " + key);
}

double number_option(const Scenario& scn, const std::map<std::string, std::string>& sec, const std::string& section,
                     const std::string& key, double fallback) {
  auto it = sec.find(key);
  if (it == sec.end()) return fallback;
  const std::string where = scn.source.string() + ": [" + section + "] " + key;
  Expression e;
  try {
    e = parse_expression(it->second);
  } catch (const ParseError& err) {
    throw ConfigError(where + ": " + err.what());
  }
  if (!e.is_constant()) throw ConfigError(where + ": must be a constant");
  const cplx v = e(0.0, 0.0);
  if (v.imag() != 0.0 || !std::isfinite(v.real())) throw ConfigError(where + ": must be a real number");
  return v.real();
}

int int_option(const Scenario& scn, const std::map<std::string, std::string>& sec, const std::string& section,
               const std::string& key, int fallback) {
  const double v = number_option(scn, sec, section, key, fallback);
  if (v != std::floor(v) || std::abs(v) > 1e6) {
    throw ConfigError(scn.source.string() + ": [" + section + "] " + key + ": must be an integer");
  }
  return static_cast<int>(v);
}

NodeIndex nearest_active(const GridSpec& g, cplx at) {
  NodeIndex best{};
  double dist = std::numeric_limits<double>::infinity();
  for_each_active(g, [&](int i, int j) {
    const double d = std::abs(g.z(i, j) - at);
    if (d < dist - 1e-12 * std::max(g.hx(), g.hy())) {
      dist = d;
      best = {i, j};
    }
  });
  return best;
}

NodeIndex basepoint(const Scenario& scn) {
  cplx at{};
  if (auto s = scn.option("basepoint")) {
    const auto comma = s->find(',');
    const std::string where = scn.source.string() + ": [options] basepoint";
    if (comma == std::string::npos) throw ConfigError(where + ": expected 'x,y'");
    try {
      at = {std::stod(s->substr(0, comma)), std::stod(s->substr(comma + 1))};
    } catch (const std::exception&) {
      throw ConfigError(where + ": expected 'x,y', got '" + *s + "'");
    }
  }
  return nearest_active(scn.grid, at);
}

Json node_json(const GridSpec& g, NodeIndex n) {
  Json out = Json::object();
  out["i"] = n.i;
  out["j"] = n.j;
  out["x"] = g.x(n.i);
  out["y"] = g.y(n.j);
  return out;
}

/// Whole grid, or the half containing `bp` when a band splits it.
NodeRect loop_rect(const GridSpec& g, NodeIndex bp) {
  NodeRect r{0, g.nx - 1, 0, g.ny - 1};
  if (g.excluded_band) {
    int lo = bp.i;
    int hi = bp.i;
    while (lo > 0 && !g.excluded(lo - 1)) --lo;
    while (hi < g.nx - 1 && !g.excluded(hi + 1)) ++hi;
    r.i0 = lo;
    r.i1 = hi;
  }
  return r;
}

Field product_defect(const Potential& w, const Field& psi, const Field& psi_plus, bool holomorphic) {
  const Field p = psi * psi_plus;
  return holomorphic ? dz(w.values()) - p : dbar(w.values()) + conj(p);
}

double max_imag_real_drift(const Potential& w) {
  double m = 0.0;
  for_each_active(w.grid(), [&](int i, int j) { m = std::max(m, std::abs(w(i, j).real())); });
  return std::max(m, w.max_real_drift());
}

void compare_expected(const Scenario& scn, PipelineOutcome& out, const std::string& key, const Field& actual,
                      FieldRole role) {
  if (!scn.has_field(key)) return;
  const Field expected = sample_field(scn, key, role);
  const double d = max_rel_diff(actual, expected);
  out.results["expected_deviation"][key] = d;
  out.add(key + " matches", d, scn.tolerance("expected", 1e-8));
}

// ---------------------------------------------------------------- residual

PipelineOutcome run_residual(const Scenario& scn) {
  PipelineOutcome out;
  const std::string kind = scn.option("kind").value_or("direct");
  if (kind != "direct" && kind != "conjugate") {
    throw ConfigError(scn.source.string() + ": [options] kind must be direct or conjugate");
  }
  const EquationKind ek = kind == "direct" ? EquationKind::direct : EquationKind::conjugate;
  const Field u = sample_field(scn, "u", FieldRole::coefficient);
  const Field psi = sample_field(scn, "psi", ek == EquationKind::direct ? FieldRole::solution
                                                                         : FieldRole::conjugate_solution);
  const double res = residual(u, psi, ek);
  out.results["kind"] = kind;
  out.results["residual"] = res;
  const GridSpec coarse = scn.grid.with_resolution((scn.grid.nx + 1) / 2, (scn.grid.ny + 1) / 2);
  try {
    coarse.validate();
    Scenario half = scn;
    half.grid = coarse;
    const double res_coarse = residual(sample_field(half, "u", FieldRole::coefficient),
                                       sample_field(half, "psi", psi.role()), ek);
    out.results["residual_half_resolution"] = res_coarse;
    out.results["observed_order"] =
        res > 0.0 && res_coarse > 0.0
            ? Json(std::log(res_coarse / res) / std::log((scn.grid.nx - 1.0) / (coarse.nx - 1.0)))
            : Json(nullptr);
  } catch (const InvalidArgument&) {
    out.results["residual_half_resolution"] = nullptr;
    out.results["observed_order"] = nullptr;
  }
  if (auto v = scn.expectation("residual")) {
    const double target = number_option(scn, scn.expect, "expect", "residual", 0.0);
    out.add("|residual - " + *v + "|", std::abs(res - target), scn.tolerance("residual", 1e-6));
  } else {
    out.add("residual", res, scn.tolerance("residual", 1e-6));
  }
  out.grids.emplace_back("residual", residual_field(u, psi, ek));
  return out;
}

// --------------------------------------------------------------- potential

PipelineOutcome run_potential(const Scenario& scn) {
  PipelineOutcome out;
  const Field psi = sample_field(scn, "psi", FieldRole::solution);
  const Field psi_plus = sample_field(scn, "psi_plus", FieldRole::conjugate_solution);
  const NodeIndex bp = basepoint(scn);
  OmegaOptions opt;
  opt.exactness_tol = scn.tolerance("exactness", opt.exactness_tol);
  const Potential w = omega(psi, psi_plus, bp, scn.constant("omega"), opt);
  const double loop = loop_defect(psi, psi_plus, loop_rect(scn.grid, bp));
  out.results["basepoint"] = node_json(scn.grid, bp);
  out.results["constant"] = complex_json(w.constant());
  out.results["max_real_drift"] = w.max_real_drift();
  out.results["loop_defect"] = loop;
  out.results["path_defect"] = w.path_defect();
  if (w.secondary()) {
    out.results["secondary_basepoint"] = node_json(scn.grid, w.secondary()->node);
    out.results["secondary_constant"] = complex_json(w.secondary()->constant);
  }
  const double dz_defect = max_norm(product_defect(w, psi, psi_plus, true));
  const double dbar_defect = max_norm(product_defect(w, psi, psi_plus, false));
  out.results["dz_defect"] = dz_defect;
  out.results["dbar_defect"] = dbar_defect;
  const double tol = scn.tolerance("potential", 1e-6);
  out.add("loop_defect", loop, tol);
  out.add("dz_defect", dz_defect, tol);
  out.add("max_real_drift", w.max_real_drift(), 1e-10);
  compare_expected(scn, out, "omega_expected", w.values(), FieldRole::generic);
  out.grids.emplace_back("omega", w.values());
  return out;
}

// --------------------------------------------------------------- transform

struct SimpleData {
  Field u, f, f_plus, psi, psi_plus;
  NodeIndex bp;
  Potential w_ff, w_pf, w_fp;
};

SimpleData simple_data(const Scenario& scn) {
  SimpleData d;
  d.u = sample_field(scn, "u", FieldRole::coefficient);
  d.f = sample_field(scn, "f1", FieldRole::solution);
  d.f_plus = sample_field(scn, "f1_plus", FieldRole::conjugate_solution);
  d.psi = sample_field(scn, "psi", FieldRole::solution);
  d.psi_plus = sample_field(scn, "psi_plus", FieldRole::conjugate_solution);
  d.bp = basepoint(scn);
  d.w_ff = omega(d.f, d.f_plus, d.bp, scn.constant("f1_f1p"));
  d.w_pf = omega(d.psi, d.f_plus, d.bp, scn.constant("psi_f1p"));
  d.w_fp = omega(d.f, d.psi_plus, d.bp, scn.constant("f1_psip"));
  return d;
}

double pair_residual(const Field& u, const Field& psi, const Field& psi_plus) {
  return std::max(residual(u, psi, EquationKind::direct), residual(u, psi_plus, EquationKind::conjugate));
}

PipelineOutcome run_transform(const Scenario& scn) {
  PipelineOutcome out;
  const SimpleData d = simple_data(scn);
  const TransformResult m = moutard_simple(d.u, d.f, d.f_plus, d.w_ff, d.bp);
  const Field psi_t = m.map_psi(d.psi, std::span<const Potential>(&d.w_pf, 1));
  const Field psi_plus_t = m.map_psi_plus(d.psi_plus, std::span<const Potential>(&d.w_fp, 1));
  const Field f_image = m.map_psi(d.f, std::span<const Potential>(&d.w_ff, 1));
  const Field f_plus_image = m.map_psi_plus(d.f_plus, std::span<const Potential>(&d.w_ff, 1));

  const double before = pair_residual(d.u, d.psi, d.psi_plus);
  const double after = pair_residual(m.u_tilde, psi_t, psi_plus_t);
  const double annihilation = std::max(max_norm(f_image), max_norm(f_plus_image));
  Json report = Json::object();
  report["N"] = m.N;
  report["det_omega_min"] = m.det_omega_min;
  report["residual_before"] = before;
  report["residual_after"] = after;
  report["seed_annihilation_max"] = annihilation;
  out.results["transform"] = report;
  out.results["basepoint"] = node_json(scn.grid, d.bp);

  const Potential w_pp = omega(d.psi, d.psi_plus, d.bp, scn.constant("psi_psip"));
  const Potential w_t = transformed_potential(w_pp, d.w_pf, d.w_fp, d.w_ff, scn.constant("tilde"));
  const double dz_defect = max_norm(product_defect(w_t, psi_t, psi_plus_t, true));
  const double dbar_defect = max_norm(product_defect(w_t, psi_t, psi_plus_t, false));
  const double drift = max_imag_real_drift(w_t);
  Json prop = Json::object();
  prop["dz_defect"] = dz_defect;
  prop["dbar_defect"] = dbar_defect;
  prop["max_real_part"] = drift;
  out.results["transformed_potential"] = prop;

  const double tol = scn.tolerance("residual", 1e-6);
  out.add("residual_before", before, tol);
  out.add("residual_after", after, tol);
  out.add("seed_annihilation_max", annihilation, scn.tolerance("annihilation", 1e-10));
  out.add("transformed_potential dz_defect", dz_defect, scn.tolerance("potential", 1e-6));
  out.add("transformed_potential Re", drift, 1e-9);
  compare_expected(scn, out, "u_tilde_expected", m.u_tilde, FieldRole::coefficient);
  compare_expected(scn, out, "psi_tilde_expected", psi_t, FieldRole::solution);
  compare_expected(scn, out, "psi_plus_tilde_expected", psi_plus_t, FieldRole::conjugate_solution);
  out.grids.emplace_back("u_tilde", m.u_tilde);
  out.grids.emplace_back("psi_tilde", psi_t);
  out.grids.emplace_back("psi_plus_tilde", psi_plus_t);
  out.grids.emplace_back("omega_tilde", w_t.values());
  return out;
}

// ----------------------------------------------------------------- compose

PipelineOutcome run_compose(const Scenario& scn) {
  PipelineOutcome out;
  const Field u = sample_field(scn, "u", FieldRole::coefficient);
  const SeedPair s1{sample_field(scn, "f1", FieldRole::solution),
                    sample_field(scn, "f1_plus", FieldRole::conjugate_solution)};
  const SeedPair s2{sample_field(scn, "f2", FieldRole::solution),
                    sample_field(scn, "f2_plus", FieldRole::conjugate_solution)};
  const Field psi = sample_field(scn, "psi", FieldRole::solution);
  const Field psi_plus = sample_field(scn, "psi_plus", FieldRole::conjugate_solution);
  const NodeIndex bp = basepoint(scn);

  const ComposeConstants cc{scn.constant("f1_f1p"), scn.constant("f2_f1p"), scn.constant("f1_f2p"),
                            scn.constant("f2_f2p"), scn.constant("second_stage")};
  const SeedSet set = make_seed_set(u, {s1, s2}, bp, {{cc.f1_f1p, cc.f2_f1p}, {cc.f1_f2p, cc.f2_f2p}});
  const TransformResult rank2 = moutard_rank_n(set);
  const TransformResult two_step = compose_simple(u, s1, s2, bp, cc);

  const std::vector<Potential> w_psi{omega(psi, s1.f_plus, bp, scn.constant("psi_f1p")),
                                     omega(psi, s2.f_plus, bp, scn.constant("psi_f2p"))};
  const std::vector<Potential> w_psi_plus{omega(s1.f, psi_plus, bp, scn.constant("f1_psip")),
                                          omega(s2.f, psi_plus, bp, scn.constant("f2_psip"))};
  const Field psi_rank2 = rank2.map_psi(psi, w_psi);
  const Field psi_two = two_step.map_psi(psi, w_psi);
  const Field psi_plus_rank2 = rank2.map_psi_plus(psi_plus, w_psi_plus);
  const Field psi_plus_two = two_step.map_psi_plus(psi_plus, w_psi_plus);

  const double du = max_rel_diff(two_step.u_tilde, rank2.u_tilde);
  const double dpsi = max_rel_diff(psi_two, psi_rank2);
  const double dpsi_plus = max_rel_diff(psi_plus_two, psi_plus_rank2);
  out.results["basepoint"] = node_json(scn.grid, bp);
  out.results["det_omega_min"] = rank2.det_omega_min;
  out.results["det_tol"] = rank2.det_tol;
  out.results["u_deviation"] = du;
  out.results["psi_deviation"] = dpsi;
  out.results["psi_plus_deviation"] = dpsi_plus;
  out.results["residual_after"] = pair_residual(rank2.u_tilde, psi_rank2, psi_plus_rank2);
  const double tol = scn.tolerance("deviation", 1e-8);
  out.add("u_deviation", du, tol);
  out.add("psi_deviation", dpsi, tol);
  out.add("psi_plus_deviation", dpsi_plus, tol);
  compare_expected(scn, out, "u_tilde_expected", rank2.u_tilde, FieldRole::coefficient);
  out.grids.emplace_back("u_tilde", rank2.u_tilde);
  out.grids.emplace_back("psi_tilde", psi_rank2);
  return out;
}

// ------------------------------------------------------------------ invert

PipelineOutcome run_invert(const Scenario& scn) {
  PipelineOutcome out;
  const SimpleData d = simple_data(scn);
  const TransformResult m1 = moutard_simple(d.u, d.f, d.f_plus, d.w_ff, d.bp);
  const Field psi_t = m1.map_psi(d.psi, std::span<const Potential>(&d.w_pf, 1));
  const Field psi_plus_t = m1.map_psi_plus(d.psi_plus, std::span<const Potential>(&d.w_fp, 1));
  const TransformResult m2 = invert_simple(m1, d.f, d.f_plus, d.w_ff);
  const Field psi_back = m2.map_psi(psi_t, std::span<const Potential>(&d.w_pf, 1));
  const Field psi_plus_back = m2.map_psi_plus(psi_plus_t, std::span<const Potential>(&d.w_fp, 1));

  const double du = max_rel_diff(m2.u_tilde, d.u);
  const double dpsi = max_rel_diff(psi_back, d.psi);
  const double dpsi_plus = max_rel_diff(psi_plus_back, d.psi_plus);
  out.results["basepoint"] = node_json(scn.grid, d.bp);
  out.results["u_roundtrip_deviation"] = du;
  out.results["psi_roundtrip_deviation"] = dpsi;
  out.results["psi_plus_roundtrip_deviation"] = dpsi_plus;
  out.results["max_roundtrip_deviation"] = std::max({du, dpsi, dpsi_plus});
  const double tol = scn.tolerance("roundtrip", 1e-10);
  out.add("u_roundtrip_deviation", du, tol);
  out.add("psi_roundtrip_deviation", dpsi, tol);
  out.add("psi_plus_roundtrip_deviation", dpsi_plus, tol);
  compare_expected(scn, out, "u_tilde_expected", m1.u_tilde, FieldRole::coefficient);
  compare_expected(scn, out, "psi_tilde_expected", psi_t, FieldRole::solution);
  compare_expected(scn, out, "psi_plus_tilde_expected", psi_plus_t, FieldRole::conjugate_solution);
  out.grids.emplace_back("psi_tilde", psi_t);
  out.grids.emplace_back("psi_roundtrip", psi_back);
  return out;
}

// --------------------------------------------------------------- conformal

ComplexFn closure(const Expression& e) {
  return [e](cplx z) { return e(z); };
}

HolomorphicChart chart_from_scenario(const Scenario& scn) {
  const std::string src = scn.source.string();
  const auto& c = scn.chart;
  auto it = c.find("kind");
  if (it == c.end()) throw ConfigError(src + ": [chart] kind: missing");
  const std::string& kind = it->second;
  if (kind == "identity") return HolomorphicChart::identity(scn.grid);
  if (kind == "scaling") {
    const double a = number_option(scn, c, "chart", "a", 1.0);
    if (!(a > 0.0)) throw ConfigError(src + ": [chart] a: scaling factor must be positive");
    return HolomorphicChart::scaling(a, scn.grid);
  }
  if (kind == "rotation") return HolomorphicChart::rotation(number_option(scn, c, "chart", "theta", 0.0), scn.grid);
  if (kind == "exponential") return HolomorphicChart::exponential(scn.grid);
  if (kind == "expression") {
    auto expr = [&](const char* key, bool required) -> std::optional<Expression> {
      auto k = c.find(key);
      if (k == c.end()) {
        if (required) throw ConfigError(src + ": [chart] " + key + ": missing");
        return std::nullopt;
      }
      try {
        return parse_expression(k->second);
      } catch (const ParseError& e) {
        throw ConfigError(src + ": [chart] " + key + ": " + e.what());
      }
    };
    const Expression fwd = *expr("forward", true);
    const Expression der = *expr("derivative", true);
    std::optional<ComplexFn> inv;
    if (auto e = expr("inverse", false)) inv = closure(*e);
    return HolomorphicChart::from_closures(c.count("name") ? c.at("name") : fwd.source(), closure(fwd), closure(der),
                                           inv, scn.grid);
  }
  throw ConfigError(src + ": [chart] kind: unknown chart '" + kind + "'");
}

PipelineOutcome run_conformal(const Scenario& scn) {
  PipelineOutcome out;
  const HolomorphicChart chart = chart_from_scenario(scn);
  validate_chart(chart);
  CommutativityProbe probe;
  probe.u = closure(scn.field("u"));
  probe.f = closure(scn.field("f1"));
  probe.f_plus = closure(scn.field("f1_plus"));
  probe.psi = closure(scn.field("psi"));
  probe.omega_ff_constant = scn.constant("f1_f1p");
  probe.omega_psi_constant = scn.constant("psi_f1p");
  const CommutativityReport rep = check_commutativity(probe, chart);
  out.results["chart"] = chart.name;
  out.results["domain_grid"] = grid_json(rep.domain);
  out.results["u_deviation"] = rep.u_deviation;
  out.results["psi_deviation"] = rep.psi_deviation;
  out.results["potential_derivative_defect"] = rep.potential_derivative_defect;
  out.results["deviation"] = rep.deviation();
  const double tol = scn.tolerance("deviation", 1e-6);
  out.add("u_deviation", rep.u_deviation, tol);
  out.add("psi_deviation", rep.psi_deviation, tol);
  out.add("potential_derivative_defect", rep.potential_derivative_defect, scn.tolerance("potential", 1e-6));
  out.grids.emplace_back("u_star", pushforward_u(probe.u, chart));
  out.grids.emplace_back("psi_star", pushforward_psi(probe.psi, chart));
  return out;
}

// ------------------------------------------------------------------ series

Json function_json(const FunctionOnInterval& f) {
  Json out = Json::object();
  out["mode"] = f.mode() == FunctionOnInterval::Mode::polynomial ? "polynomial" : "sampled";
  Json re = Json::array();
  Json im = Json::array();
  for (cplx c : f.coefficients()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  out[f.mode() == FunctionOnInterval::Mode::polynomial ? "coefficients_re" : "samples_re"] = re;
  out[f.mode() == FunctionOnInterval::Mode::polynomial ? "coefficients_im" : "samples_im"] = im;
  return out;
}

Json check_json(const CheckResult& c) {
  Json out = Json::object();
  out["passed"] = c.passed;
  out["condition"] = c.condition;
  out["worst_y"] = c.worst_y;
  out["worst_value"] = c.worst_value;
  return out;
}

Json series_json(const CoefficientSeries& s) {
  Json out = Json::object();
  out["K"] = s.K();
  out["mode"] = s.sampled() ? "sampled" : "polynomial";
  out["phi"] = function_json(s.phi);
  Json beta = Json::array();
  for (int j = -s.n_prime; j <= s.K(); ++j) {
    Json b = function_json(s.beta_at(j));
    b["order"] = j;
    beta.push_back(b);
  }
  out["beta"] = beta;
  return out;
}

PoleProfile scenario_profile(const Scenario& scn) {
  PoleProfile p = profile_from_scenario(scn);
  if (scn.profile.count("normalize") && truthy(scn.profile.at("normalize"), scn.source.string() + ": [profile] normalize")) {
    p = normalize_profile(p);
  }
  return p;
}

int series_order(const Scenario& scn) {
  const int K = int_option(scn, scn.profile, "profile", "K", 8);
  if (K < 1 || K > 16) throw ConfigError(scn.source.string() + ": [profile] K must lie in 1 ... 16");
  return K;
}

void expect_outcome(const Scenario& scn, PipelineOutcome& out, const std::string& key, const CheckResult& c) {
  const std::string want = scn.expectation(key).value_or("pass");
  if (want != "pass" && want != "fail") throw ConfigError(scn.source.string() + ": [expect] " + key + ": pass or fail");
  out.add(key + " " + want, c.passed == (want == "pass") ? 1.0 : 0.0, 1.0, "==");
  if (want == "fail") {
    if (auto cond = scn.expectation(key + "_condition")) {
      out.add(key + " condition is '" + *cond + "'", c.condition.find(*cond) != std::string::npos ? 1.0 : 0.0, 1.0,
              "==");
    }
    if (scn.expectation(key + "_worst_y")) {
      const double y = number_option(scn, scn.expect, "expect", key + "_worst_y", 0.0);
      const double cell = (scn.grid.y_max > scn.grid.y_min ? scn.grid.y_max - scn.grid.y_min : 1.0) / (kCheckNodes - 1);
      out.add(key + " worst_y", std::abs(c.worst_y - y), scn.tolerance("worst_y", cell));
    }
  }
}

PipelineOutcome run_series(const Scenario& scn) {
  PipelineOutcome out;
  const PoleProfile p = scenario_profile(scn);
  const int n_prime = int_option(scn, scn.profile, "profile", "n_prime", 1);
  const CheckResult residue = lemma1_check(p, n_prime);
  out.results["profile_mode"] = p.sampled() ? "sampled" : "polynomial";
  out.results["existence"] = check_json(residue);
  expect_outcome(scn, out, "existence", residue);
  if (!residue) return out;

  const CheckResult cert = meromorphic_certify(p);
  out.results["certificate"] = check_json(cert);
  out.results["conjugate_certificate"] = check_json(meromorphic_certify(conjugate_profile(p)));
  expect_outcome(scn, out, "certified", cert);
  if (!cert || !scn.profile.count("beta_minus1")) return out;

  const int K = series_order(scn);
  const FunctionOnInterval bm1 = profile_function(scn, "beta_minus1", "1");
  const FunctionOnInterval im1 = profile_function(scn, "im_beta1", "0");
  const CoefficientSeries s = solve_recursion(p, bm1, im1, K);
  const std::vector<double> defects = series_residual(p, s, K);
  double worst = 0.0;
  for (double v : defects) worst = std::max(worst, v);
  out.results["series"] = series_json(s);
  out.results["series_residual"] = vector_json(defects);
  out.add("series_residual", worst, scn.tolerance("series_residual", s.sampled() ? 1e-6 : 1e-12));

  for (int j = 0; j <= K; ++j) {
    const std::string key = "beta" + std::to_string(j);
    auto want = scn.expectation(key);
    if (!want) continue;
    Expression e;
    try {
      e = parse_expression(*want);
    } catch (const ParseError& err) {
      throw ConfigError(scn.source.string() + ": [expect] " + key + ": " + err.what());
    }
    const FunctionOnInterval target = function_of_y(e, p.a(), p.b(), s.sampled() ? "sampled" : "auto");
    const double d = sup_on_nodes(s.beta_at(j) - target);
    out.add(key + " = " + *want, d, scn.tolerance("beta", s.sampled() ? 1e-6 : 1e-12));
  }
  if (expect_flag(scn, "beta_vanish")) {
    double m = 0.0;
    for (int j = 0; j <= K; ++j) m = std::max(m, sup_on_nodes(s.beta_at(j)));
    out.results["max_beta_nonnegative_orders"] = m;
    out.add("beta_j = 0 for j >= 0", m, scn.tolerance("beta", 1e-14));
  }
  return out;
}

// ------------------------------------------------------------- remove-pole

PipelineOutcome run_remove_pole(const Scenario& scn) {
  PipelineOutcome out;
  const PoleProfile p = scenario_profile(scn);
  const int K = series_order(scn);
  const SingularCoefficient u = synthesize_singular_u(p, scn.grid);
  const auto im1 = profile_function(scn, "im_beta1", "0");
  const auto im1_plus = profile_function(scn, "im_beta1_plus", "0");
  SingularSeeds seeds = synthesize_seeds(p, profile_function(scn, "beta_minus1", "1"),
                                         profile_function(scn, "beta_plus_minus1", "1"), K, scn.grid, im1, im1_plus);
  if (scn.option("beta0_shift")) {
    const std::string where = scn.source.string() + ": [options] beta0_shift";
    Expression e;
    try {
      e = parse_expression(*scn.option("beta0_shift"));
    } catch (const ParseError& err) {
      throw ConfigError(where + ": " + err.what());
    }
    if (!e.is_constant()) throw ConfigError(where + ": must be a constant");
    const cplx shift = e(0.0, 0.0);
    seeds.series.beta[seeds.series.n_prime] += shift;
    seeds.f = model_from_series(seeds.series, scn.grid);
    out.results["beta0_shift"] = complex_json(shift);
  }

  RemovePoleOptions opt;
  if (scn.option("epsilon")) opt.epsilon = number_option(scn, scn.options, "options", "epsilon", 0.0);
  opt.rel_tol = scn.tolerance("cancel_rel", opt.rel_tol);
  opt.abs_tol = scn.tolerance("cancel_abs", opt.abs_tol);
  opt.sup_growth = scn.tolerance("sup_growth", opt.sup_growth);
  const RemovePoleReport rep = remove_pole(u, seeds.f, seeds.f_plus, scn.constant("omega"), opt);

  out.results["K"] = K;
  out.results["beta0_deviation"] = seeds.beta0_deviation;
  out.results["delta_ladder"] = vector_json(rep.delta_ladder);
  out.results["sup_u_tilde"] = vector_json(rep.sup_u_tilde);
  out.results["fitted_c_minus1"] = vector_json(rep.c_minus1);
  out.results["fitted_c_minus2"] = vector_json(rep.c_minus2);
  out.results["fitted_c0_min"] = vector_json(rep.c0_min);
  out.results["cancellation_ratio"] = vector_json(rep.cancellation_ratio);
  out.results["max_abs_u_tilde"] = rep.max_abs_u_tilde;
  out.results["bounded"] = rep.bounded;
  out.results["cancelled"] = rep.cancelled;
  out.results["omega_path_defect"] = rep.omega.path_defect();
  out.results["ladder_verdict"] = rep.verdict;

  double worst_ratio = 0.0;
  for (double r : rep.cancellation_ratio) worst_ratio = std::max(worst_ratio, r);
  if (expect_flag(scn, "detected")) {
    out.add("sabotage detected", rep.passed() ? 0.0 : 1.0, 1.0, "==");
    if (!rep.passed()) out.verdict = "sabotage detected: " + rep.verdict;
  } else {
    out.add("bounded on the delta ladder", rep.bounded ? 1.0 : 0.0, 1.0, "==");
    out.add("cancellation ratio", worst_ratio, 1.0);
    if (expect_flag(scn, "zero")) {
      const double tol = scn.tolerance("zero", 1e-10);
      out.add("max |u_tilde|", rep.max_abs_u_tilde, tol);
      if (out.passed()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "u_tilde ≡ 0 within %g", tol);
        out.verdict = buf;
      }
    } else if (rep.passed()) {
      out.verdict = rep.verdict;
    }
  }
  out.grids.emplace_back("u_tilde", rep.u_tilde);
  out.grids.emplace_back("omega", rep.omega.values());
  return out;
}

std::string primary_tolerance(Pipeline p) {
  switch (p) {
    case Pipeline::residual: return "residual";
    case Pipeline::potential: return "potential";
    case Pipeline::transform: return "residual";
    case Pipeline::compose: return "deviation";
    case Pipeline::invert: return "roundtrip";
    case Pipeline::conformal: return "deviation";
    case Pipeline::series: return "series_residual";
    case Pipeline::remove_pole: return "cancel_rel";
  }
  return "residual";
}

}  // namespace

bool PipelineOutcome::passed() const {
  for (const Check& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void PipelineOutcome::add(std::string name, double value, double tol, const std::string& relation) {
  Check c{std::move(name), value, tol, relation, false};
  if (relation == "<=") c.passed = value <= tol;
  else if (relation == ">=") c.passed = value >= tol;
  else c.passed = value == tol;
  checks.push_back(std::move(c));
}

Scenario apply_overrides(Scenario scn, const Overrides& ov) {
  if (ov.grid) {
    scn.grid = scn.grid.with_resolution(ov.grid->first, ov.grid->second);
    try {
      scn.grid.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("--grid: ") + e.what());
    }
  }
  if (ov.tol) {
    if (!(*ov.tol > 0.0)) throw ConfigError("--tol must be positive");
    scn.tolerances[primary_tolerance(scn.pipeline)] = *ov.tol;
  }
  if (ov.order) {
    if (*ov.order < 1 || *ov.order > 16) throw ConfigError("--order must lie in 1 ... 16");
    scn.profile["K"] = std::to_string(*ov.order);
  }
  return scn;
}

PipelineOutcome run_pipeline(const Scenario& scn) {
  switch (scn.pipeline) {
    case Pipeline::residual: return run_residual(scn);
    case Pipeline::potential: return run_potential(scn);
    case Pipeline::transform: return run_transform(scn);
    case Pipeline::compose: return run_compose(scn);
    case Pipeline::invert: return run_invert(scn);
    case Pipeline::conformal: return run_conformal(scn);
    case Pipeline::series: return run_series(scn);
    case Pipeline::remove_pole: return run_remove_pole(scn);
  }
  throw ConfigError("unknown pipeline");
}

std::string error_name(const std::exception& e) {
#define GALAB_NAME(T) \
  if (dynamic_cast<const T*>(&e)) return #T
  GALAB_NAME(ConfigError);
  GALAB_NAME(ParseError);
  GALAB_NAME(InvalidArgument);
  GALAB_NAME(StencilError);
  GALAB_NAME(ShapeError);
  GALAB_NAME(ExactnessError);
  GALAB_NAME(PositivityError);
  GALAB_NAME(ZeroPotentialError);
  GALAB_NAME(SingularOmegaError);
  GALAB_NAME(DegenerateChartError);
  GALAB_NAME(BranchError);
  GALAB_NAME(NormalizationError);
  GALAB_NAME(MeromorphicViolation);
  GALAB_NAME(FitError);
  GALAB_NAME(DegreeError);
  GALAB_NAME(EvalError);
  GALAB_NAME(Error);
#undef GALAB_NAME
  return "std::exception";
}

Json report_json(const Scenario& scn, const PipelineOutcome& outcome, const std::string& status,
                 const std::string& verdict) {
  Json r = Json::object();
  r["schema"] = 1;
  r["scenario"] = scn.name;
  r["pipeline"] = to_string(scn.pipeline);
  r["covers"] = scn.covers;
  r["description"] = scn.description;
  r["grid"] = grid_json(scn.grid);
  r["results"] = outcome.results;
  Json checks = Json::array();
  for (const Check& c : outcome.checks) {
    Json j = Json::object();
    j["name"] = c.name;
    j["value"] = c.value;
    j["relation"] = c.relation;
    j["tol"] = c.tol;
    j["passed"] = c.passed;
    checks.push_back(j);
  }
  r["checks"] = checks;
  r["status"] = status;
  r["verdict"] = verdict;
  return r;
}

RunResult run_scenario(const Scenario& scn, const std::filesystem::path& out_dir) {
  PipelineOutcome outcome;
  std::string status;
  std::string verdict;
  const auto expected_error = scn.expectation("error");
  try {
    outcome = run_pipeline(scn);
    if (expected_error) {
      outcome.add("raises " + *expected_error, 0.0, 1.0, "==");
      verdict = "expected " + *expected_error + " was not raised";
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    const std::string name = error_name(e);
    outcome.results["error"] = Json::object({{"type", name}, {"message", e.what()}});
    if (expected_error && *expected_error == name) {
      outcome.add("raises " + name, 1.0, 1.0, "==");
      verdict = "raised " + name + ": " + e.what();
    } else {
      status = "error";
      verdict = "scenario " + scn.name + ": " + name + ": " + e.what();
    }
  }
  if (status.empty()) status = outcome.passed() ? "pass" : "fail";
  if (verdict.empty()) {
    if (!outcome.verdict.empty()) {
      verdict = outcome.verdict;
    } else if (status == "pass") {
      verdict = "all " + std::to_string(outcome.checks.size()) + " checks passed";
    } else {
      for (const Check& c : outcome.checks) {
        if (c.passed) continue;
        if (!verdict.empty()) verdict += "; ";
        verdict += c.name + " = " + fmt(c.value) + " violates " + c.relation + " " + fmt(c.tol);
      }
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());
  RunResult rr;
  rr.status = status;
  rr.verdict = verdict;
  rr.exit_code = status == "pass" ? 0 : 2;
  rr.report = out_dir / (scn.name + ".report.json");
  {
    std::ofstream f(rr.report, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + rr.report.string());
    f << dump_json(report_json(scn, outcome, status, verdict));
  }
  for (const auto& [key, field] : outcome.grids) {
    std::ofstream f(out_dir / (scn.name + "." + key + ".csv"), std::ios::binary);
    if (!f) throw ConfigError("cannot write CSV for " + key);
    write_csv(f, field);
  }
  return rr;
}

}  // namespace galab::cli
