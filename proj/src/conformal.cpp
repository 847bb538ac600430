#include "galab/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "galab/error.hpp"
#include "galab/moutard.hpp"
#include "galab/potential.hpp"

namespace galab {

namespace {

constexpr double kMinDerivative = 1e-12;
constexpr double kRoundTripTol = 1e-10;
constexpr int kMaxDomainNodes = 1024;

NodeIndex centre(const GridSpec& g) { return {(g.nx - 1) / 2, (g.ny - 1) / 2}; }

template <class Fn>
Field on_strip(const HolomorphicChart& chart, Fn fn, FieldRole role) {
  Field out(chart.strip, role);
  for_each_active(chart.strip, [&](int i, int j) { out(i, j) = fn(chart.strip.z(i, j), i, j); });
  return out;
}

std::string where(cplx t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "tau = %.6g%+.6gi", t.real(), t.imag());
  return buf;
}

}  // namespace

HolomorphicChart HolomorphicChart::identity(const GridSpec& strip) {
  HolomorphicChart c{"identity", [](cplx t) { return t; }, [](cplx) { return cplx(1.0); },
                     ComplexFn([](cplx z) { return z; }), strip, true};
  return c;
}

HolomorphicChart HolomorphicChart::scaling(double a, const GridSpec& strip) {
  if (!(a > 0.0)) throw InvalidArgument("scaling chart needs a positive factor");
  return {"scaling", [a](cplx t) { return a * t; }, [a](cplx) { return cplx(a); },
          ComplexFn([a](cplx z) { return z / a; }), strip, true};
}

HolomorphicChart HolomorphicChart::rotation(double theta, const GridSpec& strip) {
  const cplx e = std::polar(1.0, theta);
  return {"rotation", [e](cplx t) { return e * t; }, [e](cplx) { return e; },
          ComplexFn([e](cplx z) { return z / e; }), strip, false};
}

HolomorphicChart HolomorphicChart::exponential(const GridSpec& strip) {
  return {"exponential", [](cplx t) { return std::exp(t); }, [](cplx t) { return std::exp(t); }, std::nullopt,
          strip, false};
}

HolomorphicChart HolomorphicChart::from_closures(std::string name, ComplexFn forward, ComplexFn derivative,
                                                 std::optional<ComplexFn> inverse, const GridSpec& strip) {
  return {std::move(name), std::move(forward), std::move(derivative), std::move(inverse), strip, false};
}

cplx HolomorphicChart::invert(cplx z) const {
  if (inverse) return (*inverse)(z);
  const NodeIndex c = centre(strip);
  cplx t = strip.z(c.i, c.j);
  for (int it = 0; it < 100; ++it) {
    const cplx d = derivative(t);
    if (std::abs(d) < kMinDerivative) break;
    const cplx step = (forward(t) - z) / d;
    t -= step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(t))) break;
  }
  return t;
}

void validate_chart(const HolomorphicChart& chart) {
  const GridSpec& g = chart.strip;
  g.validate();
  const double h = 1e-5 * std::max(g.hx(), g.hy());
  for_each_active(g, [&](int i, int j) {
    const cplx t = g.z(i, j);
    const cplx d = chart.derivative(t);
    if (!(std::abs(d) >= kMinDerivative)) throw DegenerateChartError("chart derivative vanishes at " + where(t));
    const cplx fd = (chart.forward(t + h) - chart.forward(t - h)) / (2.0 * h);
    if (std::abs(fd - d) > 1e-5 * std::max(1.0, std::abs(d))) {
      throw DegenerateChartError("supplied derivative disagrees with the chart map at " + where(t));
    }
    const cplx back = chart.invert(chart.forward(t));
    if (!(std::abs(back - t) <= kRoundTripTol * std::max(1.0, std::abs(t)))) {
      throw DegenerateChartError("chart does not invert at " + where(t) +
                                 "; the strip nodes are not mapped one to one");
    }
  });
}

GridSpec domain_grid(const HolomorphicChart& chart) {
  const GridSpec& s = chart.strip;
  if (chart.maps_nodes_to_grid) {
    const cplx lo = chart.forward({s.x_min, s.y_min});
    const cplx hi = chart.forward({s.x_max, s.y_max});
    GridSpec g{lo.real(), hi.real(), lo.imag(), hi.imag(), s.nx, s.ny, std::nullopt};
    if (s.excluded_band) g.excluded_band = std::abs(chart.derivative(0.0)) * *s.excluded_band;
    return g;
  }
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY, dmin = INFINITY;
  for_each_active(s, [&](int i, int j) {
    const cplx z = chart.forward(s.z(i, j));
    x0 = std::min(x0, z.real());
    x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag());
    y1 = std::max(y1, z.imag());
    dmin = std::min(dmin, std::abs(chart.derivative(s.z(i, j))));
  });
  const double h = std::min(s.hx(), s.hy()) * dmin;
  auto count = [&](double w) { return std::clamp(static_cast<int>(std::ceil(w / h)) + 1, 8, kMaxDomainNodes); };
  return {x0, x1, y0, y1, count(x1 - x0), count(y1 - y0), std::nullopt};
}

Field sqrt_derivative(const HolomorphicChart& chart, SqrtBranch branch) {
  const GridSpec& g = chart.strip;
  Field d = on_strip(chart, [&](cplx t, int, int) { return chart.derivative(t); }, FieldRole::generic);
  Field w(g);
  auto step = [&](int i, int j, int pi, int pj) {
    const cplx prev = d(pi, pj);
    const cplx cur = d(i, j);
    if (std::abs(std::arg(cur / prev)) > std::numbers::pi / 2) {
      throw BranchError("argument of dz/dtau jumps by more than pi/2 near " + where(g.z(i, j)));
    }
    cplx r = std::sqrt(cur);
    if (std::real(r * std::conj(w(pi, pj))) < 0.0) r = -r;
    w(i, j) = r;
  };
  const NodeIndex c = centre(g);
  if (g.excluded(c.i)) throw BranchError("strip centre lies in the excluded band");
  w(c.i, c.j) = std::sqrt(d(c.i, c.j));
  // Centre row outwards within the active segment, then every column.
  std::vector<bool> row_done(g.nx, false);
  row_done[c.i] = true;
  for (int i = c.i + 1; i < g.nx && !g.excluded(i); ++i) {
    step(i, c.j, i - 1, c.j);
    row_done[i] = true;
  }
  for (int i = c.i - 1; i >= 0 && !g.excluded(i); --i) {
    step(i, c.j, i + 1, c.j);
    row_done[i] = true;
  }
  for (int i = 0; i < g.nx; ++i) {
    if (g.excluded(i)) continue;
    if (!row_done[i]) {
      throw BranchError("excluded band splits the strip; the square-root branch cannot be continued");
    }
    for (int j = c.j + 1; j < g.ny; ++j) step(i, j, i, j - 1);
    for (int j = c.j - 1; j >= 0; --j) step(i, j, i, j + 1);
  }
  if (branch == SqrtBranch::negated) w *= -1.0;
  return w;
}

Field pushforward_u(const ComplexFn& u, const HolomorphicChart& chart) {
  validate_chart(chart);
  return on_strip(chart, [&](cplx t, int, int) { return u(chart.forward(t)) * std::abs(chart.derivative(t)); },
                  FieldRole::coefficient);
}

Field pushforward_u(const Field& u_on_domain, const HolomorphicChart& chart) {
  validate_chart(chart);
  return on_strip(
      chart, [&](cplx t, int, int) { return interpolate(u_on_domain, chart.forward(t)) * std::abs(chart.derivative(t)); },
      FieldRole::coefficient);
}

Field pushforward_psi(const ComplexFn& psi, const HolomorphicChart& chart, SqrtBranch branch) {
  validate_chart(chart);
  const Field w = sqrt_derivative(chart, branch);
  return on_strip(chart, [&](cplx t, int i, int j) { return psi(chart.forward(t)) * w(i, j); }, FieldRole::solution);
}

Field pushforward_psi(const Field& psi_on_domain, const HolomorphicChart& chart, SqrtBranch branch) {
  validate_chart(chart);
  const Field w = sqrt_derivative(chart, branch);
  return on_strip(
      chart, [&](cplx t, int i, int j) { return interpolate(psi_on_domain, chart.forward(t)) * w(i, j); },
      FieldRole::solution);
}

Field pullback_scalar(const Field& on_domain, const HolomorphicChart& chart) {
  return on_strip(chart, [&](cplx t, int, int) { return interpolate(on_domain, chart.forward(t)); },
                  FieldRole::generic);
}

CommutativityReport check_commutativity(const CommutativityProbe& p, const HolomorphicChart& chart) {
  validate_chart(chart);
  CommutativityReport rep;
  rep.domain = domain_grid(chart);
  const GridSpec& gd = rep.domain;
  const NodeIndex cd = centre(gd);

  // z-side transform.
  auto sample = [&](const ComplexFn& fn, FieldRole role) {
    return Field::sample(gd, [&](double x, double y) { return fn({x, y}); }, role);
  };
  const Field u = sample(p.u, FieldRole::coefficient);
  const Field f = sample(p.f, FieldRole::solution);
  const Field fp = sample(p.f_plus, FieldRole::conjugate_solution);
  const Field psi = sample(p.psi, FieldRole::solution);
  const Potential w_ff = omega(f, fp, cd, p.omega_ff_constant);
  const Potential w_pf = omega(psi, fp, cd, p.omega_psi_constant);
  const TransformResult on_d = moutard_simple(u, f, fp, w_ff, cd);
  const Field psi_t = on_d.map_psi(psi, std::span(&w_pf, 1));
  const Field u_pushed = pushforward_u(on_d.u_tilde, chart);
  const Field psi_pushed = pushforward_psi(psi_t, chart);

  // tau-side transform of the pushed-forward data.
  const GridSpec& gs = chart.strip;
  const NodeIndex cs = centre(gs);
  const cplx zc = chart.forward(gs.z(cs.i, cs.j));
  auto imag_only = [](cplx v) { return cplx(0.0, v.imag()); };
  const Field us = pushforward_u(p.u, chart);
  const Field fs = pushforward_psi(p.f, chart);
  const Field fps = pushforward_psi(p.f_plus, chart);
  const Field psis = pushforward_psi(p.psi, chart);
  const Potential ws_ff = omega(fs, fps, cs, imag_only(interpolate(w_ff.values(), zc)));
  const Potential ws_pf = omega(psis, fps, cs, imag_only(interpolate(w_pf.values(), zc)));
  const TransformResult on_strip_side = moutard_simple(us, fs, fps, ws_ff, cs);
  const Field psis_t = on_strip_side.map_psi(psis, std::span(&ws_pf, 1));

  rep.u_deviation = max_abs_diff(u_pushed, on_strip_side.u_tilde);
  rep.psi_deviation = max_abs_diff(psi_pushed, psis_t);
  rep.potential_derivative_defect = max_abs_diff(dz(ws_ff.values()), fs * fps);
  return rep;
}

}  // namespace galab
