#include "galab/singularity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "galab/error.hpp"

namespace galab {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kMinFitSamples = 6;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void require_rows_inside(const GridSpec& grid, double a, double b) {
  const double slack = 1e-12 * std::max(1.0, std::abs(b - a));
  if (grid.y_min < a - slack || grid.y_max > b + slack) {
    throw InvalidArgument("grid rows [" + fmt(grid.y_min) + ", " + fmt(grid.y_max) +
                          "] leave the profile interval [" + fmt(a) + ", " + fmt(b) + "]");
  }
}

void require_certified(const PoleProfile& profile) {
  const CheckResult c = meromorphic_certify(profile);
  if (!c) {
    throw MeromorphicViolation("profile is not in the meromorphic class: " + c.condition + " (worst y = " +
                               fmt(c.worst_y) + ", deviation " + fmt(c.worst_value) + ")");
  }
}

void require_positive(const FunctionOnInterval& f, const char* name) {
  for (double y : f.nodes(kCheckNodes)) {
    const cplx v = f(y);
    if (!(v.real() > 0.0) || std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v))) {
      throw PositivityError(std::string(name) + " must be real and positive; value " + fmt(v.real()) +
                            (v.imag() != 0.0 ? " + " + fmt(v.imag()) + "i" : std::string()) + " at y = " + fmt(y));
    }
  }
}

}  // namespace

SingularCoefficient synthesize_singular_u(const PoleProfile& profile, const GridSpec& grid) {
  require_certified(profile);
  grid.validate();
  require_rows_inside(grid, profile.a(), profile.b());
  const PoleProfile p = profile;
  auto phase = [p](double y) { return std::exp(2.0 * kI * p.phi(y).real()); };
  Field remainder(grid);
  Field u(grid, FieldRole::coefficient);
  for_each_active(grid, [&](int i, int j) {
    const double x = grid.x(i);
    const double y = grid.y(j);
    cplx acc{};
    for (int k = p.max_order(); k >= 0; --k) acc = acc * x + p.r_at(k)(y);
    remainder(i, j) = phase(y) * acc;
    u(i, j) = phase(y) * (p.r_at(-1)(y) / x + acc);
  });
  return {std::move(u), SingularFieldModel{phase, profile.r_at(-1), std::move(remainder)}};
}

SingularFieldModel model_from_series(const CoefficientSeries& series, const GridSpec& grid) {
  if (series.n_prime != 1) throw InvalidArgument("field models need a simple pole");
  grid.validate();
  require_rows_inside(grid, series.phi.a(), series.phi.b());
  const FunctionOnInterval phi = series.phi;
  auto phase = [phi](double y) { return std::exp(kI * phi(y).real()); };
  Field remainder(grid, FieldRole::solution);
  for_each_active(grid, [&](int i, int j) {
    const double x = grid.x(i);
    const double y = grid.y(j);
    cplx acc{};
    for (int k = series.K(); k >= 0; --k) acc = acc * x + series.beta_at(k)(y);
    remainder(i, j) = phase(y) * acc;
  });
  return {phase, series.beta_at(-1), std::move(remainder)};
}

SingularSeeds synthesize_seeds(const PoleProfile& profile, const FunctionOnInterval& beta_minus1,
                               const FunctionOnInterval& beta_plus_minus1, int K, const GridSpec& grid,
                               const std::optional<FunctionOnInterval>& im_beta1,
                               const std::optional<FunctionOnInterval>& im_beta1_plus) {
  require_positive(beta_minus1, "beta_{-1}");
  require_positive(beta_plus_minus1, "beta+_{-1}");
  require_certified(profile);
  const FunctionOnInterval zero = FunctionOnInterval::constant(profile.a(), profile.b(), 0.0);

  SingularSeeds out;
  out.series = solve_recursion(profile, beta_minus1, im_beta1.value_or(zero), K);
  out.series_plus = solve_recursion(conjugate_profile(profile), beta_plus_minus1, im_beta1_plus.value_or(zero), K);

  const FunctionOnInterval dphi = profile.phi.derivative();
  const FunctionOnInterval r0 = profile.r_at(0);
  const FunctionOnInterval expect0 = kI * beta_minus1.derivative() + (dphi - 2.0 * r0) * beta_minus1;
  const FunctionOnInterval expect0_plus =
      kI * beta_plus_minus1.derivative() + (2.0 * r0 - dphi) * beta_plus_minus1;
  out.beta0_deviation = std::max(sup_on_nodes(out.series.beta_at(0) - expect0),
                                 sup_on_nodes(out.series_plus.beta_at(0) - expect0_plus));
  const bool sampled = profile.sampled() || out.series.sampled() || out.series_plus.sampled();
  if (out.beta0_deviation > (sampled ? 1e-6 : 1e-10)) {
    throw Error("order-zero seed coefficients disagree with their closed forms by " + fmt(out.beta0_deviation));
  }

  out.f = model_from_series(out.series, grid);
  out.f_plus = model_from_series(out.series_plus, grid);
  return out;
}

cplx LaurentFit::at(int row, int order) const {
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k] == order) return coefficients[row][k];
  }
  return {};
}

double LaurentFit::max_abs(int order) const {
  double m = 0.0;
  for (std::size_t r = 0; r < coefficients.size(); ++r) m = std::max(m, std::abs(at(static_cast<int>(r), order)));
  return m;
}

LaurentFit fit_laurent_profile(const Field& field, const std::vector<int>& orders, double delta_min,
                               double delta_max) {
  if (orders.empty()) throw InvalidArgument("Laurent fit needs at least one order");
  if (!(delta_min > 0.0) || !(delta_min < delta_max)) throw InvalidArgument("Laurent fit needs 0 < delta_min < delta_max");
  const GridSpec& g = field.grid();
  const double slack = 1e-12 * delta_max;
  std::vector<int> cols;
  int left = 0;
  int right = 0;
  for (int i = 0; i < g.nx; ++i) {
    const double ax = std::abs(g.x(i));
    if (g.excluded(i) || ax < delta_min - slack || ax > delta_max + slack) continue;
    cols.push_back(i);
    (g.x(i) < 0.0 ? left : right) += 1;
  }
  if (left < kMinFitSamples || right < kMinFitSamples) {
    throw FitError("Laurent fit over |x| in [" + fmt(delta_min) + ", " + fmt(delta_max) + "] has " +
                   std::to_string(left) + " samples left and " + std::to_string(right) +
                   " right of x = 0; at least 6 per side are needed");
  }
  const int m = static_cast<int>(cols.size());
  const int n = static_cast<int>(orders.size());
  if (m < n) throw FitError("Laurent fit has fewer samples than unknowns");

  // Fit in s = x / delta_max to keep the powers of comparable size.
  Eigen::MatrixXd a(m, n);
  for (int r = 0; r < m; ++r) {
    const double s = g.x(cols[r]) / delta_max;
    for (int k = 0; k < n; ++k) a(r, k) = std::pow(s, orders[k]);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);

  LaurentFit fit;
  fit.orders = orders;
  Eigen::MatrixXd rhs(m, 2);
  for (int j = 0; j < g.ny; ++j) {
    for (int r = 0; r < m; ++r) {
      const cplx v = field(cols[r], j);
      rhs(r, 0) = v.real();
      rhs(r, 1) = v.imag();
    }
    const Eigen::MatrixXd d = qr.solve(rhs);
    std::vector<cplx> c(n);
    for (int k = 0; k < n; ++k) c[k] = cplx(d(k, 0), d(k, 1)) / std::pow(delta_max, orders[k]);
    fit.y.push_back(g.y(j));
    fit.coefficients.push_back(std::move(c));
  }
  return fit;
}

RemovePoleReport remove_pole(const SingularCoefficient& u, const SingularFieldModel& f,
                             const SingularFieldModel& f_plus, cplx constant, const RemovePoleOptions& opt) {
  const GridSpec& g = u.u.grid();
  require_same_grid(u.u, f.smooth_remainder, "remove_pole");
  require_same_grid(u.u, f_plus.smooth_remainder, "remove_pole");
  if (!(g.x_min < 0.0 && g.x_max > 0.0)) throw InvalidArgument("pole removal needs the strip on both sides of x = 0");

  RemovePoleReport rep;
  rep.omega = omega_singular(f, f_plus, constant);
  const Field ff = f.to_field();
  const Field fp = f_plus.to_field();
  rep.u_tilde = Field(g, FieldRole::coefficient);
  for_each_active(g, [&](int i, int j) {
    const cplx w = rep.omega(i, j);
    const double lead = 2.0 * std::abs(f.leading(g.y(j)) * f_plus.leading(g.y(j))) / std::abs(g.x(i));
    if (std::abs(w) <= 1e-8 * lead) {
      throw ZeroPotentialError("singular potential vanishes at x = " + fmt(g.x(i)) + ", y = " + fmt(g.y(j)));
    }
    rep.u_tilde(i, j) = u.u(i, j) + ff(i, j) * std::conj(fp(i, j)) / w;
  });
  rep.max_abs_u_tilde = max_norm(rep.u_tilde);

  const double eps = opt.epsilon.value_or(std::min(std::abs(g.x_min), g.x_max));
  rep.bounded = true;
  rep.cancelled = true;
  std::string reason;
  for (int k = 1; k <= 4; ++k) {
    const double delta = eps / std::pow(2.0, k);
    rep.delta_ladder.push_back(delta);
    double sup = 0.0;
    for_each_active(g, [&](int i, int j) {
      const double ax = std::abs(g.x(i));
      if (ax >= 0.5 * delta - 1e-12 * delta && ax <= delta + 1e-12 * delta) sup = std::max(sup, std::abs(rep.u_tilde(i, j)));
    });
    if (!rep.sup_u_tilde.empty()) {
      const double prev = rep.sup_u_tilde.back();
      if (sup > prev + std::max(1e-8, opt.sup_growth * prev)) {
        rep.bounded = false;
        if (reason.empty()) reason = "sup |u~| grows from " + fmt(prev) + " to " + fmt(sup) + " at delta = " + fmt(delta);
      }
    }
    rep.sup_u_tilde.push_back(sup);

    const LaurentFit fit = fit_laurent_profile(rep.u_tilde, opt.fit_orders, 0.5 * delta, delta);
    double c1 = 0.0, c2 = 0.0, c0 = INFINITY, ratio = 0.0;
    for (std::size_t r = 0; r < fit.y.size(); ++r) {
      const int row = static_cast<int>(r);
      const double a1 = std::abs(fit.at(row, -1));
      const double a2 = std::abs(fit.at(row, -2));
      const double a0 = std::abs(fit.at(row, 0));
      c1 = std::max(c1, a1);
      c2 = std::max(c2, a2);
      c0 = std::min(c0, a0);
      ratio = std::max(ratio, std::max(a1, a2) / (opt.rel_tol * a0 + opt.abs_tol));
    }
    rep.c_minus1.push_back(c1);
    rep.c_minus2.push_back(c2);
    rep.c0_min.push_back(c0);
    rep.cancellation_ratio.push_back(ratio);
    if (ratio > 1.0) {
      rep.cancelled = false;
      if (reason.empty()) {
        reason = "singular coefficients survive at delta = " + fmt(delta) + ": |c_-1| = " + fmt(c1) +
                 ", |c_-2| = " + fmt(c2);
      }
    }
  }
  rep.verdict = rep.passed() ? "u_tilde bounded on the delta ladder; 1/x and 1/x^2 coefficients cancel" : reason;
  return rep;
}

}  // namespace galab
