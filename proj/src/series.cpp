#include "galab/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "galab/error.hpp"

namespace galab {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kNormTol = 1e-10;

FunctionOnInterval zero_like(const FunctionOnInterval& f) { return FunctionOnInterval::constant(f.a(), f.b(), 0.0); }

bool any_sampled(const std::vector<FunctionOnInterval>& fs) {
  return std::any_of(fs.begin(), fs.end(),
                     [](const FunctionOnInterval& f) { return f.mode() == FunctionOnInterval::Mode::sampled; });
}

double default_tol(bool sampled) { return sampled ? 1e-6 : 1e-9; }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Formal Laurent series in x whose coefficients are functions of y.
struct Laurent {
  int low = 0;
  std::vector<FunctionOnInterval> c;

  FunctionOnInterval at(int j, const FunctionOnInterval& zero) const {
    const int k = j - low;
    return k >= 0 && k < static_cast<int>(c.size()) ? c[k] : zero;
  }
  int high() const { return low + static_cast<int>(c.size()) - 1; }
};

Laurent x_derivative(const Laurent& s, const FunctionOnInterval& zero) {
  Laurent out{s.low - 1, {}};
  for (int j = s.low; j <= s.high(); ++j) out.c.push_back(static_cast<double>(j) * s.at(j, zero));
  return out;
}

Laurent y_derivative(const Laurent& s) {
  Laurent out{s.low, {}};
  for (const auto& f : s.c) out.c.push_back(f.derivative());
  return out;
}

Laurent conj(const Laurent& s) {
  Laurent out{s.low, {}};
  for (const auto& f : s.c) out.c.push_back(f.conj());
  return out;
}

Laurent scale(const Laurent& s, const FunctionOnInterval& g) {
  Laurent out{s.low, {}};
  for (const auto& f : s.c) out.c.push_back(f * g);
  return out;
}

Laurent multiply(const Laurent& p, const Laurent& q, const FunctionOnInterval& zero) {
  Laurent out{p.low + q.low, {}};
  for (int k = out.low; k <= p.high() + q.high(); ++k) {
    FunctionOnInterval acc = zero;
    for (int l = p.low; l <= p.high(); ++l) {
      const int m = k - l;
      if (m < q.low || m > q.high()) continue;
      acc += p.at(l, zero) * q.at(m, zero);
    }
    out.c.push_back(acc);
  }
  return out;
}

}  // namespace

double sup_on_nodes(const FunctionOnInterval& f, double* where) {
  const auto ys = f.nodes(kCheckNodes);
  return sup_norm(f, ys, where);
}

FunctionOnInterval PoleProfile::r_at(int j) const {
  const int k = j + n;
  return k >= 0 && k < static_cast<int>(r.size()) ? r[k] : zero_like(phi);
}

bool PoleProfile::sampled() const {
  return phi.mode() == FunctionOnInterval::Mode::sampled || any_sampled(r);
}

cplx PoleProfile::value(double x, double y) const {
  cplx sum{};
  for (std::size_t k = 0; k < r.size(); ++k) sum += r[k](y) * std::pow(x, static_cast<int>(k) - n);
  return std::exp(2.0 * kI * phi(y).real()) * sum;
}

FunctionOnInterval CoefficientSeries::beta_at(int j) const {
  const int k = j + n_prime;
  return k >= 0 && k < static_cast<int>(beta.size()) ? beta[k] : zero_like(phi);
}

bool CoefficientSeries::sampled() const {
  return phi.mode() == FunctionOnInterval::Mode::sampled || any_sampled(beta);
}

cplx CoefficientSeries::value(double x, double y) const {
  cplx sum{};
  for (std::size_t k = 0; k < beta.size(); ++k) sum += beta[k](y) * std::pow(x, static_cast<int>(k) - n_prime);
  return std::exp(kI * phi(y).real()) * sum;
}

CheckResult lemma1_check(const PoleProfile& profile, int n_prime, double tol) {
  if (profile.n != 1) {
    return {false, "pole order n = " + std::to_string(profile.n) + " differs from 1", profile.a(),
            static_cast<double>(profile.n)};
  }
  const FunctionOnInterval r = profile.r_at(-1);
  double worst_y = profile.a();
  double worst = 0.0;
  for (double y : r.nodes(kCheckNodes)) {
    const double dev = std::abs(std::abs(r(y)) - 0.5 * n_prime);
    if (dev > worst) {
      worst = dev;
      worst_y = y;
    }
  }
  if (worst > tol) {
    return {false, "|r_{-1}| differs from n'/2 = " + fmt(0.5 * n_prime), worst_y, worst};
  }
  return {true, "", worst_y, worst};
}

PoleProfile normalize_profile(const PoleProfile& profile) {
  if (profile.n != 1) throw NormalizationError("normalization applies to simple poles only");
  const FunctionOnInterval dev = profile.r_at(-1) + cplx(-0.5);
  double y = 0.0;
  const double worst = sup_on_nodes(dev, &y);
  if (worst > kNormTol) {
    throw NormalizationError("normalization needs r_{-1} = +1/2; deviation " + fmt(worst) + " at y = " + fmt(y));
  }
  PoleProfile out = profile;
  out.phi += cplx(std::numbers::pi / 2);
  for (auto& r : out.r) r *= -1.0;
  return out;
}

PoleProfile conjugate_profile(const PoleProfile& profile) {
  PoleProfile out = profile;
  out.phi = -profile.phi + cplx(-std::numbers::pi / 2);
  for (auto& r : out.r) r = r.conj();
  return out;
}

namespace {

void require_normalized(const PoleProfile& profile) {
  if (profile.n != 1) throw NormalizationError("profile has pole order " + std::to_string(profile.n));
  double y = 0.0;
  const double worst = sup_on_nodes(profile.r_at(-1) + cplx(0.5), &y);
  if (worst > kNormTol) {
    throw NormalizationError("profile is not normalized: r_{-1} + 1/2 = " + fmt(worst) + " at y = " + fmt(y));
  }
}

}  // namespace

CheckResult meromorphic_certify(const PoleProfile& profile, std::optional<double> tol_in) {
  require_normalized(profile);
  const double tol = tol_in.value_or(default_tol(profile.sampled()));
  double y0 = 0.0;
  const double re_r0 = sup_on_nodes(profile.r_at(0).real_part(), &y0);
  if (re_r0 > tol) return {false, "Re r_0 differs from 0", y0, re_r0};
  const FunctionOnInterval mismatch = profile.r_at(1).imag_part() - 0.5 * profile.phi.derivative().derivative();
  double y1 = 0.0;
  const double im_r1 = sup_on_nodes(mismatch, &y1);
  if (im_r1 > tol) return {false, "Im r_1 differs from phi''/2", y1, im_r1};
  return {true, "", y1, std::max(re_r0, im_r1)};
}

CoefficientSeries solve_recursion(const PoleProfile& profile, const FunctionOnInterval& beta_minus1,
                                  const FunctionOnInterval& im_beta1, int K, std::optional<double> tol_in) {
  require_normalized(profile);
  if (K < 1) throw InvalidArgument("truncation order K must be at least 1");
  const double tol =
      tol_in.value_or(default_tol(profile.sampled() || beta_minus1.mode() == FunctionOnInterval::Mode::sampled));
  double y = 0.0;
  const double im_b = sup_on_nodes(beta_minus1.imag_part(), &y);
  if (im_b > kNormTol) throw InvalidArgument("beta_{-1} must be real; Im = " + fmt(im_b) + " at y = " + fmt(y));

  const FunctionOnInterval zero = zero_like(profile.phi);
  const FunctionOnInterval dphi = profile.phi.derivative();
  std::vector<FunctionOnInterval> beta{beta_minus1.real_part() + zero};
  auto b = [&](int j) -> const FunctionOnInterval& { return beta[j + 1]; };

  // RHS_k = -i beta_k' + phi' beta_k + 2 sum_{l=0}^{k+1} r_l conj(beta_{k-l}).
  auto rhs = [&](int k) {
    FunctionOnInterval acc = cplx(0, -1) * b(k).derivative() + dphi * b(k);
    for (int l = 0; l <= k + 1; ++l) acc += 2.0 * (profile.r_at(l) * b(k - l).conj());
    return acc;
  };

  beta.push_back(rhs(-1).conj());
  const FunctionOnInterval rhs0 = rhs(0);
  const double im_rhs0 = sup_on_nodes(rhs0.imag_part(), &y);
  if (im_rhs0 > tol) {
    throw MeromorphicViolation("order-zero balance fails: |Im RHS_0| = " + fmt(im_rhs0) + " at y = " + fmt(y));
  }
  beta.push_back(0.5 * rhs0.real_part() + kI * im_beta1.real_part());
  for (int k = 1; k < K; ++k) {
    const FunctionOnInterval rk = rhs(k);
    beta.push_back((1.0 / (k + 2)) * rk.real_part() + (kI / static_cast<double>(k)) * rk.imag_part());
  }
  return {profile.phi, std::move(beta), 1};
}

std::vector<double> series_residual(const PoleProfile& profile, const CoefficientSeries& series, int K) {
  const FunctionOnInterval zero = zero_like(profile.phi);
  Laurent psi{-series.n_prime, series.beta};
  Laurent u{-profile.n, profile.r};
  const FunctionOnInterval dphi = series.phi.derivative();

  // exp(-i phi) * 2 dbar(exp(i phi) S) = S_x + i S_y - phi' S
  const Laurent sx = x_derivative(psi, zero);
  const Laurent sy = y_derivative(psi);
  const Laurent sphi = scale(psi, dphi);
  const Laurent prod = multiply(u, conj(psi), zero);

  std::vector<double> out;
  for (int k = -2; k <= K - 1; ++k) {
    const FunctionOnInterval d =
        sx.at(k, zero) + kI * sy.at(k, zero) - sphi.at(k, zero) - 2.0 * prod.at(k, zero);
    out.push_back(sup_on_nodes(d));
  }
  return out;
}

}  // namespace galab
