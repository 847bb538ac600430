#pragma once

#include <optional>
#include <string>
#include <vector>

#include "galab/function_on_interval.hpp"

namespace galab {

/// Singular coefficient u = exp(2i phi(y)) * sum_{j >= -n} r_j(y) x^j.
/// Orders above the last supplied r_j are zero.
struct PoleProfile {
  FunctionOnInterval phi;
  std::vector<FunctionOnInterval> r;  // r[k] holds r_{k - n}
  int n = 1;

  double a() const { return phi.a(); }
  double b() const { return phi.b(); }
  int max_order() const { return static_cast<int>(r.size()) - n - 1; }
  /// r_j, or the zero function when j is beyond the supplied orders.
  FunctionOnInterval r_at(int j) const;
  bool sampled() const;
  /// u at (x, y).
  cplx value(double x, double y) const;
};

/// Truncated series psi = exp(i phi(y)) * sum_{j = -n'}^{K} beta_j(y) x^j.
struct CoefficientSeries {
  FunctionOnInterval phi;
  std::vector<FunctionOnInterval> beta;  // beta[k] holds beta_{k - n_prime}
  int n_prime = 1;

  int K() const { return static_cast<int>(beta.size()) - n_prime - 1; }
  FunctionOnInterval beta_at(int j) const;
  bool sampled() const;
  cplx value(double x, double y) const;
};

/// Outcome of a profile check. On failure `condition` names the violated
/// requirement and `worst_y` / `worst_value` locate the largest deviation.
struct CheckResult {
  bool passed = true;
  std::string condition;
  double worst_y = 0.0;
  double worst_value = 0.0;
  explicit operator bool() const { return passed; }
};

/// Nodes used for sup-norm checks of interval functions in polynomial mode.
inline constexpr int kCheckNodes = 201;

/// Existence test for the simple-pole case: n = 1 and |r_{-1}| = n'/2.
CheckResult lemma1_check(const PoleProfile& profile, int n_prime, double tol = 1e-10);

/// Maps a profile with r_{-1} = +1/2 to the equivalent one with
/// r_{-1} = -1/2 by shifting the phase by pi/2 and negating every r_j.
PoleProfile normalize_profile(const PoleProfile& profile);

/// Meromorphic-class test on a normalized profile: Re r_0 = 0 and
/// Im r_1 = phi''/2. Default tolerance 1e-9, or 1e-6 for sampled data.
CheckResult meromorphic_certify(const PoleProfile& profile, std::optional<double> tol = std::nullopt);

/// Profile of the conjugate equation dbar psi+ = -conj(u) conj(psi+):
/// phase -phi - pi/2 and coefficients conj(r_j).
PoleProfile conjugate_profile(const PoleProfile& profile);

/// Solves the order-by-order balance of dbar psi = u conj(psi) for the
/// coefficients beta_0 ... beta_K given the real datum beta_{-1} and the
/// free real function Im beta_1. Throws MeromorphicViolation when the
/// order-zero imaginary balance fails.
CoefficientSeries solve_recursion(const PoleProfile& profile, const FunctionOnInterval& beta_minus1,
                                  const FunctionOnInterval& im_beta1, int K,
                                  std::optional<double> tol = std::nullopt);

/// Sup-norms of the x^k coefficients of 2 dbar psi - 2 u conj(psi) after
/// dividing out exp(i phi), for k = -2 ... K-1. Entry 0 is k = -2.
std::vector<double> series_residual(const PoleProfile& profile, const CoefficientSeries& series, int K);

/// Sup norm over the check nodes of f (its samples when sampled).
double sup_on_nodes(const FunctionOnInterval& f, double* where = nullptr);

}  // namespace galab
