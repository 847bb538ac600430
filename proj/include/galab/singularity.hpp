#pragma once

#include <optional>
#include <string>
#include <vector>

#include "galab/field.hpp"
#include "galab/potential.hpp"
#include "galab/series.hpp"
#include "galab/singular_model.hpp"

namespace galab {

/// Singular coefficient sampled on a strip together with its split into the
/// exp(2i phi) r_{-1} / x part and the C^1 remainder.
struct SingularCoefficient {
  Field u;
  SingularFieldModel model;
};

/// u = exp(2i phi)(-1/(2x) + r_0 + r_1 x + ...) on the active nodes of
/// `grid`. Throws MeromorphicViolation unless the profile is certified.
SingularCoefficient synthesize_singular_u(const PoleProfile& profile, const GridSpec& grid);

/// Field model of a truncated series: phase exp(i phi), leading beta_{-1},
/// remainder sum_{j >= 0} exp(i phi) beta_j x^j.
SingularFieldModel model_from_series(const CoefficientSeries& series, const GridSpec& grid);

struct SingularSeeds {
  SingularFieldModel f;
  SingularFieldModel f_plus;
  CoefficientSeries series;
  CoefficientSeries series_plus;
  /// Largest deviation of beta_0 and beta+_0 from their closed forms.
  double beta0_deviation = 0.0;
};

/// Seeds with leading terms beta_{-1} / x and beta+_{-1} / x, both required
/// to be positive, built from the series recursion of each equation. The
/// conjugate side uses the profile of the conjugate equation, whose phase is
/// -(phi + pi/2). `im_beta1` and `im_beta1_plus` are the free data of the two
/// recursions.
SingularSeeds synthesize_seeds(const PoleProfile& profile, const FunctionOnInterval& beta_minus1,
                               const FunctionOnInterval& beta_plus_minus1, int K, const GridSpec& grid,
                               const std::optional<FunctionOnInterval>& im_beta1 = std::nullopt,
                               const std::optional<FunctionOnInterval>& im_beta1_plus = std::nullopt);

/// Per-row least-squares Laurent fit sum_k c_k x^k over the active nodes
/// with delta_min <= |x| <= delta_max, using both sides of x = 0.
struct LaurentFit {
  std::vector<int> orders;
  std::vector<double> y;
  /// coefficients[row][k] multiplies x^{orders[k]}.
  std::vector<std::vector<cplx>> coefficients;

  /// Coefficient of x^order on a row; 0 if the order was not fitted.
  cplx at(int row, int order) const;
  /// max over rows of |c_order|.
  double max_abs(int order) const;
};

/// Throws FitError with fewer than 6 samples on either side.
LaurentFit fit_laurent_profile(const Field& field, const std::vector<int>& orders, double delta_min,
                               double delta_max);
inline LaurentFit fit_laurent_profile(const Field& field, double delta_min, double delta_max) {
  return fit_laurent_profile(field, {-2, -1, 0}, delta_min, delta_max);
}

struct RemovePoleOptions {
  /// Strip half-width; defaults to min(|x_min|, x_max).
  std::optional<double> epsilon;
  /// Orders of the boundedness fit.
  std::vector<int> fit_orders{-2, -1, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  /// |c_{-1}|, |c_{-2}| <= rel_tol |c_0| + abs_tol on every row.
  double rel_tol = 1e-6;
  double abs_tol = 1e-8;
  /// Allowed growth of the band sup from one ladder rung to the next.
  double sup_growth = 0.1;
};

struct RemovePoleReport {
  Field u_tilde;
  Potential omega;
  std::vector<double> delta_ladder;
  std::vector<double> sup_u_tilde;
  /// Per rung, max over rows of |c_{-1}|, |c_{-2}|, and min over rows of |c_0|.
  std::vector<double> c_minus1;
  std::vector<double> c_minus2;
  std::vector<double> c0_min;
  /// Per rung, max over rows of max(|c_{-1}|, |c_{-2}|) / (rel_tol |c_0| + abs_tol).
  std::vector<double> cancellation_ratio;
  double max_abs_u_tilde = 0.0;
  bool bounded = false;
  bool cancelled = false;
  std::string verdict;

  bool passed() const { return bounded && cancelled; }
};

/// u~ = u + f conj(f+) / omega with omega from omega_singular(), followed by
/// the boundedness checks on the delta ladder eps/2 ... eps/16.
RemovePoleReport remove_pole(const SingularCoefficient& u, const SingularFieldModel& f,
                             const SingularFieldModel& f_plus, cplx constant, const RemovePoleOptions& options = {});

}  // namespace galab
