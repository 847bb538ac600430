#include <gtest/gtest.h>

#include <cmath>

#include "galab/error.hpp"
#include "galab/potential.hpp"

using namespace galab;

namespace {

constexpr cplx I{0.0, 1.0};

Field sampled(const GridSpec& g, std::function<cplx(cplx)> fn) {
  return Field::sample(g, [&](double x, double y) { return fn({x, y}); });
}

NodeIndex node_at(const GridSpec& g, double x, double y) {
  return {static_cast<int>(std::lround((x - g.x_min) / g.hx())), static_cast<int>(std::lround((y - g.y_min) / g.hy()))};
}

// omega = (P - conj(P)) + c where P' = psi psi+ and P(z0) = 0.
double closed_form_error(const Potential& w, const std::function<cplx(cplx)>& antiderivative, cplx z0, cplx c) {
  const GridSpec& g = w.grid();
  double e = 0.0;
  for_each_active(g, [&](int i, int j) {
    const cplx p = antiderivative(g.z(i, j)) - antiderivative(z0);
    e = std::max(e, std::abs(w(i, j) - (p - std::conj(p) + c)));
  });
  return e;
}

}  // namespace

TEST(Omega, PolynomialPairIsIntegratedExactly) {
  const GridSpec g{-1.0, 1.0, -1.0, 1.0, 41, 41, {}};
  const Field psi = sampled(g, [](cplx z) { return z; });
  const Field one = sampled(g, [](cplx) { return cplx(1.0); });
  const Potential w = omega(psi, one, node_at(g, 0.0, 0.0), 0.5 * I);
  double e = 0.0;
  for_each_active(g, [&](int i, int j) { e = std::max(e, std::abs(w(i, j) - (2.0 * I * g.x(i) * g.y(j) + 0.5 * I))); });
  EXPECT_LT(e, 1e-13);
  EXPECT_LT(w.path_defect(), 1e-13);
  EXPECT_EQ(w.constant(), 0.5 * I);
}

TEST(Omega, ConvergesAtFourthOrderForEntirePair) {
  const cplx z0(0.0, 1.0);
  auto err = [&](int n) {
    const GridSpec g{0.0, 1.0, 1.0, 2.0, n, n, {}};
    const Field e = sampled(g, [](cplx z) { return std::exp(z); });
    const Potential w = omega(e, e, node_at(g, 0.0, 1.0), 0.2 * I);
    return closed_form_error(w, [](cplx z) { return 0.5 * std::exp(2.0 * z); }, z0, 0.2 * I);
  };
  const double e1 = err(33);
  const double e2 = err(65);
  const double e3 = err(129);
  EXPECT_LT(e3, 1e-7);
  EXPECT_GT(std::log2(e1 / e2), 3.5);
  EXPECT_GT(std::log2(e2 / e3), 3.5);
}

TEST(Omega, ValuesAreImaginary) {
  const GridSpec g{0.0, 1.0, 1.0, 2.0, 33, 33, {}};
  const Field a = sampled(g, [](cplx z) { return std::exp(z) + z * z; });
  const Field b = sampled(g, [](cplx z) { return 1.0 + I * z; });
  const Potential w = omega(a, b, {3, 4}, -0.7 * I);
  double re = 0.0;
  for_each_active(g, [&](int i, int j) { re = std::max(re, std::abs(w(i, j).real())); });
  EXPECT_EQ(re, 0.0);
  EXPECT_LE(w.max_real_drift(), 1e-10);
  EXPECT_LT(std::abs(w(3, 4) + 0.7 * I), 1e-15);
}

TEST(Omega, RejectsNonImaginaryConstant) {
  const GridSpec g{0.0, 1.0, 0.0, 1.0, 9, 9, {}};
  const Field one = sampled(g, [](cplx) { return cplx(1.0); });
  EXPECT_THROW(omega(one, one, {0, 0}, 1.0), InvalidArgument);
}

TEST(Omega, NonSolutionPairIsNotExact) {
  const GridSpec g{0.0, 1.0, 0.0, 1.0, 33, 33, {}};
  const Field zbar = sampled(g, [](cplx z) { return std::conj(z); });
  const Field one = sampled(g, [](cplx) { return cplx(1.0); });
  EXPECT_THROW(omega(zbar, one, {0, 0}, 0.0), ExactnessError);
  const Potential w = omega_unchecked(zbar, one, {0, 0}, 0.0);
  EXPECT_GT(w.path_defect(), 0.1);
  EXPECT_GT(loop_defect(zbar, one, {0, 32, 0, 32}), 0.1);
}

TEST(Omega, BothPathOrdersAgree) {
  const GridSpec g{0.0, 1.0, 1.0, 2.0, 65, 65, {}};
  const Field a = sampled(g, [](cplx z) { return std::exp(0.5 * z); });
  const Field b = sampled(g, [](cplx z) { return z * z * z; });
  const Potential xy = omega(a, b, {10, 20}, I);
  const Potential yx = omega_y_then_x(a, b, {10, 20}, I);
  EXPECT_LT(max_abs_diff(xy.values(), yx.values()), 1e-8);
}

TEST(LoopDefect, VanishesForSolutionPairs) {
  const GridSpec g{0.0, 1.0, 1.0, 2.0, 65, 65, {}};
  const Field a = sampled(g, [](cplx z) { return std::exp(z); });
  const Field b = sampled(g, [](cplx z) { return 1.0 / (z + 3.0); });
  EXPECT_LT(loop_defect(a, b, {5, 50, 10, 60}), 1e-8);
  EXPECT_THROW(loop_defect(a, b, {5, 5, 10, 60}), InvalidArgument);
  EXPECT_THROW(loop_defect(a, b, {5, 70, 10, 60}), InvalidArgument);
}

TEST(Omega, ExcludedBandHalvesAreTiedByExtrapolation) {
  const GridSpec g{-1.0, 1.0, 0.0, 1.0, 81, 41, 0.1};
  const Field psi = sampled(g, [](cplx z) { return z; });
  const Field one = sampled(g, [](cplx) { return cplx(1.0); });
  const Potential w = omega(psi, one, node_at(g, 0.5, 0.5), 0.5 * I);
  // omega = 2ixy takes the value 0.5i at (0.5, 0.5).
  double e = 0.0;
  for_each_active(g, [&](int i, int j) { e = std::max(e, std::abs(w(i, j) - 2.0 * I * g.x(i) * g.y(j))); });
  EXPECT_LT(e, 1e-10);
  ASSERT_TRUE(w.secondary().has_value());
  EXPECT_LT(g.x(w.secondary()->node.i), 0.0);
}

TEST(Potential, FromValuesProjectsOrRejects) {
  const GridSpec g{0.0, 1.0, 0.0, 1.0, 9, 9, {}};
  const Field ok = Field::sample(g, [](double x, double) { return cplx(1e-13, x); });
  const Potential p = Potential::from_values(ok, {0, 0});
  EXPECT_EQ(p(4, 4).real(), 0.0);
  const Field bad = Field::sample(g, [](double x, double) { return cplx(1e-3, x); });
  EXPECT_THROW(Potential::from_values(bad, {0, 0}), ExactnessError);
}

TEST(OmegaSingular, CanonicalSeedsGiveTwoIOverX) {
  const GridSpec g{-0.25, 0.25, 1.0, 2.0, 201, 21, 0.01};
  const Field zero(g, FieldRole::solution);
  const auto one = FunctionOnInterval::constant(1.0, 2.0, 1.0);
  // f = 1 / x and f+ = -i / x: phase product exp(i 0) exp(-i pi/2) = -i.
  const SingularFieldModel f{[](double) { return cplx(1.0); }, one, zero};
  const SingularFieldModel fp{[](double) { return -I; }, one, zero};
  const Potential w = omega_singular(f, fp, 0.3 * I);
  double e = 0.0;
  for_each_active(g, [&](int i, int j) { e = std::max(e, std::abs(w(i, j) - (2.0 * I / g.x(i) + 0.3 * I))); });
  EXPECT_LT(e, 1e-12);
}

TEST(OmegaSingular, SmoothRemainderIsIntegrated) {
  const GridSpec g{-0.25, 0.25, 1.0, 2.0, 201, 41, 0.01};
  const auto one = FunctionOnInterval::constant(1.0, 2.0, 1.0);
  // f = 1/x + x^2 and f+ = -i/x: f f+ = -i/x^2 - i x, so d omega/dx = 2i(-1/x^2 - x),
  // d omega/dy = 0 and omega = 2i/x - i x^2 with remainder value 0 at x = 0.
  const Field rem = Field::sample(g, [](double x, double) { return cplx(x * x); }, FieldRole::solution);
  const Field zero(g, FieldRole::solution);
  const SingularFieldModel f{[](double) { return cplx(1.0); }, one, rem};
  const SingularFieldModel fp{[](double) { return -I; }, one, zero};
  const Potential w = omega_singular(f, fp, 0.0);
  double e = 0.0;
  for_each_active(g, [&](int i, int j) {
    const double x = g.x(i);
    e = std::max(e, std::abs(w(i, j) - (2.0 * I / x - I * x * x)));
  });
  EXPECT_LT(e, 1e-10);
}

TEST(OmegaSingular, ValidatesSeeds) {
  const GridSpec g{-0.25, 0.25, 1.0, 2.0, 101, 11, 0.01};
  const Field zero(g, FieldRole::solution);
  const auto one = FunctionOnInterval::constant(1.0, 2.0, 1.0);
  const auto minus = FunctionOnInterval::constant(1.0, 2.0, -1.0);
  const SingularFieldModel f{[](double) { return cplx(1.0); }, one, zero};
  const SingularFieldModel fp_neg{[](double) { return -I; }, minus, zero};
  EXPECT_THROW(omega_singular(f, fp_neg, 0.0), PositivityError);
  const SingularFieldModel fp_phase{[](double) { return cplx(1.0); }, one, zero};
  EXPECT_THROW(omega_singular(f, fp_phase, 0.0), InvalidArgument);
}
