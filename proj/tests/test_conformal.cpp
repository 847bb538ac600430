#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "galab/conformal.hpp"
#include "galab/error.hpp"

using namespace galab;

namespace {

constexpr cplx I{0.0, 1.0};

const GridSpec kStrip{0.0, 1.0, 1.0, 2.0, 49, 49, {}};

// u = 1 with f = exp(2x), f+ = exp(-2x), psi = i exp(-2x): each solves its equation.
CommutativityProbe exponential_probe() {
  CommutativityProbe p;
  p.u = [](cplx) { return cplx(1.0); };
  p.f = [](cplx z) { return cplx(std::exp(2.0 * z.real())); };
  p.f_plus = [](cplx z) { return cplx(std::exp(-2.0 * z.real())); };
  p.psi = [](cplx z) { return I * std::exp(-2.0 * z.real()); };
  p.omega_ff_constant = 10.0 * I;
  p.omega_psi_constant = 0.3 * I;
  return p;
}

CommutativityProbe polynomial_probe() {
  CommutativityProbe p;
  p.u = [](cplx) { return cplx(0.0); };
  p.f = [](cplx) { return cplx(1.0); };
  p.f_plus = [](cplx z) { return 1.0 + z; };
  p.psi = [](cplx z) { return z * z; };
  p.omega_ff_constant = 10.0 * I;
  p.omega_psi_constant = 0.0;
  return p;
}

}  // namespace

TEST(Chart, FactoriesEvaluate) {
  const auto s = HolomorphicChart::scaling(2.0, kStrip);
  EXPECT_EQ(s.forward(cplx(0.5, 1.0)), cplx(1.0, 2.0));
  EXPECT_TRUE(s.maps_nodes_to_grid);
  const auto r = HolomorphicChart::rotation(0.3, kStrip);
  EXPECT_LT(std::abs(r.forward(1.0) - std::exp(0.3 * I)), 1e-15);
  EXPECT_FALSE(r.maps_nodes_to_grid);
  const auto e = HolomorphicChart::exponential(kStrip);
  EXPECT_LT(std::abs(e.invert(std::exp(cplx(0.3, 1.2))) - cplx(0.3, 1.2)), 1e-12);
  EXPECT_THROW(HolomorphicChart::scaling(-1.0, kStrip), InvalidArgument);
}

TEST(Chart, NewtonInverseWithoutClosedForm) {
  const auto c = HolomorphicChart::from_closures(
      "z + z^2/10", [](cplx t) { return t + t * t / 10.0; }, [](cplx t) { return 1.0 + 0.2 * t; },
      std::nullopt, kStrip);
  const cplx t(0.37, 1.61);
  EXPECT_LT(std::abs(c.invert(c.forward(t)) - t), 1e-12);
  EXPECT_NO_THROW(validate_chart(c));
}

TEST(Chart, DegenerateChartsAreRejected) {
  const GridSpec through_zero{-1.0, 1.0, -1.0, 1.0, 21, 21, {}};
  const auto square = HolomorphicChart::from_closures(
      "tau^2", [](cplx t) { return t * t; }, [](cplx t) { return 2.0 * t; }, std::nullopt, through_zero);
  EXPECT_THROW(validate_chart(square), DegenerateChartError);

  const auto wrong_derivative = HolomorphicChart::from_closures(
      "exp", [](cplx t) { return std::exp(t); }, [](cplx t) { return 2.0 * std::exp(t); }, std::nullopt, kStrip);
  EXPECT_THROW(validate_chart(wrong_derivative), DegenerateChartError);

  // exp is not injective on a strip taller than 2 pi.
  const GridSpec tall{0.0, 0.5, 0.0, 7.0, 9, 41, {}};
  EXPECT_THROW(validate_chart(HolomorphicChart::exponential(tall)), DegenerateChartError);
}

TEST(DomainGrid, ScalingMapsNodesExactly) {
  const GridSpec d = domain_grid(HolomorphicChart::scaling(2.0, kStrip));
  EXPECT_DOUBLE_EQ(d.x_min, 0.0);
  EXPECT_DOUBLE_EQ(d.x_max, 2.0);
  EXPECT_DOUBLE_EQ(d.y_min, 2.0);
  EXPECT_DOUBLE_EQ(d.y_max, 4.0);
  EXPECT_EQ(d.nx, kStrip.nx);
  EXPECT_EQ(d.ny, kStrip.ny);
}

TEST(DomainGrid, BoundingBoxCoversImage) {
  const auto r = HolomorphicChart::rotation(0.3, kStrip);
  const GridSpec d = domain_grid(r);
  for_each_active(kStrip, [&](int i, int j) {
    const cplx z = r.forward(kStrip.z(i, j));
    EXPECT_GE(z.real(), d.x_min - 1e-12);
    EXPECT_LE(z.real(), d.x_max + 1e-12);
    EXPECT_GE(z.imag(), d.y_min - 1e-12);
    EXPECT_LE(z.imag(), d.y_max + 1e-12);
  });
}

TEST(Pushforward, MatchesClosedForms) {
  const auto s = HolomorphicChart::scaling(3.0, kStrip);
  const Field u = pushforward_u([](cplx z) { return z * z; }, s);
  const Field expect = Field::sample(kStrip, [](double x, double y) { return 3.0 * cplx(3 * x, 3 * y) * cplx(3 * x, 3 * y); });
  EXPECT_LT(max_rel_diff(u, expect), 1e-15);

  const auto e = HolomorphicChart::exponential(kStrip);
  const Field root = sqrt_derivative(e);
  const Field half = Field::sample(kStrip, [](double x, double y) { return std::exp(0.5 * cplx(x, y)); });
  EXPECT_LT(max_rel_diff(root, half), 1e-14);
  EXPECT_LT(max_rel_diff(sqrt_derivative(e, SqrtBranch::negated), -half), 1e-14);
}

TEST(Pushforward, FieldOverloadInterpolates) {
  const auto r = HolomorphicChart::rotation(0.2, kStrip);
  const GridSpec d = domain_grid(r);
  const Field psi_d = Field::sample(d, [](double x, double y) { return std::exp(cplx(x, y)); });
  const Field a = pushforward_psi(psi_d, r);
  const Field b = pushforward_psi([](cplx z) { return std::exp(z); }, r);
  EXPECT_LT(max_rel_diff(a, b), 1e-7);
}

TEST(SqrtBranch, JumpsAreDetected) {
  const auto flip = HolomorphicChart::from_closures(
      "flip", [](cplx t) { return t; }, [](cplx t) { return t.real() < 0.5 ? cplx(1.0) : cplx(-1.0); }, std::nullopt,
      kStrip);
  EXPECT_THROW(sqrt_derivative(flip), BranchError);
}

TEST(Commutativity, IdentityChartIsExact) {
  const auto rep = check_commutativity(exponential_probe(), HolomorphicChart::identity(kStrip));
  EXPECT_LE(rep.deviation(), 1e-12);
  const auto poly = check_commutativity(polynomial_probe(), HolomorphicChart::identity(kStrip));
  EXPECT_LE(poly.deviation(), 1e-12);
}

TEST(Commutativity, ScalingAndRotationWithinQuadratureTolerance) {
  for (const auto& chart : {HolomorphicChart::scaling(0.5, kStrip), HolomorphicChart::rotation(0.3, kStrip)}) {
    const auto rep = check_commutativity(polynomial_probe(), chart);
    EXPECT_LE(rep.deviation(), 1e-6) << chart.name;
    EXPECT_LE(rep.potential_derivative_defect, 1e-6) << chart.name;
  }
  const auto rep = check_commutativity(exponential_probe(), HolomorphicChart::scaling(0.5, kStrip));
  EXPECT_LE(rep.deviation(), 1e-6);
}

TEST(Commutativity, DeviationShrinksWithResolution) {
  auto dev = [](int n) {
    const GridSpec g = kStrip.with_resolution(n, n);
    CommutativityProbe p = polynomial_probe();
    p.psi = [](cplx z) { return std::exp(z); };
    return check_commutativity(p, HolomorphicChart::rotation(0.4, g)).deviation();
  };
  const double d1 = dev(25);
  const double d2 = dev(49);
  EXPECT_LT(d2, d1 / 8.0);
}
