#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "galab/error.hpp"
#include "galab/field.hpp"

using namespace galab;

namespace {

constexpr cplx I{0.0, 1.0};

GridSpec unit_grid(int n) { return {0.0, 1.0, 1.0, 2.0, n, n, std::nullopt}; }

Field sampled(const GridSpec& g, std::function<cplx(cplx)> fn, FieldRole role = FieldRole::generic) {
  return Field::sample(g, [&](double x, double y) { return fn({x, y}); }, role);
}

}  // namespace

TEST(GridSpec, RejectsDegenerateRectangles) {
  EXPECT_THROW((GridSpec{1.0, 1.0, 0.0, 1.0, 8, 8, {}}).validate(), InvalidArgument);
  EXPECT_THROW((GridSpec{0.0, 1.0, 2.0, 1.0, 8, 8, {}}).validate(), InvalidArgument);
  EXPECT_THROW((GridSpec{0.0, 1.0, 0.0, 1.0, 3, 8, {}}).validate(), InvalidArgument);
  EXPECT_THROW((GridSpec{-1.0, 1.0, 0.0, 1.0, 8, 8, -0.1}).validate(), InvalidArgument);
  EXPECT_THROW((GridSpec{-1.0, 1.0, 0.0, 1.0, 8, 8, 2.0}).validate(), InvalidArgument);
  EXPECT_NO_THROW(unit_grid(8).validate());
}

TEST(GridSpec, NodesHitTheRectangleCorners) {
  const GridSpec g{-0.3, 0.7, 1.1, 2.3, 11, 7, {}};
  EXPECT_DOUBLE_EQ(g.x(0), -0.3);
  EXPECT_DOUBLE_EQ(g.x(10), 0.7);
  EXPECT_DOUBLE_EQ(g.y(6), 2.3);
  EXPECT_NEAR(g.x(5), 0.2, 1e-15);
  EXPECT_EQ(g.index(3, 2), 2u * 11u + 3u);
}

TEST(Field, ExcludedNodesAreNaNAndSkippedByNorms) {
  const GridSpec g{-1.0, 1.0, 0.0, 1.0, 21, 6, 0.15};
  const Field f = Field::sample(g, [](double x, double) { return cplx(1.0 / x); });
  EXPECT_TRUE(std::isnan(f(10, 0).real()));
  EXPECT_TRUE(std::isnan(f(9, 3).real()));
  EXPECT_FALSE(std::isnan(f(8, 3).real()));
  EXPECT_NEAR(max_norm(f), 1.0 / 0.2, 1e-12);
}

TEST(Field, ArithmeticRequiresMatchingGrids) {
  const Field a(unit_grid(8));
  const Field b(unit_grid(9));
  EXPECT_THROW(a + b, ShapeError);
  EXPECT_THROW(Field(unit_grid(8), std::vector<cplx>(3)), ShapeError);
}

TEST(Field, RelativeDifferenceUsesReferenceScale) {
  const GridSpec g = unit_grid(8);
  const Field a = Field::sample(g, [](double, double) { return cplx(100.0); });
  const Field b = Field::sample(g, [](double, double) { return cplx(101.0); });
  EXPECT_NEAR(max_abs_diff(a, b), 1.0, 1e-13);
  EXPECT_NEAR(max_rel_diff(a, b), 1.0 / 101.0, 1e-13);
}

TEST(Derivatives, CubicsAreDifferentiatedExactly) {
  const GridSpec g = unit_grid(17);
  const Field f = sampled(g, [](cplx z) { return z * z * z - 2.0 * z; });
  const Field expect = sampled(g, [](cplx z) { return 3.0 * z * z - 2.0; });
  EXPECT_LT(max_abs_diff(dz(f), expect), 1e-11);
  EXPECT_LT(max_norm(dbar(f)), 1e-11);

  const Field g1 = sampled(g, [](cplx z) { return std::conj(z) * std::conj(z); });
  const Field expect_bar = sampled(g, [](cplx z) { return 2.0 * std::conj(z); });
  EXPECT_LT(max_abs_diff(dbar(g1), expect_bar), 1e-11);
  EXPECT_LT(max_norm(dz(g1)), 1e-11);
}

TEST(Derivatives, PartialDerivativesOfMixedPolynomial) {
  const GridSpec g = unit_grid(12);
  const Field f = Field::sample(g, [](double x, double y) { return cplx(x * x * y, y * y * y); });
  const Field fx = Field::sample(g, [](double x, double y) { return cplx(2.0 * x * y, 0.0); });
  const Field fy = Field::sample(g, [](double x, double y) { return cplx(x * x, 3.0 * y * y); });
  EXPECT_LT(max_abs_diff(dx(f), fx), 1e-11);
  EXPECT_LT(max_abs_diff(dy(f), fy), 1e-11);
}

TEST(Derivatives, FourthOrderConvergence) {
  auto err = [](int n) {
    const GridSpec g = unit_grid(n);
    const Field f = sampled(g, [](cplx z) { return std::exp(std::conj(z)) * std::sin(z.real()); });
    const Field expect = sampled(g, [](cplx z) {
      // dbar of exp(zbar) sin(x) = exp(zbar) sin(x) + exp(zbar) cos(x) / 2
      return std::exp(std::conj(z)) * (std::sin(z.real()) + 0.5 * std::cos(z.real()));
    });
    return max_abs_diff(dbar(f), expect);
  };
  const double e1 = err(33);
  const double e2 = err(65);
  const double e3 = err(129);
  EXPECT_GT(std::log2(e1 / e2), 3.7);
  EXPECT_GT(std::log2(e2 / e3), 3.7);
}

TEST(Derivatives, ExcludedBandSplitsSegments) {
  const GridSpec g{-1.0, 1.0, 0.0, 1.0, 41, 9, 0.1};
  const Field f = Field::sample(g, [](double x, double y) { return cplx(std::exp(x), y); });
  const Field fx = dx(f);
  const Field exact = Field::sample(g, [](double x, double) { return cplx(std::exp(x)); });
  EXPECT_LT(max_abs_diff(fx, exact), 1e-5);
  EXPECT_TRUE(std::isnan(fx(20, 4).real()));
}

TEST(Derivatives, ShortSegmentsAreRejected) {
  const GridSpec g{-1.0, 1.0, 0.0, 1.0, 11, 9, 0.65};
  const Field f(g);
  EXPECT_THROW(dx(f), StencilError);
}

TEST(Residual, ClosedFormSolutions) {
  const GridSpec g{-0.5, 0.5, 0.0, 1.0, 129, 129, {}};
  const Field u = Field::sample(g, [](double, double) { return cplx(1.0); }, FieldRole::coefficient);
  // dbar exp(2x) = exp(2x) = conj(exp(2x)) and dbar(i exp(-2x)) = -i exp(-2x) = conj(i exp(-2x)).
  const Field psi1 = Field::sample(g, [](double x, double) { return cplx(std::exp(2.0 * x)); });
  const Field psi2 = Field::sample(g, [](double x, double) { return I * std::exp(-2.0 * x); });
  EXPECT_LT(residual(u, psi1, EquationKind::direct), 1e-7);
  EXPECT_LT(residual(u, psi2, EquationKind::direct), 1e-7);
  // The conjugate equation with u = 1 is dbar psi+ = -conj(psi+): exp(-2x) solves it, exp(2x) does not.
  const Field psi_plus = Field::sample(g, [](double x, double) { return cplx(std::exp(-2.0 * x)); });
  EXPECT_LT(residual(u, psi_plus, EquationKind::conjugate), 1e-7);
  EXPECT_GT(residual(u, psi1, EquationKind::conjugate), 1.0);
}

TEST(Residual, NonSolutionHasOrderOneResidual) {
  const GridSpec g = unit_grid(33);
  const Field u(g, FieldRole::coefficient);
  const Field psi = sampled(g, [](cplx z) { return std::conj(z); });
  EXPECT_NEAR(residual(u, psi, EquationKind::direct), 1.0, 1e-12);
}

TEST(Interpolate, ExactForBicubicsAndAtNodes) {
  const GridSpec g = unit_grid(11);
  const Field f = Field::sample(g, [](double x, double y) { return cplx(x * x * x * y - y * y, x * y * y * y); });
  for (cplx at : {cplx(0.13, 1.71), cplx(0.999, 1.001), cplx(0.5, 1.5)}) {
    const double x = at.real();
    const double y = at.imag();
    const cplx expect(x * x * x * y - y * y, x * y * y * y);
    EXPECT_LT(std::abs(interpolate(f, at) - expect), 1e-12);
  }
  EXPECT_EQ(interpolate(f, g.z(3, 7)), f(3, 7));
  EXPECT_THROW(interpolate(f, cplx(1.2, 1.5)), InvalidArgument);
}

TEST(Csv, HeaderAndRowOrder) {
  const GridSpec g{-1.0, 1.0, 0.0, 1.0, 7, 4, 0.2};
  const Field f = Field::sample(g, [](double x, double y) { return cplx(x, y); });
  std::ostringstream out;
  write_csv(out, f);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,re,im");
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  EXPECT_EQ(rows, 4 * 6);  // the column x = 0 is excluded
  EXPECT_EQ(first.substr(0, 3), "-1,");
}

TEST(Field, NonFiniteValuesAreReported) {
  const GridSpec g = unit_grid(6);
  const Field f = Field::sample(g, [](double x, double) { return cplx(x == 0.0 ? NAN : 1.0); });
  EXPECT_THROW(f.check_finite("f"), InvalidArgument);
}
