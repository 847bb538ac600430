#include <gtest/gtest.h>

#include <cmath>

#include "galab/error.hpp"
#include "galab/function_on_interval.hpp"

using namespace galab;

namespace {
constexpr cplx I{0.0, 1.0};
}

TEST(FunctionOnInterval, PolynomialEvaluationAndDerivative) {
  // p(y) = 1 + 2i y - 3 y^3
  const auto p = FunctionOnInterval::polynomial(0.0, 2.0, {1.0, 2.0 * I, 0.0, -3.0});
  EXPECT_EQ(p.degree(), 3);
  EXPECT_LT(std::abs(p(1.5) - (1.0 + 3.0 * I - 3.0 * 3.375)), 1e-14);
  const auto dp = p.derivative();
  EXPECT_EQ(dp.degree(), 2);
  EXPECT_LT(std::abs(dp(1.5) - (2.0 * I - 9.0 * 2.25)), 1e-14);
  EXPECT_EQ(dp.derivative().derivative().derivative().degree(), -1);
}

TEST(FunctionOnInterval, PolynomialAlgebraIsExact) {
  const auto a = FunctionOnInterval::polynomial(0.0, 1.0, {1.0, I});
  const auto b = FunctionOnInterval::polynomial(0.0, 1.0, {0.0, 0.0, 2.0});
  const auto prod = a * b;  // 2y^2 + 2i y^3
  ASSERT_EQ(prod.degree(), 3);
  EXPECT_EQ(prod.coefficients()[2], cplx(2.0));
  EXPECT_EQ(prod.coefficients()[3], 2.0 * I);
  const auto diff = prod - prod;
  EXPECT_EQ(diff.degree(), -1);
  EXPECT_EQ((a.conj())(0.5), std::conj(a(0.5)));
  EXPECT_EQ((a.imag_part())(0.5), cplx(0.5));
  EXPECT_EQ((a.real_part())(0.5), cplx(1.0));
}

TEST(FunctionOnInterval, DegreeLimit) {
  std::vector<cplx> c(FunctionOnInterval::kMaxDegree + 2, 1.0);
  EXPECT_THROW(FunctionOnInterval::polynomial(0.0, 1.0, c), DegreeError);
  const auto p = FunctionOnInterval::polynomial(0.0, 1.0, std::vector<cplx>(10, 1.0));
  EXPECT_THROW(p * p, DegreeError);
}

TEST(FunctionOnInterval, RejectsBadIntervalsAndShortSamples) {
  EXPECT_THROW(FunctionOnInterval::constant(1.0, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(FunctionOnInterval::sampled(0.0, 1.0, {1.0, 2.0, 3.0}), InvalidArgument);
}

TEST(FunctionOnInterval, SampledDerivativeIsFourthOrder) {
  auto err = [](int n) {
    const auto f = FunctionOnInterval::sample(0.0, 1.0, n, [](double y) { return std::exp(I * 3.0 * y); });
    const auto df = f.derivative();
    double e = 0.0;
    for (double y : df.nodes(0)) e = std::max(e, std::abs(df(y) - 3.0 * I * std::exp(I * 3.0 * y)));
    return e;
  };
  const double e1 = err(41);
  const double e2 = err(81);
  const double e3 = err(161);
  EXPECT_GT(std::log2(e1 / e2), 3.6);
  EXPECT_GT(std::log2(e2 / e3), 3.6);
}

TEST(FunctionOnInterval, SampledInterpolationBetweenNodes) {
  const auto f = FunctionOnInterval::sample(0.0, 1.0, 201, [](double y) { return cplx(std::sin(y), y * y); });
  EXPECT_LT(std::abs(f(0.123456) - cplx(std::sin(0.123456), 0.123456 * 0.123456)), 1e-9);
  EXPECT_EQ(f(0.5), cplx(std::sin(0.5), 0.25));
}

TEST(FunctionOnInterval, MixingModesResamples) {
  const auto s = FunctionOnInterval::sample(0.0, 1.0, 101, [](double y) { return cplx(std::cos(y)); });
  const auto p = FunctionOnInterval::polynomial(0.0, 1.0, {0.0, 1.0});
  const auto m = s * p;
  EXPECT_EQ(m.mode(), FunctionOnInterval::Mode::sampled);
  EXPECT_EQ(m.sample_count(), 101);
  EXPECT_LT(std::abs(m(0.3) - 0.3 * std::cos(0.3)), 1e-9);
}

TEST(FunctionOnInterval, IncompatibleOperandsAreRejected) {
  const auto a = FunctionOnInterval::constant(0.0, 1.0, 1.0);
  const auto b = FunctionOnInterval::constant(0.0, 2.0, 1.0);
  EXPECT_THROW(a + b, ShapeError);
  const auto s1 = FunctionOnInterval::sample(0.0, 1.0, 11, [](double) { return cplx(1.0); });
  const auto s2 = FunctionOnInterval::sample(0.0, 1.0, 21, [](double) { return cplx(1.0); });
  EXPECT_THROW(s1 * s2, ShapeError);
}

TEST(FunctionOnInterval, SupNormReportsLocation) {
  const auto f = FunctionOnInterval::polynomial(0.0, 1.0, {0.0, 0.0, 1.0});
  const auto nodes = f.nodes(11);
  double where = -1.0;
  EXPECT_DOUBLE_EQ(sup_norm(f, nodes, &where), 1.0);
  EXPECT_DOUBLE_EQ(where, 1.0);
}
