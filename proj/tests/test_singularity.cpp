#include <gtest/gtest.h>

#include <cmath>

#include "galab/error.hpp"
#include "galab/singularity.hpp"

using namespace galab;

namespace {

constexpr cplx I{0.0, 1.0};

const GridSpec kStrip{-0.25, 0.25, 1.0, 2.0, 641, 81, 0.004};

FunctionOnInterval constant(cplx c) { return FunctionOnInterval::constant(1.0, 2.0, c); }
FunctionOnInterval poly(std::vector<cplx> c) { return FunctionOnInterval::polynomial(1.0, 2.0, std::move(c)); }

PoleProfile canonical() { return {constant(0.0), {constant(-0.5)}, 1}; }

// phi = 0.3 y^2: Im r_1 = 0.3.
PoleProfile generic() {
  return {poly({0.0, 0.0, 0.3}), {constant(-0.5), constant(0.2 * I), constant(cplx(0.5, 0.3))}, 1};
}

}  // namespace

TEST(SingularU, CanonicalCoefficient) {
  const SingularCoefficient u = synthesize_singular_u(canonical(), kStrip);
  const Field expect = Field::sample(kStrip, [](double x, double) { return cplx(-0.5 / x); });
  EXPECT_LT(max_abs_diff(u.u, expect), 1e-13);
  EXPECT_LT(max_norm(u.model.smooth_remainder), 1e-15);
  EXPECT_EQ(u.u.role(), FieldRole::coefficient);
}

TEST(SingularU, GenericCoefficientMatchesProfile) {
  const PoleProfile p = generic();
  const SingularCoefficient u = synthesize_singular_u(p, kStrip);
  const Field expect = Field::sample(kStrip, [&](double x, double y) { return p.value(x, y); });
  EXPECT_LT(max_rel_diff(u.u, expect), 1e-14);
  const Field model = u.model.to_field();
  EXPECT_LT(max_rel_diff(model, expect), 1e-14);
}

TEST(SingularU, RejectsUncertifiedProfilesAndForeignRows) {
  PoleProfile bad = canonical();
  bad.r.push_back(constant(0.1));
  EXPECT_THROW(synthesize_singular_u(bad, kStrip), MeromorphicViolation);
  GridSpec wide = kStrip;
  wide.y_max = 2.5;
  EXPECT_THROW(synthesize_singular_u(canonical(), wide), InvalidArgument);
}

TEST(SingularSeeds, CanonicalSeedsAreOneOverX) {
  const SingularSeeds s = synthesize_seeds(canonical(), constant(1.0), constant(1.0), 8, kStrip);
  const Field f = Field::sample(kStrip, [](double x, double) { return cplx(1.0 / x); });
  const Field fp = Field::sample(kStrip, [](double x, double) { return -I / x; });
  EXPECT_LT(max_rel_diff(s.f.to_field(), f), 1e-14);
  EXPECT_LT(max_rel_diff(s.f_plus.to_field(), fp), 1e-14);
  EXPECT_LE(s.beta0_deviation, 1e-14);
}

TEST(SingularSeeds, SeedsSolveTheirEquationsAwayFromThePole) {
  // The grid residual is an independent oracle; near the pole it is dominated
  // by stencil error, so it must fall at the stencil order.
  const PoleProfile p = generic();
  auto res = [&](int n) {
    const GridSpec g{-0.3, 0.3, 1.0, 2.0, n, n / 4 + 1, 0.1};
    const SingularCoefficient u = synthesize_singular_u(p, g);
    const SingularSeeds s = synthesize_seeds(p, poly({1.0, 0.2}), constant(2.0), 12, g);
    const Field f = s.f.to_field();
    const Field fp = s.f_plus.to_field();
    return std::pair{residual(u.u, f, EquationKind::direct) / max_norm(f),
                     residual(u.u, fp, EquationKind::conjugate) / max_norm(fp)};
  };
  const auto [d1, c1] = res(241);
  const auto [d2, c2] = res(481);
  EXPECT_GT(std::log2(d1 / d2), 3.5);
  EXPECT_GT(std::log2(c1 / c2), 3.5);
  EXPECT_LT(d2, 1e-5);
  EXPECT_LT(c2, 1e-5);
}

TEST(SingularSeeds, LeadingTermsMustBePositive) {
  EXPECT_THROW(synthesize_seeds(canonical(), constant(-1.0), constant(1.0), 4, kStrip), PositivityError);
  EXPECT_THROW(synthesize_seeds(canonical(), constant(1.0), constant(0.0), 4, kStrip), PositivityError);
}

TEST(LaurentFit, RecoversSyntheticCoefficients) {
  const GridSpec g{-0.25, 0.25, 0.0, 1.0, 401, 5, 0.004};
  const Field f = Field::sample(g, [](double x, double y) {
    return cplx(1e-3, y) / (x * x) + cplx(-0.2, 0.0) / x + cplx(1.0, y) + 0.5 * x - 3.0 * x * x * x;
  });
  const LaurentFit fit = fit_laurent_profile(f, {-2, -1, 0, 1, 2, 3}, 0.05, 0.2);
  ASSERT_EQ(fit.y.size(), 5u);
  for (int r = 0; r < 5; ++r) {
    const double y = fit.y[r];
    EXPECT_LT(std::abs(fit.at(r, -2) - cplx(1e-3, y)), 1e-12);
    EXPECT_LT(std::abs(fit.at(r, -1) + 0.2), 1e-12);
    EXPECT_LT(std::abs(fit.at(r, 0) - cplx(1.0, y)), 1e-11);
    EXPECT_LT(std::abs(fit.at(r, 3) + 3.0), 1e-9);
  }
  EXPECT_EQ(fit.at(0, 7), cplx(0.0));
  EXPECT_NEAR(fit.max_abs(-1), 0.2, 1e-12);
}

TEST(LaurentFit, NeedsSamplesOnBothSides) {
  const GridSpec g{-0.25, 0.25, 0.0, 1.0, 41, 5, 0.004};
  const Field f(g);
  EXPECT_THROW(fit_laurent_profile(f, 0.01, 0.03), FitError);
  const GridSpec one_sided{0.01, 0.25, 0.0, 1.0, 101, 5, {}};
  EXPECT_THROW(fit_laurent_profile(Field(one_sided), 0.05, 0.2), FitError);
}

TEST(RemovePole, CanonicalCoefficientVanishes) {
  const SingularCoefficient u = synthesize_singular_u(canonical(), kStrip);
  const SingularSeeds s = synthesize_seeds(canonical(), constant(1.0), constant(1.0), 8, kStrip);
  const RemovePoleReport rep = remove_pole(u, s.f, s.f_plus, 0.0);
  EXPECT_LE(rep.max_abs_u_tilde, 1e-10);
  EXPECT_TRUE(rep.passed());
  ASSERT_EQ(rep.delta_ladder.size(), 4u);
  EXPECT_DOUBLE_EQ(rep.delta_ladder.front(), 0.125);
  EXPECT_DOUBLE_EQ(rep.delta_ladder.back(), 0.25 / 16.0);
}

TEST(RemovePole, GenericProfileCancels) {
  const PoleProfile p = generic();
  const SingularCoefficient u = synthesize_singular_u(p, kStrip);
  const SingularSeeds s = synthesize_seeds(p, constant(1.0), constant(1.0), 8, kStrip);
  for (cplx c : {cplx(0.0), cplx(0.0, 0.7)}) {
    const RemovePoleReport rep = remove_pole(u, s.f, s.f_plus, c);
    EXPECT_TRUE(rep.bounded) << rep.verdict;
    EXPECT_TRUE(rep.cancelled) << rep.verdict;
    for (std::size_t k = 0; k < rep.delta_ladder.size(); ++k) {
      EXPECT_LE(std::max(rep.c_minus1[k], rep.c_minus2[k]), 1e-6 * rep.c0_min[k] + 1e-8);
    }
  }
}

TEST(RemovePole, SabotagedSeedIsDetected) {
  const PoleProfile p = generic();
  const SingularCoefficient u = synthesize_singular_u(p, kStrip);
  for (cplx shift : {cplx(1.0), I}) {
    SingularSeeds s = synthesize_seeds(p, constant(1.0), constant(1.0), 8, kStrip);
    s.series.beta[s.series.n_prime] += shift;
    s.f = model_from_series(s.series, kStrip);
    const RemovePoleReport rep = remove_pole(u, s.f, s.f_plus, 0.0);
    EXPECT_FALSE(rep.passed()) << "shift " << shift;
  }
}

TEST(RemovePole, NeedsBothSidesOfThePole) {
  const GridSpec right{0.01, 0.25, 1.0, 2.0, 101, 11, {}};
  const SingularCoefficient u = synthesize_singular_u(canonical(), right);
  const SingularSeeds s = synthesize_seeds(canonical(), constant(1.0), constant(1.0), 4, right);
  EXPECT_THROW(remove_pole(u, s.f, s.f_plus, 0.0), InvalidArgument);
}
