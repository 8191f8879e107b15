#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qcurv/constants.hpp"
#include "qcurv/density.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/functionals.hpp"
#include "qcurv/profile.hpp"

using namespace qcurv;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(IntegrateRadial, GaussianInFourDimensions) {
  // int_{R^4} e^{-|x|^2} dx = pi^2
  DensitySupport sup;
  sup.decay_exponent = 1e9;
  const RadialIntegral got = integrate_radial(4, [](double r) { return std::exp(-r * r); }, sup);
  EXPECT_NEAR(got.value, pi * pi, 1e-12);
}

TEST(IntegrateRadial, PowerTailIsModelled) {
  // int_{R^4} (1 + r^2)^{-4} dx = 2 pi^2 * int_0^inf r^3 (1+r^2)^{-4} dr = 2 pi^2 / 12
  DensitySupport sup;
  sup.decay_exponent = 8.0;
  const RadialIntegral got = integrate_radial(4, [](double r) { return std::pow(1.0 + r * r, -4.0); }, sup);
  EXPECT_NEAR(got.value, pi * pi / 6.0, 1e-10);
  EXPECT_GT(got.tail, 0.0);
}

TEST(IntegrateRadial, SlowTailIsRejected) {
  DensitySupport sup;
  sup.decay_exponent = 3.0;
  EXPECT_THROW(integrate_radial(4, [](double r) { return 1.0 / (1.0 + r * r * r); }, sup), TailNotConvergent);
}

TEST(IntegrateRadial, BallOfRadiusR) {
  const DensitySupport ball{0.0, 2.0};
  const RadialIntegral got = integrate_radial(4, [](double) { return 1.0; }, ball);
  EXPECT_NEAR(got.value, unit_ball_volume(4) * 16.0, 1e-12);
}

TEST(Density, BumpAndShellCarryRequestedAlpha0) {
  for (double a : {0.25, 0.5, 1.0}) {
    EXPECT_NEAR(alpha0(bump_density(4, a, 2.5)), a, 1e-12);
    EXPECT_NEAR(alpha0(shell_density(4, a, 1.0, 3.0)), a, 1e-12);
    EXPECT_NEAR(alpha0(bump_density(6, a, 1.0)), a, 1e-12);
  }
}

TEST(Density, VanishesOutsideSupport) {
  const CurvatureDensity f = shell_density(4, 0.5, 1.0, 3.0);
  EXPECT_EQ(f(0.5), 0.0);
  EXPECT_EQ(f(3.5), 0.0);
  EXPECT_GT(f(2.0), 0.0);
  EXPECT_EQ(f.derivative(0.5, 1), 0.0);
  EXPECT_TRUE(f.support().compact());
}

TEST(Density, RestrictionDropsInnerMass) {
  const CurvatureDensity f = bump_density(4, 0.5, 2.5);
  const CurvatureDensity g = restrict_density(f, 1.0);
  EXPECT_LT(alpha0(g), alpha0(f));
  EXPECT_GT(alpha0(g), 0.0);
  EXPECT_EQ(g(0.5), 0.0);
  EXPECT_EQ(g(1.5), f(1.5));
}

TEST(Density, FromSphereProfileIsQTimesVolumeForm) {
  // Q = 6, e^{4u} = (2/(1+r^2))^4
  const CurvatureDensity f = density_from_profile(sphere_profile(4, 1.0));
  for (double r : {0.0, 0.5, 2.0, 10.0}) {
    EXPECT_NEAR(f(r), 6.0 * std::pow(2.0 / (1.0 + r * r), 4), 1e-10 * (1.0 + f(r)));
  }
  EXPECT_NEAR(alpha0(f), 2.0, 1e-8);
  EXPECT_NEAR(f.support().decay_exponent, 8.0, 0.01);
}

TEST(RadialFunction, GaussianDerivatives) {
  const RadialFunction g = gaussian_function(0.1, 1.0);
  for (double r : {0.0, 0.7, 2.0}) {
    EXPECT_NEAR(g(r), 0.1 * std::exp(-r * r), 1e-16);
    EXPECT_NEAR(g.derivative(r, 1), -0.2 * r * std::exp(-r * r), 1e-15);
    EXPECT_NEAR(g.derivative(r, 2), 0.1 * (4 * r * r - 2) * std::exp(-r * r), 1e-15);
  }
}

TEST(RadialFunction, TabulatedIsZeroOutsideRange) {
  const RadialFunction t = tabulated_function({0.0, 1.0, 2.0, 3.0}, {1.0, 2.0, 3.0, 4.0});
  EXPECT_NEAR(t(1.5), 2.5, 1e-14);
  EXPECT_EQ(t(5.0), 0.0);
  EXPECT_THROW(static_cast<void>(t.derivative(1.0, 2)), OrderTooHigh);
}

TEST(DecayExponent, SettlesBeforeRoundingNoise) {
  // r^-12 with relative noise growing like r^6, as in high-order closed-form densities
  auto noisy = [](double r) { return std::pow(r, -12.0) * (1.0 + 1e-16 * std::pow(r, 6) * std::sin(1e3 * r)); };
  EXPECT_NEAR(stable_decay_exponent(noisy, 10.0, 1e3), 12.0, 1e-3);
  EXPECT_NEAR(density_from_profile(sphere_profile(6, 0.5)).support().decay_exponent, 12.0, 0.05);
}

TEST(DecayExponent, PowerLaw) {
  EXPECT_NEAR(estimate_decay_exponent([](double r) { return std::pow(r, -5.5); }, 100.0), 5.5, 1e-12);
  EXPECT_TRUE(std::isinf(estimate_decay_exponent([](double) { return 0.0; }, 100.0)));
}
