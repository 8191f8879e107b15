#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "qcurv/constants.hpp"
#include "qcurv/errors.hpp"

using namespace qcurv;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(SphereArea, LowDimensionsMatchElementaryFormulas) {
  EXPECT_NEAR(sphere_area(0), 2.0, 1e-15);
  EXPECT_NEAR(sphere_area(1), 2.0 * pi, 1e-14);
  EXPECT_NEAR(sphere_area(2), 4.0 * pi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 2.0 * pi * pi, 1e-13);
  EXPECT_NEAR(sphere_area(4), 8.0 * pi * pi / 3.0, 1e-13);
}

TEST(SphereArea, SatisfiesTwoStepRecurrence) {
  for (int k = 2; k <= kMaxDimension; ++k) {
    const double rec = 2.0 * pi / (k - 1) * sphere_area(k - 2);
    EXPECT_NEAR(sphere_area(k) / rec, 1.0, 1e-13) << "k=" << k;
  }
}

TEST(SphereArea, AgreesWithGammaFormula) {
  for (int k = 0; k <= 20; ++k) {
    const double gamma = 2.0 * std::pow(pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
    EXPECT_NEAR(sphere_area(k) / gamma, 1.0, 1e-13);
  }
}

TEST(SphereArea, RejectsOutOfRange) {
  EXPECT_THROW(sphere_area(-1), DomainError);
  EXPECT_THROW(sphere_area(kMaxDimension + 1), DomainError);
}

TEST(Factorial, SmallValues) {
  EXPECT_EQ(factorial(0), 1.0);
  EXPECT_EQ(factorial(3), 6.0);
  EXPECT_EQ(factorial(5), 120.0);
}

TEST(UnitBall, VolumeIsAreaOverDimension) {
  EXPECT_NEAR(unit_ball_volume(2), pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(3), 4.0 * pi / 3.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(4), pi * pi / 2.0, 1e-14);
}

TEST(TotalCurvature, FourSphere) {
  EXPECT_NEAR(sphere_total_curvature(4), 16.0 * pi * pi, 1e-12);
  EXPECT_NEAR(log_potential_factor(4), 1.0 / (8.0 * pi * pi), 1e-16);
}

TEST(EvenDimension, Validation) {
  EXPECT_NO_THROW(require_even_dimension(4));
  EXPECT_NO_THROW(require_even_dimension(6));
  EXPECT_THROW(require_even_dimension(2), DomainError);
  EXPECT_THROW(require_even_dimension(5), DomainError);
  EXPECT_THROW(require_even_dimension(kMaxDimension + 2), DomainError);
}
