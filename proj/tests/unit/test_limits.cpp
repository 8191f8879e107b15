#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "qcurv/errors.hpp"
#include "qcurv/limits.hpp"

using namespace qcurv;

TEST(GeometricSchedule, DoublesUntilEnd) {
  const auto s = geometric_schedule(125.0, 2.0, 1000.0);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s.back(), 1000.0);
  EXPECT_THROW(geometric_schedule(0.0, 2.0, 10.0), DomainError);
  EXPECT_THROW(geometric_schedule(1.0, 1.0, 10.0), DomainError);
}

TEST(Extrapolate, ExactForQuadraticInInverseRadius) {
  const std::vector<double> r{125, 250, 500, 1000};
  std::vector<double> v;
  for (double x : r) v.push_back(0.75 - 3.0 / x + 40.0 / (x * x));
  const LimitEstimate e = extrapolate_limit(r, v);
  EXPECT_NEAR(e.limit, 0.75, 1e-12);
  EXPECT_TRUE(e.converged);
  EXPECT_NEAR(e.order, 1.0, 0.1);
}

TEST(Extrapolate, InverseLogModel) {
  const std::vector<double> r{125, 250, 500, 1000};
  std::vector<double> v;
  for (double x : r) v.push_back(-0.5 + 0.3 / std::log(x));
  const LimitEstimate e = extrapolate_limit(r, v, LimitModel::InverseLogRadius);
  EXPECT_NEAR(e.limit, -0.5, 1e-12);
  EXPECT_EQ(e.model, LimitModel::InverseLogRadius);
}

TEST(Extrapolate, AutomaticPicksModelFromDifferences) {
  const std::vector<double> r{125, 250, 500, 1000};
  std::vector<double> alg, slow;
  for (double x : r) {
    alg.push_back(1.0 + 1.0 / x);
    slow.push_back(1.0 + 1.0 / std::log(x));
  }
  EXPECT_EQ(extrapolate_limit(r, alg, LimitModel::Automatic).model, LimitModel::InverseRadius);
  EXPECT_EQ(extrapolate_limit(r, slow, LimitModel::Automatic).model, LimitModel::InverseLogRadius);
}

TEST(Extrapolate, ErrorNeverClaimsBetterThanQuarterOfLastStep) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> coef(0.0, 1.0);
  const std::vector<double> r{10, 20, 40, 80, 160};
  for (int trial = 0; trial < 200; ++trial) {
    const double l = coef(rng), a = coef(rng), b = 10 * coef(rng), c = coef(rng);
    std::vector<double> v;
    for (double x : r) v.push_back(l + a / x + b / (x * x) + c * std::log(x) / (x * x * x));
    for (LimitModel m : {LimitModel::InverseRadius, LimitModel::InverseLogRadius, LimitModel::Automatic}) {
      const LimitEstimate e = extrapolate_limit(r, v, m);
      EXPECT_GE(e.error, std::abs(e.last() - e.limit) / 4.0);
    }
  }
}

TEST(Extrapolate, NonFiniteValuesPropagate) {
  const LimitEstimate e = extrapolate_limit({1, 2, 3}, {1.0, -INFINITY, 2.0});
  EXPECT_TRUE(std::isinf(e.error));
  EXPECT_THROW(extrapolate_limit({1, 2}, {1.0}), DomainError);
}

TEST(Extrapolate, GrowingSequenceIsNotConverged) {
  const std::vector<double> r{125, 250, 500, 1000};
  std::vector<double> v;
  for (double x : r) v.push_back(-x * x);
  EXPECT_FALSE(extrapolate_limit(r, v).converged);
}

TEST(EstimateLimit, SamplesFunctionOnSchedule) {
  const LimitEstimate e = estimate_limit([](double x) { return 2.0 + 1.0 / x; }, {100, 200, 400, 800});
  EXPECT_EQ(e.values.size(), 4u);
  EXPECT_NEAR(e.limit, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(e.last(), 2.0 + 1.0 / 800);
}
