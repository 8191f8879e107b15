#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "qcurv/quadrature.hpp"

using namespace qcurv;

TEST(GaussLegendre, WeightsSumToTwo) {
  for (int order : {1, 2, 5, 20, 32}) {
    const GaussRule& rule = gauss_legendre(order);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    EXPECT_NEAR(s, 2.0, 1e-14) << order;
  }
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2mMinus1) {
  for (int order : {3, 8, 20}) {
    const GaussRule& rule = gauss_legendre(order);
    for (int d = 0; d <= 2 * order - 1; ++d) {
      const double exact = (d % 2 == 0) ? 2.0 / (d + 1) : 0.0;
      const double got = integrate([d](double x) { return std::pow(x, d); }, -1.0, 1.0, rule);
      EXPECT_NEAR(got, exact, 1e-13) << "order " << order << " degree " << d;
    }
  }
}

TEST(GaussLegendre, NodesSymmetricAndSorted) {
  const GaussRule& rule = gauss_legendre(11);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    EXPECT_NEAR(rule.nodes[i], -rule.nodes[rule.size() - 1 - i], 1e-15);
    if (i > 0) EXPECT_LT(rule.nodes[i - 1], rule.nodes[i]);
  }
}

TEST(Integrate, MapsInterval) {
  const double got = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, gauss_legendre(20));
  EXPECT_NEAR(got, 2.0, 1e-14);
}

TEST(Barycentric, ReproducesPolynomialsOnNodes) {
  const GaussRule& rule = gauss_legendre(8);
  std::vector<double> values;
  auto p = [](double x) { return 3.0 * x * x * x - x + 0.5; };
  for (double x : rule.nodes) values.push_back(p(x));
  for (double x : {-0.9, -0.3, 0.0, 0.41, 0.99}) EXPECT_NEAR(barycentric_interpolate(rule, values, x), p(x), 1e-13);
  EXPECT_NEAR(barycentric_interpolate(rule, values, rule.nodes[3]), values[3], 1e-15);
}

TEST(PanelGrid, GeometricPanelsCoverRangeAndKeepExtraBreaks) {
  const PanelGrid grid = geometric_panels(0.01, 1.5, 100.0, std::vector<double>{2.5});
  EXPECT_DOUBLE_EQ(grid.front(), 0.0);
  EXPECT_DOUBLE_EQ(grid.back(), 100.0);
  bool found = false;
  for (double b : grid.breaks()) found = found || std::abs(b - 2.5) < 1e-14;
  EXPECT_TRUE(found);
  for (std::size_t i = 0; i < grid.panels(); ++i) EXPECT_LT(grid.lower(i), grid.upper(i));
}

TEST(PanelGrid, LocateFindsContainingPanel) {
  const PanelGrid grid = geometric_interval(1.0, 50.0, 1.3);
  for (double r : {1.0, 1.7, 10.0, 49.9, 50.0}) {
    const std::size_t i = grid.locate(r);
    EXPECT_LE(grid.lower(i), r);
    EXPECT_GE(grid.upper(i), r);
  }
}

TEST(PanelGrid, IntegratesDecayingFunctionOnGeometricGrid) {
  const PanelGrid grid = geometric_panels(1.0 / 64.0, 1.2, 60.0);
  const double got = integrate([](double r) { return std::exp(-r); }, grid, gauss_legendre(20));
  EXPECT_NEAR(got, 1.0 - std::exp(-60.0), 1e-13);
}
