#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qcurv/errors.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/oracles.hpp"

using namespace qcurv;

namespace {

// Brute-force sphere average of g(|x - s e1|) over |x| = r: composite Simpson
// in the polar angle with weight sin^{n-2}, many points, no panel grading.
template <class G>
double brute_average(int n, double r, double s, G g, int points = 200001) {
  const double h = M_PI / (points - 1);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < points; ++i) {
    const double th = i * h;
    const double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    const double weight = w * std::pow(std::sin(th), n - 2);
    const double d = std::sqrt(r * r + s * s - 2.0 * r * s * std::cos(th));
    num += weight * g(d);
    den += weight;
  }
  return num / den;
}

}  // namespace

TEST(PolarAverage, ConstantsAverageExactly) {
  for (int n : {4, 6, 10}) {
    for (double delta : {1.0, 1e-3, 1e-9}) EXPECT_NEAR(polar_average(n, [](double) { return 3.5; }, delta), 3.5, 1e-14);
  }
}

TEST(PowerKernel, NewtonianMeanValueFormula) {
  for (int n : {4, 6, 8}) {
    for (double r : {0.1, 0.9, 1.0, 1.1, 7.0}) {
      for (double s : {0.2, 1.0, 3.0}) {
        EXPECT_NEAR(angular_pow_avg(n, r, s, n - 2.0), std::pow(std::max(r, s), 2.0 - n), 1e-10);
      }
    }
  }
}

TEST(PowerKernel, AgreesWithBruteForceAwayFromDiagonal) {
  for (int n : {4, 6}) {
    for (double k : {1.0, 1.7, 3.0}) {
      if (k >= n - 1) continue;
      const double r = 2.0, s = 0.5;
      const double brute = brute_average(n, r, s, [k](double d) { return std::pow(d, -k); });
      EXPECT_NEAR(angular_pow_avg(n, r, s, k), brute, 1e-10);
    }
  }
}

TEST(PowerKernel, ZeroSourceAndErrors) {
  EXPECT_DOUBLE_EQ(angular_pow_avg(4, 2.0, 0.0, 1.0), 0.5);
  EXPECT_THROW(angular_pow_avg(4, 1.0, 1.0, 3.0), DomainError);
  EXPECT_THROW(angular_pow_avg(4, 1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(angular_pow_avg(4, 0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(angular_log_avg(4, 1.0, -1.0), DomainError);
}

TEST(LogKernel, SymmetricInItsRadii) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> lr(std::log(0.05), std::log(20.0));
  for (int i = 0; i < 40; ++i) {
    const double r = std::exp(lr(rng));
    const double s = std::exp(lr(rng));
    for (int n : {4, 6}) EXPECT_NEAR(angular_log_avg(n, r, s), angular_log_avg(n, s, r), 1e-12);
  }
}

TEST(LogKernel, AgreesWithCosineSeriesOracle) {
  for (int n : {4, 6, 8}) {
    for (double t : {0.1, 0.5, 0.9}) {
      EXPECT_NEAR(angular_log_avg(n, 2.0, 2.0 * t), fourier_log_avg(n, 2.0, 2.0 * t), 1e-12) << n << " " << t;
    }
  }
}

TEST(LogKernel, AgreesWithMonteCarloOracleInSixDimensions) {
  const MonteCarloEstimate mc = monte_carlo_log_avg(6, 1.5, 1.0, 400000, 11);
  EXPECT_LT(std::abs(mc.mean - angular_log_avg(6, 1.5, 1.0)), 4.0 * mc.std_error);
}

TEST(LogKernel, ExactSeriesMatchesQuadrature) {
  for (int n : {4, 6, 8, 10}) {
    for (double r : {0.1, 1.0, 1.0001, 3.0}) {
      for (double s : {0.3, 1.0, 8.0}) {
        EXPECT_NEAR(log_kernel_series(n, r, s), angular_log_avg(n, r, s), 1e-12) << n << " " << r << " " << s;
      }
    }
  }
}

TEST(LogKernel, FourDimensionalCoefficientIsOneQuarter) {
  const auto c = log_kernel_coefficients(4);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0], Rational(1, 4));
  const auto c6 = log_kernel_coefficients(6);
  ASSERT_EQ(c6.size(), 2u);
  // t^2/3 - t^4/24
  EXPECT_EQ(c6[0], Rational(1, 3));
  EXPECT_EQ(c6[1], Rational(-1, 24));
}

TEST(LogKernel, DiagonalAndZeroSource) {
  EXPECT_NEAR(angular_log_avg(4, 1.0, 1.0), 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(angular_log_avg(4, 3.0, 0.0), std::log(3.0));
}

TEST(OffCenterAverage, MeanOfSquaredDistance) {
  // avg over |y - c e1| = r of |y|^2 is c^2 + r^2
  for (int n : {4, 6}) {
    for (double c : {0.5, 1.0, 4.0}) {
      for (double r : {0.2, 1.0, 4.0, 10.0}) {
        EXPECT_NEAR(offcenter_radial_avg(n, [](double y) { return y * y; }, c, r), c * c + r * r,
                    1e-11 * (c * c + r * r));
      }
    }
  }
}

TEST(OffCenterAverage, HarmonicMeanValueProperty) {
  // |y|^{2-n} is harmonic away from 0: its mean over a sphere not enclosing 0 is the center value.
  const int n = 4;
  const double c = 3.0;
  for (double r : {0.5, 2.0, 2.9}) {
    EXPECT_NEAR(offcenter_radial_avg(n, [](double y) { return 1.0 / (y * y); }, c, r), 1.0 / (c * c), 1e-10);
  }
  // and equals |y|^{2-n} at radius r for spheres enclosing 0
  EXPECT_NEAR(offcenter_radial_avg(n, [](double y) { return 1.0 / (y * y); }, c, 5.0), 1.0 / 25.0, 1e-10);
}

TEST(KernelTable, SymmetricWithSmallErrorBounds) {
  const auto table = kernel_table(4, KernelKind::Log, 0.0, 0.1, 10.0, 8);
  ASSERT_EQ(table->size(), 8u);
  for (std::size_t i = 0; i < table->size(); ++i) {
    for (std::size_t j = 0; j < table->size(); ++j) {
      EXPECT_EQ(table->value(i, j), table->value(j, i));
      EXPECT_LT(table->error_bound(i, j), 1e-12);
      const double r = table->radii()[i], s = table->radii()[j];
      const double b = std::max(r, s), a = std::min(r, s);
      EXPECT_NEAR(table->value(i, j), std::log(b) + a * a / (4 * b * b), 1e-12);
    }
  }
  EXPECT_EQ(table, kernel_table(4, KernelKind::Log, 0.0, 0.1, 10.0, 8));
}

TEST(LogGrid, EndpointsAndSpacing) {
  const auto g = log_grid(0.1, 10.0, 5);
  EXPECT_DOUBLE_EQ(g.front(), 0.1);
  EXPECT_DOUBLE_EQ(g.back(), 10.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) EXPECT_NEAR(g[i] * g[i], g[i - 1] * g[i + 1], 1e-12);
}
