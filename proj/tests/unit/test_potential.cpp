#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "qcurv/calculus.hpp"
#include "qcurv/density.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/functionals.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/potential.hpp"
#include "qcurv/profile.hpp"

using namespace qcurv;

namespace {

// Independent oracle: u(r) = (2/((n-1)!|S^n|)) int f(s) (log s - F_n(r, s)) dV(s),
// with F_n from angular quadrature (not the series the library uses) and a
// plain composite Gauss rule on the support.
double potential_oracle(const CurvatureDensity& f, double r) {
  const int n = f.dimension();
  const double lo = f.support().inner;
  const double hi = f.support().outer;
  const PanelGrid grid = geometric_interval(std::max(lo, 1e-3), hi, 1.05);
  const double integral = integrate(
      [&](double s) {
        const double kernel = r > 0.0 ? angular_log_avg(n, r, s) : std::log(s);
        return f(s) * (std::log(s) - kernel) * sphere_area(n - 1) * std::pow(s, n - 1);
      },
      grid, gauss_legendre(20));
  return log_potential_factor(n) * integral;
}

}  // namespace

TEST(Potential, MatchesBruteForceKernelIntegral) {
  for (int n : {4, 6}) {
    const CurvatureDensity f = shell_density(n, 0.5, 0.5, 2.0);
    const RadialProfile u = potential_from_density(f);
    for (double r : {0.0, 0.3, 1.0, 1.7, 5.0, 40.0}) EXPECT_NEAR(u(r), potential_oracle(f, r), 1e-9) << n << " " << r;
  }
}

TEST(Potential, IsLinearInTheDensity) {
  const CurvatureDensity a = shell_density(4, 0.3, 0.5, 1.5);
  const CurvatureDensity b = bump_density(4, 0.4, 2.0);
  const RadialFunction sum(
      [a, b](double r, int k) { return 2.0 * a.derivative(r, k) - b.derivative(r, k); },
      std::min(a.derivative_order(), b.derivative_order()), "2a - b");
  const CurvatureDensity c = make_density(4, sum, DensitySupport{0.0, 2.0});
  const RadialProfile ua = potential_from_density(a);
  const RadialProfile ub = potential_from_density(b);
  const RadialProfile uc = potential_from_density(c);
  for (double r : {0.0, 0.6, 1.0, 3.0, 100.0}) {
    EXPECT_NEAR(uc(r), 2.0 * ua(r) - ub(r), 1e-11);
    EXPECT_NEAR(uc.eval(r, 1), 2.0 * ua.eval(r, 1) - ub.eval(r, 1), 1e-10);
  }
}

TEST(Potential, InvertsThePolyharmonicOperator) {
  // (-Delta)^{n/2} P[f] = f
  for (int n : {4, 6}) {
    const CurvatureDensity f = bump_density(n, 0.5, 2.5);
    const RadialProfile u = potential_from_density(f);
    for (double r : {0.0, 0.5, 1.2, 2.0, 3.0}) {
      EXPECT_NEAR(polyharmonic(u, r, n / 2), f(r), 1e-8 * (1.0 + std::abs(f(r)))) << n << " " << r;
    }
  }
}

TEST(Potential, FarFieldIsMinusAlpha0LogR) {
  const CurvatureDensity f = bump_density(4, 0.5, 2.5);
  const RadialProfile u = potential_from_density(f);
  const double c1 = u(100.0) + 0.5 * std::log(100.0);
  const double c2 = u(1e4) + 0.5 * std::log(1e4);
  EXPECT_NEAR(c1, c2, 1e-3);
  EXPECT_NEAR(1e4 * u.eval(1e4, 1), -0.5, 1e-6);
}

TEST(Potential, RoundTripReproducesSphereUpToLog2) {
  const RadialProfile s = sphere_profile(4, 1.0);
  const RadialProfile u = potential_from_density(density_from_profile(s));
  for (double r : {0.0, 1.0, 10.0, 50.0}) EXPECT_NEAR(s(r) - u(r), std::log(2.0), 1e-7);
}

TEST(Potential, ConstantShiftsValueOnly) {
  PotentialConfig cfg;
  cfg.constant = 1.5;
  const CurvatureDensity f = bump_density(4, 0.5, 2.5);
  const RadialProfile u = potential_from_density(f);
  const RadialProfile v = potential_from_density(f, cfg);
  EXPECT_NEAR(v(1.0) - u(1.0), 1.5, 1e-14);
  EXPECT_NEAR(v.eval(1.0, 1), u.eval(1.0, 1), 1e-14);
  ASSERT_NE(as_potential(v), nullptr);
  EXPECT_NEAR(as_potential(v)->alpha0(), 0.5, 1e-12);
  EXPECT_EQ(as_potential(sphere_profile(4, 1.0)), nullptr);
}

TEST(Potential, NonCompactDensityIsTruncated) {
  const RadialProfile u = potential_from_density(density_from_profile(sphere_profile(4, 1.0)));
  EXPECT_TRUE(std::isfinite(as_potential(u)->truncation_radius()));
  EXPECT_THROW(static_cast<void>(u(1e7)), DomainError);
}

TEST(Picard, RoundSphereIsAFixedPointForConstantQ) {
  PotentialConfig cfg;
  cfg.constant = std::log(2.0);
  const PicardResult res = picard_solve(4, constant_function(6.0), sphere_profile(4, 1.0), cfg);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.state.iterations, 0);
  EXPECT_LT(res.state.residual, 1e-10);
}

TEST(Picard, SmallGaussianQConverges) {
  PicardOptions opts;
  opts.tolerance = 1e-10;
  const PicardResult res = picard_solve(4, gaussian_function(0.1, 1.0), constant_profile(4, 0.0), {}, opts);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.state.residual, 1e-10);
  ASSERT_FALSE(res.residual_history.empty());
  EXPECT_LT(res.residual_history.back(), res.residual_history.front());
  // the solution satisfies (-Delta)^2 u = Q e^{4u}
  for (double r : {0.0, 0.5, 1.5}) {
    const double rhs = 0.1 * std::exp(-r * r) * std::exp(4.0 * res.solution(r));
    EXPECT_NEAR(polyharmonic(res.solution, r, 2), rhs, 1e-8);
  }
}

TEST(Picard, RejectsBadArguments) {
  PicardOptions opts;
  opts.theta = 0.0;
  EXPECT_THROW(picard_solve(4, constant_function(1.0), constant_profile(4, 0.0), {}, opts), DomainError);
  EXPECT_THROW(picard_solve(4, constant_function(1.0), constant_profile(6, 0.0)), DomainError);
}
