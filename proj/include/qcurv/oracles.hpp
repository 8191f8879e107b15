#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "qcurv/errors.hpp"

namespace qcurv {

/// Sample mean with its standard error.
struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Brute-force average of log|x - y| over |x| = r in R^n, y = s e_1, with x
/// drawn uniformly from the sphere (normalised Gaussian vectors).
inline MonteCarloEstimate monte_carlo_log_avg(int n, double r, double s, std::uint64_t samples,
                                              std::uint64_t seed) {
  if (n < 2 || samples < 2) throw DomainError("monte_carlo_log_avg: need n >= 2 and >= 2 samples");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(n);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 1; i <= samples; ++i) {
    double norm2 = 0.0;
    for (double& v : x) {
      v = normal(rng);
      norm2 += v * v;
    }
    const double scale = r / std::sqrt(norm2);
    double d2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double diff = x[j] * scale - (j == 0 ? s : 0.0);
      d2 += diff * diff;
    }
    const double v = 0.5 * std::log(d2);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (v - mean);
  }
  MonteCarloEstimate out;
  out.mean = mean;
  out.samples = samples;
  out.std_error = std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return out;
}

/// Average of log|x - y| from the cosine series
///   log(1 - 2t cos th + t^2) = -2 sum_m t^m cos(m th) / m,
/// with each angular moment avg cos(m th) taken by the trapezoid rule, which is
/// exact for these trigonometric polynomials.
inline double fourier_log_avg(int n, double r, double s, int terms = 200) {
  if (!(r > 0.0) || !(s >= 0.0)) throw DomainError("fourier_log_avg: need r > 0, s >= 0");
  const double big = std::max(r, s);
  const double t = std::min(r, s) / big;
  const int points = 4 * (terms + n) + 1;
  const double h = std::numbers::pi / (points - 1);
  auto weight = [&](int i) { return (i == 0 || i == points - 1) ? 0.5 : 1.0; };
  double z = 0.0;
  for (int i = 0; i < points; ++i) z += weight(i) * std::pow(std::sin(i * h), n - 2);
  double series = 0.0;
  double tm = 1.0;
  for (int m = 1; m <= terms; ++m) {
    tm *= t;
    if (tm < 1e-300) break;
    double moment = 0.0;
    for (int i = 0; i < points; ++i) moment += weight(i) * std::cos(m * i * h) * std::pow(std::sin(i * h), n - 2);
    series += tm / m * (moment / z);
  }
  return std::log(big) - series;
}

}  // namespace qcurv
