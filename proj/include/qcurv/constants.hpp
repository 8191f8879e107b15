#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "qcurv/errors.hpp"

namespace qcurv {

inline constexpr int kMaxDimension = 32;

namespace detail {

struct SphereTable {
  std::array<double, kMaxDimension + 1> area{};
  SphereTable() {
    // |S^k| = 2 pi^{(k+1)/2} / Gamma((k+1)/2)
    for (int k = 0; k <= kMaxDimension; ++k) {
      const double h = 0.5 * (k + 1);
      area[k] = 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
    }
  }
};

inline const SphereTable& sphere_table() {
  static const SphereTable table;
  return table;
}

}  // namespace detail

/// Volume of the unit k-sphere S^k in R^{k+1}.
inline double sphere_area(int k) {
  if (k < 0 || k > kMaxDimension) {
    throw DomainError("sphere_area: dimension out of range: " + std::to_string(k));
  }
  return detail::sphere_table().area[k];
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) { return sphere_area(n - 1) / n; }

/// (n-1)! |S^n|, the total Q-curvature of the round sphere.
inline double sphere_total_curvature(int n) { return factorial(n - 1) * sphere_area(n); }

/// Normalising factor 2 / ((n-1)! |S^n|) in front of the log potential.
inline double log_potential_factor(int n) { return 2.0 / sphere_total_curvature(n); }

inline void require_even_dimension(int n) {
  if (n < 4 || n % 2 != 0 || n > kMaxDimension) {
    throw DomainError("dimension must be an even integer >= 4, got " + std::to_string(n));
  }
}

}  // namespace qcurv
