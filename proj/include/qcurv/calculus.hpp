#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/jet.hpp"
#include "qcurv/profile.hpp"

namespace qcurv {

/// Delta^m on radial functions in R^n written as sum_i coef_i r^{-power_i} D^{order_i},
/// with D = d/dr. Built by composing Delta = D^2 + (n-1) r^{-1} D term by term:
///   Delta(r^{-p} D^k) = (p(p+1) - (n-1)p) r^{-p-2} D^k + ((n-1) - 2p) r^{-p-1} D^{k+1}
///                       + r^{-p} D^{k+2}.
struct RadialOperator {
  struct Term {
    std::int64_t coef;
    int power;
    int order;
  };
  int n = 0;
  int m = 0;
  std::vector<Term> terms;

  static RadialOperator laplacian_power(int n, int m) {
    RadialOperator op;
    op.n = n;
    op.m = m;
    std::map<std::pair<int, int>, std::int64_t> acc{{{0, 0}, 1}};  // (power, order) -> coef
    for (int step = 0; step < m; ++step) {
      std::map<std::pair<int, int>, std::int64_t> next;
      for (const auto& [key, c] : acc) {
        const auto [p, k] = key;
        next[{p + 2, k}] += c * (static_cast<std::int64_t>(p) * (p + 1) - static_cast<std::int64_t>(n - 1) * p);
        next[{p + 1, k + 1}] += c * ((n - 1) - 2 * static_cast<std::int64_t>(p));
        next[{p, k + 2}] += c;
      }
      acc.clear();
      for (const auto& [key, c] : next) {
        if (c != 0) acc[key] = c;
      }
    }
    for (const auto& [key, c] : acc) op.terms.push_back({c, key.first, key.second});
    return op;
  }

  /// Applies the operator at r > 0 given derivatives d[k] = u^{(k)}(r).
  [[nodiscard]] double apply(double r, const std::vector<double>& d) const {
    double sum = 0.0;
    for (const auto& t : terms) sum += static_cast<double>(t.coef) * std::pow(r, -t.power) * d[t.order];
    return sum;
  }
};

namespace detail {

inline const RadialOperator& cached_operator(int n, int m) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, RadialOperator> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({n, m});
  if (it == cache.end()) it = cache.emplace(std::pair{n, m}, RadialOperator::laplacian_power(n, m)).first;
  return it->second;
}

/// Delta^m u at r = 0 for smooth radial u: only the r^{2m} Taylor coefficient
/// survives, and Delta r^{2i} = 2i (2i + n - 2) r^{2i-2}.
inline double laplacian_power_at_origin(const RadialProfile& p, int m) {
  const int n = p.dimension();
  double factor = 1.0;
  for (int i = 1; i <= m; ++i) factor *= 2.0 * i * (2.0 * i + n - 2.0);
  return factor * p.eval(0.0, 2 * m) / factorial(2 * m);
}

}  // namespace detail

/// Delta u = u'' + (n-1) u'/r; n u''(0) at the origin.
inline double radial_laplacian(const RadialProfile& p, double r) {
  const int n = p.dimension();
  if (r == 0.0) return n * p.eval(0.0, 2);
  return p.eval(r, 2) + (n - 1) * p.eval(r, 1) / r;
}

/// ((-Delta)^m u)(r). Closed-form profiles go through the r^2-jet recurrence,
/// which is regular at the origin; other profiles through the expanded radial
/// operator on their r-derivatives.
inline double polyharmonic(const RadialProfile& p, double r, int m) {
  if (m < 0) throw DomainError("polyharmonic: negative iteration count");
  if (m == 0) return p.eval(r, 0);
  if (p.derivative_order() < 2 * m) throw OrderTooHigh(2 * m, p.derivative_order());
  if (!(r >= 0.0)) throw DomainError("polyharmonic: negative radius");
  const int n = p.dimension();
  if (auto jet = p.square_jet(r * r, 2 * m)) {
    if (r == 0.0 && !p.model().regular_at_origin()) {
      throw DomainError(p.describe() + " is singular at r = 0");
    }
    return neg_laplacian_power(*jet, n, m).d[0];
  }
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  if (r == 0.0) return sign * detail::laplacian_power_at_origin(p, m);
  std::vector<double> d(2 * m + 1);
  for (int k = 1; k <= 2 * m; ++k) d[k] = p.eval(r, k);
  return sign * detail::cached_operator(n, m).apply(r, d);
}

/// Q(r) = ((-Delta)^{n/2} u)(r) e^{-n u(r)}.
inline double q_curvature(const RadialProfile& p, double r) {
  const int n = p.dimension();
  return polyharmonic(p, r, n / 2) * std::exp(-n * p(r));
}

inline double gradient_norm_sq(const RadialProfile& p, double r) {
  const double du = p.eval(r, 1);
  return du * du;
}

/// R_g e^{2u} = 2(n-1) (-Delta u - (n-2)/2 |grad u|^2); finite even where
/// e^{-2u} overflows.
inline double scaled_scalar_curvature(const RadialProfile& p, double r) {
  const int n = p.dimension();
  return 2.0 * (n - 1) * (-radial_laplacian(p, r) - 0.5 * (n - 2) * gradient_norm_sq(p, r));
}

/// R_g = 2(n-1) e^{-2u} (-Delta u - (n-2)/2 |grad u|^2).
inline double scalar_curvature(const RadialProfile& p, double r) {
  return std::exp(-2.0 * p(r)) * scaled_scalar_curvature(p, r);
}

/// Operators of one profile bundled together; m = n/2 by construction.
class OperatorStack {
 public:
  explicit OperatorStack(RadialProfile p) : profile_(std::move(p)), m_(profile_.dimension() / 2) {}

  [[nodiscard]] int dimension() const { return profile_.dimension(); }
  [[nodiscard]] int iterations() const { return m_; }
  [[nodiscard]] const RadialProfile& profile() const { return profile_; }

  [[nodiscard]] double laplacian(double r) const { return radial_laplacian(profile_, r); }
  [[nodiscard]] double polyharmonic(double r) const { return qcurv::polyharmonic(profile_, r, m_); }
  [[nodiscard]] double q_curvature(double r) const { return qcurv::q_curvature(profile_, r); }
  [[nodiscard]] double scalar_curvature(double r) const { return qcurv::scalar_curvature(profile_, r); }
  [[nodiscard]] double gradient_norm_sq(double r) const { return qcurv::gradient_norm_sq(profile_, r); }

 private:
  RadialProfile profile_;
  int m_;
};

}  // namespace qcurv
