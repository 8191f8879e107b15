#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/quadrature.hpp"
#include "qcurv/rational.hpp"

namespace qcurv {

/// Average over the unit sphere S^{n-1} of a function of the polar angle only,
/// with weight sin^{n-2}(theta) d theta normalised by the quadrature's own
/// weight sum (so constants average exactly and discrete Jensen holds).
/// The integrand may concentrate near theta = 0 on the scale `delta`; panels
/// are halved toward 0 until they are below that scale.
template <class F>
double polar_average(int n, F&& f, double delta, int order = 24) {
  if (n < 2 || n > kMaxDimension) throw DomainError("polar_average: unsupported dimension");
  int levels = 1;
  if (delta <= 0.0) {
    levels = 60;
  } else if (delta < std::numbers::pi) {
    levels = std::min(60, static_cast<int>(std::ceil(std::log2(std::numbers::pi / delta))) + 2);
  }
  const GaussRule& rule = gauss_legendre(order);
  double sum = 0.0;
  double wsum = 0.0;
  auto panel = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double th = mid + half * rule.nodes[i];
      const double w = half * rule.weights[i] * std::pow(std::sin(th), n - 2);
      sum += w * f(th);
      wsum += w;
    }
  };
  double hi = std::numbers::pi;
  for (int j = 0; j < levels; ++j) {
    const double lo = 0.5 * hi;
    panel(lo, hi);
    hi = lo;
  }
  panel(0.0, hi);
  return sum / wsum;
}

namespace detail {

/// (1 - t)^2 + 4 t sin^2(theta/2) = 1 - 2 t cos(theta) + t^2 without cancellation.
inline double chord_sq(double t, double theta) {
  const double sh = std::sin(0.5 * theta);
  return (1.0 - t) * (1.0 - t) + 4.0 * t * sh * sh;
}

inline double concentration_scale(double t) { return (1.0 - t) / std::sqrt(t); }

inline void check_radii(double r, double s) {
  if (!(r > 0.0)) throw DomainError("kernel average needs r > 0 (for r = 0 use the value at s directly)");
  if (!(s >= 0.0)) throw DomainError("kernel average needs s >= 0");
}

}  // namespace detail

/// F_n(r, s): average of log|x - y| over |x| = r with |y| = s.
inline double angular_log_avg(int n, double r, double s, int order = 24) {
  detail::check_radii(r, s);
  if (s == 0.0) return std::log(r);
  const double big = std::max(r, s);
  const double t = std::min(r, s) / big;
  const double avg = polar_average(
      n, [t](double th) { return std::log(detail::chord_sq(t, th)); }, detail::concentration_scale(t), order);
  return std::log(big) + 0.5 * avg;
}

/// Average of |x - y|^{-k} over |x| = r with |y| = s; needs 0 < k < n - 1.
inline double angular_pow_avg(int n, double r, double s, double k, int order = 24) {
  detail::check_radii(r, s);
  if (!(k > 0.0)) throw DomainError("power kernel exponent must be positive");
  if (!(k < n - 1)) {
    throw DomainError("power kernel exponent k must be < n - 1; the average diverges at r = s");
  }
  if (s == 0.0) return std::pow(r, -k);
  const double big = std::max(r, s);
  const double t = std::min(r, s) / big;
  const double avg = polar_average(
      n, [t, k](double th) { return std::pow(detail::chord_sq(t, th), -0.5 * k); },
      detail::concentration_scale(t), order);
  return std::pow(big, -k) * avg;
}

/// Average of field(|y|) over the sphere of radius r about c e_1, with
/// |y|^2 = (c - r)^2 + 4 c r sin^2(phi/2) (phi measured from the point nearest 0).
template <class Field>
double offcenter_radial_avg(int n, Field&& field, double c, double r, int order = 24) {
  if (!(c >= 0.0)) throw DomainError("offcenter_radial_avg: center distance must be >= 0");
  if (!(r > 0.0)) throw DomainError("offcenter_radial_avg: radius must be > 0");
  if (c == 0.0) return field(r);
  const double d = c - r;
  const double cr = c * r;
  const double delta = std::abs(d) / std::sqrt(cr);
  return polar_average(
      n,
      [&](double phi) {
        const double sh = std::sin(0.5 * phi);
        return field(std::sqrt(d * d + 4.0 * cr * sh * sh));
      },
      delta, order);
}

/// Coefficients c_1..c_p (p = n/2 - 1) of the exact even-dimensional series
///   F_n(r, s) = log max(r, s) + sum_j c_j t^{2j},  t = min/max,
/// from the Gegenbauer expansion of log|x - y|:
///   c_j = -(-1)^j C(2p, p - j) / (C(2p, p) 2j).
inline std::vector<Rational> log_kernel_coefficients(int n) {
  require_even_dimension(n);
  const int p = n / 2 - 1;
  std::vector<Rational> c;
  for (int j = 1; j <= p; ++j) {
    const Rational v(binomial(2 * p, p - j), binomial(2 * p, p) * 2 * j);
    c.push_back(j % 2 == 1 ? v : -v);
  }
  return c;
}

inline double log_kernel_series(int n, double r, double s) {
  detail::check_radii(r, s);
  if (s == 0.0) return std::log(r);
  const double big = std::max(r, s);
  const double t2 = std::pow(std::min(r, s) / big, 2);
  double sum = std::log(big);
  double tp = 1.0;
  for (const Rational& c : log_kernel_coefficients(n)) {
    tp *= t2;
    sum += c.value() * tp;
  }
  return sum;
}

enum class KernelKind { Log, Power };

inline std::string to_string(KernelKind k) { return k == KernelKind::Log ? "log" : "power"; }

/// Kernel values on a log-spaced square grid over [lo, hi]^2, each with an
/// error bound from comparing two quadrature orders.
class KernelTable {
 public:
  KernelTable(int n, KernelKind kind, double power, std::vector<double> radii)
      : n_(n), kind_(kind), power_(power), radii_(std::move(radii)) {
    const std::size_t m = radii_.size();
    values_.assign(m * m, 0.0);
    errors_.assign(m * m, 0.0);
    std::vector<std::pair<std::size_t, std::size_t>> upper;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) upper.emplace_back(i, j);
    }
    parallel_for(upper.size(), [&](std::size_t idx) {
      const auto [i, j] = upper[idx];
      const double a = evaluate(radii_[i], radii_[j], 24);
      const double b = evaluate(radii_[i], radii_[j], 32);
      const double err = std::abs(a - b) + 4e-16 * (1.0 + std::abs(b));
      values_[i * m + j] = values_[j * m + i] = b;
      errors_[i * m + j] = errors_[j * m + i] = err;
    });
  }

  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] KernelKind kind() const { return kind_; }
  [[nodiscard]] double power() const { return power_; }
  [[nodiscard]] const std::vector<double>& radii() const { return radii_; }
  [[nodiscard]] std::size_t size() const { return radii_.size(); }
  [[nodiscard]] double value(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  [[nodiscard]] double error_bound(std::size_t i, std::size_t j) const { return errors_[i * size() + j]; }

 private:
  [[nodiscard]] double evaluate(double r, double s, int order) const {
    return kind_ == KernelKind::Log ? angular_log_avg(n_, r, s, order)
                                    : angular_pow_avg(n_, r, s, power_, order);
  }

  int n_;
  KernelKind kind_;
  double power_;
  std::vector<double> radii_;
  std::vector<double> values_;
  std::vector<double> errors_;
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw DomainError("log_grid: need 0 < lo <= hi, count > 0");
  std::vector<double> g(count);
  if (count == 1) {
    g[0] = lo;
    return g;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
  g.back() = hi;
  return g;
}

/// Shared immutable tables keyed by (n, kind, power, grid).
inline std::shared_ptr<const KernelTable> kernel_table(int n, KernelKind kind, double power, double lo,
                                                       double hi, std::size_t count) {
  using Key = std::tuple<int, int, double, double, double, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const KernelTable>> cache;
  const Key key{n, static_cast<int>(kind), kind == KernelKind::Log ? 0.0 : power, lo, hi, count};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const KernelTable>(n, kind, power, log_grid(lo, hi, count));
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace qcurv
