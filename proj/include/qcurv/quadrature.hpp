#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "qcurv/errors.hpp"

namespace qcurv {

/// Gauss-Legendre rule on [-1, 1] with barycentric interpolation weights for
/// its own nodes (nodes ascending).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> bary;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline GaussRule build_gauss_legendre(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  rule.bary.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      // one more derivative evaluation at the converged node
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  for (int j = 0; j < order; ++j) {
    const double x = rule.nodes[j];
    const double lam = std::sqrt((1.0 - x * x) * rule.weights[j]);
    rule.bary[j] = (j % 2 == 0) ? lam : -lam;
  }
  return rule;
}

}  // namespace detail

/// Cached Gauss-Legendre rule of the given order; thread safe.
inline const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 512) throw DomainError("gauss_legendre: unsupported order");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussRule>(detail::build_gauss_legendre(order));
  return *slot;
}

/// Integrates f over [a, b] with the given rule.
template <class F>
double integrate(F&& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return sum * half;
}

/// Barycentric Lagrange interpolation of nodal values on the rule's nodes,
/// evaluated at x in reference coordinates.
inline double barycentric_interpolate(const GaussRule& rule, std::span<const double> values,
                                      double x) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const double d = x - rule.nodes[j];
    if (d == 0.0) return values[j];
    const double c = rule.bary[j] / d;
    num += c * values[j];
    den += c;
  }
  return num / den;
}

/// Sorted breakpoints partitioning [breaks.front(), breaks.back()] into panels.
class PanelGrid {
 public:
  PanelGrid() = default;
  explicit PanelGrid(std::vector<double> breaks) : breaks_(std::move(breaks)) {
    if (breaks_.size() < 2) throw DomainError("PanelGrid: need at least one panel");
  }

  [[nodiscard]] std::size_t panels() const { return breaks_.size() - 1; }
  [[nodiscard]] double lower(std::size_t i) const { return breaks_[i]; }
  [[nodiscard]] double upper(std::size_t i) const { return breaks_[i + 1]; }
  [[nodiscard]] double front() const { return breaks_.front(); }
  [[nodiscard]] double back() const { return breaks_.back(); }
  [[nodiscard]] const std::vector<double>& breaks() const { return breaks_; }

  /// Index of the panel containing r (clamped to the first/last panel).
  [[nodiscard]] std::size_t locate(double r) const {
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), r);
    if (it == breaks_.begin()) return 0;
    const auto idx = static_cast<std::size_t>(it - breaks_.begin()) - 1;
    return std::min(idx, panels() - 1);
  }

 private:
  std::vector<double> breaks_;
};

/// Panels [0, first], then geometric growth by `ratio` up to `end`, with the
/// `extra` breakpoints merged in.
inline PanelGrid geometric_panels(double first, double ratio, double end,
                                  std::span<const double> extra = {}) {
  if (!(first > 0.0) || !(ratio > 1.0) || !(end > 0.0)) {
    throw DomainError("geometric_panels: invalid parameters");
  }
  std::vector<double> explicit_breaks;
  for (double e : extra) {
    if (e > 0.0 && e < end) explicit_breaks.push_back(e);
  }
  auto near_explicit = [&](double b) {
    return std::any_of(explicit_breaks.begin(), explicit_breaks.end(),
                       [&](double e) { return std::abs(b - e) <= 1e-9 * e; });
  };
  std::vector<double> breaks{0.0, end};
  for (double b = std::min(first, end); b < end * (1.0 - 1e-12); b *= ratio) {
    if (!near_explicit(b)) breaks.push_back(b);
  }
  breaks.insert(breaks.end(), explicit_breaks.begin(), explicit_breaks.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return PanelGrid(std::move(breaks));
}

/// Geometric panels covering [a, b] with a > 0.
inline PanelGrid geometric_interval(double a, double b, double ratio) {
  if (!(a > 0.0) || !(b > a)) throw DomainError("geometric_interval: need 0 < a < b");
  std::vector<double> breaks{a};
  for (double x = a * ratio; x < b * (1.0 - 1e-12); x *= ratio) breaks.push_back(x);
  breaks.push_back(b);
  return PanelGrid(std::move(breaks));
}

/// Integral of f over the grid, panel by panel.
template <class F>
double integrate(F&& f, const PanelGrid& grid, const GaussRule& rule) {
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.panels(); ++i) {
    sum += integrate(f, grid.lower(i), grid.upper(i), rule);
  }
  return sum;
}

}  // namespace qcurv
