#pragma once

#include <cmath>
#include <vector>

#include "qcurv/errors.hpp"

namespace qcurv {

/// Derivatives of g at t, where a radial function is written u(r) = g(r^2).
/// Smooth radial functions are exactly the smooth g, which is what makes the
/// iterated Laplacian regular at the origin in this variable.
struct SquareJet {
  double t = 0.0;
  std::vector<double> d;  // d[k] = g^{(k)}(t)

  [[nodiscard]] int order() const { return static_cast<int>(d.size()) - 1; }
};

/// k-th r-derivative of u(r) = g(r^2):
///   sum_j k! / (j! (k-2j)!) (2r)^{k-2j} g^{(k-j)}(r^2).
inline double r_derivative(const SquareJet& jet, double r, int k) {
  if (k > jet.order()) throw OrderTooHigh(k, jet.order());
  double sum = 0.0;
  // coefficient k!/(j!(k-2j)!) built incrementally from j = 0
  double coef = 1.0;
  for (int j = 0; 2 * j <= k; ++j) {
    if (j > 0) {
      coef *= static_cast<double>((k - 2 * j + 2) * (k - 2 * j + 1)) / j;
    }
    const int power = k - 2 * j;
    sum += coef * std::pow(2.0 * r, power) * jet.d[k - j];
  }
  return sum;
}

/// Jet of the radial Laplacian in R^n: (Delta u)(r) = h(r^2) with
///   h = 4 t g'' + 2n g',  h^{(k)} = 4 t g^{(k+2)} + (2n + 4k) g^{(k+1)}.
/// Consumes two orders.
inline SquareJet laplacian(const SquareJet& jet, int n) {
  if (jet.order() < 2) throw OrderTooHigh(2, jet.order());
  SquareJet out;
  out.t = jet.t;
  out.d.resize(jet.d.size() - 2);
  for (int k = 0; k <= out.order(); ++k) {
    out.d[k] = 4.0 * jet.t * jet.d[k + 2] + (2.0 * n + 4.0 * k) * jet.d[k + 1];
  }
  return out;
}

/// Jet of (-Delta)^m u.
inline SquareJet neg_laplacian_power(SquareJet jet, int n, int m) {
  for (int i = 0; i < m; ++i) {
    jet = laplacian(jet, n);
    for (double& v : jet.d) v = -v;
  }
  return jet;
}

/// Jet of the shifted log: g(t) = log(a + t), any order.
inline SquareJet log_shift_jet(double a, double t, int order) {
  SquareJet jet;
  jet.t = t;
  jet.d.resize(order + 1);
  const double x = a + t;
  jet.d[0] = std::log(x);
  double fact = 1.0;  // (k-1)!
  for (int k = 1; k <= order; ++k) {
    if (k > 1) fact *= (k - 1);
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    jet.d[k] = sign * fact / std::pow(x, k);
  }
  return jet;
}

/// Jet of g(t) = (1 - t/b)^p for t < b (zero beyond), p a positive integer.
inline SquareJet polynomial_bump_jet(double b, int p, double t, int order) {
  SquareJet jet;
  jet.t = t;
  jet.d.assign(order + 1, 0.0);
  if (t >= b) return jet;
  const double y = 1.0 - t / b;
  double falling = 1.0;  // p (p-1) ... (p-k+1)
  for (int k = 0; k <= order && k <= p; ++k) {
    if (k > 0) falling *= (p - k + 1);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    jet.d[k] = sign * falling * std::pow(y, p - k) / std::pow(b, k);
  }
  return jet;
}

}  // namespace qcurv
