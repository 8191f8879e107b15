#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/makima.hpp>

#include "qcurv/calculus.hpp"
#include "qcurv/constants.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/jet.hpp"
#include "qcurv/profile.hpp"
#include "qcurv/quadrature.hpp"

namespace qcurv {

/// A radial scalar function with r-derivatives up to max_order().
class RadialFunction {
 public:
  using Fn = std::function<double(double r, int k)>;

  RadialFunction() = default;
  RadialFunction(Fn fn, int max_order, std::string name = "function")
      : fn_(std::make_shared<Fn>(std::move(fn))), max_order_(max_order), name_(std::move(name)) {}

  [[nodiscard]] double operator()(double r) const { return (*fn_)(r, 0); }
  [[nodiscard]] double derivative(double r, int k) const {
    if (k > max_order_) throw OrderTooHigh(k, max_order_);
    return (*fn_)(r, k);
  }
  [[nodiscard]] int max_order() const { return max_order_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] bool valid() const { return static_cast<bool>(fn_); }

 private:
  std::shared_ptr<const Fn> fn_;
  int max_order_ = 0;
  std::string name_;
};

inline RadialFunction constant_function(double c) {
  std::ostringstream os;
  os << "constant(" << c << ")";
  return {[c](double, int k) { return k == 0 ? c : 0.0; }, kClosedFormOrder, os.str()};
}

/// amp * exp(-r^2 / width^2).
inline RadialFunction gaussian_function(double amp, double width) {
  if (!(width > 0.0)) throw DomainError("gaussian width must be positive");
  std::ostringstream os;
  os << "gaussian(amp=" << amp << ", width=" << width << ")";
  return {[amp, width](double r, int k) {
            const double t = r * r;
            const double s = -1.0 / (width * width);
            SquareJet jet{t, std::vector<double>(k + 1)};
            const double base = amp * std::exp(s * t);
            double sk = 1.0;
            for (int i = 0; i <= k; ++i, sk *= s) jet.d[i] = base * sk;
            return r_derivative(jet, r, k);
          },
          kClosedFormOrder, os.str()};
}

/// Piecewise-cubic (modified Akima) interpolant of tabulated (r, value) pairs;
/// zero outside the table.
inline RadialFunction tabulated_function(std::vector<double> r, std::vector<double> v) {
  if (r.size() != v.size() || r.size() < 4) throw ConfigError("tabulated function needs >= 4 rows");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw ConfigError("tabulated radii must be strictly increasing");
  }
  const double lo = r.front();
  const double hi = r.back();
  using Makima = boost::math::interpolators::makima<std::vector<double>>;
  auto interp = std::make_shared<Makima>(std::move(r), std::move(v));
  return {[interp, lo, hi](double x, int k) {
            if (x < lo || x > hi) return 0.0;
            return k == 0 ? (*interp)(x) : interp->prime(x);
          },
          1, "tabulated"};
}

/// Where a density lives: zero outside [inner, outer]; beyond the quadrature
/// range a decaying density is assumed to fall off like r^{-decay_exponent}.
struct DensitySupport {
  double inner = 0.0;
  double outer = std::numeric_limits<double>::infinity();
  double decay_exponent = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool compact() const { return std::isfinite(outer); }
};

struct RadialQuadratureOptions {
  double first_panel = 1.0 / 64.0;
  double panel_ratio = 1.2;
  int order = 20;
  double far_radius = 1e4;  // quadrature range for non-compact densities
};

/// The radial signed density f(r) standing for Q e^{nu}, with its total
/// integral over R^n.
class CurvatureDensity {
 public:
  CurvatureDensity() = default;
  CurvatureDensity(int n, RadialFunction f, DensitySupport support, double total, double total_error)
      : n_(n), f_(std::move(f)), support_(support), total_(total), total_error_(total_error) {}

  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] const DensitySupport& support() const { return support_; }
  [[nodiscard]] double total() const { return total_; }
  [[nodiscard]] double total_error() const { return total_error_; }
  [[nodiscard]] int derivative_order() const { return f_.max_order(); }
  [[nodiscard]] const RadialFunction& function() const { return f_; }

  [[nodiscard]] bool inside(double r) const { return r >= support_.inner && r <= support_.outer; }
  [[nodiscard]] double operator()(double r) const { return inside(r) ? f_(r) : 0.0; }
  [[nodiscard]] double derivative(double r, int k) const {
    if (k > f_.max_order()) throw OrderTooHigh(k, f_.max_order());
    return inside(r) ? f_.derivative(r, k) : 0.0;
  }

 private:
  int n_ = 4;
  RadialFunction f_;
  DensitySupport support_;
  double total_ = 0.0;
  double total_error_ = 0.0;
};

/// Local power-law decay exponent of f between r and 2r; +inf when f vanishes.
template <class F>
double estimate_decay_exponent(F&& f, double r) {
  const double a = std::abs(f(r));
  const double b = std::abs(f(2.0 * r));
  if (a == 0.0 && b == 0.0) return std::numeric_limits<double>::infinity();
  if (b == 0.0) return std::numeric_limits<double>::infinity();
  if (a == 0.0) return 0.0;
  return std::log(a / b) / std::log(2.0);
}

/// Decay exponent probed at lo, 2 lo, ... up to hi. Successive estimates of a
/// power-law tail settle down; once they start to wander again, rounding in f
/// has taken over and the last settled estimate is kept.
template <class F>
double stable_decay_exponent(F&& f, double lo, double hi) {
  double prev = estimate_decay_exponent(f, lo);
  double prev_change = std::numeric_limits<double>::infinity();
  for (double r = 2.0 * lo; r <= hi; r *= 2.0) {
    const double next = estimate_decay_exponent(f, r);
    if (std::isinf(next)) return next;
    const double change = std::abs(next - prev);
    if (change > prev_change && change > 1e-6 * std::max(1.0, std::abs(prev))) break;
    prev = next;
    prev_change = change;
  }
  return prev;
}

struct RadialIntegral {
  double value = 0.0;
  double tail = 0.0;
  double error = 0.0;
};

/// Integral of g(|x|) over R^n restricted to the support; g decays like
/// r^{-p} beyond the quadrature range (p = support.decay_exponent).
template <class G>
RadialIntegral integrate_radial(int n, G&& g, const DensitySupport& support,
                                const RadialQuadratureOptions& opts = {}) {
  const double area = sphere_area(n - 1);
  const double end = support.compact() ? support.outer : opts.far_radius;
  RadialIntegral out;
  if (!(end > support.inner)) return out;
  const std::vector<double> extra{support.inner};
  const PanelGrid grid = geometric_panels(opts.first_panel, opts.panel_ratio, end, extra);
  const GaussRule& rule = gauss_legendre(opts.order);
  for (std::size_t i = 0; i < grid.panels(); ++i) {
    if (grid.upper(i) <= support.inner) continue;
    out.value += integrate([&](double s) { return area * g(s) * std::pow(s, n - 1); }, grid.lower(i),
                           grid.upper(i), rule);
  }
  if (!support.compact()) {
    const double p = support.decay_exponent;
    const double g_end = g(end);
    if (g_end != 0.0) {
      if (!(p > n)) {
        std::ostringstream os;
        os << "radial integral tail does not converge: decay exponent " << p << " <= dimension " << n;
        throw TailNotConvergent(os.str());
      }
      if (std::isfinite(p)) out.tail = area * g_end * std::pow(end, n) / (p - n);
    }
    out.value += out.tail;
    out.error = std::abs(out.tail) * 0.1;
  }
  out.error += 1e-14 * std::abs(out.value);
  return out;
}

/// Builds a density and computes its total.
inline CurvatureDensity make_density(int n, RadialFunction f, DensitySupport support,
                                     const RadialQuadratureOptions& opts = {}) {
  require_even_dimension(n);
  if (!support.compact() && std::isinf(support.decay_exponent)) {
    support.decay_exponent = estimate_decay_exponent(f, opts.far_radius);
  }
  const RadialIntegral integral = integrate_radial(
      n,
      [&](double s) { return (s >= support.inner && s <= support.outer) ? f(s) : 0.0; },
      support, opts);
  return {n, std::move(f), support, integral.value, integral.error};
}

inline CurvatureDensity zero_density(int n) {
  return make_density(n, constant_function(0.0), DensitySupport{0.0, 0.0});
}

/// Compactly supported A (1 - r^2/R^2)^6 on [0, R], scaled so that
/// alpha0 = 2 total / ((n-1)! |S^n|) takes the requested value.
inline CurvatureDensity bump_density(int n, double alpha0, double radius = 1.0) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  constexpr int kPower = 6;
  const double b = radius * radius;
  auto unit = [b](double r, int k) {
    return r_derivative(polynomial_bump_jet(b, kPower, r * r, k), r, k);
  };
  const DensitySupport support{0.0, radius};
  const CurvatureDensity probe = make_density(n, RadialFunction(unit, kPower - 1), support);
  const double amp = alpha0 * sphere_total_curvature(n) / (2.0 * probe.total());
  std::ostringstream os;
  os << "bump(alpha0=" << alpha0 << ", radius=" << radius << ")";
  return make_density(
      n, RadialFunction([unit, amp](double r, int k) { return amp * unit(r, k); }, kPower - 1, os.str()),
      support);
}

/// A (1 - x^2)^6 with x = (r - mid)/half on [inner, outer]; same normalisation
/// convention as bump_density.
inline CurvatureDensity shell_density(int n, double alpha0, double inner, double outer) {
  if (!(outer > inner) || inner < 0.0) throw DomainError("shell needs 0 <= inner < outer");
  constexpr int kPower = 6;
  const double mid = 0.5 * (inner + outer);
  const double half = 0.5 * (outer - inner);
  auto unit = [mid, half](double r, int k) {
    const double x = (r - mid) / half;
    return r_derivative(polynomial_bump_jet(1.0, kPower, x * x, k), x, k) / std::pow(half, k);
  };
  const DensitySupport support{inner, outer};
  const CurvatureDensity probe = make_density(n, RadialFunction(unit, kPower - 1), support);
  const double amp = alpha0 * sphere_total_curvature(n) / (2.0 * probe.total());
  std::ostringstream os;
  os << "shell(alpha0=" << alpha0 << ", [" << inner << ", " << outer << "])";
  return make_density(
      n, RadialFunction([unit, amp](double r, int k) { return amp * unit(r, k); }, kPower - 1, os.str()),
      support);
}

/// The same density with everything below `inner` removed.
inline CurvatureDensity restrict_density(const CurvatureDensity& f, double inner) {
  DensitySupport s = f.support();
  s.inner = std::max(s.inner, inner);
  return make_density(f.dimension(), f.function(), s);
}

/// f = (-Delta)^{n/2} u, the curvature density of a profile.
inline CurvatureDensity density_from_profile(const RadialProfile& p,
                                             const RadialQuadratureOptions& opts = {}) {
  const int n = p.dimension();
  const int m = n / 2;
  if (p.derivative_order() < n) throw OrderTooHigh(n, p.derivative_order());
  RadialFunction f;
  if (p.square_jet(1.0, n)) {
    f = RadialFunction(
        [p, n, m](double r, int k) {
          auto jet = p.square_jet(r * r, k + n);
          return r_derivative(neg_laplacian_power(*jet, n, m), r, k);
        },
        kClosedFormOrder - n, "density of " + p.describe());
  } else {
    f = RadialFunction(
        [p, m](double r, int k) {
          if (k != 0) throw OrderTooHigh(k, 0);
          return polyharmonic(p, r, m);
        },
        0, "density of " + p.describe());
  }
  DensitySupport support;
  if (auto dom = p.model().domain()) {
    support.inner = dom->first;
    support.outer = dom->second;
  } else {
    const double probe = 0.1 * opts.far_radius;
    support.decay_exponent = stable_decay_exponent(f, 10.0, probe);
    if (std::abs(f(probe)) > 0.0 && !(support.decay_exponent > n)) {
      std::ostringstream os;
      os << "(-Delta)^" << m << " of " << p.describe() << " decays like r^-" << support.decay_exponent
         << ", not integrable in R^" << n;
      throw TailNotConvergent(os.str());
    }
  }
  return make_density(n, std::move(f), support, opts);
}

}  // namespace qcurv
