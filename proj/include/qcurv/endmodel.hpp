#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qcurv/calculus.hpp"
#include "qcurv/density.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/functionals.hpp"
#include "qcurv/limits.hpp"
#include "qcurv/potential.hpp"
#include "qcurv/profile.hpp"

namespace qcurv {

/// Harmonic-at-infinity part of an end: h(x) with h(x/|x|^2) biharmonic on the unit ball.
struct EndCorrection {
  enum class Kind { None, Constant, InverseSquare };
  Kind kind = Kind::None;
  double coeff = 0.0;

  [[nodiscard]] double derivative(double r, int k) const {
    switch (kind) {
      case Kind::None: return 0.0;
      case Kind::Constant: return k == 0 ? coeff : 0.0;
      case Kind::InverseSquare: {
        // d^k r^{-2} = (-1)^k (k+1)! r^{-2-k}
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        return coeff * sign * factorial(k + 1) * std::pow(r, -2 - k);
      }
    }
    return 0.0;
  }
};

inline std::string to_string(EndCorrection::Kind k) {
  switch (k) {
    case EndCorrection::Kind::None: return "none";
    case EndCorrection::Kind::Constant: return "constant";
    case EndCorrection::Kind::InverseSquare: return "inverse-square";
  }
  return "unknown";
}

namespace detail {

/// w = P[f] + alpha1 log r + h on r >= 1 in R^4.
class EndModel final : public ProfileModel {
 public:
  EndModel(std::optional<RadialProfile> potential, double alpha1, EndCorrection h)
      : potential_(std::move(potential)), alpha1_(alpha1), h_(h) {}

  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::Combination; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << "end(alpha1=" << alpha1_ << ", h=" << to_string(h_.kind) << " " << h_.coeff;
    if (potential_) os << ", " << potential_->describe();
    os << ")";
    return os.str();
  }
  [[nodiscard]] int derivative_order() const override {
    return potential_ ? potential_->derivative_order() : kClosedFormOrder;
  }
  [[nodiscard]] double derivative(double r, int k) const override {
    double v = h_.derivative(r, k);
    if (k == 0) {
      v += alpha1_ * std::log(r);
    } else {
      // d^k log r = (-1)^{k-1} (k-1)! r^{-k}
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      v += alpha1_ * sign * factorial(k - 1) * std::pow(r, -k);
    }
    if (potential_) v += potential_->eval(r, k);
    return v;
  }
  [[nodiscard]] std::optional<std::pair<double, double>> domain() const override {
    return std::pair{1.0, std::numeric_limits<double>::infinity()};
  }

 private:
  std::optional<RadialProfile> potential_;
  double alpha1_;
  EndCorrection h_;
};

}  // namespace detail

/// A simple end on R^4 minus the unit ball.
class EndProfile {
 public:
  static constexpr int kDimension = 4;

  EndProfile(std::optional<CurvatureDensity> density, double alpha1, EndCorrection h = {},
             const PotentialConfig& cfg = {})
      : alpha1_(alpha1), h_(h) {
    std::optional<RadialProfile> pot;
    if (density) {
      if (density->dimension() != kDimension) throw DomainError("end model is four-dimensional");
      if (density->support().inner < 1.0) {
        throw DomainError("end density must vanish inside the unit ball; restrict it first");
      }
      alpha2_ = alpha0(*density);
      pot = potential_from_density(*density, cfg);
      density_ = std::move(density);
    }
    profile_ = std::make_shared<RadialProfile>(kDimension, std::make_shared<detail::EndModel>(pot, alpha1, h));
  }

  [[nodiscard]] double alpha1() const { return alpha1_; }
  /// alpha2 = (1 / 8 pi^2) int_{|y| > 1} f.
  [[nodiscard]] double alpha2() const { return alpha2_; }
  [[nodiscard]] const EndCorrection& correction() const { return h_; }
  [[nodiscard]] const std::optional<CurvatureDensity>& density() const { return density_; }
  [[nodiscard]] const RadialProfile& profile() const { return *profile_; }

 private:
  double alpha1_;
  double alpha2_ = 0.0;
  EndCorrection h_;
  std::optional<CurvatureDensity> density_;
  std::shared_ptr<RadialProfile> profile_;
};

inline double end_profile_eval(const EndProfile& e, double r, int k = 0) {
  if (!(r >= 1.0)) throw DomainError("end profile is defined for r >= 1 only");
  return e.profile().eval(r, k);
}

struct EndLimits {
  LimitEstimate laplacian;  // r^2 (-Delta w)   -> 2 (alpha2 - alpha1)
  LimitEstimate slope;      // r w'             -> alpha1 - alpha2
  LimitEstimate gradient;   // r^2 |grad w|^2   -> (alpha2 - alpha1)^2
  double expected_laplacian = 0.0;
  double expected_slope = 0.0;
  double expected_gradient = 0.0;
};

inline EndLimits end_limits(const EndProfile& e, std::vector<double> schedule = default_limit_schedule()) {
  const RadialProfile& w = e.profile();
  EndLimits out;
  out.laplacian = estimate_limit([&](double r) { return -r * r * radial_laplacian(w, r); }, schedule);
  out.slope = estimate_limit([&](double r) { return r * w.eval(r, 1); }, schedule);
  out.gradient = estimate_limit([&](double r) { return r * r * gradient_norm_sq(w, r); }, schedule);
  const double d = e.alpha2() - e.alpha1();
  out.expected_laplacian = 2.0 * d;
  out.expected_slope = -d;
  out.expected_gradient = d * d;
  return out;
}

/// log int_1^r e^{4w} s^3 ds.
inline double log_end_volume(const EndProfile& e, double r) {
  const RadialProfile& w = e.profile();
  const PanelGrid grid = geometric_interval(1.0, r, 1.2);
  const GaussRule& rule = gauss_legendre(20);
  std::vector<double> terms;
  terms.reserve(grid.panels() * rule.size());
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.panels(); ++i) {
    const double half = 0.5 * (grid.upper(i) - grid.lower(i));
    const double mid = 0.5 * (grid.upper(i) + grid.lower(i));
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double s = mid + half * rule.nodes[q];
      terms.push_back(std::log(half * rule.weights[q]) + 3.0 * std::log(s) + 4.0 * w(s));
      peak = std::max(peak, terms.back());
    }
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  return peak + std::log(sum);
}

/// I_g(r) = (|S^3| r^3 e^{3w(r)})^{4/3} / (4 (2 pi^2)^{1/3} |S^3| int_1^r e^{4w} s^3 ds).
inline double isoperimetric_ratio(const EndProfile& e, double r) {
  if (!(r > 1.0)) throw DomainError("isoperimetric ratio needs r > 1");
  const double area = sphere_area(3);
  const double log_num = (4.0 / 3.0) * (std::log(area) + 3.0 * std::log(r) + 3.0 * e.profile()(r));
  const double log_den =
      std::log(4.0) + std::log(2.0 * std::numbers::pi * std::numbers::pi) / 3.0 + std::log(area) + log_end_volume(e, r);
  return std::exp(log_num - log_den);
}

struct EndNu {
  LimitEstimate estimate;
  bool scalar_nonnegative = false;      // R_g >= 0 at the sampled end radii
  bool scalar_bounded_below = false;    // R_g >= C > 0 there
  std::optional<std::pair<double, double>> expected_range;
  bool in_range = true;
};

inline EndNu end_nu(const EndProfile& e, std::vector<double> schedule = default_limit_schedule()) {
  EndNu out;
  out.estimate = estimate_limit([&](double r) { return isoperimetric_ratio(e, r); }, schedule,
                                LimitModel::Automatic);
  const RadialProfile& w = e.profile();
  const std::vector<double> radii = log_grid(10.0, schedule.back(), 32);
  double lo = std::numeric_limits<double>::infinity();
  for (double r : radii) lo = std::min(lo, scalar_curvature(w, r));
  out.scalar_nonnegative = lo >= 0.0;
  out.scalar_bounded_below =
      lo > 0.0 && scalar_curvature(w, radii.back()) >= 0.5 * scalar_curvature(w, radii.front());
  if (out.scalar_bounded_below) {
    out.expected_range = std::pair{0.0, 0.0};
  } else if (out.scalar_nonnegative) {
    out.expected_range = std::pair{0.0, 1.0};
  }
  if (out.expected_range) {
    const double v = out.estimate.limit;
    const double tol = out.estimate.error + 1e-3;
    out.in_range = v >= out.expected_range->first - tol && v <= out.expected_range->second + tol;
  }
  return out;
}

}  // namespace qcurv
