#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qcurv/calculus.hpp"
#include "qcurv/constants.hpp"
#include "qcurv/density.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/limits.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/potential.hpp"
#include "qcurv/profile.hpp"
#include "qcurv/quadrature.hpp"

namespace qcurv {

/// alpha0 = 2 int f / ((n-1)! |S^n|).
inline double alpha0(const CurvatureDensity& f) { return 2.0 * f.total() / sphere_total_curvature(f.dimension()); }

/// alpha0 of the curvature density of a profile.
inline double alpha0(const RadialProfile& p) {
  if (const PotentialField* pf = as_potential(p)) return pf->alpha0();
  return alpha0(density_from_profile(p));
}

inline std::vector<double> default_limit_schedule() { return {125.0, 250.0, 500.0, 1000.0}; }

/// The four sphere-mean asymptotics of a radial profile with their predicted limits.
struct SphereMeanLimits {
  LimitEstimate laplacian;  // r^2 (-Delta u)        -> (n-2) alpha0
  LimitEstimate slope;      // r u'                  -> -alpha0
  LimitEstimate gradient;   // r^2 |grad u|^2        -> alpha0^2
  LimitEstimate log_ratio;  // u(r) / log r          -> -alpha0
  double alpha0 = 0.0;
  double expected_laplacian = 0.0;
  double expected_slope = 0.0;
  double expected_gradient = 0.0;
  double expected_log_ratio = 0.0;
};

/// For radial u, spherical means about the origin are point values.
inline SphereMeanLimits sphere_mean_limits(const RadialProfile& p, std::vector<double> schedule = default_limit_schedule(),
                                      std::optional<double> alpha = std::nullopt) {
  if (p.derivative_order() < 2) throw OrderTooHigh(2, p.derivative_order());
  const int n = p.dimension();
  SphereMeanLimits out;
  out.laplacian = estimate_limit([&](double r) { return -r * r * radial_laplacian(p, r); }, schedule);
  out.slope = estimate_limit([&](double r) { return r * p.eval(r, 1); }, schedule);
  out.gradient = estimate_limit([&](double r) { return r * r * gradient_norm_sq(p, r); }, schedule);
  out.log_ratio =
      estimate_limit([&](double r) { return p(r) / std::log(r); }, schedule, LimitModel::InverseLogRadius);
  out.alpha0 = alpha ? *alpha : alpha0(p);
  out.expected_laplacian = (n - 2) * out.alpha0;
  out.expected_slope = -out.alpha0;
  out.expected_gradient = out.alpha0 * out.alpha0;
  out.expected_log_ratio = -out.alpha0;
  return out;
}

/// log( avg e^{k u} / e^{k avg u} ) over the sphere of radius r about c e_1,
/// evaluated with the exponent centred so nothing overflows.
inline double exp_mean_log_ratio(const RadialProfile& p, double c, double k, double r) {
  const int n = p.dimension();
  if (c == 0.0) return 0.0;
  const double mean = offcenter_radial_avg(n, [&](double y) { return p(y); }, c, r);
  double peak = -std::numeric_limits<double>::infinity();
  offcenter_radial_avg(n, [&](double y) {
    peak = std::max(peak, k * (p(y) - mean));
    return 0.0;
  }, c, r);
  const double shifted =
      offcenter_radial_avg(n, [&](double y) { return std::exp(k * (p(y) - mean) - peak); }, c, r);
  return peak + std::log(shifted);
}

/// avg e^{k u} / e^{k avg u}; at least 1 by Jensen.
inline double exp_mean_ratio(const RadialProfile& p, double c, double k, double r) {
  return std::exp(exp_mean_log_ratio(p, c, k, r));
}

/// Average of u over the ball of the given radius about c e_1, from
/// off-center sphere means: n/R^n int_0^R rho^{n-1} avg_{S_rho(c)} u d rho.
inline double ball_mean(const RadialProfile& p, double c, double radius = 1.0) {
  if (!(c >= 0.0)) throw DomainError("ball_mean: center distance must be >= 0");
  const int n = p.dimension();
  std::vector<double> breaks{0.0, radius};
  if (c > 0.0 && c < radius) breaks.insert(breaks.begin() + 1, c);
  const GaussRule& rule = gauss_legendre(24);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    sum += integrate(
        [&](double rho) {
          const double avg = offcenter_radial_avg(n, [&](double y) { return p(y); }, c, rho);
          return std::pow(rho, n - 1) * avg;
        },
        breaks[i], breaks[i + 1], rule);
  }
  return n * sum / std::pow(radius, n);
}

enum class Completeness { Complete, Indeterminate, Incomplete };

inline std::string to_string(Completeness c) {
  switch (c) {
    case Completeness::Complete: return "complete";
    case Completeness::Indeterminate: return "indeterminate";
    case Completeness::Incomplete: return "incomplete";
  }
  return "unknown";
}

/// alpha0 < 1 complete, alpha0 > 1 incomplete, alpha0 = 1 left open.
inline Completeness completeness_from_alpha0(double a, double tol = 1e-9) {
  if (std::abs(a - 1.0) <= tol) return Completeness::Indeterminate;
  return a < 1.0 ? Completeness::Complete : Completeness::Incomplete;
}

struct VolumeEntropy {
  LimitEstimate estimate;  // log V_g(B_r) / log |B_r|
  double limsup = 0.0;
  double error = 0.0;
  double alpha0 = 0.0;
  double prediction = 0.0;  // 1 - alpha0
  Completeness completeness = Completeness::Indeterminate;
  bool identity_applies = false;  // complete and normal
};

/// Radii 10 * 2^j up to the first one >= 1e4.
inline std::vector<double> default_entropy_schedule() { return geometric_schedule(10.0, 2.0, 1e4); }

/// log V_g(B_r(0)) = log |S^{n-1}| int_0^r e^{nu} s^{n-1} ds at each radius of
/// the (increasing) schedule, accumulated in log space.
inline std::vector<double> log_conformal_volumes(const RadialProfile& p, const std::vector<double>& radii) {
  const int n = p.dimension();
  const GaussRule& rule = gauss_legendre(20);
  const double log_area = std::log(sphere_area(n - 1));
  double acc_max = -std::numeric_limits<double>::infinity();
  double acc_sum = 0.0;  // sum of exp(term - acc_max)
  auto add = [&](double term) {
    if (term == -std::numeric_limits<double>::infinity()) return;
    if (term > acc_max) {
      acc_sum = acc_sum * std::exp(acc_max - term) + 1.0;
      acc_max = term;
    } else {
      acc_sum += std::exp(term - acc_max);
    }
  };
  std::vector<double> out;
  double lo = 0.0;
  for (double r : radii) {
    if (!(r > lo)) throw DomainError("log_conformal_volumes: radii must increase");
    const PanelGrid grid = lo == 0.0 ? geometric_panels(1.0 / 64.0, 1.2, r) : geometric_interval(lo, r, 1.2);
    for (std::size_t i = 0; i < grid.panels(); ++i) {
      const double half = 0.5 * (grid.upper(i) - grid.lower(i));
      const double mid = 0.5 * (grid.upper(i) + grid.lower(i));
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double s = mid + half * rule.nodes[q];
        add(std::log(half * rule.weights[q]) + (n - 1) * std::log(s) + n * p(s));
      }
    }
    out.push_back(log_area + acc_max + std::log(acc_sum));
    lo = r;
  }
  return out;
}

/// tau(g) = limsup log V_g(B_r) / log |B_r|; the limsup is the largest of the
/// extrapolations over trailing windows of the schedule.
inline VolumeEntropy volume_entropy(const RadialProfile& p, std::vector<double> schedule = default_entropy_schedule(),
                                    std::optional<double> alpha = std::nullopt) {
  const int n = p.dimension();
  const std::vector<double> logv = log_conformal_volumes(p, schedule);
  std::vector<double> ratio(schedule.size());
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    ratio[i] = logv[i] / (std::log(unit_ball_volume(n)) + n * std::log(schedule[i]));
  }
  VolumeEntropy out;
  out.estimate = extrapolate_limit(schedule, ratio, LimitModel::InverseLogRadius);
  out.limsup = out.estimate.limit;
  out.error = out.estimate.error;
  const std::size_t windows = std::min<std::size_t>(3, schedule.size() >= 4 ? schedule.size() - 3 : 1);
  double lo = out.limsup;
  for (std::size_t w = 1; w < windows; ++w) {
    const std::size_t end = schedule.size() - w;
    const LimitEstimate e = extrapolate_limit(std::vector<double>(schedule.begin(), schedule.begin() + end),
                                              std::vector<double>(ratio.begin(), ratio.begin() + end),
                                              LimitModel::InverseLogRadius);
    out.limsup = std::max(out.limsup, e.limit);
    lo = std::min(lo, e.limit);
    out.error = std::max(out.error, e.error);
  }
  out.error += out.limsup - lo;
  out.alpha0 = alpha ? *alpha : alpha0(p);
  out.prediction = 1.0 - out.alpha0;
  out.completeness = completeness_from_alpha0(out.alpha0);
  const std::optional<bool> normal = p.model().known_normal();
  out.identity_applies = out.completeness == Completeness::Complete && normal.value_or(false);
  return out;
}

struct MassEstimate {
  std::vector<double> centers;
  std::vector<LimitEstimate> per_center;
  double inf = 0.0;
  double error = 0.0;
  double alpha0 = 0.0;
  double prediction = 0.0;  // alpha0 (2 - alpha0)
  bool divergent = false;   // some center's sequence runs off to -infinity
};

/// r^2 avg_{S_r(c)} R_g e^{2u} / ((n-1)(n-2)), the normalised scalar
/// curvature flux through the sphere of radius r about c e_1.
inline double mass_integrand(const RadialProfile& p, double c, double r) {
  const int n = p.dimension();
  const double avg = offcenter_radial_avg(n, [&](double y) { return scaled_scalar_curvature(p, y); }, c, r);
  return r * r * avg / ((n - 1.0) * (n - 2.0));
}

/// True when the tail of the sequence decreases without any sign of levelling off.
inline bool runs_to_minus_infinity(const std::vector<double>& v) {
  if (v.size() < 3) return false;
  const std::size_t m = v.size();
  const double d1 = v[m - 2] - v[m - 3];
  const double d2 = v[m - 1] - v[m - 2];
  return d1 < 0.0 && d2 < 0.0 && std::abs(d2) >= std::abs(d1) && v[m - 1] < -1.0;
}

inline MassEstimate conformal_mass(const RadialProfile& p, std::vector<double> centers = {0.0, 1.0, 2.0},
                                   std::vector<double> schedule = default_limit_schedule(),
                                   std::optional<double> alpha = std::nullopt, unsigned workers = 1) {
  MassEstimate out;
  out.centers = centers;
  out.per_center.resize(centers.size());
  parallel_for(
      centers.size(),
      [&](std::size_t i) {
        out.per_center[i] = estimate_limit([&](double r) { return mass_integrand(p, centers[i], r); }, schedule);
      },
      workers);
  out.inf = std::numeric_limits<double>::infinity();
  for (const LimitEstimate& e : out.per_center) {
    if (runs_to_minus_infinity(e.values)) out.divergent = true;
    if (e.limit < out.inf) {
      out.inf = e.limit;
    }
    out.error = std::max(out.error, e.error);
  }
  if (out.divergent) out.inf = -std::numeric_limits<double>::infinity();
  out.alpha0 = alpha ? *alpha : alpha0(p);
  out.prediction = out.alpha0 * (2.0 - out.alpha0);
  return out;
}

/// -4 / (n! |S^n|) int x . grad Q e^{nu} dx for radial Q and u.
inline double pohozaev_mass(const RadialFunction& q, const RadialProfile& p, double r_end = 1e3) {
  const int n = p.dimension();
  const double area = sphere_area(n - 1);
  const PanelGrid grid = geometric_panels(1.0 / 64.0, 1.2, r_end);
  const double integral = integrate(
      [&](double r) {
        const double dq = q.derivative(r, 1);
        if (dq == 0.0) return 0.0;
        return r * dq * std::exp(n * p(r)) * area * std::pow(r, n - 1);
      },
      grid, gauss_legendre(20));
  return -4.0 / (factorial(n) * sphere_area(n)) * integral;
}

/// Whether R_g >= 0 on [r_lo, r_hi] at log-spaced sample radii.
inline bool scalar_curvature_nonnegative(const RadialProfile& p, double r_lo = 10.0, double r_hi = 1e3,
                                         std::size_t samples = 64) {
  for (double r : log_grid(r_lo, r_hi, samples)) {
    if (scaled_scalar_curvature(p, r) < 0.0) return false;
  }
  return true;
}

}  // namespace qcurv
