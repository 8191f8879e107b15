#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcurv/errors.hpp"

namespace qcurv {

/// Asymptotic model used to extrapolate a functional to r -> inf.
enum class LimitModel {
  InverseRadius,     // L + a/r + b/r^2
  InverseLogRadius,  // L + a/log r + b/log^2 r
  Automatic,         // algebraic if successive differences shrink geometrically, else logarithmic
};

inline std::string to_string(LimitModel m) {
  switch (m) {
    case LimitModel::InverseRadius: return "inverse-radius";
    case LimitModel::InverseLogRadius: return "inverse-log-radius";
    case LimitModel::Automatic: return "automatic";
  }
  return "unknown";
}

/// An extrapolated value of an r -> inf functional.
struct LimitEstimate {
  std::vector<double> radii;
  std::vector<double> values;
  double limit = 0.0;
  double error = 0.0;
  double order = 0.0;  // observed decay rate of successive differences, in powers of the model variable
  bool converged = false;
  LimitModel model = LimitModel::InverseRadius;

  [[nodiscard]] double last() const { return values.empty() ? 0.0 : values.back(); }
};

/// Geometric schedule r0, r0 q, ..., stopping at the first radius >= r_end.
inline std::vector<double> geometric_schedule(double r0, double q, double r_end) {
  if (!(r0 > 0.0) || !(q > 1.0)) throw DomainError("geometric_schedule: need r0 > 0, q > 1");
  std::vector<double> out{r0};
  while (out.back() < r_end * (1.0 - 1e-12)) out.push_back(out.back() * q);
  return out;
}

/// On a geometric schedule, differences of an algebraically converging
/// sequence shrink by a fixed factor (1/2 per doubling for a 1/r tail); a
/// 1/log r tail shrinks them much more slowly.
inline LimitModel choose_limit_model(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 3) return LimitModel::InverseRadius;
  const double d1 = std::abs(values[n - 2] - values[n - 3]);
  const double d2 = std::abs(values[n - 1] - values[n - 2]);
  const double scale = std::max(1.0, std::abs(values[n - 1]));
  if (d2 <= 1e-12 * scale) return LimitModel::InverseRadius;
  return d2 < 0.6 * d1 ? LimitModel::InverseRadius : LimitModel::InverseLogRadius;
}

/// Fits L + a x + b x^2 (x = 1/r or 1/log r) to the last four samples by
/// least squares and extrapolates to x = 0.
inline LimitEstimate extrapolate_limit(std::vector<double> radii, std::vector<double> values,
                                       LimitModel model = LimitModel::InverseRadius) {
  if (radii.size() != values.size() || radii.empty()) {
    throw DomainError("extrapolate_limit: need matching, non-empty samples");
  }
  if (model == LimitModel::Automatic) model = choose_limit_model(values);
  LimitEstimate est;
  est.model = model;
  est.radii = std::move(radii);
  est.values = std::move(values);
  const std::size_t n = est.values.size();
  for (double v : est.values) {
    if (!std::isfinite(v)) {
      est.limit = v;
      est.error = std::numeric_limits<double>::infinity();
      return est;
    }
  }
  if (n == 1) {
    est.limit = est.values[0];
    est.error = std::numeric_limits<double>::infinity();
    return est;
  }

  auto var = [&](double r) { return model == LimitModel::InverseRadius ? 1.0 / r : 1.0 / std::log(r); };
  const std::size_t used = std::min<std::size_t>(4, n);
  const std::size_t first = n - used;
  const int cols = used >= 4 ? 3 : static_cast<int>(used);
  Eigen::MatrixXd a(used, cols);
  Eigen::VectorXd b(used);
  for (std::size_t i = 0; i < used; ++i) {
    const double x = var(est.radii[first + i]);
    double p = 1.0;
    for (int c = 0; c < cols; ++c, p *= x) a(static_cast<Eigen::Index>(i), c) = p;
    b(static_cast<Eigen::Index>(i)) = est.values[first + i];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  est.limit = coef(0);
  const double residual = (a * coef - b).cwiseAbs().maxCoeff();
  const double scale = std::max({1.0, std::abs(est.limit)});
  // Sensitivity to the model: L + a x through the last three samples.
  double spread = 0.0;
  if (cols == 3) {
    Eigen::MatrixXd a2(3, 2);
    Eigen::VectorXd b2(3);
    for (Eigen::Index i = 0; i < 3; ++i) {
      a2(i, 0) = 1.0;
      a2(i, 1) = a(i + 1, 1);
      b2(i) = b(i + 1);
    }
    spread = std::abs(a2.colPivHouseholderQr().solve(b2)(0) - est.limit);
  }
  est.error = std::max({residual, std::abs(est.limit - est.last()) / 4.0, spread, 1e-15 * scale});

  // Successive differences must shrink for the model to be trusted.
  std::vector<double> diffs;
  for (std::size_t i = first + 1; i < n; ++i) diffs.push_back(std::abs(est.values[i] - est.values[i - 1]));
  const double tiny = 1e-12 * scale;
  const double shrink = model == LimitModel::InverseRadius ? 0.95 : 0.999;
  bool ok = true;
  double rate_sum = 0.0;
  int rate_count = 0;
  for (std::size_t i = 1; i < diffs.size(); ++i) {
    if (diffs[i] <= tiny) continue;
    if (diffs[i] > shrink * diffs[i - 1]) ok = false;
    const double step = std::log(var(est.radii[first + i]) / var(est.radii[first + i + 1]));
    if (diffs[i - 1] > tiny && step > 0.0) {
      rate_sum += std::log(diffs[i - 1] / diffs[i]) / step;
      ++rate_count;
    }
  }
  est.order = rate_count > 0 ? rate_sum / rate_count : 0.0;
  est.converged = ok;
  return est;
}

/// Samples fn on the schedule and extrapolates.
inline LimitEstimate estimate_limit(const std::function<double(double)>& fn, std::vector<double> radii,
                                    LimitModel model = LimitModel::InverseRadius) {
  std::vector<double> values;
  values.reserve(radii.size());
  for (double r : radii) values.push_back(fn(r));
  return extrapolate_limit(std::move(radii), std::move(values), model);
}

}  // namespace qcurv
