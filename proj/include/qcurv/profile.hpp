#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "qcurv/constants.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/jet.hpp"

namespace qcurv {

enum class ProfileFamily {
  Sphere,
  Counterexample,
  PotentialGenerated,
  PicardSolution,
  Sampled,
  Constant,
  Quadratic,
  LogRadius,
  Combination,
};

inline std::string to_string(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::Sphere: return "sphere";
    case ProfileFamily::Counterexample: return "counterexample";
    case ProfileFamily::PotentialGenerated: return "potential";
    case ProfileFamily::PicardSolution: return "picard";
    case ProfileFamily::Sampled: return "sampled";
    case ProfileFamily::Constant: return "constant";
    case ProfileFamily::Quadratic: return "quadratic";
    case ProfileFamily::LogRadius: return "log";
    case ProfileFamily::Combination: return "combination";
  }
  return "unknown";
}

/// Closed-form families supply derivatives of any order; this is the order
/// they advertise.
inline constexpr int kClosedFormOrder = 24;

/// Implementation interface behind RadialProfile. Models are immutable.
class ProfileModel {
 public:
  virtual ~ProfileModel() = default;

  [[nodiscard]] virtual ProfileFamily family() const = 0;
  [[nodiscard]] virtual std::string describe() const = 0;
  [[nodiscard]] virtual int derivative_order() const = 0;
  /// d^k u / dr^k; callers have already validated k and r.
  [[nodiscard]] virtual double derivative(double r, int k) const = 0;

  /// Derivatives of g with u(r) = g(r^2), when available in closed form.
  [[nodiscard]] virtual std::optional<SquareJet> square_jet(double /*t*/, int /*order*/) const {
    return std::nullopt;
  }
  /// Admissible radii [lo, hi]; nullopt means all r >= 0.
  [[nodiscard]] virtual std::optional<std::pair<double, double>> domain() const {
    return std::nullopt;
  }
  [[nodiscard]] virtual bool regular_at_origin() const { return true; }
  [[nodiscard]] virtual double interpolation_error() const { return 0.0; }
  /// Whether u is known to admit the log-potential representation.
  [[nodiscard]] virtual std::optional<bool> known_normal() const { return std::nullopt; }
};

/// A radial conformal factor u(r) on R^n with derivatives up to
/// derivative_order(). Cheap to copy; the model is shared and immutable.
class RadialProfile {
 public:
  RadialProfile(int n, std::shared_ptr<const ProfileModel> model)
      : n_(n), model_(std::move(model)) {
    require_even_dimension(n_);
    if (!model_) throw DomainError("RadialProfile: null model");
  }

  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] ProfileFamily family() const { return model_->family(); }
  [[nodiscard]] int derivative_order() const { return model_->derivative_order(); }
  [[nodiscard]] std::string describe() const { return model_->describe(); }
  [[nodiscard]] const ProfileModel& model() const { return *model_; }
  [[nodiscard]] std::shared_ptr<const ProfileModel> shared_model() const { return model_; }

  [[nodiscard]] double operator()(double r) const { return eval(r, 0); }

  [[nodiscard]] double eval(double r, int k = 0) const {
    if (k < 0 || k > model_->derivative_order()) throw OrderTooHigh(k, model_->derivative_order());
    if (!(r >= 0.0)) throw DomainError("profile evaluated at negative radius");
    if (auto dom = model_->domain()) {
      if (r < dom->first || r > dom->second) {
        std::ostringstream os;
        os << "radius " << r << " outside sampled grid [" << dom->first << ", " << dom->second
           << "]";
        throw OutOfGrid(os.str());
      }
    }
    if (r == 0.0 && !model_->regular_at_origin()) {
      throw DomainError(describe() + " is singular at r = 0");
    }
    return model_->derivative(r, k);
  }

  [[nodiscard]] std::optional<SquareJet> square_jet(double t, int order) const {
    return model_->square_jet(t, order);
  }

 private:
  int n_;
  std::shared_ptr<const ProfileModel> model_;
};

namespace detail {

/// Base for families defined by u(r) = g(r^2) with g known in closed form.
class SquareJetModel : public ProfileModel {
 public:
  [[nodiscard]] int derivative_order() const override { return kClosedFormOrder; }
  [[nodiscard]] double derivative(double r, int k) const override {
    return r_derivative(*square_jet(r * r, k), r, k);
  }
};

class SphereModel final : public SquareJetModel {
 public:
  explicit SphereModel(double lambda) : lambda_(lambda) {
    if (!(lambda > 0.0)) throw DomainError("sphere profile needs lambda > 0");
  }
  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::Sphere; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << "sphere(lambda=" << lambda_ << ")";
    return os.str();
  }
  [[nodiscard]] std::optional<SquareJet> square_jet(double t, int order) const override {
    // g(t) = log(2 lambda) - log(lambda^2 + t)
    SquareJet jet = log_shift_jet(lambda_ * lambda_, t, order);
    for (double& v : jet.d) v = -v;
    jet.d[0] += std::log(2.0 * lambda_);
    return jet;
  }
  [[nodiscard]] std::optional<bool> known_normal() const override { return true; }
  [[nodiscard]] double lambda() const { return lambda_; }

 private:
  double lambda_;
};

class CounterexampleModel final : public SquareJetModel {
 public:
  explicit CounterexampleModel(double beta) : beta_(beta) {}
  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::Counterexample; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << "counterexample(beta=" << beta_ << ")";
    return os.str();
  }
  [[nodiscard]] std::optional<SquareJet> square_jet(double t, int order) const override {
    // g(t) = -beta log(1 + t) + t
    SquareJet jet = log_shift_jet(1.0, t, order);
    for (double& v : jet.d) v *= -beta_;
    jet.d[0] += t;
    if (order >= 1) jet.d[1] += 1.0;
    return jet;
  }
  [[nodiscard]] std::optional<bool> known_normal() const override { return false; }

 private:
  double beta_;
};

class ConstantModel final : public SquareJetModel {
 public:
  explicit ConstantModel(double c) : c_(c) {}
  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::Constant; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << "constant(c=" << c_ << ")";
    return os.str();
  }
  [[nodiscard]] std::optional<SquareJet> square_jet(double t, int order) const override {
    SquareJet jet{t, std::vector<double>(order + 1, 0.0)};
    jet.d[0] = c_;
    return jet;
  }
  [[nodiscard]] std::optional<bool> known_normal() const override { return true; }

 private:
  double c_;
};

/// u(r) = a r^2; a = -1 is the non-normal example with finite entropy.
class QuadraticModel final : public SquareJetModel {
 public:
  explicit QuadraticModel(double a) : a_(a) {}
  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::Quadratic; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << "quadratic(a=" << a_ << ")";
    return os.str();
  }
  [[nodiscard]] std::optional<SquareJet> square_jet(double t, int order) const override {
    SquareJet jet{t, std::vector<double>(order + 1, 0.0)};
    jet.d[0] = a_ * t;
    if (order >= 1) jet.d[1] = a_;
    return jet;
  }
  [[nodiscard]] std::optional<bool> known_normal() const override { return a_ == 0.0; }

 private:
  double a_;
};

/// u(r) = a log r; singular at the origin.
class LogRadiusModel final : public SquareJetModel {
 public:
  explicit LogRadiusModel(double a) : a_(a) {}
  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::LogRadius; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << "log(a=" << a_ << ")";
    return os.str();
  }
  [[nodiscard]] std::optional<SquareJet> square_jet(double t, int order) const override {
    SquareJet jet = log_shift_jet(0.0, t, order);
    for (double& v : jet.d) v *= 0.5 * a_;
    return jet;
  }
  [[nodiscard]] bool regular_at_origin() const override { return false; }

 private:
  double a_;
};

/// a u + b v.
class CombinationModel final : public ProfileModel {
 public:
  CombinationModel(double a, RadialProfile u, double b, RadialProfile v)
      : a_(a), b_(b), u_(std::move(u)), v_(std::move(v)) {}
  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::Combination; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << a_ << "*" << u_.describe() << " + " << b_ << "*" << v_.describe();
    return os.str();
  }
  [[nodiscard]] int derivative_order() const override {
    return std::min(u_.derivative_order(), v_.derivative_order());
  }
  [[nodiscard]] double derivative(double r, int k) const override {
    return a_ * u_.eval(r, k) + b_ * v_.eval(r, k);
  }
  [[nodiscard]] std::optional<SquareJet> square_jet(double t, int order) const override {
    auto ju = u_.square_jet(t, order);
    auto jv = v_.square_jet(t, order);
    if (!ju || !jv) return std::nullopt;
    for (std::size_t i = 0; i < ju->d.size(); ++i) ju->d[i] = a_ * ju->d[i] + b_ * jv->d[i];
    return ju;
  }
  [[nodiscard]] bool regular_at_origin() const override {
    return u_.model().regular_at_origin() && v_.model().regular_at_origin();
  }
  [[nodiscard]] std::optional<std::pair<double, double>> domain() const override {
    auto du = u_.model().domain();
    auto dv = v_.model().domain();
    if (!du) return dv;
    if (!dv) return du;
    return std::pair{std::max(du->first, dv->first), std::min(du->second, dv->second)};
  }

 private:
  double a_, b_;
  RadialProfile u_, v_;
};

/// Cubic spline in x = log r on a log-uniform grid.
class SampledModel final : public ProfileModel {
 public:
  SampledModel(double r_min, double r_max, std::vector<double> values)
      : r_min_(r_min), r_max_(r_max) {
    if (!(r_min > 0.0) || !(r_max > r_min)) throw DomainError("sampled grid needs 0 < r_min < r_max");
    if (values.size() < 5) throw DomainError("sampled profile needs at least 5 samples");
    const double h = (std::log(r_max) - std::log(r_min)) / static_cast<double>(values.size() - 1);
    spline_ = std::make_shared<Spline>(values.begin(), values.end(), std::log(r_min), h);
    // error estimate: refit on every other sample and compare at the dropped ones
    std::vector<double> coarse;
    for (std::size_t i = 0; i < values.size(); i += 2) coarse.push_back(values[i]);
    if (coarse.size() >= 4) {
      Spline half(coarse.begin(), coarse.end(), std::log(r_min), 2.0 * h);
      const double x_last = std::log(r_min) + 2.0 * h * static_cast<double>(coarse.size() - 1);
      for (std::size_t i = 1; i < values.size(); i += 2) {
        const double x = std::log(r_min) + h * static_cast<double>(i);
        if (x > x_last) break;
        error_ = std::max(error_, std::abs(half(x) - values[i]));
      }
      // the coarse spline has 16x the O(h^4) error of the fine one
      error_ /= 16.0;
    }
    samples_ = std::move(values);
  }

  [[nodiscard]] ProfileFamily family() const override { return ProfileFamily::Sampled; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << "sampled(" << samples_.size() << " pts on [" << r_min_ << ", " << r_max_ << "])";
    return os.str();
  }
  [[nodiscard]] int derivative_order() const override { return 2; }
  [[nodiscard]] double derivative(double r, int k) const override {
    const double x = std::log(r);
    switch (k) {
      case 0: return (*spline_)(x);
      case 1: return spline_->prime(x) / r;
      default: return (spline_->double_prime(x) - spline_->prime(x)) / (r * r);
    }
  }
  [[nodiscard]] std::optional<std::pair<double, double>> domain() const override {
    return std::pair{r_min_, r_max_};
  }
  [[nodiscard]] double interpolation_error() const override { return error_; }

 private:
  using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
  double r_min_, r_max_;
  std::shared_ptr<Spline> spline_;
  std::vector<double> samples_;
  double error_ = 0.0;
};

}  // namespace detail

inline RadialProfile sphere_profile(int n, double lambda) {
  return {n, std::make_shared<detail::SphereModel>(lambda)};
}
inline RadialProfile counterexample_profile(int n, double beta) {
  return {n, std::make_shared<detail::CounterexampleModel>(beta)};
}
inline RadialProfile constant_profile(int n, double c) {
  return {n, std::make_shared<detail::ConstantModel>(c)};
}
inline RadialProfile quadratic_profile(int n, double a) {
  return {n, std::make_shared<detail::QuadraticModel>(a)};
}
inline RadialProfile log_radius_profile(int n, double a) {
  return {n, std::make_shared<detail::LogRadiusModel>(a)};
}
inline RadialProfile combine(double a, const RadialProfile& u, double b, const RadialProfile& v) {
  if (u.dimension() != v.dimension()) throw DomainError("combine: dimension mismatch");
  return {u.dimension(), std::make_shared<detail::CombinationModel>(a, u, b, v)};
}

/// Profile interpolating `values` given on a log-uniform grid over [r_min, r_max].
inline RadialProfile sampled_profile(int n, double r_min, double r_max, std::vector<double> values) {
  return {n, std::make_shared<detail::SampledModel>(r_min, r_max, std::move(values))};
}

/// Samples p on `count` log-uniform radii and wraps the result as a Sampled profile.
inline RadialProfile sample_profile(const RadialProfile& p, double r_min, double r_max, int count) {
  std::vector<double> values(count);
  const double h = (std::log(r_max) - std::log(r_min)) / (count - 1);
  for (int i = 0; i < count; ++i) values[i] = p(std::exp(std::log(r_min) + h * i));
  return sampled_profile(p.dimension(), r_min, r_max, std::move(values));
}

}  // namespace qcurv
