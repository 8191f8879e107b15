#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/density.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/profile.hpp"
#include "qcurv/quadrature.hpp"
#include "qcurv/rational.hpp"

namespace qcurv {

struct PotentialConfig {
  double r_max = 1e5;  // truncation radius for non-compact densities
  double first_panel = 1.0 / 64.0;
  double panel_ratio = 1.2;
  int order = 20;  // Gauss-Legendre nodes per panel
  double constant = 0.0;
  double tail_tolerance = 1e-8;  // largest accepted tail-model error in u
  unsigned workers = 0;          // 0: hardware concurrency
};

namespace detail {

/// One term coef * r^power * X of a potential derivative, where X is a
/// moment M_j = int_0^r s^{2j} rho, N_j = int_r^inf s^{-2j} rho, or
/// F_i = |S^{n-1}| f^{(i)}(r), with rho(s) = |S^{n-1}| s^{n-1} f(s).
struct PotentialTerm {
  enum Kind { M, N, F };
  Rational coef;
  int power;
  Kind kind;
  int index;
};

/// d^k u / dr^k (k >= 1) as a term list, without the factor K.
inline std::vector<PotentialTerm> potential_derivative_terms(int n, int k) {
  using Key = std::tuple<int, int, int>;  // kind, index, power
  std::map<Key, Rational> acc;
  const std::vector<Rational> c = log_kernel_coefficients(n);
  acc[{PotentialTerm::M, 0, -1}] += Rational(-1);
  for (int j = 1; j <= static_cast<int>(c.size()); ++j) {
    acc[{PotentialTerm::M, j, -2 * j - 1}] += c[j - 1] * Rational(2 * j);
    acc[{PotentialTerm::N, j, 2 * j - 1}] += c[j - 1] * Rational(-2 * j);
  }
  for (int step = 1; step < k; ++step) {
    std::map<Key, Rational> next;
    for (const auto& [key, coef] : acc) {
      const auto [kind, idx, p] = key;
      if (p != 0) next[{kind, idx, p - 1}] += coef * Rational(p);
      switch (kind) {
        case PotentialTerm::M: next[{PotentialTerm::F, 0, p + 2 * idx + n - 1}] += coef; break;
        case PotentialTerm::N: next[{PotentialTerm::F, 0, p - 2 * idx + n - 1}] += -coef; break;
        default: next[{PotentialTerm::F, idx + 1, p}] += coef; break;
      }
    }
    acc.clear();
    for (const auto& [key, coef] : next) {
      if (!coef.is_zero()) acc[key] = coef;
    }
  }
  std::vector<PotentialTerm> out;
  for (const auto& [key, coef] : acc) {
    const auto [kind, idx, p] = key;
    out.push_back({coef, p, static_cast<PotentialTerm::Kind>(kind), idx});
  }
  return out;
}

inline const std::vector<PotentialTerm>& cached_potential_terms(int n, int k) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<PotentialTerm>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({n, k});
  if (it == cache.end()) it = cache.emplace(std::pair{n, k}, potential_derivative_terms(n, k)).first;
  return it->second;
}

/// Moments of rho at one radius.
struct Moments {
  std::vector<double> m;  // m[j] = M_j, j = 0..p
  std::vector<double> nn;  // nn[j] = N_j, j = 1..p (nn[0] unused)
  double l = 0.0;         // int_0^r log s rho
};

/// Panel-wise moments of the density, with prefix and suffix sums.
class PotentialData {
 public:
  PotentialData(CurvatureDensity f, const PotentialConfig& cfg)
      : f_(std::move(f)), cfg_(cfg), n_(f_.dimension()), p_(n_ / 2 - 1), area_(sphere_area(n_ - 1)),
        k_(log_potential_factor(n_)), rule_(&gauss_legendre(cfg.order)) {
    for (const Rational& c : log_kernel_coefficients(n_)) coef_.push_back(c.value());
    const DensitySupport& sup = f_.support();
    compact_ = sup.compact() && sup.outer <= cfg.r_max;
    const double end = compact_ ? sup.outer : cfg.r_max;
    if (!(end > 0.0) || end <= sup.inner) {
      empty_ = true;
      grid_ = PanelGrid({0.0, 1.0});
    } else {
      const std::vector<double> extra{sup.inner};
      grid_ = geometric_panels(cfg.first_panel, cfg.panel_ratio, end, extra);
    }
    const std::size_t np = grid_.panels();
    const std::size_t nm = static_cast<std::size_t>(p_) + 1;
    pm_.assign(np, std::vector<double>(nm, 0.0));
    pn_.assign(np, std::vector<double>(nm, 0.0));
    pl_.assign(np, 0.0);
    if (!empty_) {
      parallel_for(
          np,
          [&](std::size_t i) {
            if (grid_.upper(i) <= sup.inner) return;
            panel_moments(grid_.lower(i), grid_.upper(i), pm_[i], pn_[i], pl_[i]);
          },
          cfg.workers);
    }
    mpre_.assign(np + 1, std::vector<double>(nm, 0.0));
    nsuf_.assign(np + 1, std::vector<double>(nm, 0.0));
    lpre_.assign(np + 1, 0.0);
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < nm; ++j) mpre_[i + 1][j] = mpre_[i][j] + pm_[i][j];
      lpre_[i + 1] = lpre_[i] + pl_[i];
    }
    tail_.assign(nm, 0.0);
    if (!compact_ && !empty_) compute_tail(end);
    for (std::size_t i = np; i-- > 0;) {
      for (std::size_t j = 0; j < nm; ++j) nsuf_[i][j] = nsuf_[i + 1][j] + pn_[i][j];
    }
  }

  [[nodiscard]] int dimension() const { return n_; }
  [[nodiscard]] const CurvatureDensity& density() const { return f_; }
  [[nodiscard]] const PotentialConfig& config() const { return cfg_; }
  [[nodiscard]] int derivative_order() const { return n_ + std::min(f_.derivative_order(), 8); }
  [[nodiscard]] double total() const { return mpre_.back()[0] + tail_[0]; }
  [[nodiscard]] double end() const { return grid_.back(); }
  [[nodiscard]] bool compact() const { return compact_; }

  [[nodiscard]] Moments moments(double r) const {
    const std::size_t nm = static_cast<std::size_t>(p_) + 1;
    Moments out;
    out.m.assign(nm, 0.0);
    out.nn.assign(nm, 0.0);
    if (empty_) return out;
    if (r >= grid_.back()) {
      if (!compact_ && r > grid_.back() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "potential evaluated at r = " << r << " beyond the truncation radius " << grid_.back();
        throw DomainError(os.str());
      }
      out.m = mpre_.back();
      for (std::size_t j = 1; j < nm; ++j) out.nn[j] = tail_[j];
      out.l = lpre_.back();
      return out;
    }
    const std::size_t i = grid_.locate(r);
    std::vector<double> part_m(nm, 0.0);
    std::vector<double> part_n(nm, 0.0);
    double part_l = 0.0;
    if (r > grid_.lower(i)) panel_moments(grid_.lower(i), r, part_m, part_n, part_l);
    for (std::size_t j = 0; j < nm; ++j) {
      out.m[j] = mpre_[i][j] + part_m[j];
      if (j > 0) out.nn[j] = nsuf_[i + 1][j] + (pn_[i][j] - part_n[j]) + tail_[j];
    }
    out.l = lpre_[i] + part_l;
    return out;
  }

  /// u(r) - C.
  [[nodiscard]] double value(double r) const {
    if (r < kOrigin) return 0.0;
    const Moments mo = moments(r);
    double s = mo.l - std::log(r) * mo.m[0];
    for (int j = 1; j <= p_; ++j) {
      s -= coef_[j - 1] * (std::pow(r, -2 * j) * mo.m[j] + std::pow(r, 2 * j) * mo.nn[j]);
    }
    return k_ * s;
  }

  [[nodiscard]] double derivative(double r, int k) const {
    if (k == 0) return value(r);
    if (k > derivative_order()) throw OrderTooHigh(k, derivative_order());
    if (r < kOrigin) {
      if (k % 2 == 1) return 0.0;
      r = kOrigin;
    }
    const Moments mo = moments(r);
    double s = 0.0;
    for (const PotentialTerm& t : cached_potential_terms(n_, k)) {
      double x = 0.0;
      switch (t.kind) {
        case PotentialTerm::M: x = mo.m[t.index]; break;
        case PotentialTerm::N: x = mo.nn[t.index]; break;
        case PotentialTerm::F: x = area_ * f_.derivative(r, t.index); break;
      }
      if (x != 0.0) s += t.coef.value() * std::pow(r, t.power) * x;
    }
    return k_ * s;
  }

  static constexpr double kOrigin = 1e-8;

 private:
  void panel_moments(double a, double b, std::vector<double>& m, std::vector<double>& nn, double& l) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (std::size_t q = 0; q < rule_->size(); ++q) {
      const double s = mid + half * rule_->nodes[q];
      const double w = half * rule_->weights[q] * area_ * std::pow(s, n_ - 1) * f_(s);
      if (w == 0.0) continue;
      const double s2 = s * s;
      double up = 1.0;
      for (int j = 0; j <= p_; ++j, up *= s2) {
        m[j] += w * up;
        if (j > 0) nn[j] += w / up;
      }
      l += w * std::log(s);
    }
  }

  void compute_tail(double end) {
    const double rho_end = area_ * std::pow(end, n_ - 1) * f_(end);
    if (rho_end == 0.0) return;
    const double p = f_.support().decay_exponent;
    if (!(p > n_)) {
      std::ostringstream os;
      os << "density decays like r^-" << p << " beyond r = " << end << "; the potential needs decay faster than r^-"
         << n_;
      throw TailNotConvergent(os.str());
    }
    if (!std::isfinite(p)) return;
    // rho(s) ~ rho(end) (s/end)^{n-1-p}
    tail_[0] = rho_end * end / (p - n_);
    double worst = 0.0;
    for (int j = 1; j <= p_; ++j) {
      tail_[j] = rho_end * std::pow(end, 1 - 2 * j) / (p + 2 * j - n_);
      worst += std::abs(coef_[j - 1]) * std::pow(end, 2 * j) * std::abs(tail_[j]);
    }
    // Tail model assumed good to 10%.
    if (0.1 * k_ * worst > cfg_.tail_tolerance) {
      std::ostringstream os;
      os << "tail-truncation error " << 0.1 * k_ * worst << " exceeds tolerance " << cfg_.tail_tolerance
         << "; increase r_max";
      throw TailNotConvergent(os.str());
    }
  }

  CurvatureDensity f_;
  PotentialConfig cfg_;
  int n_;
  int p_;
  double area_;
  double k_;
  const GaussRule* rule_;
  std::vector<double> coef_;
  bool compact_ = false;
  bool empty_ = false;
  PanelGrid grid_;
  std::vector<std::vector<double>> pm_, pn_, mpre_, nsuf_;
  std::vector<double> pl_, lpre_, tail_;
};

}  // namespace detail

/// u(r) = C + K int (log s - F_n(r, s)) f(s) |S^{n-1}| s^{n-1} ds with
/// K = 2 / ((n-1)! |S^n|). The angular kernel is applied through its exact
/// even-dimensional series, so every derivative comes from differentiating
/// the kernel against the density.
class PotentialField final : public ProfileModel {
 public:
  PotentialField(CurvatureDensity f, const PotentialConfig& cfg,
                 ProfileFamily family = ProfileFamily::PotentialGenerated)
      : data_(std::make_shared<const detail::PotentialData>(std::move(f), cfg)), family_(family) {}

  [[nodiscard]] ProfileFamily family() const override { return family_; }
  [[nodiscard]] std::string describe() const override {
    std::ostringstream os;
    os << to_string(family_) << "(" << data_->density().function().name() << ", C=" << data_->config().constant
       << ")";
    return os.str();
  }
  [[nodiscard]] int derivative_order() const override { return data_->derivative_order(); }
  [[nodiscard]] double derivative(double r, int k) const override {
    const double v = data_->derivative(r, k);
    return k == 0 ? v + data_->config().constant : v;
  }
  [[nodiscard]] std::optional<bool> known_normal() const override { return true; }

  [[nodiscard]] const CurvatureDensity& density() const { return data_->density(); }
  [[nodiscard]] double alpha0() const { return 2.0 * data_->total() / sphere_total_curvature(data_->dimension()); }
  [[nodiscard]] double truncation_radius() const {
    return data_->compact() ? std::numeric_limits<double>::infinity() : data_->end();
  }

 private:
  std::shared_ptr<const detail::PotentialData> data_;
  ProfileFamily family_;
};

inline RadialProfile potential_from_density(const CurvatureDensity& f, const PotentialConfig& cfg = {}) {
  return {f.dimension(), std::make_shared<PotentialField>(f, cfg)};
}

/// The potential model behind a profile, if it has one.
inline const PotentialField* as_potential(const RadialProfile& p) {
  return dynamic_cast<const PotentialField*>(&p.model());
}

/// Iterate of the fixed-point scheme, stored at the quadrature nodes.
struct PicardState {
  std::vector<double> nodes;
  std::vector<double> values;
  double residual = std::numeric_limits<double>::infinity();
  double theta = 1.0;
  int iterations = 0;
};

struct PicardResult {
  RadialProfile solution;
  CurvatureDensity density;
  PicardState state;
  std::vector<double> residual_history;
  bool converged = false;
};

struct PicardOptions {
  double theta = 0.5;
  double tolerance = 1e-10;
  double theta_floor = 1.0 / 64.0;
  int max_iterations = 500;
};

namespace detail {

/// Piecewise polynomial through values at the Gauss nodes of each panel.
class NodalField {
 public:
  NodalField(const PanelGrid& grid, const GaussRule& rule, std::vector<double> values)
      : grid_(grid), rule_(&rule), values_(std::move(values)) {}

  [[nodiscard]] double operator()(double r) const {
    const std::size_t i = grid_.locate(r);
    const double a = grid_.lower(i);
    const double b = grid_.upper(i);
    const double x = std::clamp((2.0 * r - a - b) / (b - a), -1.0, 1.0);
    const std::span<const double> v(values_.data() + i * rule_->size(), rule_->size());
    return barycentric_interpolate(*rule_, v, x);
  }

 private:
  PanelGrid grid_;
  const GaussRule* rule_;
  std::vector<double> values_;
};

inline std::vector<double> panel_nodes(const PanelGrid& grid, const GaussRule& rule) {
  std::vector<double> out;
  out.reserve(grid.panels() * rule.size());
  for (std::size_t i = 0; i < grid.panels(); ++i) {
    const double half = 0.5 * (grid.upper(i) - grid.lower(i));
    const double mid = 0.5 * (grid.upper(i) + grid.lower(i));
    for (double x : rule.nodes) out.push_back(mid + half * x);
  }
  return out;
}

}  // namespace detail

/// The density Q e^{n u} for u given at the nodes of `grid`.
inline CurvatureDensity exponential_density(int n, const RadialFunction& q, const PanelGrid& grid,
                                            const GaussRule& rule, std::vector<double> u_values) {
  auto field = std::make_shared<detail::NodalField>(grid, rule, std::move(u_values));
  const double end = grid.back();
  RadialFunction f(
      [q, field, n, end](double r, int k) {
        if (k != 0) throw OrderTooHigh(k, 0);
        if (r > end) return 0.0;
        const double qv = q(r);
        return qv == 0.0 ? 0.0 : qv * std::exp(n * (*field)(r));
      },
      0, "Q e^{nu}, Q = " + q.name());
  DensitySupport support;
  support.decay_exponent = estimate_decay_exponent([&](double r) { return f(r); }, 0.5 * end);
  RadialQuadratureOptions opts;
  opts.far_radius = end;
  return make_density(n, std::move(f), support, opts);
}

/// Damped fixed-point iteration u <- (1 - theta) u + theta (P[Q e^{nu}] + C),
/// with P the log potential. theta is halved whenever the residual grows.
inline PicardResult picard_solve(int n, const RadialFunction& q, const RadialProfile& u0,
                                 const PotentialConfig& cfg = {}, const PicardOptions& opts = {}) {
  require_even_dimension(n);
  if (u0.dimension() != n) throw DomainError("picard_solve: initial profile has the wrong dimension");
  if (!(opts.theta > 0.0 && opts.theta <= 1.0)) throw DomainError("picard_solve: damping must lie in (0, 1]");
  const GaussRule& rule = gauss_legendre(cfg.order);
  const PanelGrid grid = geometric_panels(cfg.first_panel, cfg.panel_ratio, cfg.r_max);
  PicardState state;
  state.nodes = detail::panel_nodes(grid, rule);
  state.theta = opts.theta;
  state.values.resize(state.nodes.size());
  for (std::size_t i = 0; i < state.nodes.size(); ++i) state.values[i] = u0(state.nodes[i]);

  PotentialConfig inner = cfg;
  inner.constant = 0.0;
  auto apply = [&](const std::vector<double>& u, CurvatureDensity& density_out) {
    density_out = exponential_density(n, q, grid, rule, u);
    const detail::PotentialData pot(density_out, inner);
    std::vector<double> out(state.nodes.size());
    parallel_for(
        state.nodes.size(), [&](std::size_t i) { out[i] = pot.value(state.nodes[i]) + cfg.constant; },
        cfg.workers);
    return out;
  };
  auto residual_of = [](const std::vector<double>& u, const std::vector<double>& image) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i] - image[i]));
    return m;
  };

  std::vector<double> history;
  CurvatureDensity density;
  std::vector<double> image = apply(state.values, density);
  state.residual = residual_of(state.values, image);
  history.push_back(state.residual);
  std::vector<double> prev_values = state.values;
  std::vector<double> prev_image = image;
  double prev_residual = state.residual;
  bool accepted_once = false;

  while (state.residual > opts.tolerance) {
    if (state.iterations >= opts.max_iterations) {
      std::ostringstream os;
      os << "fixed-point iteration did not reach " << opts.tolerance << " in " << opts.max_iterations
         << " iterations (residual " << state.residual << ")";
      throw DivergenceError(os.str());
    }
    ++state.iterations;
    std::vector<double> next(state.values.size());
    for (std::size_t i = 0; i < next.size(); ++i) {
      next[i] = (1.0 - state.theta) * prev_values[i] + state.theta * prev_image[i];
    }
    CurvatureDensity next_density;
    std::vector<double> next_image = apply(next, next_density);
    const double r = residual_of(next, next_image);
    if (!std::isfinite(r) || (accepted_once && r > prev_residual) || (!accepted_once && r > 4.0 * prev_residual)) {
      state.theta *= 0.5;
      if (state.theta < opts.theta_floor) {
        std::ostringstream os;
        os << "fixed-point iteration diverges: residual " << r << " after damping reached the floor "
           << opts.theta_floor;
        throw DivergenceError(os.str());
      }
      continue;
    }
    accepted_once = true;
    state.values = next;
    state.residual = r;
    density = std::move(next_density);
    prev_values = std::move(next);
    prev_image = std::move(next_image);
    prev_residual = r;
    history.push_back(r);
  }
  RadialProfile solution(n, std::make_shared<PotentialField>(density, cfg, ProfileFamily::PicardSolution));
  return {std::move(solution), std::move(density), std::move(state), std::move(history), true};
}

}  // namespace qcurv
