#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qcurv/calculus.hpp"
#include "qcurv/config.hpp"
#include "qcurv/density.hpp"
#include "qcurv/endmodel.hpp"
#include "qcurv/functionals.hpp"
#include "qcurv/kernels.hpp"
#include "qcurv/oracles.hpp"
#include "qcurv/parallel.hpp"
#include "qcurv/potential.hpp"
#include "qcurv/profile.hpp"

namespace qcurv {

/// Outcome of one verified statement.
struct CheckReport {
  enum class Kind { Point, Interval, Flag };

  std::string id;
  std::string anchor;  // the statement being checked
  Kind kind = Kind::Point;
  double expected = 0.0;  // Point
  double lower = 0.0;     // Interval
  double upper = 0.0;
  double measured = 0.0;  // Flag: 1 for true
  double tolerance = 0.0;
  bool pass = false;
  double runtime_ms = 0.0;
  bool informational = false;
  bool overridden = false;  // tolerance taken from the config instead of the default
  std::string note;

  [[nodiscard]] std::string expected_text() const {
    std::ostringstream os;
    os << std::setprecision(10);
    switch (kind) {
      case Kind::Point: os << expected; break;
      case Kind::Interval: os << "[" << lower << "; " << upper << "]"; break;
      case Kind::Flag: os << "true"; break;
    }
    return os.str();
  }
};

/// pass <=> |measured - expected| <= tol, or measured within [lo - tol, hi + tol].
inline bool evaluate_report(const CheckReport& r) {
  if (std::isnan(r.measured)) return false;
  switch (r.kind) {
    case CheckReport::Kind::Point: return std::abs(r.measured - r.expected) <= r.tolerance;
    case CheckReport::Kind::Interval: return r.measured >= r.lower - r.tolerance && r.measured <= r.upper + r.tolerance;
    case CheckReport::Kind::Flag: return r.measured == 1.0;
  }
  return false;
}

class SuiteContext;

/// Collects the reports of one registered check, timing each one from the
/// previous report (or the start of the check).
class Recorder {
 public:
  Recorder(std::string prefix, std::string anchor, const SuiteConfig& cfg)
      : prefix_(std::move(prefix)), anchor_(std::move(anchor)), cfg_(cfg), last_(Clock::now()) {}

  /// Default tolerance unless the config overrides it for this check id.
  double tolerance(double fallback) {
    auto it = cfg_.tolerances.find(prefix_);
    if (it == cfg_.tolerances.end()) return fallback;
    overridden_ = it->second != fallback;
    return it->second;
  }

  CheckReport& point(const std::string& sub, double expected, double measured, double tol, std::string note = {}) {
    CheckReport r = base(sub, std::move(note));
    r.kind = CheckReport::Kind::Point;
    r.expected = expected;
    r.measured = measured;
    r.tolerance = tol;
    return push(std::move(r));
  }

  /// Relative tolerance expressed as an absolute one.
  CheckReport& relative(const std::string& sub, double expected, double measured, double rel, std::string note = {}) {
    std::ostringstream os;
    os << "relative tolerance " << rel;
    if (!note.empty()) os << "; " << note;
    return point(sub, expected, measured, rel * std::abs(expected), os.str());
  }

  CheckReport& interval(const std::string& sub, double lo, double hi, double measured, double tol,
                        std::string note = {}) {
    CheckReport r = base(sub, std::move(note));
    r.kind = CheckReport::Kind::Interval;
    r.lower = lo;
    r.upper = hi;
    r.measured = measured;
    r.tolerance = tol;
    return push(std::move(r));
  }

  CheckReport& flag(const std::string& sub, bool value, std::string note = {}) {
    CheckReport r = base(sub, std::move(note));
    r.kind = CheckReport::Kind::Flag;
    r.measured = value ? 1.0 : 0.0;
    return push(std::move(r));
  }

  CheckReport& info(const std::string& sub, double measured, std::string note) {
    CheckReport r = base(sub, std::move(note));
    r.kind = CheckReport::Kind::Point;
    r.expected = measured;
    r.measured = measured;
    r.informational = true;
    return push(std::move(r));
  }

  std::vector<CheckReport> take() { return std::move(reports_); }

 private:
  using Clock = std::chrono::steady_clock;

  CheckReport base(const std::string& sub, std::string note) const {
    CheckReport r;
    r.id = sub.empty() ? prefix_ : prefix_ + "." + sub;
    r.anchor = anchor_;
    r.note = std::move(note);
    r.overridden = overridden_;
    return r;
  }

  CheckReport& push(CheckReport r) {
    const auto now = Clock::now();
    r.runtime_ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    r.pass = evaluate_report(r) || r.informational;
    reports_.push_back(std::move(r));
    return reports_.back();
  }

  std::string prefix_;
  std::string anchor_;
  const SuiteConfig& cfg_;
  Clock::time_point last_;
  bool overridden_ = false;
  std::vector<CheckReport> reports_;
};

/// Shared, lazily built inputs of the checks (profiles are immutable once built).
class SuiteContext {
 public:
  explicit SuiteContext(SuiteConfig cfg) : cfg_(std::move(cfg)) {}

  [[nodiscard]] const SuiteConfig& config() const { return cfg_; }

  /// Profile from a spec string in R^4, built once.
  RadialProfile profile(const std::string& spec) {
    std::shared_ptr<Slot> slot;
    {
      std::lock_guard lock(mutex_);
      auto& s = profiles_[spec];
      if (!s) s = std::make_shared<Slot>();
      slot = s;
    }
    std::call_once(slot->once, [&] { slot->value = std::make_shared<RadialProfile>(make_profile(spec, 4)); });
    if (!slot->value) throw Error("profile '" + spec + "' failed to build earlier");
    return *slot->value;
  }

  /// The compactly supported test profile with alpha0 = 0.5 in R^4.
  RadialProfile compact_half() { return profile("compact:alpha0=0.5,radius=2.5"); }

  /// Fixed point for Q = 0.1 exp(-r^2) in R^4.
  const PicardResult& picard() {
    std::call_once(picard_once_, [&] {
      PicardOptions opts;
      opts.theta = 0.5;
      opts.tolerance = 1e-10;
      picard_ = std::make_unique<PicardResult>(
          picard_solve(4, gaussian_function(0.1, 1.0), constant_profile(4, 0.0), PotentialConfig{}, opts));
    });
    return *picard_;
  }

  std::vector<double> entropy_schedule() const {
    return geometric_schedule(cfg_.entropy_start, 2.0, cfg_.entropy_end);
  }

 private:
  struct Slot {
    std::once_flag once;
    std::shared_ptr<RadialProfile> value;
  };

  SuiteConfig cfg_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Slot>> profiles_;
  std::once_flag picard_once_;
  std::unique_ptr<PicardResult> picard_;
};

/// A registered check: id, the statement it verifies, and how to verify it.
struct CheckDefinition {
  std::string id;
  std::string anchor;
  std::function<void(SuiteContext&, Recorder&)> run;
};

namespace checks {

inline std::vector<double> kernel_grid() { return log_grid(0.1, 10.0, 20); }

inline void newtonian_kernel(SuiteContext& ctx, Recorder& rec) {
  const double tol = rec.tolerance(1e-10);
  for (int n : ctx.config().dimensions) {
    double worst = 0.0;
    for (double r : kernel_grid()) {
      for (double s : kernel_grid()) {
        const double exact = std::pow(std::max(r, s), 2.0 - n);
        worst = std::max(worst, std::abs(angular_pow_avg(n, r, s, n - 2.0) - exact));
      }
    }
    rec.point("n" + std::to_string(n), 0.0, worst, tol, "max deviation on the 20x20 grid over [0.1, 10]^2");
  }
}

inline void mean_value_bound(SuiteContext& ctx, Recorder& rec) {
  const double tol = rec.tolerance(1e-12);
  for (int n : ctx.config().dimensions) {
    for (int k = 1; k <= n - 2; ++k) {
      double worst = 0.0;
      for (double r : kernel_grid()) {
        for (double s : kernel_grid()) worst = std::max(worst, std::pow(s, k) * angular_pow_avg(n, r, s, k));
      }
      rec.interval("n" + std::to_string(n) + ".k" + std::to_string(k), 0.0, 1.0, worst, tol,
                   "max of s^k * mean over the grid");
    }
  }
}

inline void log_kernel_closed_form(SuiteContext& ctx, Recorder& rec) {
  const double tol = rec.tolerance(1e-9);
  auto closed = [](double r, double s) {
    const double big = std::max(r, s);
    const double small = std::min(r, s);
    return std::log(big) + small * small / (4.0 * big * big);
  };
  const std::vector<std::pair<double, double>> probes{{2.0, 1.0}, {1.0, 1.0}};
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const auto [r, s] = probes[i];
    const MonteCarloEstimate mc = monte_carlo_log_avg(4, r, s, ctx.config().mc_samples, ctx.config().seed + i);
    std::ostringstream sub;
    sub << "monte-carlo.r" << r << ".s" << s;
    std::ostringstream note;
    note << std::setprecision(10) << "sigmas between closed form and " << mc.samples << "-sample mean " << mc.mean
         << " (std error " << mc.std_error << ")";
    rec.interval(sub.str(), 0.0, 3.0, std::abs(mc.mean - closed(r, s)) / mc.std_error, 0.0, note.str());
  }
  double worst = 0.0;
  for (double r : kernel_grid()) {
    for (double s : kernel_grid()) worst = std::max(worst, std::abs(angular_log_avg(4, r, s) - closed(r, s)));
  }
  rec.point("grid", 0.0, worst, tol, "max deviation of the quadrature from the closed form");
}

inline void sphere_curvature(SuiteContext& ctx, Recorder& rec) {
  const double q_tol = rec.tolerance(1e-8);
  for (double lambda : {0.5, 1.0, 2.0}) {
    std::ostringstream name;
    name << "lambda" << lambda;
    const RadialProfile u = ctx.profile("sphere:lambda=" + std::to_string(lambda));
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) worst = std::max(worst, std::abs(q_curvature(u, 0.01 * i) - 6.0));
    rec.point(name.str() + ".q", 0.0, worst, q_tol, "max |Q - 6| on [0, 10]");
    DensitySupport sup;
    sup.decay_exponent = 8.0;
    const RadialIntegral vol = integrate_radial(4, [&](double r) { return std::exp(4.0 * u(r)); }, sup);
    const double exact = 8.0 * std::numbers::pi * std::numbers::pi / 3.0;
    rec.point(name.str() + ".volume", 0.0, std::abs(vol.value - exact) / exact, 1e-6,
              "relative error of the conformal volume against |S^4|");
    rec.point(name.str() + ".alpha0", 2.0, alpha0(u), 1e-6);
  }
}

inline void counterexample_mass(SuiteContext& ctx, Recorder& rec) {
  const double rel = rec.tolerance(0.01);
  for (double beta : {-1.0, 1.0, 2.0}) {
    const RadialProfile u = ctx.profile("counterexample:beta=" + std::to_string(beta));
    DensitySupport ball{0.0, 50.0};
    const RadialIntegral mass = integrate_radial(4, [&](double r) { return polyharmonic(u, r, 2); }, ball);
    std::ostringstream name;
    name << "beta" << beta;
    rec.relative(name.str(), 16.0 * std::numbers::pi * std::numbers::pi * beta, mass.value, rel,
                 "integral of the bilaplacian over the ball of radius 50");
  }
}

inline void round_trip(SuiteContext& ctx, Recorder& rec) {
  const RadialProfile u = ctx.profile("sphere:lambda=1");
  const RadialProfile v = potential_from_density(density_from_profile(u));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i <= 5000; ++i) {
    const double r = 0.01 * i;
    const double d = u(r) - v(r);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  std::ostringstream note;
  note << std::setprecision(12) << "fitted constant " << 0.5 * (lo + hi);
  rec.point("sphere1", 0.0, 0.5 * (hi - lo), rec.tolerance(1e-6), note.str());
}

inline void sphere_mean_asymptotics(SuiteContext& ctx, Recorder& rec) {
  const double rel = rec.tolerance(0.01);
  const SphereMeanLimits lim = sphere_mean_limits(ctx.compact_half(), ctx.config().limit_schedule);
  rec.relative("laplacian", 1.0, lim.laplacian.limit, rel);
  rec.relative("slope", -0.5, lim.slope.limit, rel);
  rec.relative("gradient", 0.25, lim.gradient.limit, rel);
  rec.relative("log-ratio", -0.5, lim.log_ratio.limit, rel);
}

inline void mass_identity(SuiteContext& ctx, Recorder& rec) {
  const double tol = rec.tolerance(1e-2);
  const MassEstimate m = conformal_mass(ctx.compact_half(), ctx.config().mass_centers, ctx.config().limit_schedule);
  for (std::size_t i = 0; i < m.centers.size(); ++i) {
    std::ostringstream name;
    name << "center" << m.centers[i];
    rec.point(name.str(), 0.75, m.per_center[i].limit, tol);
  }
  rec.point("inf", 0.75, m.inf, tol);
  for (double lambda : {0.5, 1.0, 2.0}) {
    std::ostringstream name;
    name << "sphere" << lambda;
    const MassEstimate s = conformal_mass(ctx.profile("sphere:lambda=" + std::to_string(lambda)),
                                          ctx.config().mass_centers, ctx.config().limit_schedule);
    rec.point(name.str(), 0.0, s.inf, tol);
  }
}

inline void volume_entropy_identity(SuiteContext& ctx, Recorder& rec) {
  const double tol = rec.tolerance(0.05);
  const VolumeEntropy t = volume_entropy(ctx.compact_half(), ctx.entropy_schedule());
  rec.point("compact", 0.5, t.limsup, tol);
  rec.flag("compact.identity-applies", t.identity_applies, "complete normal metric");
  const VolumeEntropy s = volume_entropy(ctx.profile("sphere:lambda=1"), ctx.entropy_schedule());
  rec.point("sphere1", 0.0, s.limsup, tol, "finite volume");
  rec.flag("sphere1.incomplete", s.completeness == Completeness::Incomplete, "alpha0 = 2 > 1");
  rec.flag("sphere1.identity-not-asserted", !s.identity_applies, "1 - alpha0 = -1 is not expected");
}

inline void picard_pohozaev(SuiteContext& ctx, Recorder& rec) {
  const PicardResult& res = ctx.picard();
  rec.interval("residual", 0.0, 1e-8, res.state.residual, 0.0, "sup-norm fixed-point residual on the nodes");
  // alpha0 of the fixed point against an independent radial integral of Q e^{4u}.
  const RadialFunction q = gaussian_function(0.1, 1.0);
  DensitySupport sup{0.0, 50.0};
  const RadialIntegral direct = integrate_radial(4, [&](double r) { return q(r) * std::exp(4.0 * res.solution(r)); }, sup);
  rec.point("alpha0-self-consistent", alpha0(res.density), 2.0 * direct.value / sphere_total_curvature(4), 1e-8);
  const MassEstimate m = conformal_mass(res.solution, ctx.config().mass_centers, ctx.config().limit_schedule);
  const double poh = pohozaev_mass(q, res.solution);
  std::ostringstream note;
  note << std::setprecision(12) << "pohozaev " << poh << ", conformal mass " << m.inf;
  rec.point("pohozaev", 0.0, std::abs(poh - m.inf) / std::abs(m.inf), rec.tolerance(1e-3), note.str());
}

inline void end_isoperimetry(SuiteContext& ctx, Recorder& rec) {
  const std::vector<double>& sched = ctx.config().limit_schedule;
  const EndProfile flat(std::nullopt, 0.0);
  rec.point("flat.r1000", 1.0, isoperimetric_ratio(flat, 1e3), 1e-3);
  rec.point("flat.limit", 1.0, end_nu(flat, sched).estimate.limit, 1e-3);
  const EndProfile pure_log(std::nullopt, -1.0);
  const EndNu log_nu = end_nu(pure_log, sched);
  rec.point("pure-log.limit", 0.0, log_nu.estimate.limit, 1e-3);
  rec.flag("pure-log.range", log_nu.in_range, "R_g >= C > 0 forces the limit 0");
  const EndProfile shell(shell_density(4, 0.5, 1.0, 3.0), 0.0);
  const EndNu nu = end_nu(shell, sched);
  const EndLimits lim = end_limits(shell, sched);
  rec.point("compact.limit", 0.5, nu.estimate.limit, rec.tolerance(1e-2));
  std::ostringstream note;
  note << std::setprecision(10) << "end_nu " << nu.estimate.limit << ", 1 + lim r w' " << 1.0 + lim.slope.limit;
  rec.point("compact.consistency", 0.0, std::abs(nu.estimate.limit - (1.0 + lim.slope.limit)),
            nu.estimate.error + lim.slope.error, note.str());
}

inline void sign_regime(SuiteContext& ctx, Recorder& rec) {
  const double eps = rec.tolerance(0.02);
  for (const auto& [name, spec] : ctx.config().profiles) {
    const RadialProfile u = ctx.profile(spec);
    const double a = alpha0(u);
    if (scalar_curvature_nonnegative(u)) {
      rec.interval(name, 0.0, 2.0, a, eps, "R_g >= 0 on [10, 1000]");
    } else {
      rec.info(name, a, "R_g changes sign outside r = 10; no constraint on alpha0");
    }
  }
}

inline void jensen(SuiteContext& ctx, Recorder& rec) {
  const auto& roster = ctx.config().profiles;
  if (roster.empty()) {
    rec.info("empty-roster", 1.0, "no profiles to sample");
    return;
  }
  std::mt19937_64 rng(ctx.config().seed);
  std::uniform_int_distribution<std::size_t> pick(0, roster.size() - 1);
  std::uniform_real_distribution<double> center(0.0, 5.0);
  std::uniform_real_distribution<double> power(-4.0, 4.0);
  std::uniform_real_distribution<double> log_radius(std::log(0.1), std::log(100.0));
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (std::size_t i = 0; i < ctx.config().jensen_samples; ++i) {
    const auto& [name, spec] = roster[pick(rng)];
    const double c = center(rng);
    const double k = power(rng);
    const double r = std::exp(log_radius(rng));
    const double ratio = exp_mean_ratio(ctx.profile(spec), c, k, r);
    if (ratio < worst) {
      worst = ratio;
      std::ostringstream os;
      os << std::setprecision(6) << "minimum at " << name << ", c=" << c << ", k=" << k << ", r=" << r;
      where = os.str();
    }
  }
  rec.interval("min-ratio", 1.0, std::numeric_limits<double>::infinity(), worst, rec.tolerance(1e-12), where);
}

inline void mass_finiteness(SuiteContext& ctx, Recorder& rec) {
  const double tol = rec.tolerance(1e-2);
  for (const auto& [name, spec] : ctx.config().profiles) {
    const RadialProfile u = ctx.profile(spec);
    const std::optional<bool> normal = u.model().known_normal();
    const MassEstimate m = conformal_mass(u, ctx.config().mass_centers, ctx.config().limit_schedule);
    if (normal.value_or(false)) {
      rec.point(name, m.prediction, m.inf, tol, "normal metric: alpha0 (2 - alpha0)");
    } else if (normal.has_value()) {
      rec.flag(name + ".diverges", m.divergent, "non-normal metric: mass sequence runs to -infinity");
    } else {
      rec.info(name, m.inf, "normality unknown");
    }
  }
}

}  // namespace checks

/// Every check in suite order.
inline const std::vector<CheckDefinition>& check_registry() {
  static const std::vector<CheckDefinition> registry{
      {"ac01", "spherical mean of |x-y|^{2-n} over |x| = r equals min(r^{2-n}, |y|^{2-n})", checks::newtonian_kernel},
      {"ac02", "spherical mean of (|y|/|x-y|)^k is at most 1 for 0 < k <= n-2", checks::mean_value_bound},
      {"ac03", "four-dimensional log-kernel mean equals log max(r,s) + min(r,s)^2/(4 max(r,s)^2)",
       checks::log_kernel_closed_form},
      {"ac04", "round sphere profiles have Q = (n-1)! and total curvature (n-1)!|S^n|", checks::sphere_curvature},
      {"ac05", "the counterexample profile carries total curvature (n-1)!|S^n| beta", checks::counterexample_mass},
      {"ac06", "the normal representation reproduces a normal profile up to a constant", checks::round_trip},
      {"ac07", "spherical-mean asymptotics: r^2(-Delta u) -> (n-2)alpha0, r u' -> -alpha0, r^2|grad u|^2 -> alpha0^2, u/log r -> -alpha0",
       checks::sphere_mean_asymptotics},
      {"ac08", "conformal mass of a normal metric equals alpha0 (2 - alpha0)", checks::mass_identity},
      {"ac09", "volume entropy of a complete normal metric equals 1 - alpha0", checks::volume_entropy_identity},
      {"ac10", "conformal mass equals -4/(n!|S^n|) int x.grad Q e^{nu} for a solved profile", checks::picard_pohozaev},
      {"ac11", "end isoperimetric ratio tends to 1 + lim r w'(r) = 1 + alpha1 - alpha2", checks::end_isoperimetry},
      {"ac12", "nonnegative scalar curvature near infinity forces 0 <= alpha0 <= 2", checks::sign_regime},
      {"ac13", "exponential spherical means dominate the exponential of the mean", checks::jensen},
      {"mass", "conformal mass is finite exactly for normal metrics", checks::mass_finiteness},
  };
  return registry;
}

inline const CheckDefinition& find_check(const std::string& id) {
  for (const CheckDefinition& d : check_registry()) {
    if (d.id == id) return d;
  }
  throw ConfigError("unknown check id '" + id + "'");
}

/// Runs one registered check; a thrown error becomes a failed report.
inline std::vector<CheckReport> run_check(const CheckDefinition& def, SuiteContext& ctx) {
  Recorder rec(def.id, def.anchor, ctx.config());
  const auto start = std::chrono::steady_clock::now();
  try {
    def.run(ctx, rec);
  } catch (const std::exception& e) {
    auto reports = rec.take();
    CheckReport r;
    r.id = def.id + ".error";
    r.anchor = def.anchor;
    r.measured = std::numeric_limits<double>::quiet_NaN();
    r.pass = false;
    r.note = e.what();
    r.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    reports.push_back(r);
    return reports;
  }
  return rec.take();
}

/// Runs the configured checks (in parallel up to cfg.workers) and returns the
/// reports in registry order.
inline std::vector<CheckReport> run_suite(const SuiteConfig& cfg, SuiteContext* shared = nullptr) {
  std::vector<const CheckDefinition*> selected;
  if (cfg.checks) {
    for (const std::string& id : *cfg.checks) find_check(id);
    for (const CheckDefinition& d : check_registry()) {
      if (std::find(cfg.checks->begin(), cfg.checks->end(), d.id) != cfg.checks->end()) selected.push_back(&d);
    }
  } else {
    for (const CheckDefinition& d : check_registry()) selected.push_back(&d);
  }
  std::unique_ptr<SuiteContext> own;
  if (!shared) {
    own = std::make_unique<SuiteContext>(cfg);
    shared = own.get();
  }
  std::vector<std::vector<CheckReport>> parts(selected.size());
  parallel_for(
      selected.size(), [&](std::size_t i) { parts[i] = run_check(*selected[i], *shared); },
      std::max(1u, cfg.workers));
  std::vector<CheckReport> out;
  for (auto& p : parts) {
    for (auto& r : p) out.push_back(std::move(r));
  }
  return out;
}

/// True iff every non-informational report passed.
inline bool suite_passed(const std::vector<CheckReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const CheckReport& r) { return r.informational || r.pass; });
}

enum class ReportFormat { Csv, Json, Text };

namespace detail {

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

}  // namespace detail

/// CSV without the runtime column; used to compare runs.
inline std::string reports_to_csv(const std::vector<CheckReport>& reports, bool with_runtime = true) {
  std::ostringstream os;
  os << "id,anchor,expected,measured,tol,pass";
  if (with_runtime) os << ",runtime_ms";
  os << "\n";
  for (const CheckReport& r : reports) {
    os << detail::csv_quote(r.id) << "," << detail::csv_quote(r.anchor) << "," << detail::csv_quote(r.expected_text())
       << "," << detail::format_number(r.measured) << "," << detail::format_number(r.tolerance) << ","
       << (r.pass ? "true" : "false");
    if (with_runtime) os << "," << detail::format_number(r.runtime_ms);
    os << "\n";
  }
  return os.str();
}

inline nlohmann::json reports_to_json(const std::vector<CheckReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckReport& r : reports) {
    nlohmann::json j;
    j["id"] = r.id;
    j["anchor"] = r.anchor;
    switch (r.kind) {
      case CheckReport::Kind::Point: j["expected"] = detail::json_number(r.expected); break;
      case CheckReport::Kind::Interval:
        j["expected"] = {detail::json_number(r.lower), detail::json_number(r.upper)};
        break;
      case CheckReport::Kind::Flag: j["expected"] = true; break;
    }
    j["measured"] = detail::json_number(r.measured);
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["runtime_ms"] = r.runtime_ms;
    j["informational"] = r.informational;
    j["tolerance_overridden"] = r.overridden;
    j["note"] = r.note;
    arr.push_back(std::move(j));
  }
  return arr;
}

/// Fixed-width table; failing checks are listed after all others.
inline std::string reports_to_text(const std::vector<CheckReport>& reports) {
  std::vector<const CheckReport*> order;
  for (const CheckReport& r : reports) {
    if (r.pass) order.push_back(&r);
  }
  for (const CheckReport& r : reports) {
    if (!r.pass) order.push_back(&r);
  }
  std::size_t width = 2;
  for (const CheckReport* r : order) width = std::max(width, r->id.size());
  std::ostringstream os;
  os << std::left << std::setw(6) << "STATUS" << "  " << std::setw(static_cast<int>(width)) << "ID" << "  "
     << std::setw(18) << "EXPECTED" << "  " << std::setw(18) << "MEASURED" << "  " << "TOL" << "\n";
  std::size_t failed = 0;
  for (const CheckReport* r : order) {
    const char* status = r->informational ? "INFO" : (r->pass ? "PASS" : "FAIL");
    if (!r->pass) ++failed;
    os << std::left << std::setw(6) << status << "  " << std::setw(static_cast<int>(width)) << r->id << "  "
       << std::setw(18) << r->expected_text() << "  " << std::setw(18) << detail::format_number(r->measured) << "  "
       << detail::format_number(r->tolerance);
    if (r->overridden) os << " (overridden)";
    if (!r->note.empty()) os << "  # " << r->note;
    os << "\n";
  }
  os << reports.size() << " checks, " << failed << " failed\n";
  return os.str();
}

inline std::string render_reports(const std::vector<CheckReport>& reports, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv: return reports_to_csv(reports);
    case ReportFormat::Json: return reports_to_json(reports).dump(2) + "\n";
    case ReportFormat::Text: return reports_to_text(reports);
  }
  return {};
}

/// Writes the rendered reports to `path`.
inline void emit_report(const std::vector<CheckReport>& reports, ReportFormat format, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error("cannot write report to '" + path + "'");
  out << render_reports(reports, format);
  if (!out) throw Error("failed writing report to '" + path + "'");
}

}  // namespace qcurv
