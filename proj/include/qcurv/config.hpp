#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qcurv/density.hpp"
#include "qcurv/endmodel.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/potential.hpp"
#include "qcurv/profile.hpp"

namespace qcurv {

/// "family:key=value,key=value" split into its parts.
struct Spec {
  std::string family;
  std::map<std::string, std::string> args;

  [[nodiscard]] bool has(const std::string& key) const { return args.count(key) != 0; }

  [[nodiscard]] double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    auto it = args.find(key);
    if (it == args.end()) {
      if (fallback) return *fallback;
      throw ConfigError("'" + family + "' needs parameter '" + key + "'");
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("parameter '" + key + "' of '" + family + "' is not a number: " + it->second);
    }
  }

  [[nodiscard]] std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    auto it = args.find(key);
    if (it == args.end()) {
      if (fallback) return *fallback;
      throw ConfigError("'" + family + "' needs parameter '" + key + "'");
    }
    return it->second;
  }

  void require_only(std::initializer_list<const char*> allowed) const {
    for (const auto& [k, v] : args) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw ConfigError("unknown parameter '" + k + "' for '" + family + "'");
    }
  }
};

inline Spec parse_spec(const std::string& text) {
  Spec s;
  const std::string trimmed = boost::trim_copy(text);
  if (trimmed.empty()) throw ConfigError("empty profile or density description");
  const auto colon = trimmed.find(':');
  s.family = boost::to_lower_copy(boost::trim_copy(trimmed.substr(0, colon)));
  if (colon == std::string::npos) return s;
  std::vector<std::string> parts;
  boost::split(parts, trimmed.substr(colon + 1), boost::is_any_of(","));
  for (const std::string& part : parts) {
    const std::string p = boost::trim_copy(part);
    if (p.empty()) continue;
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value in '" + text + "', got '" + p + "'");
    s.args[boost::trim_copy(p.substr(0, eq))] = boost::trim_copy(p.substr(eq + 1));
  }
  return s;
}

/// Two-column numeric CSV (r, value); a non-numeric first line is a header.
inline std::pair<std::vector<double>, std::vector<double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table '" + path + "'");
  std::vector<double> r;
  std::vector<double> v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    boost::trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    boost::split(cols, line, boost::is_any_of(","));
    if (cols.size() < 2) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two columns");
    try {
      r.push_back(std::stod(cols[0]));
      v.push_back(std::stod(cols[1]));
    } catch (const std::exception&) {
      if (r.empty() && lineno == 1) continue;
      throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  if (r.empty()) throw ConfigError("table '" + path + "' has no rows");
  return {std::move(r), std::move(v)};
}

/// Densities: bump, shell, table, or the curvature density of a closed-form profile.
inline CurvatureDensity make_density_from_spec(const Spec& s, int n);

/// Prescribed Q: gaussian, constant, or table.
inline RadialFunction make_q_from_spec(const Spec& s) {
  if (s.family == "gaussian") {
    s.require_only({"amp", "width"});
    return gaussian_function(s.number("amp"), s.number("width", 1.0));
  }
  if (s.family == "constant") {
    s.require_only({"value"});
    return constant_function(s.number("value"));
  }
  if (s.family == "table") {
    s.require_only({"path"});
    auto [r, v] = read_table(s.text("path"));
    return tabulated_function(std::move(r), std::move(v));
  }
  throw ConfigError("unknown Q family '" + s.family + "' (expected gaussian, constant or table)");
}

/// Closed-form and generated profiles:
///   sphere:lambda=L  counterexample:beta=B  constant:c=C  quadratic:a=A  log:a=A
///   compact:alpha0=A,radius=R     potential of a smooth bump density
///   potential:density=<family>,...  potential of any density spec (args forwarded)
///   picard:amp=A,width=W[,theta=T,tol=E]  fixed point for Q = A exp(-r^2/W^2)
inline RadialProfile make_profile(const Spec& s, int n) {
  if (s.family == "sphere") {
    s.require_only({"lambda"});
    return sphere_profile(n, s.number("lambda", 1.0));
  }
  if (s.family == "counterexample") {
    s.require_only({"beta"});
    return counterexample_profile(n, s.number("beta"));
  }
  if (s.family == "constant") {
    s.require_only({"c"});
    return constant_profile(n, s.number("c", 0.0));
  }
  if (s.family == "quadratic") {
    s.require_only({"a"});
    return quadratic_profile(n, s.number("a"));
  }
  if (s.family == "log") {
    s.require_only({"a"});
    return log_radius_profile(n, s.number("a"));
  }
  if (s.family == "compact") {
    s.require_only({"alpha0", "radius"});
    return potential_from_density(bump_density(n, s.number("alpha0"), s.number("radius", 2.5)));
  }
  if (s.family == "potential") {
    Spec inner = s;
    inner.family = s.text("density");
    inner.args.erase("density");
    return potential_from_density(make_density_from_spec(inner, n));
  }
  if (s.family == "picard") {
    s.require_only({"amp", "width", "theta", "tol"});
    PicardOptions opts;
    opts.theta = s.number("theta", 0.5);
    opts.tolerance = s.number("tol", 1e-10);
    return picard_solve(n, gaussian_function(s.number("amp"), s.number("width", 1.0)), constant_profile(n, 0.0),
                        PotentialConfig{}, opts)
        .solution;
  }
  throw ConfigError("unknown profile family '" + s.family + "'");
}

inline RadialProfile make_profile(const std::string& text, int n) { return make_profile(parse_spec(text), n); }

inline CurvatureDensity make_density_from_spec(const Spec& s, int n) {
  if (s.family == "bump") {
    s.require_only({"alpha0", "radius"});
    return bump_density(n, s.number("alpha0"), s.number("radius", 2.5));
  }
  if (s.family == "shell") {
    s.require_only({"alpha0", "inner", "outer"});
    return shell_density(n, s.number("alpha0"), s.number("inner", 1.0), s.number("outer", 3.0));
  }
  if (s.family == "table") {
    s.require_only({"path"});
    auto [r, v] = read_table(s.text("path"));
    const double lo = r.front();
    const double hi = r.back();
    return make_density(n, tabulated_function(std::move(r), std::move(v)), DensitySupport{lo, hi});
  }
  if (s.family == "zero") return zero_density(n);
  if (s.family == "sphere" || s.family == "counterexample" || s.family == "constant" ||
      s.family == "quadratic") {
    return density_from_profile(make_profile(s, n));
  }
  throw ConfigError("unknown density family '" + s.family + "'");
}

inline CurvatureDensity make_density_from_spec(const std::string& text, int n) {
  return make_density_from_spec(parse_spec(text), n);
}

/// End on R^4 minus the unit ball from
///   alpha1=A[,h=none|constant|inverse-square,coeff=C][,density=<family>,...].
/// Density parameters are forwarded; the density is restricted to r >= 1.
inline EndProfile make_end_from_spec(const Spec& s) {
  EndCorrection h;
  const std::string kind = s.text("h", "none");
  if (kind == "none") {
    h.kind = EndCorrection::Kind::None;
  } else if (kind == "constant") {
    h.kind = EndCorrection::Kind::Constant;
  } else if (kind == "inverse-square") {
    h.kind = EndCorrection::Kind::InverseSquare;
  } else {
    throw ConfigError("unknown h kind '" + kind + "' (expected none, constant or inverse-square)");
  }
  h.coeff = s.number("coeff", 0.0);
  std::optional<CurvatureDensity> density;
  if (s.has("density")) {
    Spec inner;
    inner.family = s.text("density");
    for (const auto& [k, v] : s.args) {
      if (k != "density" && k != "alpha1" && k != "h" && k != "coeff") inner.args[k] = v;
    }
    density = restrict_density(make_density_from_spec(inner, EndProfile::kDimension), 1.0);
  }
  return EndProfile(density, s.number("alpha1", 0.0), h);
}

inline std::vector<std::pair<std::string, std::string>> default_roster() {
  return {
      {"sphere-0.5", "sphere:lambda=0.5"},
      {"sphere-1", "sphere:lambda=1"},
      {"sphere-2", "sphere:lambda=2"},
      {"counterexample-minus1", "counterexample:beta=-1"},
      {"counterexample-1", "counterexample:beta=1"},
      {"counterexample-2", "counterexample:beta=2"},
      {"compact-0.25", "compact:alpha0=0.25,radius=2.5"},
      {"compact-0.5", "compact:alpha0=0.5,radius=2.5"},
      {"compact-1", "compact:alpha0=1,radius=2.5"},
      {"flat", "constant:c=0"},
      {"picard-gauss", "picard:amp=0.1,width=1"},
      {"quadratic-minus1", "quadratic:a=-1"},
  };
}

/// Everything the verification suite needs to know.
struct SuiteConfig {
  std::optional<std::vector<std::string>> checks;  // nullopt: every registered check
  std::vector<int> dimensions{4, 6};
  std::vector<std::pair<std::string, std::string>> profiles = default_roster();  // name, spec
  std::vector<double> limit_schedule{125.0, 250.0, 500.0, 1000.0};
  double entropy_start = 10.0;
  double entropy_end = 1e4;
  std::vector<double> mass_centers{0.0, 1.0, 2.0};
  std::map<std::string, double> tolerances;  // overrides by check id
  unsigned workers = 1;
  std::uint64_t seed = 20240611;
  std::uint64_t mc_samples = 10'000'000;
  std::size_t jensen_samples = 200;
  std::string output_dir = ".";
  std::string csv = "report.csv";
  std::string json = "report.json";
  std::string text = "report.txt";
};

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  std::vector<std::string> parts;
  boost::split(parts, text, boost::is_any_of(","));
  for (const std::string& part : parts) {
    const std::string p = boost::trim_copy(part);
    if (p.empty()) continue;
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        out.push_back(p);
      } else if constexpr (std::is_integral_v<T>) {
        out.push_back(static_cast<T>(std::stoll(p)));
      } else {
        out.push_back(static_cast<T>(std::stod(p)));
      }
    } catch (const std::exception&) {
      throw ConfigError("bad entry '" + p + "' in list '" + key + "'");
    }
  }
  return out;
}

}  // namespace detail

inline void apply_environment(SuiteConfig& cfg) {
  if (const char* env = std::getenv("QCURV_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
}

/// Reads an INI file with sections [suite], [profiles], [schedules],
/// [tolerances] and [output]. QCURV_OUTPUT_DIR overrides output.dir.
inline SuiteConfig load_suite_config(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("cannot read config: ") + e.what());
  }
  static const std::map<std::string, std::vector<std::string>> known{
      {"suite", {"checks", "dimensions", "workers", "seed", "mc_samples", "jensen_samples"}},
      {"profiles", {}},
      {"schedules", {"limits", "entropy_start", "entropy_end", "mass_centers"}},
      {"tolerances", {}},
      {"output", {"dir", "csv", "json", "text"}},
  };
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end()) throw ConfigError("unknown config section [" + section + "]");
    if (section == "profiles" || section == "tolerances") continue;
    for (const auto& [key, value] : body) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
      }
    }
  }

  SuiteConfig cfg;
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(key)) return boost::trim_copy(*v);
    return std::nullopt;
  };
  auto number = [&](const std::string& key, double fallback) {
    auto v = get(key);
    if (!v) return fallback;
    try {
      return std::stod(*v);
    } catch (const std::exception&) {
      throw ConfigError("'" + key + "' is not a number: " + *v);
    }
  };
  if (auto v = get("suite.checks")) cfg.checks = detail::parse_list<std::string>(*v, "suite.checks");
  if (auto v = get("suite.dimensions")) cfg.dimensions = detail::parse_list<int>(*v, "suite.dimensions");
  for (int n : cfg.dimensions) require_even_dimension(n);
  cfg.workers = static_cast<unsigned>(number("suite.workers", cfg.workers));
  cfg.seed = static_cast<std::uint64_t>(number("suite.seed", static_cast<double>(cfg.seed)));
  cfg.mc_samples = static_cast<std::uint64_t>(number("suite.mc_samples", static_cast<double>(cfg.mc_samples)));
  cfg.jensen_samples = static_cast<std::size_t>(number("suite.jensen_samples", static_cast<double>(cfg.jensen_samples)));
  if (auto section = tree.get_child_optional("profiles")) {
    cfg.profiles.clear();
    for (const auto& [name, value] : *section) {
      const std::string spec = boost::trim_copy(value.data());
      parse_spec(spec);
      cfg.profiles.emplace_back(name, spec);
    }
  }
  if (auto v = get("schedules.limits")) cfg.limit_schedule = detail::parse_list<double>(*v, "schedules.limits");
  cfg.entropy_start = number("schedules.entropy_start", cfg.entropy_start);
  cfg.entropy_end = number("schedules.entropy_end", cfg.entropy_end);
  if (auto v = get("schedules.mass_centers")) cfg.mass_centers = detail::parse_list<double>(*v, "schedules.mass_centers");
  if (auto section = tree.get_child_optional("tolerances")) {
    for (const auto& [id, value] : *section) {
      try {
        cfg.tolerances[id] = std::stod(value.data());
      } catch (const std::exception&) {
        throw ConfigError("tolerance for '" + id + "' is not a number");
      }
    }
  }
  if (auto v = get("output.dir")) cfg.output_dir = *v;
  if (auto v = get("output.csv")) cfg.csv = *v;
  if (auto v = get("output.json")) cfg.json = *v;
  if (auto v = get("output.text")) cfg.text = *v;
  apply_environment(cfg);
  if (cfg.limit_schedule.size() < 2) throw ConfigError("schedules.limits needs at least two radii");
  return cfg;
}

}  // namespace qcurv
