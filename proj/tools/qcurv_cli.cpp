#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcurv/qcurv.hpp"

namespace {

using namespace qcurv;

void print_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ",";
    first = false;
    os << detail::format_number(v);
  }
  os << "\n";
}

nlohmann::json limit_json(const LimitEstimate& e) {
  nlohmann::json j;
  j["limit"] = detail::json_number(e.limit);
  j["error"] = detail::json_number(e.error);
  j["converged"] = e.converged;
  j["model"] = to_string(e.model);
  j["radii"] = e.radii;
  nlohmann::json values = nlohmann::json::array();
  for (double v : e.values) values.push_back(detail::json_number(v));
  j["values"] = values;
  return j;
}

void write_trace(const std::string& path, const std::vector<double>& r, const std::vector<double>& v) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trace '" + path + "'");
  out << "r,value\n";
  for (std::size_t i = 0; i < r.size(); ++i) print_row(out, {r[i], v[i]});
}

void profile_csv(std::ostream& os, const RadialProfile& u, const std::vector<double>& radii) {
  os << "r,u,du,d2u\n";
  for (double r : radii) print_row(os, {r, u(r), u.eval(r, 1), u.eval(r, 2)});
}

std::vector<double> linear_radii(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count > 1 ? count - 1 : 1));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial conformal metrics in even dimensions: kernels, curvature, potentials and checks"};
  app.require_subcommand(1);

  int n = 4;
  std::string kind = "log";
  double power = 2.0;
  double lo = 0.1, hi = 10.0;
  std::size_t count = 20;
  auto* kt = app.add_subcommand("kernel-table", "spherical-mean kernel values as CSV");
  kt->add_option("-n,--dim", n, "even dimension");
  kt->add_option("--kind", kind, "log or power")->check(CLI::IsMember({"log", "power"}));
  kt->add_option("--power", power, "exponent k for the power kernel");
  kt->add_option("--lo", lo, "smallest radius");
  kt->add_option("--hi", hi, "largest radius");
  kt->add_option("--count", count, "radii per axis (log spaced)");

  std::string profile_spec = "sphere:lambda=1";
  double r_max = 10.0;
  std::size_t samples = 101;
  auto* cv = app.add_subcommand("curvature", "r, u, u', Laplacian, Q, R_g for a profile as CSV");
  cv->add_option("-n,--dim", n, "even dimension");
  cv->add_option("-p,--profile", profile_spec, "profile spec, e.g. sphere:lambda=1");
  cv->add_option("--r-max", r_max, "largest radius");
  cv->add_option("--samples", samples, "number of radii");

  std::string density_spec = "bump:alpha0=0.5,radius=2.5";
  auto* pot = app.add_subcommand("potential", "normal potential of a density as CSV (r, u, u', u'')");
  pot->add_option("-n,--dim", n, "even dimension");
  pot->add_option("-d,--density", density_spec, "density spec or table:path=FILE");
  pot->add_option("--r-max", r_max, "largest radius");
  pot->add_option("--samples", samples, "number of radii");

  std::string q_spec = "gaussian:amp=0.1,width=1";
  double theta = 0.5, tol = 1e-10;
  auto* sv = app.add_subcommand("solve", "fixed point of u = P[Q e^{nu}] as CSV (r, u, u', u'')");
  sv->add_option("-n,--dim", n, "even dimension");
  sv->add_option("-q,--q", q_spec, "Q spec: gaussian, constant or table:path=FILE");
  sv->add_option("--theta", theta, "initial damping");
  sv->add_option("--tol", tol, "residual tolerance");
  sv->add_option("--r-max", r_max, "largest radius");
  sv->add_option("--samples", samples, "number of radii");

  std::string trace_dir;
  auto* fn = app.add_subcommand("functionals", "alpha0, volume entropy, conformal mass and sphere-mean limits as JSON");
  fn->add_option("-n,--dim", n, "even dimension");
  fn->add_option("-p,--profile", profile_spec, "profile spec");
  fn->add_option("--traces", trace_dir, "directory for CSV traces (r, value)");

  std::string end_spec = "alpha1=0";
  double end_r_max = 1000.0;
  auto* en = app.add_subcommand("end", "end isoperimetric trace as CSV (r, I_g, r w')");
  en->add_option("-e,--end", end_spec, "end spec: alpha1=A[,h=KIND,coeff=C][,density=FAMILY,...]");
  en->add_option("--r-max", end_r_max, "largest radius");
  en->add_option("--samples", samples, "number of radii");

  std::string config_path;
  bool as_json = false;
  std::vector<std::string> only;
  auto* vf = app.add_subcommand("verify", "run the verification suite");
  vf->add_option("--config", config_path, "INI config file");
  vf->add_flag("--json", as_json, "print JSON instead of the text table");
  vf->add_option("--only", only, "comma-separated check ids")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*kt) {
      const KernelKind k = kind == "log" ? KernelKind::Log : KernelKind::Power;
      const auto table = kernel_table(n, k, power, lo, hi, count);
      std::cout << "n,kind,r,s,value,err_bound\n";
      for (std::size_t i = 0; i < table->size(); ++i) {
        for (std::size_t j = 0; j < table->size(); ++j) {
          std::cout << n << "," << to_string(k) << "," << detail::format_number(table->radii()[i]) << ","
                    << detail::format_number(table->radii()[j]) << "," << detail::format_number(table->value(i, j))
                    << "," << detail::format_number(table->error_bound(i, j)) << "\n";
        }
      }
      return 0;
    }
    if (*cv) {
      const RadialProfile u = make_profile(profile_spec, n);
      std::cout << "r,u,du,laplacian,Q,R_g\n";
      for (double r : linear_radii(0.0, r_max, samples)) {
        print_row(std::cout, {r, u(r), u.eval(r, 1), radial_laplacian(u, r), q_curvature(u, r), scalar_curvature(u, r)});
      }
      return 0;
    }
    if (*pot) {
      profile_csv(std::cout, potential_from_density(make_density_from_spec(density_spec, n)),
                  linear_radii(0.0, r_max, samples));
      return 0;
    }
    if (*sv) {
      PicardOptions opts;
      opts.theta = theta;
      opts.tolerance = tol;
      const PicardResult res =
          picard_solve(n, make_q_from_spec(parse_spec(q_spec)), constant_profile(n, 0.0), PotentialConfig{}, opts);
      std::cerr << "iterations " << res.state.iterations << ", residual " << res.state.residual << ", alpha0 "
                << alpha0(res.density) << (res.converged ? "" : " (not converged)") << "\n";
      profile_csv(std::cout, res.solution, linear_radii(0.0, r_max, samples));
      return res.converged ? 0 : 3;
    }
    if (*fn) {
      const RadialProfile u = make_profile(profile_spec, n);
      nlohmann::json out;
      out["profile"] = u.describe();
      out["alpha0"] = alpha0(u);
      const VolumeEntropy tau = volume_entropy(u);
      out["tau"] = {{"limsup", detail::json_number(tau.limsup)},
                    {"error", detail::json_number(tau.error)},
                    {"prediction", tau.prediction},
                    {"completeness", to_string(tau.completeness)},
                    {"identity_applies", tau.identity_applies},
                    {"trace", limit_json(tau.estimate)}};
      const MassEstimate m = conformal_mass(u);
      nlohmann::json centers = nlohmann::json::array();
      for (std::size_t i = 0; i < m.centers.size(); ++i) {
        centers.push_back({{"center", m.centers[i]}, {"estimate", limit_json(m.per_center[i])}});
      }
      out["mass"] = {{"inf", detail::json_number(m.inf)},
                     {"error", detail::json_number(m.error)},
                     {"prediction", m.prediction},
                     {"divergent", m.divergent},
                     {"centers", centers}};
      const SphereMeanLimits lim = sphere_mean_limits(u);
      out["lemma_limits"] = {{"laplacian", limit_json(lim.laplacian)},
                             {"slope", limit_json(lim.slope)},
                             {"gradient", limit_json(lim.gradient)},
                             {"log_ratio", limit_json(lim.log_ratio)}};
      std::cout << out.dump(2) << "\n";
      if (!trace_dir.empty()) {
        std::filesystem::create_directories(trace_dir);
        const std::filesystem::path dir(trace_dir);
        write_trace((dir / "tau.csv").string(), tau.estimate.radii, tau.estimate.values);
        for (std::size_t i = 0; i < m.centers.size(); ++i) {
          write_trace((dir / ("mass_c" + std::to_string(i) + ".csv")).string(), m.per_center[i].radii,
                      m.per_center[i].values);
        }
        write_trace((dir / "laplacian.csv").string(), lim.laplacian.radii, lim.laplacian.values);
        write_trace((dir / "slope.csv").string(), lim.slope.radii, lim.slope.values);
        write_trace((dir / "gradient.csv").string(), lim.gradient.radii, lim.gradient.values);
        write_trace((dir / "log_ratio.csv").string(), lim.log_ratio.radii, lim.log_ratio.values);
      }
      return 0;
    }
    if (*en) {
      const EndProfile e = make_end_from_spec(parse_spec("end:" + end_spec));
      std::cout << "r,I_g,r_dw\n";
      for (double r : log_grid(2.0, end_r_max, samples)) {
        print_row(std::cout, {r, isoperimetric_ratio(e, r), r * end_profile_eval(e, r, 1)});
      }
      return 0;
    }
    if (*vf) {
      SuiteConfig cfg = config_path.empty() ? SuiteConfig{} : load_suite_config(config_path);
      if (config_path.empty()) apply_environment(cfg);
      if (!only.empty()) cfg.checks = only;
      const std::vector<CheckReport> reports = run_suite(cfg);
      const std::filesystem::path dir(cfg.output_dir);
      emit_report(reports, ReportFormat::Csv, (dir / cfg.csv).string());
      emit_report(reports, ReportFormat::Json, (dir / cfg.json).string());
      emit_report(reports, ReportFormat::Text, (dir / cfg.text).string());
      std::cout << render_reports(reports, as_json ? ReportFormat::Json : ReportFormat::Text);
      return suite_passed(reports) ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
