#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "qcurv/config.hpp"
#include "qcurv/errors.hpp"
#include "qcurv/functionals.hpp"

using namespace qcurv;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(ParseSpec, FamilyAndArguments) {
  const Spec s = parse_spec(" Sphere : lambda = 2 , extra=x ");
  EXPECT_EQ(s.family, "sphere");
  EXPECT_EQ(s.text("lambda"), "2");
  EXPECT_DOUBLE_EQ(s.number("lambda"), 2.0);
  EXPECT_TRUE(s.has("extra"));
  EXPECT_EQ(parse_spec("flat").family, "flat");
  EXPECT_THROW(parse_spec(""), ConfigError);
  EXPECT_THROW(parse_spec("sphere:lambda"), ConfigError);
}

TEST(MakeProfile, Families) {
  EXPECT_NEAR(make_profile("sphere:lambda=1", 4)(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(make_profile("quadratic:a=-1", 4)(2.0), -4.0, 1e-15);
  EXPECT_NEAR(make_profile("constant:c=3", 6)(2.0), 3.0, 1e-15);
  EXPECT_NEAR(alpha0(make_profile("compact:alpha0=0.5", 4)), 0.5, 1e-12);
  EXPECT_NEAR(alpha0(make_profile("potential:density=shell,alpha0=0.3,inner=1,outer=2", 4)), 0.3, 1e-12);
  EXPECT_THROW(make_profile("torus:r=1", 4), ConfigError);
  EXPECT_THROW(make_profile("sphere:radius=1", 4), ConfigError);
}

TEST(MakeDensity, TableFromCsv) {
  const std::string path = write_temp("qcurv_table.csv", "r,value\n0,1\n1,1\n2,1\n3,0\n");
  const CurvatureDensity f = make_density_from_spec("table:path=" + path, 4);
  EXPECT_NEAR(f(0.5), 1.0, 1e-14);
  EXPECT_EQ(f(4.0), 0.0);
  EXPECT_GT(f.total(), 0.0);
}

TEST(ReadTable, RejectsEmptyAndMalformed) {
  EXPECT_THROW(read_table(write_temp("qcurv_empty.csv", "r,value\n")), ConfigError);
  EXPECT_THROW(read_table(write_temp("qcurv_bad.csv", "r,value\n0,1\nx,y\n")), ConfigError);
  EXPECT_THROW(read_table("/nonexistent/qcurv.csv"), ConfigError);
}

TEST(MakeQ, Families) {
  EXPECT_NEAR(make_q_from_spec(parse_spec("gaussian:amp=0.1,width=1"))(0.0), 0.1, 1e-16);
  EXPECT_NEAR(make_q_from_spec(parse_spec("constant:value=6"))(3.0), 6.0, 1e-16);
  EXPECT_THROW(make_q_from_spec(parse_spec("cubic:a=1")), ConfigError);
}

TEST(MakeEnd, DensityRestrictedToExterior) {
  const EndProfile e = make_end_from_spec(parse_spec("end:alpha1=0.2,h=constant,coeff=1,density=bump,alpha0=0.5,radius=2.5"));
  EXPECT_NEAR(e.alpha1(), 0.2, 1e-15);
  EXPECT_EQ(e.correction().kind, EndCorrection::Kind::Constant);
  ASSERT_TRUE(e.density().has_value());
  EXPECT_GE(e.density()->support().inner, 1.0);
  EXPECT_LT(e.alpha2(), 0.5);
  EXPECT_THROW(make_end_from_spec(parse_spec("end:h=cubic")), ConfigError);
}

TEST(SuiteConfigFile, ShippedDefaultMatchesBuiltInDefaults) {
  const SuiteConfig file = load_suite_config(std::string(QCURV_SOURCE_DIR) + "/configs/default.ini");
  const SuiteConfig builtin;
  EXPECT_FALSE(file.checks.has_value());
  EXPECT_EQ(file.dimensions, builtin.dimensions);
  EXPECT_EQ(file.profiles, builtin.profiles);
  EXPECT_EQ(file.limit_schedule, builtin.limit_schedule);
  EXPECT_EQ(file.mass_centers, builtin.mass_centers);
  EXPECT_EQ(file.seed, builtin.seed);
  EXPECT_EQ(file.mc_samples, builtin.mc_samples);
  EXPECT_TRUE(file.tolerances.empty());
}

TEST(SuiteConfigFile, ParsesAllSections) {
  const std::string path = write_temp("qcurv_suite.ini",
                                      "[suite]\nchecks = ac01, ac13\ndimensions = 4\nworkers = 2\nseed = 7\n"
                                      "[profiles]\nflat = constant:c=0\n"
                                      "[schedules]\nlimits = 100,200,400\nmass_centers = 0,3\n"
                                      "[tolerances]\nac13 = 1e-9\n"
                                      "[output]\ndir = out\ncsv = a.csv\n");
  const SuiteConfig cfg = load_suite_config(path);
  ASSERT_TRUE(cfg.checks.has_value());
  EXPECT_EQ(*cfg.checks, (std::vector<std::string>{"ac01", "ac13"}));
  EXPECT_EQ(cfg.dimensions, std::vector<int>{4});
  EXPECT_EQ(cfg.workers, 2u);
  EXPECT_EQ(cfg.seed, 7u);
  ASSERT_EQ(cfg.profiles.size(), 1u);
  EXPECT_EQ(cfg.profiles[0].first, "flat");
  EXPECT_EQ(cfg.limit_schedule.size(), 3u);
  EXPECT_EQ(cfg.mass_centers, (std::vector<double>{0.0, 3.0}));
  EXPECT_DOUBLE_EQ(cfg.tolerances.at("ac13"), 1e-9);
  EXPECT_EQ(cfg.csv, "a.csv");
}

TEST(SuiteConfigFile, SchemaViolations) {
  EXPECT_THROW(load_suite_config(write_temp("qcurv_s1.ini", "[colors]\nred = 1\n")), ConfigError);
  EXPECT_THROW(load_suite_config(write_temp("qcurv_s2.ini", "[suite]\nspeed = 3\n")), ConfigError);
  EXPECT_THROW(load_suite_config(write_temp("qcurv_s3.ini", "[suite]\ndimensions = 5\n")), DomainError);
  EXPECT_THROW(load_suite_config(write_temp("qcurv_s4.ini", "[suite]\nseed = abc\n")), ConfigError);
  EXPECT_THROW(load_suite_config(write_temp("qcurv_s5.ini", "[schedules]\nlimits = 100\n")), ConfigError);
  EXPECT_THROW(load_suite_config("/nonexistent/qcurv.ini"), ConfigError);
}

TEST(SuiteConfigFile, EnvironmentOverridesOutputDirectoryOnly) {
  const std::string path = write_temp("qcurv_env.ini", "[output]\ndir = from-file\n");
  setenv("QCURV_OUTPUT_DIR", "/tmp/qcurv-env", 1);
  const SuiteConfig cfg = load_suite_config(path);
  unsetenv("QCURV_OUTPUT_DIR");
  EXPECT_EQ(cfg.output_dir, "/tmp/qcurv-env");
  EXPECT_EQ(load_suite_config(path).output_dir, "from-file");
}
