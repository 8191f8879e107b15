#include <filesystem>
#include <limits>
#include <set>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "qcurv/harness.hpp"

using namespace qcurv;

namespace {

CheckReport point_report(const std::string& id, double expected, double measured, double tol) {
  CheckReport r;
  r.id = id;
  r.anchor = "statement, with comma";
  r.expected = expected;
  r.measured = measured;
  r.tolerance = tol;
  r.pass = evaluate_report(r);
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SuiteConfig quick_config(std::vector<std::string> checks) {
  SuiteConfig cfg;
  cfg.checks = std::move(checks);
  cfg.mc_samples = 20000;
  cfg.jensen_samples = 20;
  return cfg;
}

}  // namespace

TEST(CheckReport, PassRuleForPointIntervalAndFlag) {
  EXPECT_TRUE(point_report("a", 1.0, 1.05, 0.1).pass);
  EXPECT_FALSE(point_report("a", 1.0, 1.2, 0.1).pass);
  CheckReport r;
  r.kind = CheckReport::Kind::Interval;
  r.lower = 0.0;
  r.upper = 2.0;
  r.tolerance = 0.02;
  r.measured = 2.01;
  EXPECT_TRUE(evaluate_report(r));
  r.measured = -0.03;
  EXPECT_FALSE(evaluate_report(r));
  r.kind = CheckReport::Kind::Flag;
  r.measured = 1.0;
  EXPECT_TRUE(evaluate_report(r));
  r.measured = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(evaluate_report(r));
}

TEST(Registry, IdsAreUniqueAndResolvable) {
  std::set<std::string> ids;
  for (const CheckDefinition& d : check_registry()) {
    EXPECT_TRUE(ids.insert(d.id).second) << d.id;
    EXPECT_FALSE(d.anchor.empty());
    EXPECT_EQ(&find_check(d.id), &d);
  }
  EXPECT_EQ(ids.size(), 14u);
  EXPECT_THROW(find_check("ac99"), ConfigError);
}

TEST(RunSuite, EmptyCheckListGivesEmptyPassingReport) {
  SuiteConfig cfg;
  cfg.checks = std::vector<std::string>{};
  const auto reports = run_suite(cfg);
  EXPECT_TRUE(reports.empty());
  EXPECT_TRUE(suite_passed(reports));
}

TEST(RunSuite, EmptyRosterGivesNoProfileChecks) {
  SuiteConfig cfg = quick_config({"ac12", "mass", "ac13"});
  cfg.profiles.clear();
  const auto reports = run_suite(cfg);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_TRUE(reports[0].informational);
  EXPECT_TRUE(suite_passed(reports));
}

TEST(RunSuite, UnknownCheckIsConfigError) {
  EXPECT_THROW(run_suite(quick_config({"ac01", "nope"})), ConfigError);
}

TEST(RunSuite, NonNormalProfileIsExpectedDivergence) {
  SuiteConfig cfg = quick_config({"mass"});
  cfg.profiles = {{"minus-square", "quadratic:a=-1"}};
  const auto reports = run_suite(cfg);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(reports[0].id, "mass.minus-square.diverges");
  EXPECT_TRUE(reports[0].pass);
}

TEST(RunSuite, BrokenProfileFailsItsCheckButSuiteContinues) {
  SuiteConfig cfg = quick_config({"ac12", "ac01"});
  cfg.profiles = {{"bad", "sphere:lambda=-1"}};
  const auto reports = run_suite(cfg);
  ASSERT_GE(reports.size(), 2u);
  EXPECT_EQ(reports.front().id, "ac01.n4");  // registry order is kept
  EXPECT_EQ(reports.back().id, "ac12.error");
  EXPECT_FALSE(reports.back().pass);
  EXPECT_NE(reports.back().note.find("lambda"), std::string::npos);
  EXPECT_FALSE(suite_passed(reports));
}

TEST(RunSuite, ToleranceOverrideIsReported) {
  SuiteConfig cfg = quick_config({"ac06"});
  cfg.tolerances["ac06"] = 1e-3;
  const auto reports = run_suite(cfg);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_TRUE(reports[0].overridden);
  EXPECT_DOUBLE_EQ(reports[0].tolerance, 1e-3);
}

TEST(RunSuite, DeterministicApartFromRuntime) {
  const SuiteConfig cfg = quick_config({"ac01", "ac03", "ac13"});
  SuiteConfig parallel = cfg;
  parallel.workers = 3;
  const std::string a = reports_to_csv(run_suite(cfg), false);
  const std::string b = reports_to_csv(run_suite(cfg), false);
  const std::string c = reports_to_csv(run_suite(parallel), false);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, c);
}

TEST(EmitReport, EmptyCsvIsHeaderOnly) {
  const auto path = std::filesystem::temp_directory_path() / "qcurv_empty" / "r.csv";
  emit_report({}, ReportFormat::Csv, path.string());
  EXPECT_EQ(slurp(path), "id,anchor,expected,measured,tol,pass,runtime_ms\n");
}

TEST(EmitReport, SinglePassingJson) {
  const auto path = std::filesystem::temp_directory_path() / "qcurv_one.json";
  emit_report({point_report("x", 1.0, 1.0, 0.0)}, ReportFormat::Json, path.string());
  const nlohmann::json j = nlohmann::json::parse(slurp(path));
  ASSERT_TRUE(j.is_array());
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["pass"], true);
  EXPECT_EQ(j[0]["id"], "x");
}

TEST(EmitReport, TextListsFailuresLast) {
  const std::vector<CheckReport> reports{point_report("bad", 0.0, 1.0, 0.1), point_report("good", 0.0, 0.0, 0.1)};
  const std::string text = reports_to_text(reports);
  EXPECT_LT(text.find("good"), text.find("bad"));
  EXPECT_NE(text.find("FAIL"), std::string::npos);
  EXPECT_NE(text.find("1 failed"), std::string::npos);
}

TEST(EmitReport, CsvQuotesAnchorsWithCommas) {
  const std::string csv = reports_to_csv({point_report("x", 1.0, 1.0, 0.0)});
  EXPECT_NE(csv.find("\"statement, with comma\""), std::string::npos);
}

TEST(EmitReport, UnwritablePathThrows) {
  EXPECT_THROW(emit_report({}, ReportFormat::Text, "/proc/qcurv/denied.txt"), std::exception);
}
