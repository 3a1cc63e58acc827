#include <cmath>
#include <numbers>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rmnorm/config.hpp"
#include "rmnorm/experiments.hpp"
#include "rmnorm/report.hpp"

using namespace rmnorm;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.families = {"identity"};
  c.sizes = {16};
  c.samples = 200;
  c.tail_samples = 500;
  c.seed = 5;
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

} // namespace

TEST(Config, DefaultsFromEmptyObject) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{4, 16, 64}));
  EXPECT_EQ(c.samples, 5000u);
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.format, ReportFormat::csv);
  EXPECT_EQ(c.distributions.size(), 1u);
}

TEST(Config, ParsesAllKeys) {
  const auto c = parse_config(R"({
    "families": ["identity", "toeplitz"], "sizes": [2, 3], "samples": 10, "tail_samples": 20, "seed": 9,
    "rel_tol": 1e-8, "orlicz_rel_tol": 1e-9, "quad_tol": 1e-7, "threshold_scale": 0.5, "workers": 2,
    "checks": ["expectation-bound"], "out": "x.csv", "format": "json", "distributions": ["gaussian", "rademacher"],
    "ensembles": [{"family": "diagonal", "name": "d2", "n": 2, "diag": [1, 3]}]
  })");
  EXPECT_EQ(c.families.size(), 2u);
  EXPECT_EQ(c.tail_samples, 20u);
  EXPECT_EQ(c.threshold_scale, 0.5);
  EXPECT_EQ(c.format, ReportFormat::json);
  ASSERT_EQ(c.ensembles.size(), 1u);
  EXPECT_EQ(c.ensembles[0].name, "d2");
  EXPECT_EQ(c.ensembles[0].seed, 9u);
  EXPECT_EQ(c.distributions[1], EntryDistribution::rademacher());
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"[]", "{", R"({"sample": 5})", R"({"samples": -1})", R"({"samples": 1.5})",
                           R"({"samples": "10"})", R"({"samples": 1})", R"({"families": ["nope"]})",
                           R"({"sizes": [0]})", R"({"sizes": 4})", R"({"format": "xml"})", R"({"checks": ["x"]})",
                           R"({"rel_tol": 0})", R"({"threshold_scale": -1})", R"({"distributions": ["cauchy"]})",
                           R"({"distributions": []})", R"({"ensembles": [{"family": "diagonal", "bogus": 1}]})"})
    EXPECT_THROW(parse_config(text), ConfigError) << text;
  EXPECT_THROW(load_config("/nonexistent/rmnorm.json"), ConfigError);
}

TEST(CmdBounds, IdentityClosedForms) {
  auto c = small_config();
  const auto rows = cmd_bounds(c);
  ASSERT_EQ(rows.size(), 1u);
  const auto& r = rows[0];
  EXPECT_EQ(r.n, 16u);
  EXPECT_EQ(r.samples, 0u);
  EXPECT_DOUBLE_EQ(r.trivial, 2.0);
  EXPECT_NEAR(r.latala, 4.0, 1e-13);
  EXPECT_NEAR(r.log_factor, 1.0 + std::log(16.0), 1e-13);
  EXPECT_FALSE(r.mc_opnorm.has_value());
}

TEST(CmdBounds, ProductChevetEqualsTrivial) {
  auto c = small_config();
  c.families = {"product"};
  c.sizes = {5, 9};
  for (const auto& r : cmd_bounds(c)) {
    ASSERT_TRUE(r.chevet.has_value());
    EXPECT_NEAR(*r.chevet, r.trivial, 1e-12 * r.trivial);
  }
}

TEST(CmdBounds, ZeroMatrixIsConfigError) {
  auto c = small_config();
  c.families = {};
  EnsembleSpec s = preset_ensemble("diagonal", 3);
  s.diag = {0, 0, 0};
  c.ensembles.push_back(s);
  EXPECT_THROW(cmd_bounds(c), ConfigError);
}

TEST(CmdBounds, EmptyFamiliesGiveHeaderOnly) {
  auto c = small_config();
  c.families = {};
  const auto rows = cmd_bounds(c);
  EXPECT_TRUE(rows.empty());
  const auto csv = format_bound_reports_csv(rows);
  EXPECT_EQ(count_lines(csv), 1u);
  EXPECT_EQ(csv.substr(0, 9), "family,n,");
  EXPECT_EQ(nlohmann::json::parse(format_bound_reports_json(rows)).size(), 0u);
}

TEST(CmdSweep, RowsPerDistributionAndRatios) {
  auto c = small_config();
  c.families = {"identity", "all-ones"};
  c.sizes = {6};
  c.distributions = {EntryDistribution::gaussian(), EntryDistribution::rademacher()};
  const auto rows = cmd_sweep(c);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.mc_opnorm && r.mc_lower && r.ratio_op_lower);
    EXPECT_EQ(r.samples, 200u);
    EXPECT_DOUBLE_EQ(*r.ratio_op_lower, r.mc_opnorm->mean / r.mc_lower->mean);
    // |G| >= max(row, col) >= (row + col) / 2, with equality for Rademacher identity
    EXPECT_GE(*r.ratio_op_lower, 0.5 * (1.0 - 1e-12));
    EXPECT_LE(*r.ratio_op_lower, 1.0 + 1e-12);
  }
  // Rademacher entries on the identity give |g_ii| = 1 exactly
  EXPECT_EQ(rows[1].dist, "rademacher");
  EXPECT_EQ(rows[1].mc_opnorm->mean, 1.0);
}

TEST(CmdSweep, ByteIdenticalAcrossRunsAndWorkers) {
  auto c = small_config();
  c.families = {"circulant", "sparse"};
  c.sizes = {7};
  c.workers = 1;
  const auto a = format_bound_reports(cmd_sweep(c), ReportFormat::csv);
  const auto b = format_bound_reports(cmd_sweep(c), ReportFormat::csv);
  c.workers = 3;
  const auto d = format_bound_reports(cmd_sweep(c), ReportFormat::csv);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
  c.seed = 6;
  EXPECT_NE(a, format_bound_reports(cmd_sweep(c), ReportFormat::csv));
}

TEST(Reports, CsvColumnsAndJsonFields) {
  auto c = small_config();
  c.sizes = {3};
  const auto rows = cmd_sweep(c);
  const auto csv = format_bound_reports_csv(rows);
  const std::string header = csv.substr(0, csv.find('\n'));
  std::string expected;
  for (const auto& col : bound_report_columns())
    expected += (expected.empty() ? "" : ",") + col;
  EXPECT_EQ(header, expected);
  EXPECT_EQ(count_lines(csv), 2u);
  const auto j = nlohmann::json::parse(format_bound_reports_json(rows));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["family"], "identity");
  EXPECT_EQ(j[0]["n"], 3);
  EXPECT_TRUE(j[0]["chevet"].is_null());
  EXPECT_TRUE(j[0]["mc_opnorm"].is_object());
  EXPECT_DOUBLE_EQ(j[0]["trivial"].get<double>(), 2.0);
}

TEST(Reports, VerifyFormats) {
  VerifyReport r;
  r.seed = 3;
  r.checks.push_back({"expectation-bound", "a, \"b\"", 4, 10, 1.0, 2.0, true, ""});
  r.checks.push_back({"row-floor", "c", 4, 10, 3.0, 2.0, false, "x"});
  EXPECT_FALSE(r.passed());
  EXPECT_DOUBLE_EQ(r.checks[1].margin(), -1.0);
  const auto csv = format_verify_report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "check,subject,n,seed,samples,lhs,rhs,margin,pass,detail");
  EXPECT_NE(csv.find("\"a, \"\"b\"\"\""), std::string::npos);
  const auto j = nlohmann::json::parse(format_verify_report_json(r));
  EXPECT_EQ(j["passed"], false);
  EXPECT_EQ(j["checks"].size(), 2u);
}

TEST(CmdVerify, SmallRunPasses) {
  auto c = small_config();
  c.families = {"identity", "circulant"};
  c.sizes = {4, 8};
  const auto rep = cmd_verify(c);
  std::size_t count = 0;
  for (const auto& chk : rep.checks) {
    EXPECT_TRUE(chk.passed) << chk.check << " " << chk.subject << " lhs=" << chk.lhs << " rhs=" << chk.rhs;
    ++count;
  }
  // 2 sandwich rows per size, 4 net-bound, 1 tail, 1 one-dim, 4 subjects x 4 sampled checks
  EXPECT_EQ(count, 4u + 4u + 1u + 1u + 16u);
}

TEST(CmdVerify, CheckSelection) {
  auto c = small_config();
  c.checks = {"gaussian-tail"};
  const auto rep = cmd_verify(c);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_EQ(rep.checks[0].check, "gaussian-tail");
}

TEST(CmdVerify, NegativeControlFails) {
  auto c = small_config();
  c.checks = {"tail-bound"};
  c.threshold_scale = 0.01;
  const auto rep = cmd_verify(c);
  ASSERT_EQ(rep.checks.size(), 1u);
  EXPECT_FALSE(rep.passed());
  EXPECT_EQ(rep.checks[0].lhs, 500.0);
}

TEST(OrliczFunctionSpec, ParsesAndRejects) {
  const auto p2 = parse_orlicz_function("power:2");
  EXPECT_DOUBLE_EQ(p2(3.0), 9.0);
  const auto dg = parse_orlicz_function("diag-gauss");
  EXPECT_NEAR(dg(1.0), 0.166630941175372597, 1e-9);
  const auto row = parse_orlicz_function("row-profile", RealVector{1, 0});
  EXPECT_NEAR(row(0.5), 0.00915781944436709015, 1e-9);
  for (const char* bad : {"power:", "power:x", "power:0.5", "cosh", "row-profile"})
    EXPECT_THROW(parse_orlicz_function(bad), ConfigError) << bad;
}
