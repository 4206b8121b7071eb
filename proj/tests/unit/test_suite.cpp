#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "maxrank/errors.hpp"
#include "maxrank/suite.hpp"

using namespace maxrank;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(MAXRANK_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("maxrank_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Validate, RejectsBadConfigs) {
  suite::RunConfig cfg;
  cfg.cases = {"hyperboloid422"};
  EXPECT_THROW(suite::validate(cfg), InvalidArgument);  // no seed
  cfg.seed = 1;
  EXPECT_NO_THROW(suite::validate(cfg));
  cfg.samples = 9;
  EXPECT_THROW(suite::validate(cfg), InvalidArgument);
  cfg.samples = 16;
  cfg.checks = {"bogus"};
  EXPECT_THROW(suite::validate(cfg), InvalidArgument);
  cfg.checks = {};
  cfg.cases = {"nope"};
  EXPECT_THROW(suite::validate(cfg), InvalidArgument);
}

TEST(FormatNumber, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 31.1455680833, -2.5e-17}) EXPECT_EQ(std::stod(suite::format_number(x)), x);
  EXPECT_EQ(suite::format_number(2.0), "2");
}

TEST(Csv, QuotesAndLineEndings) {
  suite::RunResult r;
  suite::CaseResult c;
  c.id = "case";
  suite::CheckResult ch;
  ch.check = "ri2";
  suite::WitnessRow w;
  w.case_id = "case";
  w.check = "ri2";
  w.label = "a \"quoted\" label";
  w.p = Eigen::Vector3d(1, 2, 3);
  ch.witnesses.push_back(w);
  c.checks.push_back(ch);
  r.cases.push_back(c);
  const auto csv = suite::witnesses_csv(r);
  EXPECT_NE(csv.find("\r\n"), std::string::npos);
  EXPECT_NE(csv.find("\"a \"\"quoted\"\" label\""), std::string::npos);
  EXPECT_NE(csv.find("\"(1, 2, 3)\""), std::string::npos);
}

TEST(Sweep, EpsMarginNonNegative) {
  suite::RunConfig cfg;
  cfg.seed = 1;
  const auto rows = suite::sweep(gallery::hyperboloid_case(), "eps", 0.5, 6.0, 12, cfg);
  ASSERT_EQ(rows.size(), 12u);
  for (const auto& r : rows) EXPECT_GE(r.margin, -1e-12);
  EXPECT_THROW(suite::sweep(gallery::hyperboloid_case(), "zeta", 0, 1, 3, cfg), InvalidArgument);
}

TEST(Cli, ListAndHelp) {
  EXPECT_EQ(run_cli("list"), 0);
  EXPECT_EQ(run_cli("list --json"), 0);
  EXPECT_EQ(run_cli("--help"), 0);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run_cli(""), 1);
  EXPECT_EQ(run_cli("verify --case hyperboloid422"), 1);
  EXPECT_EQ(run_cli("verify --case nope --seed 1 --out " + scratch("bad").string()), 1);
  EXPECT_EQ(run_cli("verify --case hyperboloid422 --seed 1 --samples 5 --out " + scratch("bad").string()), 1);
}

TEST(Cli, VerifyHyperboloidIsDeterministic) {
  const auto a = scratch("a"), b = scratch("b");
  EXPECT_EQ(run_cli("verify --case hyperboloid422 --seed 7 --out " + a.string()), 0);
  EXPECT_EQ(run_cli("verify --case hyperboloid422 --seed 7 --out " + b.string()), 0);
  const auto ra = slurp(a / "report.json");
  ASSERT_FALSE(ra.empty());
  EXPECT_EQ(ra, slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "witnesses.csv"), slurp(b / "witnesses.csv"));
  const auto j = nlohmann::json::parse(ra);
  EXPECT_TRUE(j.contains("cases"));
}

TEST(Cli, SweepToStdout) {
  EXPECT_EQ(run_cli("sweep --case hyperboloid422 --seed 1 --param r --range 0:2 --steps 5"), 0);
  EXPECT_EQ(run_cli("sweep --case hyperboloid422 --seed 1 --param r --range 2"), 1);
}
