#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxrank/gallery.hpp"

namespace maxrank::suite {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::vector<std::string> cases;
  std::vector<std::string> checks;    // empty: each case's default checks
  std::optional<std::uint64_t> seed;  // mandatory; validate() rejects a missing seed
  int samples = 16;
  std::optional<double> box;          // half-width for every aperiodic coordinate of M
  std::optional<double> epsilon, A, C, alpha, beta;
  std::string out = ".";
};

/// Throws InvalidArgument on a missing seed, samples < 10, non-positive box, unknown case or check.
void validate(const RunConfig& cfg);

struct WitnessRow {
  std::string case_id;
  std::string check;
  std::string label;
  Vec p;               // ambient coordinates
  Vec q;               // ambient coordinates (empty when the witness is a single point)
  double delta = 0.0;  // domain-side distance endpoint used
  double d = 0.0;      // image-side distance endpoint used
  double bound = 0.0;  // the bound the pair or point breaches
};

struct CheckResult {
  std::string check;
  std::string verdict;
  std::optional<std::string> expected;  // absent when the case makes no prediction
  bool matched = true;
  Json details = Json::object();
  std::vector<WitnessRow> witnesses;
};

struct CaseResult {
  std::string id;
  std::string description;
  std::vector<CheckResult> checks;
};

struct RunResult {
  RunConfig config;
  std::vector<CaseResult> cases;
  int exit_code = 0;  // 0 all matched, 2 unexpected verdict, 3 indeterminate
};

/// Box of M used by the checks: the case box with aperiodic half-widths overridden by cfg.box.
Box effective_box(const gallery::CaseStudy& c, const RunConfig& cfg);

CaseResult run_case(const gallery::CaseStudy& c, const RunConfig& cfg);
RunResult run(const RunConfig& cfg);

Json report_json(const RunResult& r);
/// RFC 4180 table with columns case, check, label, p, q, delta, d, bound.
std::string witnesses_csv(const RunResult& r);
/// Writes report.json and witnesses.csv into `dir` (created if needed).
void write_reports(const RunResult& r, const std::string& dir);

Json catalog_json();

struct SweepRow {
  double parameter = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

inline const std::vector<std::string> kSweepParameters{"r", "eps", "A", "C", "y"};

/// One row per grid value of `param` in [lo, hi] (`steps` points, endpoints included).
/// r: hyperboloid lift ratio against sqrt(r^2+1); eps: hyperboloid witness chord minus epsilon;
/// A, C: cylinder or plane witness margin; y: cylinder g(y). Throws InvalidArgument otherwise.
std::vector<SweepRow> sweep(const gallery::CaseStudy& c, const std::string& param, double lo, double hi, int steps,
                            const RunConfig& cfg);
std::string sweep_csv(const std::string& param, const std::vector<SweepRow>& rows);

/// Shortest round-trip decimal form of a double (what report files use).
std::string format_number(double x);

}  // namespace maxrank::suite
