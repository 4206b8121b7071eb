// Command-line front end: list cases, run verification suites, write sweep tables.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "maxrank/errors.hpp"
#include "maxrank/suite.hpp"

namespace {

using namespace maxrank;

int cmd_list(bool json) {
  const auto cat = suite::catalog_json();
  if (json) {
    std::cout << cat.dump(2) << "\n";
    return 0;
  }
  for (const auto& c : cat) {
    std::cout << c["id"].get<std::string>() << "\t" << c["total"].get<std::string>() << " -> "
              << c["base"].get<std::string>() << "\t" << c["description"].get<std::string>() << "\n";
  }
  return 0;
}

int cmd_verify(const suite::RunConfig& cfg, bool json) {
  const auto res = suite::run(cfg);
  suite::write_reports(res, cfg.out);
  if (json) {
    std::cout << suite::report_json(res).dump(2) << "\n";
  } else {
    for (const auto& c : res.cases) {
      for (const auto& ch : c.checks) {
        std::cout << c.id << "\t" << ch.check << "\t" << ch.verdict;
        if (ch.expected) std::cout << "\texpected " << *ch.expected;
        std::cout << "\t" << (ch.verdict == "Indeterminate" ? "INDETERMINATE" : ch.matched ? "ok" : "UNEXPECTED")
                  << "\n";
      }
    }
    std::cout << "report: " << (std::filesystem::path(cfg.out) / "report.json").string() << "\n";
  }
  return res.exit_code;
}

int cmd_sweep(const suite::RunConfig& cfg, const std::string& param, const std::string& range, int steps) {
  const auto colon = range.find(':');
  if (colon == std::string::npos) throw InvalidArgument("--range must be lo:hi");
  double lo, hi;
  try {
    lo = std::stod(range.substr(0, colon));
    hi = std::stod(range.substr(colon + 1));
  } catch (const std::exception&) {
    throw InvalidArgument("--range must be lo:hi with numeric bounds");
  }
  if (cfg.cases.size() != 1) throw InvalidArgument("sweep takes exactly one --case");
  const auto c = gallery::case_by_id(cfg.cases.front());
  const auto csv = suite::sweep_csv(param, suite::sweep(c, param, lo, hi, steps, cfg));
  if (cfg.out.empty()) {
    std::cout << csv;
  } else {
    std::filesystem::create_directories(cfg.out);
    const auto path = std::filesystem::path(cfg.out) / ("sweep_" + param + ".csv");
    std::ofstream(path, std::ios::binary) << csv;
    std::cout << path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of maximal-rank maps and rough isometries"};
  app.require_subcommand(1);

  bool json = false;
  auto* list = app.add_subcommand("list", "List the case catalog");
  list->add_flag("--json", json, "Machine-readable catalog");

  suite::RunConfig cfg;
  std::uint64_t seed = 0;
  std::string cases_arg;
  double box = 0, epsilon = 0, A = 0, C = 0, alpha = 0, beta = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--case", cfg.cases, "Case id (repeatable)")->required()->delimiter(',');
    sub->add_option("--seed", seed, "Seed of every random draw")->required();
    sub->add_option("--samples", cfg.samples, "Sample count per cloud (>= 10)");
    sub->add_option("--box", box, "Half-width of the truncation box in aperiodic coordinates");
    sub->add_option("--epsilon", epsilon, "Fullness radius");
    sub->add_option("--A", A, "RI.1 multiplicative constant");
    sub->add_option("--C", C, "RI.1 additive constant");
    sub->add_option("--alpha", alpha, "Lift-control alpha");
    sub->add_option("--beta", beta, "Lift-control beta");
  };

  auto* verify = app.add_subcommand("verify", "Run checks and write report.json and witnesses.csv");
  add_common(verify);
  verify->add_option("--check", cfg.checks, "Check id (repeatable; default: the case's checks)")->delimiter(',');
  verify->add_option("--out", cfg.out, "Output directory");
  verify->add_flag("--json", json, "Print the report to stdout");

  std::string param, range = "0:1", sweep_out;
  int steps = 11;
  auto* sweep = app.add_subcommand("sweep", "Tabulate a closed-form comparison over a parameter grid");
  add_common(sweep);
  sweep->add_option("--param", param, "r, eps, A, C or y")->required();
  sweep->add_option("--range", range, "lo:hi");
  sweep->add_option("--steps", steps, "Grid points including both ends");
  sweep->add_option("--out", sweep_out, "Output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*list) return cmd_list(json);
    cfg.seed = seed;
    auto set = [](CLI::App* sub, const char* name, double v, std::optional<double>& dst) {
      if (sub->count(name)) dst = v;
    };
    CLI::App* sub = *verify ? verify : sweep;
    set(sub, "--box", box, cfg.box);
    set(sub, "--epsilon", epsilon, cfg.epsilon);
    set(sub, "--A", A, cfg.A);
    set(sub, "--C", C, cfg.C);
    set(sub, "--alpha", alpha, cfg.alpha);
    set(sub, "--beta", beta, cfg.beta);
    if (*verify) return cmd_verify(cfg, json);
    cfg.out = sweep_out;
    suite::validate(cfg);
    return cmd_sweep(cfg, param, range, steps);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DescriptorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
