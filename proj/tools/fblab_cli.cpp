#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fblab/operator_json.hpp"
#include "fblab/scenario.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out, std::int64_t seed, bool normalize) {
  const auto scenario = fblab::load_scenario(scenario_path);
  fblab::RunOptions opts;
  if (!out.empty()) opts.output_dir = out;
  if (seed >= 0) opts.seed = static_cast<std::uint64_t>(seed);
  opts.normalize = normalize;
  const auto outcome = fblab::run_scenario(scenario, opts);
  std::cout << outcome.report.dump(2) << "\n";
  std::cerr << "status " << outcome.report["status"].get<std::string>() << ", report written to "
            << outcome.report_path << "\n";
  return outcome.exit_code;
}

int cmd_validate(const std::string& path, std::int64_t seed, int samples) {
  const auto op = fblab::operator_from_json(fblab::read_json_file(path));
  const std::uint64_t s = seed >= 0 ? static_cast<std::uint64_t>(seed) : 0x0b57ac1eULL;
  const auto v = fblab::validate_operator(op, s, samples);
  std::cout << v.report.dump(2) << "\n";
  return v.exit_code;
}

int cmd_compare(const std::string& a, const std::string& b, double tolerance) {
  const auto rows = fblab::compare_reports(fblab::read_json_file(a), fblab::read_json_file(b), tolerance);
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"metric", r.metric},
                   {"a", r.a},
                   {"b", r.b},
                   {"delta", r.delta},
                   {"within_tolerance", r.within_tolerance}});
  }
  std::cout << nlohmann::json{{"tolerance", tolerance}, {"rows", out}}.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free boundary laboratory on the unit half disk"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, operator_path, report_a, report_b;
  std::int64_t seed = -1;
  bool normalize = false;
  int samples = 256;
  double tolerance = 0.0;

  auto* run = app.add_subcommand("run", "Solve a scenario and run its analyses");
  run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the scenario)");
  run->add_option("--seed", seed, "Seed for sampled checks (overrides the scenario)")->check(CLI::NonNegativeNumber);
  run->add_flag("--normalize-report", normalize, "Omit timings and paths from the report");

  auto* validate = app.add_subcommand("validate-operator", "Check an operator against the structural hypotheses");
  validate->add_option("operator", operator_path, "Operator JSON file")->required();
  validate->add_option("--seed", seed, "Sampler seed")->check(CLI::NonNegativeNumber);
  validate->add_option("--samples", samples, "Number of random samples")->check(CLI::PositiveNumber);

  auto* compare = app.add_subcommand("compare", "Diff the numeric fields of two run reports");
  compare->add_option("report_a", report_a, "First report.json")->required();
  compare->add_option("report_b", report_b, "Second report.json")->required();
  compare->add_option("--tolerance", tolerance, "Rows with |delta| <= tolerance are marked within tolerance");

  app.add_subcommand("dump-info", "Print build and kernel information");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(scenario_path, out_dir, seed, normalize);
    if (*validate) return cmd_validate(operator_path, seed, samples);
    if (*compare) return cmd_compare(report_a, report_b, tolerance);
    std::cout << fblab::dump_info().dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
