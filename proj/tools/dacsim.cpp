// Command-line driver: train seeds from a config, run the verification
// suite, or print the default configuration.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "netdac/config.hpp"
#include "netdac/errors.hpp"
#include "netdac/runner.hpp"
#include "netdac/verify.hpp"

namespace {

int verify_command(const netdac::VerifyOptions& options, const std::string& report_path) {
  const auto results = netdac::run_verification(options);
  std::ofstream report(report_path);
  if (!report) {
    std::cerr << "cannot write report: " << report_path << '\n';
    return 2;
  }
  netdac::write_report(report, results);
  netdac::write_report(std::cout, results);
  std::size_t failed = 0;
  for (const auto& r : results) {
    if (r.passed) continue;
    ++failed;
    std::cerr << "check failed: " << r.name << " (" << r.detail << ")\n";
  }
  std::cerr << results.size() - failed << " of " << results.size() << " checks passed; report: " << report_path
            << '\n';
  return failed == 0 ? 0 : 1;
}

int run_command(const std::string& config_path, const std::string& output_override) {
  netdac::RunConfig config = netdac::load_config(config_path);
  if (!output_override.empty()) config.output = output_override;
  if (config.experiment == netdac::ExperimentKind::Verify) {
    netdac::VerifyOptions options;
    options.seed = config.seeds.front();
    options.workers = netdac::workers_from_env();
    return verify_command(options, config.output);
  }
  const auto runs = netdac::run_seeds(config, netdac::workers_from_env());
  std::ofstream csv(config.output);
  std::ofstream plot(netdac::plot_path(config.output));
  if (!csv || !plot) {
    std::cerr << "cannot write output: " << config.output << '\n';
    return 2;
  }
  netdac::write_metrics_csv(csv, runs);
  netdac::write_plot_csv(plot, runs);
  for (const auto& run : runs) {
    std::cout << "seed " << run.seed << ": cost " << run.rows.front().eval_cost << " -> " << run.rows.back().eval_cost
              << '\n';
  }
  std::cout << "wrote " << config.output << " and " << netdac::plot_path(config.output) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Networked deterministic actor-critic simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  auto* run = app.add_subcommand("run", "Train every configured seed and write metrics CSVs");
  run->add_option("config", config_path, "Key-value configuration file")->required();
  run->add_option("-o,--output", output_override, "Override the configured CSV path");

  netdac::VerifyOptions verify_options;
  std::string report_path = "verify_report.tsv";
  auto* verify = app.add_subcommand("verify", "Run the oracle and property checks");
  verify->add_option("--fault-inject", verify_options.fault_inject, "Corrupt the named check (negative control)");
  verify->add_option("--report", report_path, "Report path");
  verify->add_option("--seed", verify_options.seed, "Seed for the random instances");

  auto* defaults = app.add_subcommand("print-defaults", "Print the default configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path, output_override);
    if (*verify) {
      verify_options.workers = netdac::workers_from_env();
      return verify_command(verify_options, report_path);
    }
    if (*defaults) {
      std::cout << netdac::serialize_config(netdac::RunConfig{});
      return 0;
    }
  } catch (const netdac::SeedDiverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const netdac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
