#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "netdac/config.hpp"
#include "netdac/experiment.hpp"

namespace netdac {

/// Raised when any seed diverges; names the seed.
class SeedDiverged : public std::runtime_error {
 public:
  SeedDiverged(std::uint64_t seed, const std::string& what)
      : std::runtime_error("seed " + std::to_string(seed) + " diverged: " + what), seed_(seed) {}
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

struct SeedRun {
  std::uint64_t seed = 0;
  std::vector<MetricsRow> rows;
};

/// Runs every configured seed, at most `workers` at a time. Results come back
/// in config seed order regardless of scheduling.
std::vector<SeedRun> run_seeds(const RunConfig& config, std::size_t workers = 1);

/// Worker cap from DAC_WORKERS, else 1.
std::size_t workers_from_env();

/// Run id used for the per-seed summary row.
std::string summary_run_id(const std::string& run_id);

/// Header plus every row, then one summary row per seed repeating the final
/// row under summary_run_id().
void write_metrics_csv(std::ostream& out, const std::vector<SeedRun>& runs);

/// Per-batch means across seeds: batch, t, eval_cost, mean_Jhat,
/// critic_disagreement, actor_grad_norm, seeds.
void write_plot_csv(std::ostream& out, const std::vector<SeedRun>& runs);

/// Companion path for the plot series: "x.csv" becomes "x.plot.csv".
std::string plot_path(const std::string& output);

/// Mean eval_cost across seeds for each batch index.
std::vector<double> mean_cost_curve(const std::vector<SeedRun>& runs);

}  // namespace netdac
