#include "netdac/runner.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>

#include "netdac/errors.hpp"
#include "netdac/parallel.hpp"

namespace netdac {

namespace {

std::string fmt(double v) {
  // Shortest representation that parses back to the same double.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_row(std::ostream& out, const MetricsRow& r, const std::string& run_id) {
  out << run_id << ',' << r.seed << ',' << r.t << ',' << r.batch << ',' << fmt(r.eval_cost) << ','
      << fmt(r.mean_j_hat) << ',' << fmt(r.critic_disagreement) << ',' << fmt(r.actor_grad_norm) << ','
      << r.wallclock_ms << '\n';
}

}  // namespace

std::size_t workers_from_env() {
  const char* raw = std::getenv("DAC_WORKERS");
  if (!raw || !*raw) return 1;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (*end != '\0' || v < 1) throw ConfigError("DAC_WORKERS must be a positive integer");
  return static_cast<std::size_t>(v);
}

std::vector<SeedRun> run_seeds(const RunConfig& config, std::size_t workers) {
  const std::size_t count = config.seeds.size();
  std::vector<SeedRun> runs(count);
  const auto errors = parallel_for(count, workers, [&](std::size_t k) {
    runs[k].seed = config.seeds[k];
    runs[k].rows = run_experiment(build_setup(config, config.seeds[k]));
  });
  for (std::size_t k = 0; k < count; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const Diverged& e) {
      throw SeedDiverged(config.seeds[k], e.what());
    }
  }
  return runs;
}

std::string summary_run_id(const std::string& run_id) { return run_id + "#summary"; }

void write_metrics_csv(std::ostream& out, const std::vector<SeedRun>& runs) {
  out << "run_id,seed,t,batch,eval_cost,mean_Jhat,critic_disagreement,actor_grad_norm,wallclock_ms\n";
  for (const auto& run : runs)
    for (const auto& row : run.rows) write_row(out, row, row.run_id);
  for (const auto& run : runs)
    if (!run.rows.empty()) write_row(out, run.rows.back(), summary_run_id(run.rows.back().run_id));
}

std::vector<double> mean_cost_curve(const std::vector<SeedRun>& runs) {
  std::size_t len = runs.empty() ? 0 : runs.front().rows.size();
  for (const auto& r : runs) len = std::min(len, r.rows.size());
  std::vector<double> curve(len, 0.0);
  for (const auto& r : runs)
    for (std::size_t b = 0; b < len; ++b) curve[b] += r.rows[b].eval_cost / static_cast<double>(runs.size());
  return curve;
}

void write_plot_csv(std::ostream& out, const std::vector<SeedRun>& runs) {
  out << "batch,t,eval_cost,mean_Jhat,critic_disagreement,actor_grad_norm,seeds\n";
  std::size_t len = runs.empty() ? 0 : runs.front().rows.size();
  for (const auto& r : runs) len = std::min(len, r.rows.size());
  const double n = static_cast<double>(runs.size());
  for (std::size_t b = 0; b < len; ++b) {
    double cost = 0, jhat = 0, dis = 0, grad = 0;
    for (const auto& r : runs) {
      cost += r.rows[b].eval_cost;
      jhat += r.rows[b].mean_j_hat;
      dis += r.rows[b].critic_disagreement;
      grad += r.rows[b].actor_grad_norm;
    }
    out << runs.front().rows[b].batch << ',' << runs.front().rows[b].t << ',' << fmt(cost / n) << ','
        << fmt(jhat / n) << ',' << fmt(dis / n) << ',' << fmt(grad / n) << ',' << runs.size() << '\n';
  }
}

std::string plot_path(const std::string& output) {
  const std::string ext = ".csv";
  if (output.size() >= ext.size() && output.compare(output.size() - ext.size(), ext.size(), ext) == 0) {
    return output.substr(0, output.size() - ext.size()) + ".plot.csv";
  }
  return output + ".plot.csv";
}

}  // namespace netdac
