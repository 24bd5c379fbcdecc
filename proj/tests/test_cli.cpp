#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "netdac/config.hpp"
#include "netdac/errors.hpp"
#include "netdac/runner.hpp"
#include "netdac/verify.hpp"

using namespace netdac;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::vector<std::string> lines_of(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// Drops the trailing wallclock_ms column.
std::string without_wallclock(const std::string& line) { return line.substr(0, line.rfind(',')); }

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "netdac_cli_test";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(DACSIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty config gives the bandit experiment defaults") {
  const RunConfig c = parse("");
  CHECK(c.experiment == ExperimentKind::Bandit);
  CHECK(c.algorithm == Algorithm::OnPolicy);
  CHECK(c.agents == 10);
  CHECK(c.action_dim == 10);
  CHECK(c.noise_sigma == 0.1);
  CHECK(c.critic_step == 0.1);
  CHECK(c.actor_step == 0.01);
  CHECK(c.batch_size == 20);
  CHECK(c.seeds.size() == 5);
  CHECK(c == RunConfig{});
}

TEST_CASE("batch size follows the action dimension unless given") {
  CHECK(parse("action_dim = 50\n").batch_size == 100);
  CHECK(parse("action_dim = 50\nbatch_size = 7\n").batch_size == 7);
}

TEST_CASE("config errors name the key and line") {
  CHECK_THROWS_AS(parse("agents = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds = \n"), ConfigError);
  CHECK_THROWS_AS(parse("noise_sigma = -0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("agents = 3\nagents = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse("topology = file\n"), ConfigError);
  try {
    parse("# comment\nagents = 4\nbogus_key = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("bogus_key") != std::string::npos);
    CHECK(what.find("line 3") != std::string::npos);
  }
  try {
    parse("algorithm = alg3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("algorithm") != std::string::npos);
  }
}

TEST_CASE("serialize round-trips") {
  const RunConfig defaults;
  CHECK(parse(serialize_config(defaults)) == defaults);
  const RunConfig custom = parse(
      "experiment = finite-mdp\nalgorithm = alg2\nagents = 3\nstates = 7\nseeds = 9, 4\n"
      "schedule = polynomial\ncritic_step = 0.7\ncritic_decay = 0.65\nactor_decay = 0.95\n"
      "noise_sigma = 0.3\ntopology = random\nedge_prob = 0.35\nfailure_prob = 0.125\n"
      "features = fourier\nfeature_dim = 5\nfourier_scale = 0.3333333333333333\nmode = online\n"
      "warm_start = true\nactor_gradient = last_sample\ntheta_lo = -2.5\ntheta_hi = 1e-3\nrun_id = x y\n");
  CHECK(custom.seeds == std::vector<std::uint64_t>{9, 4});
  CHECK(custom.fourier_scale == 1.0 / 3.0);
  CHECK(parse(serialize_config(custom)) == custom);
}

TEST_CASE("build_setup wires every component") {
  RunConfig c = parse("agents = 3\naction_dim = 2\ntopology = star\n");
  const ExperimentSetup setup = build_setup(c, 4);
  CHECK(setup.mdp->agent_count() == 3);
  CHECK(setup.features->dim() == 7);  // 3·2 compatible features plus bias
  CHECK(setup.graph->degree(0) == 2);
  CHECK(setup.batch_size == 4);
  CHECK(build_setup(c, 4).mdp->mean_reward(0, setup.initial_policy->act(0)) ==
        setup.mdp->mean_reward(0, setup.initial_policy->act(0)));

  c = parse("experiment = finite-mdp\nalgorithm = alg2\nagents = 2\nstates = 4\nfeatures = fourier\nfeature_dim = 6\n");
  const ExperimentSetup finite = build_setup(c, 1);
  CHECK(finite.mdp->state_count() == 4);
  CHECK(finite.features->dim() == 6);
  CHECK(finite.initial_policy->param_dim(0) == 5);

  const fs::path edges = scratch_dir() / "edges.txt";
  std::ofstream(edges) << "0 1\n1 2\n";
  c = parse("agents = 3\naction_dim = 1\ntopology = file\nedge_list = " + edges.string() + "\n");
  CHECK(build_setup(c, 1).graph->edges().size() == 2);
}

TEST_CASE("metrics CSV layout") {
  RunConfig c = parse("agents = 3\naction_dim = 2\nseeds = 3\nbatches = 1\nrun_id = smoke\n");
  const auto runs = run_seeds(c);
  std::ostringstream csv;
  write_metrics_csv(csv, runs);
  std::istringstream in(csv.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "run_id,seed,t,batch,eval_cost,mean_Jhat,critic_disagreement,actor_grad_norm,wallclock_ms");
  CHECK(lines[1].rfind("smoke,3,0,0,", 0) == 0);
  CHECK(lines[2].rfind("smoke,3,4,1,", 0) == 0);
  CHECK(lines[3].rfind(summary_run_id("smoke") + ",3,4,1,", 0) == 0);

  std::ostringstream empty;
  write_metrics_csv(empty, {});
  CHECK(empty.str() == lines[0] + "\n");
  CHECK(plot_path("out/results.csv") == "out/results.plot.csv");
  CHECK(plot_path("results") == "results.plot.csv");
}

TEST_CASE("seed runs are independent of the worker count") {
  RunConfig c = parse("agents = 4\naction_dim = 3\nseeds = 1,2,3\nbatches = 20\nfailure_prob = 0.2\n");
  const auto serial = run_seeds(c, 1);
  const auto parallel = run_seeds(c, 3);
  REQUIRE(serial.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(serial[k].seed == c.seeds[k]);
    for (std::size_t r = 0; r < serial[k].rows.size(); ++r) {
      CHECK(serial[k].rows[r].eval_cost == parallel[k].rows[r].eval_cost);
      CHECK(serial[k].rows[r].mean_j_hat == parallel[k].rows[r].mean_j_hat);
    }
  }
  const auto curve = mean_cost_curve(serial);
  CHECK(curve.size() == 21);
  CHECK(curve[0] == doctest::Approx((serial[0].rows[0].eval_cost + serial[1].rows[0].eval_cost +
                                     serial[2].rows[0].eval_cost) / 3.0));
}

TEST_CASE("divergence names the failing seed") {
  RunConfig c = parse("agents = 2\naction_dim = 2\nseeds = 8\nbatches = 200\ncritic_step = 50\nactor_step = 50\n");
  try {
    run_seeds(c);
    FAIL("expected divergence");
  } catch (const SeedDiverged& e) {
    CHECK(e.seed() == 8);
    CHECK(std::string(e.what()).find("seed 8") != std::string::npos);
  }
}

TEST_CASE("verification report has one record per check") {
  VerifyOptions options;
  const auto results = run_verification(options);
  CHECK(results.size() == check_names().size());
  for (const auto& r : results) CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);
  std::ostringstream report;
  write_report(report, results);
  std::istringstream in(report.str());
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  CHECK(lines == check_names().size() + 1);

  options.fault_inject = "policy_gradient_fd";
  const auto faulty = run_verification(options);
  CHECK_FALSE(faulty[0].passed);
  for (std::size_t k = 1; k < faulty.size(); ++k) CHECK(faulty[k].passed);
  options.fault_inject = "no_such_check";
  CHECK_THROWS(run_verification(options));
}

TEST_CASE("command-line runs") {
  const fs::path dir = scratch_dir();
  const fs::path config = dir / "one.conf";
  const fs::path out = dir / "one.csv";
  std::ofstream(config) << "agents = 3\naction_dim = 2\nseeds = 5\nbatches = 1\noutput = " << out.string() << "\n";
  REQUIRE(run_cli("run " + config.string()) == 0);
  const auto rows = lines_of(out.string());
  REQUIRE(rows.size() == 4);
  std::size_t eval_rows = 0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].rfind(summary_run_id("run"), 0) != 0) ++eval_rows;
  CHECK(eval_rows == 2);
  CHECK(fs::exists(dir / "one.plot.csv"));

  const fs::path many = dir / "many.conf";
  std::ofstream(many) << "agents = 4\naction_dim = 3\nseeds = 1,2\nbatches = 40\nfailure_prob = 0.3\nalgorithm = alg2\n"
                      << "output = " << (dir / "a.csv").string() << "\n";
  REQUIRE(run_cli("run " + many.string()) == 0);
  REQUIRE(run_cli("run " + many.string() + " --output " + (dir / "b.csv").string()) == 0);
  const auto a = lines_of((dir / "a.csv").string());
  const auto b = lines_of((dir / "b.csv").string());
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 1 + 2 * 41 + 2);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(without_wallclock(a[k]) == without_wallclock(b[k]));

  const fs::path bad = dir / "bad.conf";
  std::ofstream(bad) << "agents = 0\n";
  CHECK(run_cli("run " + bad.string()) == 2);
  CHECK(run_cli("run " + (dir / "missing.conf").string()) == 2);
  CHECK(run_cli("print-defaults") == 0);
  CHECK(run_cli("verify --report " + (dir / "report.tsv").string()) == 0);
  CHECK(lines_of((dir / "report.tsv").string()).size() == check_names().size() + 1);
  CHECK(run_cli("verify --fault-inject policy_gradient_fd --report " + (dir / "fault.tsv").string()) == 1);
}
