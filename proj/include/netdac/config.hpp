#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "netdac/experiment.hpp"

namespace netdac {

enum class ExperimentKind { Bandit, FiniteMdp, Verify };
enum class FeatureKind { Compatible, Fourier, Tabular };
enum class Topology { Ring, Path, Star, Complete, Edgeless, Random, File };

/// Run configuration. Defaults reproduce the multi-agent bandit experiment:
/// 10 agents, m = 10, σ_β = 0.1, critic step 0.1, actor step 0.01, batch 2m,
/// five seeds, compatible "a − θ" features plus a bias feature.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Bandit;
  Algorithm algorithm = Algorithm::OnPolicy;
  std::size_t agents = 10;
  std::size_t action_dim = 10;
  /// Finite-MDP experiments only (scalar actions per agent).
  std::size_t states = 5;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  Schedule::Mode schedule = Schedule::Mode::Constant;
  double critic_step = 0.1;
  double actor_step = 0.01;
  double critic_decay = 0.6;
  double actor_decay = 0.9;

  double noise_sigma = 0.1;

  Topology topology = Topology::Ring;
  double edge_prob = 0.5;
  std::string edge_list;
  double failure_prob = 0.0;

  FeatureKind features = FeatureKind::Compatible;
  std::size_t feature_dim = 3;
  double fourier_scale = 1.0;
  bool bias_feature = true;
  bool center_features = true;

  std::size_t batch_size = 20;
  std::size_t batches = 5000;
  UpdateMode mode = UpdateMode::Batch;
  bool warm_start = false;
  ActorGradient actor_gradient = ActorGradient::BatchMean;

  double theta_lo = -1e3;
  double theta_hi = 1e3;
  double divergence_limit = 1e8;
  std::size_t eval_rollout_steps = 0;

  std::string run_id = "run";
  std::string output = "results.csv";

  bool operator==(const RunConfig&) const = default;
};

/// Parses "key = value" lines ('#' starts a comment). Unknown or repeated
/// keys and invariant violations raise ConfigError naming the key and line.
/// batch_size defaults to 2·action_dim when omitted.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Writes every key, so the output parses back to an identical config.
std::string serialize_config(const RunConfig& config);

void validate_config(const RunConfig& config);

/// Builds the per-seed experiment: environment drawn from the seed's "env"
/// sub-stream, policy, features and communication graph.
ExperimentSetup build_setup(const RunConfig& config, std::uint64_t seed);

CommGraph build_graph(const RunConfig& config, std::uint64_t seed);

}  // namespace netdac
