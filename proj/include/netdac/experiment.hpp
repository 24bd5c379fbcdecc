#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "netdac/algorithms.hpp"
#include "netdac/env.hpp"
#include "netdac/features.hpp"
#include "netdac/network.hpp"
#include "netdac/policy.hpp"

namespace netdac {

enum class Algorithm { OnPolicy, OffPolicy };

enum class UpdateMode {
  /// Critic-only steps for a whole batch, then one actor update.
  Batch,
  /// Critic and actor update every step; rows recorded every batch_size steps.
  Online,
};

enum class ActorGradient {
  /// Mean of the actor directions over the batch's samples (batch-end critic).
  BatchMean,
  /// Actor direction at the batch's last sample only.
  LastSample,
};

struct MetricsRow {
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t t = 0;
  std::size_t batch = 0;
  double eval_cost = 0.0;
  double mean_j_hat = 0.0;
  double critic_disagreement = 0.0;
  double actor_grad_norm = 0.0;
  std::int64_t wallclock_ms = 0;
};

struct ExperimentSetup {
  std::string run_id = "run";
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::OnPolicy;
  std::shared_ptr<const NetworkedMdp> mdp;
  std::shared_ptr<const FeatureMap> features;
  std::shared_ptr<const PolicySet> initial_policy;
  std::shared_ptr<const CommGraph> graph;
  double failure_prob = 0.0;
  Schedule schedule;
  ExplorationNoise noise;
  UpdateMode mode = UpdateMode::Batch;
  std::size_t batch_size = 20;
  std::size_t batches = 100;
  /// Keep critic weights across batches instead of zeroing them.
  bool warm_start = false;
  ActorGradient actor_gradient = ActorGradient::BatchMean;
  double divergence_limit = 1e8;
  /// Finite MDPs: 0 evaluates J exactly, otherwise by a rollout of this length.
  std::size_t eval_rollout_steps = 0;
};

/// Trains one seed and returns the metric trace: an initial evaluation row
/// followed by one row per batch. Throws Diverged, or ConfigError on
/// inconsistent dimensions.
std::vector<MetricsRow> run_experiment(const ExperimentSetup& setup);

struct RolloutEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Long-run average of R̄ along a noise-free trajectory of `steps` steps
/// starting from state 0; standard error from 20 batch means.
RolloutEstimate rollout_average_reward(const NetworkedMdp& mdp, const PolicySet& policy, std::size_t steps, Rng& rng);

/// Cost −J of the noise-free target policy. Bandit: exact quadratic.
/// Finite MDPs: exact via the stationary distribution when `rollout_steps`
/// is zero, otherwise a rollout estimate.
double evaluate_policy_cost(const NetworkedMdp& mdp, const PolicySet& policy, std::size_t rollout_steps = 0,
                            std::uint64_t seed = 0);

}  // namespace netdac
