#include "netdac/experiment.hpp"

#include <chrono>
#include <cmath>

#include "netdac/errors.hpp"
#include "netdac/oracle.hpp"

namespace netdac {

RolloutEstimate rollout_average_reward(const NetworkedMdp& mdp, const PolicySet& policy, std::size_t steps, Rng& rng) {
  constexpr std::size_t kBatches = 20;
  if (steps < kBatches) throw std::invalid_argument("rollout needs at least 20 steps");
  const std::size_t per_batch = steps / kBatches;
  std::size_t s = 0;
  std::vector<double> means;
  for (std::size_t b = 0; b < kBatches; ++b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < per_batch; ++k) {
      const JointAction a = policy.act(s);
      acc += mdp.mean_reward(s, a);
      s = mdp.sample_transition(s, a, rng);
    }
    means.push_back(acc / static_cast<double>(per_batch));
  }
  RolloutEstimate out;
  for (double m : means) out.mean += m;
  out.mean /= static_cast<double>(kBatches);
  double var = 0.0;
  for (double m : means) var += (m - out.mean) * (m - out.mean);
  var /= static_cast<double>(kBatches - 1);
  out.std_error = std::sqrt(var / static_cast<double>(kBatches));
  return out;
}

double evaluate_policy_cost(const NetworkedMdp& mdp, const PolicySet& policy, std::size_t rollout_steps,
                            std::uint64_t seed) {
  if (const auto* bandit = dynamic_cast<const ContinuousBandit*>(&mdp)) {
    return -bandit_reward(*bandit, policy.act(0));
  }
  if (rollout_steps == 0) return -oracle::exact_eval(mdp, policy).j;
  Rng rng = make_stream(seed, "evaluation");
  return -rollout_average_reward(mdp, policy, rollout_steps, rng).mean;
}

namespace {

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

void validate(const ExperimentSetup& setup) {
  if (!setup.mdp || !setup.features || !setup.initial_policy || !setup.graph) {
    throw ConfigError("experiment setup is missing the MDP, features, policy or graph");
  }
  if (setup.graph->agent_count() != setup.mdp->agent_count()) {
    throw ConfigError("communication graph and MDP disagree on the agent count");
  }
  if (setup.batch_size == 0) throw ConfigError("batch_size must be at least 1");
  if (setup.noise.sigma < 0.0) throw ConfigError("noise sigma must be non-negative");
}

}  // namespace

std::vector<MetricsRow> run_experiment(const ExperimentSetup& setup) {
  validate(setup);
  const auto start = std::chrono::steady_clock::now();
  const NetworkedMdp& mdp = *setup.mdp;
  const FeatureMap& features = *setup.features;

  TrainState st = [&] {
    try {
      return make_train_state(mdp, *setup.initial_policy, features.dim(), setup.seed, setup.noise);
    } catch (const DimensionMismatch& e) {
      throw ConfigError(std::string("inconsistent dimensions: ") + e.what());
    }
  }();
  GraphProcess network(*setup.graph, setup.failure_prob, setup.seed);
  const auto n = mdp.agent_count();
  const bool on_policy = setup.algorithm == Algorithm::OnPolicy;

  std::vector<MetricsRow> rows;
  auto record = [&](std::size_t batch, double grad_norm) {
    MetricsRow row;
    row.run_id = setup.run_id;
    row.seed = setup.seed;
    row.t = st.t;
    row.batch = batch;
    row.eval_cost = evaluate_policy_cost(mdp, st.policy, setup.eval_rollout_steps, setup.seed);
    row.mean_j_hat = mean_of(st.j_hat);
    row.critic_disagreement = max_pairwise_distance(st.critic);
    row.actor_grad_norm = grad_norm;
    row.wallclock_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  };
  auto step = [&](const StepOptions& options) {
    return on_policy ? alg1_step(st, mdp, features, network, setup.schedule, setup.noise, options)
                     : alg2_step(st, mdp, features, network, setup.schedule, setup.noise, options);
  };

  record(0, 0.0);

  if (setup.mode == UpdateMode::Online) {
    StepOptions options;
    options.divergence_limit = setup.divergence_limit;
    for (std::size_t b = 1; b <= setup.batches; ++b) {
      double grad_sq = 0.0;
      for (std::size_t k = 0; k < setup.batch_size; ++k) {
        const Transition tr = step(options);
        if (k + 1 == setup.batch_size) {
          grad_sq = 0.0;
          for (const auto& g : tr.actor_direction) grad_sq += g.squaredNorm();
        }
      }
      record(b, std::sqrt(grad_sq));
    }
    return rows;
  }

  std::vector<std::size_t> states;
  std::vector<JointAction> actions;
  states.reserve(setup.batch_size);
  actions.reserve(setup.batch_size);
  for (std::size_t b = 1; b <= setup.batches; ++b) {
    if (!setup.warm_start) {
      for (auto& w : st.critic) w.setZero();
    }
    // θ changed at the end of the previous batch; act with the current policy.
    st.action = draw_action(st.policy, st.state, setup.noise, st.noise_rng);
    states.clear();
    actions.clear();
    for (std::size_t k = 0; k < setup.batch_size; ++k) {
      StepOptions options;
      options.update_actor = false;
      options.divergence_limit = setup.divergence_limit;
      // Non-finite values persist, so one scan per batch catches them.
      options.check_divergence = k + 1 == setup.batch_size;
      if (!setup.warm_start) options.critic_index = static_cast<std::ptrdiff_t>(k);
      Transition tr = step(options);
      states.push_back(tr.state);
      actions.push_back(std::move(tr.action));
    }

    const std::size_t first = setup.actor_gradient == ActorGradient::BatchMean ? 0 : states.size() - 1;
    const double count = static_cast<double>(states.size() - first);
    std::vector<Vector> direction(n);
    double grad_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      direction[i] = Vector::Zero(static_cast<Eigen::Index>(st.policy.param_dim(i)));
      for (std::size_t k = first; k < states.size(); ++k) {
        direction[i] += on_policy ? q_actor_direction(st.policy, features, st.critic[i], states[k], actions[k], i)
                                  : r_actor_direction(st.policy, features, st.critic[i], states[k], i);
      }
      direction[i] /= count;
      grad_sq += direction[i].squaredNorm();
    }
    const double beta_theta = setup.schedule.actor(b - 1);
    for (std::size_t i = 0; i < n; ++i) st.policy.apply_step(i, beta_theta * direction[i]);
    check_divergence(st, setup.divergence_limit);
    record(b, std::sqrt(grad_sq));
  }
  return rows;
}

}  // namespace netdac
