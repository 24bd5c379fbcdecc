#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "netdac/env.hpp"
#include "netdac/features.hpp"
#include "netdac/linalg.hpp"
#include "netdac/network.hpp"
#include "netdac/policy.hpp"
#include "netdac/rng.hpp"

namespace netdac {

/// Two-timescale step sizes. Polynomial mode uses
///   β_critic(t) = c_critic / (1 + t)^p_critic,  β_actor(t) = c_actor / (1 + t)^p_actor
/// with 0.5 < p_critic < p_actor ≤ 1, so both sums diverge, both squared
/// sums converge and β_actor = o(β_critic).
struct Schedule {
  enum class Mode { Constant, Polynomial };

  Mode mode = Mode::Constant;
  double critic_scale = 0.1;
  double critic_decay = 0.6;
  double actor_scale = 0.01;
  double actor_decay = 0.9;

  static Schedule constant(double critic, double actor);
  static Schedule polynomial(double critic, double critic_decay, double actor, double actor_decay);

  double critic(std::size_t t) const;
  double actor(std::size_t t) const;
};

/// Gaussian perturbation N(0, σ²I) added to every agent's target action.
/// σ = 0 means deterministic execution. Serves as the exploration noise of
/// the on-policy method and as the behaviour policy of the off-policy one.
struct ExplorationNoise {
  double sigma = 0.0;
};

struct TrainState {
  PolicySet policy;
  std::vector<Vector> critic;   // ωⁱ (on-policy) or λⁱ (off-policy)
  std::vector<double> j_hat;    // Ĵⁱ
  std::size_t t = 0;
  std::size_t state = 0;        // s_t
  JointAction action;           // a_t
  Rng env_rng;
  Rng noise_rng;
};

/// Zero critics and Ĵ, s₀ = `initial_state`, a₀ drawn from the policy plus noise.
TrainState make_train_state(const NetworkedMdp& mdp, PolicySet policy, std::size_t critic_dim, std::uint64_t seed,
                            const ExplorationNoise& noise, std::size_t initial_state = 0);

/// a = μ_θ(s) + σε for every agent.
JointAction draw_action(const PolicySet& policy, std::size_t s, const ExplorationNoise& noise, Rng& rng);

struct StepOptions {
  /// false freezes θ for this step (critic-only updates).
  bool update_actor = true;
  /// Index fed to the critic schedule; defaults to the state's t.
  std::ptrdiff_t critic_index = -1;
  double divergence_limit = 1e8;
  /// false defers the divergence scan to the caller.
  bool check_divergence = true;
};

struct Transition {
  std::size_t state = 0;
  JointAction action;
  std::vector<double> rewards;
  std::size_t next_state = 0;
  /// Per-agent actor directions ∇_θⁱμⁱ(s_t)·∇_aⁱ f̂ⁱ evaluated on the pre-step
  /// state; empty when the actor was frozen.
  std::vector<Vector> actor_direction;
};

/// One iteration of the networked on-policy actor-critic for all agents:
/// observe s_{t+1} and rⁱ, draw a_{t+1}, TD error, critic step, actor step,
/// then consensus over a freshly sampled C_t. All agents read the pre-step
/// state before anything is written.
Transition alg1_step(TrainState& state, const NetworkedMdp& mdp, const FeatureMap& features, GraphProcess& network,
                     const Schedule& schedule, const ExplorationNoise& noise, const StepOptions& options = {});

/// One iteration of the networked off-policy actor-critic: δⁱ = rⁱ − R̄̂_λⁱ(s_t,a_t),
/// critic step, actor step through ∇_aⁱ R̄̂ at the target actions, consensus,
/// then a_{t+1} from the behaviour policy around the updated target.
Transition alg2_step(TrainState& state, const NetworkedMdp& mdp, const FeatureMap& features, GraphProcess& network,
                     const Schedule& schedule, const ExplorationNoise& behavior, const StepOptions& options = {});

/// ∇_θⁱμⁱ(s)·∇_aⁱ Q̂_ω(s, a) for the on-policy actor.
Vector q_actor_direction(const PolicySet& policy, const FeatureMap& features, const Vector& weights, std::size_t s,
                         const JointAction& a, std::size_t agent);

/// ∇_θⁱμⁱ(s)·∇_aⁱ R̄̂_λ(s, μ_θ(s)) for the off-policy actor.
Vector r_actor_direction(const PolicySet& policy, const FeatureMap& features, const Vector& weights, std::size_t s,
                         std::size_t agent);

/// max over agent pairs of ‖wⁱ − wʲ‖₂.
double max_pairwise_distance(const std::vector<Vector>& weights);

/// Throws Diverged when any critic entry, Ĵ or θ is non-finite or above `limit`.
void check_divergence(const TrainState& state, double limit);

}  // namespace netdac
