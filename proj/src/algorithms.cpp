#include "netdac/algorithms.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "netdac/errors.hpp"

namespace netdac {

Schedule Schedule::constant(double critic, double actor) {
  Schedule s;
  s.mode = Mode::Constant;
  s.critic_scale = critic;
  s.actor_scale = actor;
  return s;
}

Schedule Schedule::polynomial(double critic, double critic_decay, double actor, double actor_decay) {
  if (!(critic_decay > 0.5 && critic_decay < actor_decay && actor_decay <= 1.0)) {
    throw std::invalid_argument("polynomial schedule needs 0.5 < p_critic < p_actor <= 1");
  }
  Schedule s;
  s.mode = Mode::Polynomial;
  s.critic_scale = critic;
  s.critic_decay = critic_decay;
  s.actor_scale = actor;
  s.actor_decay = actor_decay;
  return s;
}

double Schedule::critic(std::size_t t) const {
  if (mode == Mode::Constant) return critic_scale;
  return critic_scale / std::pow(1.0 + static_cast<double>(t), critic_decay);
}

double Schedule::actor(std::size_t t) const {
  if (mode == Mode::Constant) return actor_scale;
  return actor_scale / std::pow(1.0 + static_cast<double>(t), actor_decay);
}

JointAction draw_action(const PolicySet& policy, std::size_t s, const ExplorationNoise& noise, Rng& rng) {
  JointAction a = policy.act(s);
  if (noise.sigma > 0.0) {
    std::normal_distribution<double> normal(0.0, noise.sigma);
    for (auto& ai : a)
      for (Eigen::Index k = 0; k < ai.size(); ++k) ai(k) += normal(rng);
  }
  return a;
}

TrainState make_train_state(const NetworkedMdp& mdp, PolicySet policy, std::size_t critic_dim, std::uint64_t seed,
                            const ExplorationNoise& noise, std::size_t initial_state) {
  if (policy.agent_count() != mdp.agent_count() || policy.action_dims() != mdp.action_dims()) {
    throw DimensionMismatch("policy set does not match the MDP's agents and action dimensions");
  }
  if (policy.state_count() != mdp.state_count()) throw DimensionMismatch("policy set built for a different state count");
  if (initial_state >= mdp.state_count()) throw std::out_of_range("initial state out of range");
  const auto n = mdp.agent_count();
  TrainState st{std::move(policy),
                std::vector<Vector>(n, Vector::Zero(static_cast<Eigen::Index>(critic_dim))),
                std::vector<double>(n, 0.0),
                0,
                initial_state,
                {},
                make_stream(seed, "env"),
                make_stream(seed, "noise")};
  st.action = draw_action(st.policy, st.state, noise, st.noise_rng);
  return st;
}

Vector q_actor_direction(const PolicySet& policy, const FeatureMap& features, const Vector& weights, std::size_t s,
                         const JointAction& a, std::size_t agent) {
  return policy.jacobian_times(agent, s, features.grad_action_dot(policy, s, a, agent, weights));
}

Vector r_actor_direction(const PolicySet& policy, const FeatureMap& features, const Vector& weights, std::size_t s,
                         std::size_t agent) {
  const JointAction target = policy.act(s);
  return policy.jacobian_times(agent, s, features.grad_action_dot(policy, s, target, agent, weights));
}

double max_pairwise_distance(const std::vector<Vector>& weights) {
  double best = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    for (std::size_t j = i + 1; j < weights.size(); ++j) best = std::max(best, (weights[i] - weights[j]).norm());
  return best;
}

void check_divergence(const TrainState& state, double limit) {
  // One pass per vector; the negated comparison also catches NaN.
  auto ok = [limit](const Vector& v) {
    const double* p = v.data();
    for (Eigen::Index k = 0; k < v.size(); ++k)
      if (!(std::abs(p[k]) <= limit)) return false;
    return true;
  };
  for (std::size_t i = 0; i < state.critic.size(); ++i) {
    if (!ok(state.critic[i]) || !(std::abs(state.j_hat[i]) <= limit)) {
      throw Diverged("critic of agent " + std::to_string(i) + " diverged at step " + std::to_string(state.t));
    }
    if (!ok(state.policy.theta(i))) {
      throw Diverged("policy of agent " + std::to_string(i) + " diverged at step " + std::to_string(state.t));
    }
  }
}

namespace {

void check_critics(const TrainState& state, const FeatureMap& features, const NetworkedMdp& mdp) {
  if (state.critic.size() != mdp.agent_count() || state.j_hat.size() != mdp.agent_count()) {
    throw DimensionMismatch("train state agent count does not match the MDP");
  }
  for (const auto& w : state.critic) {
    if (static_cast<std::size_t>(w.size()) != features.dim()) {
      throw DimensionMismatch("critic weights do not match the feature dimension");
    }
  }
}

}  // namespace

Transition alg1_step(TrainState& st, const NetworkedMdp& mdp, const FeatureMap& features, GraphProcess& network,
                     const Schedule& schedule, const ExplorationNoise& noise, const StepOptions& options) {
  check_critics(st, features, mdp);
  const auto n = mdp.agent_count();
  const auto s = st.state;
  const JointAction& a = st.action;

  Transition tr;
  tr.state = s;
  tr.action = a;
  tr.rewards = mdp.local_rewards(s, a);
  tr.next_state = mdp.sample_transition(s, a, st.env_rng);
  JointAction next_action = draw_action(st.policy, tr.next_state, noise, st.noise_rng);

  const Vector phi = features.eval(st.policy, s, a);
  const Vector phi_next = features.eval(st.policy, tr.next_state, next_action);
  const double beta_w = schedule.critic(options.critic_index >= 0 ? static_cast<std::size_t>(options.critic_index) : st.t);
  const double beta_theta = options.update_actor ? schedule.actor(st.t) : 0.0;

  std::vector<Vector> tilde(n);
  if (options.update_actor) tr.actor_direction.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& w = st.critic[i];
    const double delta = tr.rewards[i] - st.j_hat[i] + phi_next.dot(w) - phi.dot(w);
    tilde[i] = w + (beta_w * delta) * phi;
    if (options.update_actor) tr.actor_direction[i] = q_actor_direction(st.policy, features, w, s, a, i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    st.j_hat[i] = (1.0 - beta_w) * st.j_hat[i] + beta_w * tr.rewards[i];
    if (beta_theta != 0.0) st.policy.apply_step(i, beta_theta * tr.actor_direction[i]);
  }
  consensus_step_into(network.next_weights(), tilde, st.critic);

  st.state = tr.next_state;
  st.action = std::move(next_action);
  ++st.t;
  if (options.check_divergence) check_divergence(st, options.divergence_limit);
  return tr;
}

Transition alg2_step(TrainState& st, const NetworkedMdp& mdp, const FeatureMap& features, GraphProcess& network,
                     const Schedule& schedule, const ExplorationNoise& behavior, const StepOptions& options) {
  check_critics(st, features, mdp);
  const auto n = mdp.agent_count();
  const auto s = st.state;
  const JointAction& a = st.action;

  Transition tr;
  tr.state = s;
  tr.action = a;
  tr.rewards = mdp.local_rewards(s, a);
  tr.next_state = mdp.sample_transition(s, a, st.env_rng);

  const Vector w_feat = features.eval(st.policy, s, a);
  const double beta_l = schedule.critic(options.critic_index >= 0 ? static_cast<std::size_t>(options.critic_index) : st.t);
  const double beta_theta = options.update_actor ? schedule.actor(st.t) : 0.0;

  std::vector<Vector> tilde(n);
  if (options.update_actor) tr.actor_direction.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& lambda = st.critic[i];
    const double delta = tr.rewards[i] - w_feat.dot(lambda);
    tilde[i] = lambda + (beta_l * delta) * w_feat;
    if (options.update_actor) tr.actor_direction[i] = r_actor_direction(st.policy, features, lambda, s, i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    // Ĵ is not part of the off-policy method; it is tracked as a diagnostic only.
    st.j_hat[i] = (1.0 - beta_l) * st.j_hat[i] + beta_l * tr.rewards[i];
    if (beta_theta != 0.0) st.policy.apply_step(i, beta_theta * tr.actor_direction[i]);
  }
  consensus_step_into(network.next_weights(), tilde, st.critic);

  st.state = tr.next_state;
  st.action = draw_action(st.policy, st.state, behavior, st.noise_rng);
  ++st.t;
  if (options.check_divergence) check_divergence(st, options.divergence_limit);
  return tr;
}

}  // namespace netdac
