#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "netdac/linalg.hpp"
#include "netdac/rng.hpp"

namespace netdac {

/// One action vector per agent, a = (a¹, …, aᴺ).
using JointAction = std::vector<Vector>;

Vector flatten(const JointAction& a);
JointAction unflatten(const Vector& flat, const std::vector<std::size_t>& dims);

/// Networked multi-agent MDP with a finite state set and continuous
/// per-agent action spaces. Every instance here exposes its transition
/// kernel, so the exact oracle can run on all of them.
class NetworkedMdp {
 public:
  virtual ~NetworkedMdp() = default;

  virtual std::size_t state_count() const = 0;
  virtual std::size_t agent_count() const = 0;
  virtual std::size_t action_dim(std::size_t agent) const = 0;

  std::vector<std::size_t> action_dims() const;
  std::size_t joint_action_dim() const;

  /// P(·|s, a) as a length-|S| probability vector.
  virtual Vector transition_row(std::size_t s, const JointAction& a) const = 0;
  double transition_prob(std::size_t s, const JointAction& a, std::size_t next) const;

  /// ∂P(·|s,a)/∂aⁱ as an nᵢ × |S| matrix. The default takes central
  /// differences with h = 1e-5; subclasses with a closed form override it.
  virtual Matrix transition_row_grad(std::size_t s, const JointAction& a, std::size_t agent) const;

  virtual std::size_t sample_transition(std::size_t s, const JointAction& a, Rng& rng) const;

  virtual double local_reward(std::size_t agent, std::size_t s, const JointAction& a) const = 0;
  /// All agents' local rewards at (s, a); override when they share work.
  virtual std::vector<double> local_rewards(std::size_t s, const JointAction& a) const;
  virtual double mean_reward(std::size_t s, const JointAction& a) const;

  /// ∂R̄(s,a)/∂aⁱ where R̄ is the agent-averaged reward.
  virtual Vector mean_reward_grad(std::size_t agent, std::size_t s, const JointAction& a) const = 0;

  /// Uniform bound on |Rⁱ(s,a)| over the region the instance is used on.
  virtual double reward_bound() const = 0;

  void check_action(const JointAction& a) const;
};

/// Multi-agent continuous bandit: every agent receives
/// R(a) = −(Σᵢ aⁱ − a*)ᵀ C (Σᵢ aⁱ − a*). Single dummy state.
class ContinuousBandit final : public NetworkedMdp {
 public:
  ContinuousBandit(std::size_t agents, Matrix cost, Vector target);

  std::size_t state_count() const override { return 1; }
  std::size_t agent_count() const override { return agents_; }
  std::size_t action_dim(std::size_t) const override { return static_cast<std::size_t>(target_.size()); }

  Vector transition_row(std::size_t s, const JointAction& a) const override;
  Matrix transition_row_grad(std::size_t s, const JointAction& a, std::size_t agent) const override;
  std::size_t sample_transition(std::size_t s, const JointAction& a, Rng& rng) const override;

  double local_reward(std::size_t agent, std::size_t s, const JointAction& a) const override;
  std::vector<double> local_rewards(std::size_t s, const JointAction& a) const override;
  double mean_reward(std::size_t s, const JointAction& a) const override;
  Vector mean_reward_grad(std::size_t agent, std::size_t s, const JointAction& a) const override;
  double reward_bound() const override;

  const Matrix& cost() const { return cost_; }
  const Vector& target() const { return target_; }

 private:
  std::size_t agents_;
  Matrix cost_;
  Vector target_;
};

double bandit_reward(const ContinuousBandit& env, const JointAction& a);
Vector bandit_reward_grad(const ContinuousBandit& env, const JointAction& a, std::size_t agent);

/// C = Qᵀ diag(e) Q with Q orthogonal (QR of a seeded Gaussian matrix) and
/// each eᵢ drawn uniformly from {0.1, 1}; a* = (4, …, 4).
ContinuousBandit make_bandit(std::size_t agents, std::size_t dim, std::uint64_t seed);

/// Tables for a small finite MDP with one scalar action per agent.
///
/// Transitions blend two row-stochastic tables through a logistic gate on
/// the action sum u = Σᵢ aⁱ:
///   P(·|s,a) = (1 − g(u))·low[s] + g(u)·high[s],  g(u) = 1/(1 + exp(−(gain·u + offset))).
///
/// Agent i's reward in state s is
///   level(i,s) + bump(i,s)·exp(−½ Σⱼ (aʲ − center[i](s,j))²) + slope(i,s)·tanh(u).
struct FiniteMdpTables {
  Matrix low;
  Matrix high;
  double gain = 1.0;
  double offset = 0.0;
  Matrix level;                 // N × S
  Matrix bump;                  // N × S
  std::vector<Matrix> center;   // N entries, each S × N
  Matrix slope;                 // N × S
};

class FiniteTestMdp final : public NetworkedMdp {
 public:
  explicit FiniteTestMdp(FiniteMdpTables tables);

  std::size_t state_count() const override { return static_cast<std::size_t>(t_.low.rows()); }
  std::size_t agent_count() const override { return static_cast<std::size_t>(t_.level.rows()); }
  std::size_t action_dim(std::size_t) const override { return 1; }

  Vector transition_row(std::size_t s, const JointAction& a) const override;
  Matrix transition_row_grad(std::size_t s, const JointAction& a, std::size_t agent) const override;

  double local_reward(std::size_t agent, std::size_t s, const JointAction& a) const override;
  Vector mean_reward_grad(std::size_t agent, std::size_t s, const JointAction& a) const override;
  double reward_bound() const override;

  const FiniteMdpTables& tables() const { return t_; }

 private:
  double gate(const JointAction& a) const;
  double local_reward_grad(std::size_t agent, std::size_t s, const JointAction& a, std::size_t wrt) const;

  FiniteMdpTables t_;
};

/// Random irreducible instance: table rows are uniform draws smoothed by
/// 0.05 mass on every state, reward parameters are O(1).
FiniteTestMdp make_finite_mdp(std::size_t states, std::size_t agents, std::uint64_t seed);

/// Tables for a finite MDP whose transitions ignore the action entirely and
/// whose agents all earn `rewards(s)`.
FiniteMdpTables constant_tables(const Matrix& transitions, const Vector& rewards, std::size_t agents);

}  // namespace netdac
