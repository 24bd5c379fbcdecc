#include "netdac/env.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "netdac/errors.hpp"

namespace netdac {

Vector flatten(const JointAction& a) {
  Eigen::Index total = 0;
  for (const auto& ai : a) total += ai.size();
  Vector out(total);
  Eigen::Index off = 0;
  for (const auto& ai : a) {
    out.segment(off, ai.size()) = ai;
    off += ai.size();
  }
  return out;
}

JointAction unflatten(const Vector& flat, const std::vector<std::size_t>& dims) {
  const auto total = std::accumulate(dims.begin(), dims.end(), std::size_t{0});
  if (static_cast<std::size_t>(flat.size()) != total) throw DimensionMismatch("unflatten: length mismatch");
  JointAction a;
  a.reserve(dims.size());
  Eigen::Index off = 0;
  for (auto d : dims) {
    a.push_back(flat.segment(off, static_cast<Eigen::Index>(d)));
    off += static_cast<Eigen::Index>(d);
  }
  return a;
}

std::vector<std::size_t> NetworkedMdp::action_dims() const {
  std::vector<std::size_t> dims(agent_count());
  for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = action_dim(i);
  return dims;
}

std::size_t NetworkedMdp::joint_action_dim() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < agent_count(); ++i) total += action_dim(i);
  return total;
}

void NetworkedMdp::check_action(const JointAction& a) const {
  if (a.size() != agent_count()) {
    throw DimensionMismatch("joint action has " + std::to_string(a.size()) + " agents, expected " +
                            std::to_string(agent_count()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<std::size_t>(a[i].size()) != action_dim(i)) {
      throw DimensionMismatch("action of agent " + std::to_string(i) + " has wrong dimension");
    }
  }
}

double NetworkedMdp::transition_prob(std::size_t s, const JointAction& a, std::size_t next) const {
  return transition_row(s, a)(static_cast<Eigen::Index>(next));
}

Matrix NetworkedMdp::transition_row_grad(std::size_t s, const JointAction& a, std::size_t agent) const {
  constexpr double h = 1e-5;
  const auto n = static_cast<Eigen::Index>(action_dim(agent));
  Matrix grad(n, static_cast<Eigen::Index>(state_count()));
  JointAction probe = a;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double orig = probe[agent](k);
    probe[agent](k) = orig + h;
    const Vector up = transition_row(s, probe);
    probe[agent](k) = orig - h;
    const Vector down = transition_row(s, probe);
    probe[agent](k) = orig;
    grad.row(k) = ((up - down) / (2 * h)).transpose();
  }
  return grad;
}

std::size_t NetworkedMdp::sample_transition(std::size_t s, const JointAction& a, Rng& rng) const {
  const Vector row = transition_row(s, a);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < row.size(); ++k) {
    acc += row(k);
    if (u < acc) return static_cast<std::size_t>(k);
  }
  // Round-off: fall back to the last state carrying mass.
  for (Eigen::Index k = row.size() - 1; k >= 0; --k) {
    if (row(k) > 0.0) return static_cast<std::size_t>(k);
  }
  return 0;
}

std::vector<double> NetworkedMdp::local_rewards(std::size_t s, const JointAction& a) const {
  std::vector<double> out(agent_count());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = local_reward(i, s, a);
  return out;
}

double NetworkedMdp::mean_reward(std::size_t s, const JointAction& a) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < agent_count(); ++i) acc += local_reward(i, s, a);
  return acc / static_cast<double>(agent_count());
}

// ---------------------------------------------------------------------------
// ContinuousBandit

ContinuousBandit::ContinuousBandit(std::size_t agents, Matrix cost, Vector target)
    : agents_(agents), cost_(std::move(cost)), target_(std::move(target)) {
  if (agents_ == 0 || target_.size() == 0) throw DimensionMismatch("bandit needs at least one agent and dimension");
  if (cost_.rows() != target_.size() || cost_.cols() != target_.size()) {
    throw DimensionMismatch("bandit cost matrix must be m x m");
  }
}

namespace {

Vector action_sum_offset(const ContinuousBandit& env, const JointAction& a) {
  env.check_action(a);
  Vector sum = -env.target();
  for (const auto& ai : a) sum += ai;
  return sum;
}

}  // namespace

double bandit_reward(const ContinuousBandit& env, const JointAction& a) {
  const Vector g = action_sum_offset(env, a);
  return -g.dot(env.cost() * g);
}

Vector bandit_reward_grad(const ContinuousBandit& env, const JointAction& a, std::size_t agent) {
  if (agent >= env.agent_count()) throw DimensionMismatch("bandit_reward_grad: agent index out of range");
  return -2.0 * env.cost() * action_sum_offset(env, a);
}

Vector ContinuousBandit::transition_row(std::size_t, const JointAction&) const { return Vector::Ones(1); }

Matrix ContinuousBandit::transition_row_grad(std::size_t, const JointAction&, std::size_t agent) const {
  return Matrix::Zero(static_cast<Eigen::Index>(action_dim(agent)), 1);
}

std::size_t ContinuousBandit::sample_transition(std::size_t, const JointAction&, Rng&) const { return 0; }

double ContinuousBandit::local_reward(std::size_t, std::size_t, const JointAction& a) const {
  return bandit_reward(*this, a);
}

// Every agent observes the shared team reward.
std::vector<double> ContinuousBandit::local_rewards(std::size_t, const JointAction& a) const {
  return std::vector<double>(agents_, bandit_reward(*this, a));
}

double ContinuousBandit::mean_reward(std::size_t, const JointAction& a) const { return bandit_reward(*this, a); }

Vector ContinuousBandit::mean_reward_grad(std::size_t agent, std::size_t, const JointAction& a) const {
  return bandit_reward_grad(*this, a, agent);
}

// The quadratic cost is only bounded on compact action sets.
double ContinuousBandit::reward_bound() const { return std::numeric_limits<double>::infinity(); }

ContinuousBandit make_bandit(std::size_t agents, std::size_t dim, std::uint64_t seed) {
  Rng rng = make_stream(seed, "bandit");
  std::normal_distribution<double> normal;
  const auto m = static_cast<Eigen::Index>(dim);
  Matrix g(m, m);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c) g(r, c) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  std::bernoulli_distribution coin(0.5);
  Vector eig(m);
  for (Eigen::Index k = 0; k < m; ++k) eig(k) = coin(rng) ? 1.0 : 0.1;
  Matrix cost = q.transpose() * eig.asDiagonal() * q;
  cost = 0.5 * (cost + cost.transpose()).eval();
  return ContinuousBandit(agents, std::move(cost), Vector::Constant(m, 4.0));
}

// ---------------------------------------------------------------------------
// FiniteTestMdp

FiniteTestMdp::FiniteTestMdp(FiniteMdpTables tables) : t_(std::move(tables)) {
  const auto s = t_.low.rows();
  const auto n = t_.level.rows();
  if (s < 1 || t_.low.cols() != s || t_.high.rows() != s || t_.high.cols() != s) {
    throw DimensionMismatch("finite MDP transition tables must be S x S");
  }
  if (n < 1 || t_.level.cols() != s || t_.bump.rows() != n || t_.bump.cols() != s ||
      t_.slope.rows() != n || t_.slope.cols() != s || static_cast<Eigen::Index>(t_.center.size()) != n) {
    throw DimensionMismatch("finite MDP reward tables must be N x S");
  }
  for (const auto& c : t_.center) {
    if (c.rows() != s || c.cols() != n) throw DimensionMismatch("reward centers must be S x N");
  }
  for (const Matrix* table : {&t_.low, &t_.high}) {
    if ((table->array() < 0.0).any() ||
        ((table->rowwise().sum().array() - 1.0).abs() > 1e-10).any()) {
      throw std::invalid_argument("finite MDP transition tables must be row-stochastic");
    }
  }
}

double FiniteTestMdp::gate(const JointAction& a) const {
  double u = 0.0;
  for (const auto& ai : a) u += ai(0);
  return 1.0 / (1.0 + std::exp(-(t_.gain * u + t_.offset)));
}

Vector FiniteTestMdp::transition_row(std::size_t s, const JointAction& a) const {
  check_action(a);
  const double g = gate(a);
  const auto row = static_cast<Eigen::Index>(s);
  return ((1.0 - g) * t_.low.row(row) + g * t_.high.row(row)).transpose();
}

Matrix FiniteTestMdp::transition_row_grad(std::size_t s, const JointAction& a, std::size_t) const {
  check_action(a);
  const double g = gate(a);
  const double dg = t_.gain * g * (1.0 - g);
  const auto row = static_cast<Eigen::Index>(s);
  return dg * (t_.high.row(row) - t_.low.row(row));
}

double FiniteTestMdp::local_reward(std::size_t agent, std::size_t s, const JointAction& a) const {
  check_action(a);
  const auto i = static_cast<Eigen::Index>(agent);
  const auto st = static_cast<Eigen::Index>(s);
  double sq = 0.0;
  double u = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j](0) - t_.center[agent](st, static_cast<Eigen::Index>(j));
    sq += diff * diff;
    u += a[j](0);
  }
  return t_.level(i, st) + t_.bump(i, st) * std::exp(-0.5 * sq) + t_.slope(i, st) * std::tanh(u);
}

double FiniteTestMdp::local_reward_grad(std::size_t agent, std::size_t s, const JointAction& a,
                                        std::size_t wrt) const {
  const auto i = static_cast<Eigen::Index>(agent);
  const auto st = static_cast<Eigen::Index>(s);
  double sq = 0.0;
  double u = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j](0) - t_.center[agent](st, static_cast<Eigen::Index>(j));
    sq += diff * diff;
    u += a[j](0);
  }
  const double diff = a[wrt](0) - t_.center[agent](st, static_cast<Eigen::Index>(wrt));
  const double th = std::tanh(u);
  return -t_.bump(i, st) * diff * std::exp(-0.5 * sq) + t_.slope(i, st) * (1.0 - th * th);
}

Vector FiniteTestMdp::mean_reward_grad(std::size_t agent, std::size_t s, const JointAction& a) const {
  check_action(a);
  double acc = 0.0;
  for (std::size_t i = 0; i < agent_count(); ++i) acc += local_reward_grad(i, s, a, agent);
  return Vector::Constant(1, acc / static_cast<double>(agent_count()));
}

double FiniteTestMdp::reward_bound() const {
  return (t_.level.array().abs() + t_.bump.array().abs() + t_.slope.array().abs()).maxCoeff();
}

FiniteTestMdp make_finite_mdp(std::size_t states, std::size_t agents, std::uint64_t seed) {
  Rng rng = make_stream(seed, "finite-mdp");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto s = static_cast<Eigen::Index>(states);
  const auto n = static_cast<Eigen::Index>(agents);
  auto random_table = [&] {
    Matrix t(s, s);
    for (Eigen::Index r = 0; r < s; ++r) {
      for (Eigen::Index c = 0; c < s; ++c) t(r, c) = unif(rng) + 0.05;
      t.row(r) /= t.row(r).sum();
    }
    return t;
  };
  FiniteMdpTables tables;
  tables.low = random_table();
  tables.high = random_table();
  tables.gain = 0.5 + unif(rng);
  tables.offset = unif(rng) - 0.5;
  tables.level.resize(n, s);
  tables.bump.resize(n, s);
  tables.slope.resize(n, s);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index st = 0; st < s; ++st) {
      tables.level(i, st) = 2.0 * unif(rng) - 1.0;
      tables.bump(i, st) = 0.5 + unif(rng);
      tables.slope(i, st) = unif(rng) - 0.5;
    }
    Matrix c(s, n);
    for (Eigen::Index st = 0; st < s; ++st)
      for (Eigen::Index j = 0; j < n; ++j) c(st, j) = 2.0 * unif(rng) - 1.0;
    tables.center.push_back(std::move(c));
  }
  return FiniteTestMdp(std::move(tables));
}

FiniteMdpTables constant_tables(const Matrix& transitions, const Vector& rewards, std::size_t agents) {
  const auto s = transitions.rows();
  const auto n = static_cast<Eigen::Index>(agents);
  FiniteMdpTables t;
  t.low = transitions;
  t.high = transitions;
  t.level = rewards.transpose().replicate(n, 1);
  t.bump = Matrix::Zero(n, s);
  t.slope = Matrix::Zero(n, s);
  t.center.assign(agents, Matrix::Zero(s, n));
  return t;
}

}  // namespace netdac
