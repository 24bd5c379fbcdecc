#include "netdac/policy.hpp"

#include <string>

#include "netdac/errors.hpp"

namespace netdac {

PolicySet::PolicySet(PolicyForm form, std::size_t states, std::vector<std::size_t> action_dims, double lo,
                     double hi)
    : form_(form), states_(states), action_dims_(std::move(action_dims)) {
  if (states_ == 0 || action_dims_.empty()) throw DimensionMismatch("policy set needs states and agents");
  if (lo > hi) throw std::invalid_argument("policy bounds: lo > hi");
  for (std::size_t i = 0; i < action_dims_.size(); ++i) {
    const auto m = static_cast<Eigen::Index>(param_dim(i));
    theta_.push_back(Vector::Zero(m));
    lo_.push_back(Vector::Constant(m, lo));
    hi_.push_back(Vector::Constant(m, hi));
  }
}

std::size_t PolicySet::param_dim(std::size_t agent) const {
  const auto n = action_dims_.at(agent);
  return form_ == PolicyForm::Constant ? n : n * (states_ + 1);
}

std::size_t PolicySet::total_param_dim() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < agent_count(); ++i) total += param_dim(i);
  return total;
}

std::size_t PolicySet::param_offset(std::size_t agent) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < agent; ++i) off += param_dim(i);
  return off;
}

void PolicySet::set_theta(std::size_t agent, const Vector& value) {
  if (value.size() != theta_.at(agent).size()) {
    throw DimensionMismatch("set_theta: agent " + std::to_string(agent) + " expects " +
                            std::to_string(theta_[agent].size()) + " parameters");
  }
  theta_[agent] = value;
}

Vector PolicySet::packed() const {
  Vector out(static_cast<Eigen::Index>(total_param_dim()));
  Eigen::Index off = 0;
  for (const auto& t : theta_) {
    out.segment(off, t.size()) = t;
    off += t.size();
  }
  return out;
}

void PolicySet::unpack(const Vector& packed) {
  if (static_cast<std::size_t>(packed.size()) != total_param_dim()) {
    throw DimensionMismatch("unpack: packed parameter length mismatch");
  }
  Eigen::Index off = 0;
  for (auto& t : theta_) {
    t = packed.segment(off, t.size());
    off += t.size();
  }
}

void PolicySet::set_bounds(std::size_t agent, const Vector& lo, const Vector& hi) {
  if (lo.size() != theta_.at(agent).size() || hi.size() != lo.size()) {
    throw DimensionMismatch("set_bounds: length mismatch");
  }
  if ((lo.array() > hi.array()).any()) throw std::invalid_argument("set_bounds: lo > hi");
  lo_[agent] = lo;
  hi_[agent] = hi;
}

Vector PolicySet::action(std::size_t agent, std::size_t s) const {
  const Vector& t = theta_.at(agent);
  if (form_ == PolicyForm::Constant) return t;
  const auto n = static_cast<Eigen::Index>(action_dims_[agent]);
  const auto S = static_cast<Eigen::Index>(states_);
  Vector a(n);
  for (Eigen::Index r = 0; r < n; ++r) a(r) = t(r * S + static_cast<Eigen::Index>(s)) + t(n * S + r);
  return a;
}

JointAction PolicySet::act(std::size_t s) const {
  JointAction a;
  a.reserve(agent_count());
  for (std::size_t i = 0; i < agent_count(); ++i) a.push_back(action(i, s));
  return a;
}

Matrix PolicySet::jacobian(std::size_t agent, std::size_t s) const {
  const auto n = static_cast<Eigen::Index>(action_dims_.at(agent));
  if (form_ == PolicyForm::Constant) return Matrix::Identity(n, n);
  const auto S = static_cast<Eigen::Index>(states_);
  Matrix jac = Matrix::Zero(n * (S + 1), n);
  for (Eigen::Index r = 0; r < n; ++r) {
    jac(r * S + static_cast<Eigen::Index>(s), r) = 1.0;
    jac(n * S + r, r) = 1.0;
  }
  return jac;
}

Vector PolicySet::jacobian_times(std::size_t agent, std::size_t s, const Vector& v) const {
  if (static_cast<std::size_t>(v.size()) != action_dims_.at(agent)) {
    throw DimensionMismatch("jacobian_times: vector length must equal the action dimension");
  }
  if (form_ == PolicyForm::Constant) return v;
  const auto n = v.size();
  const auto S = static_cast<Eigen::Index>(states_);
  Vector out = Vector::Zero(n * (S + 1));
  for (Eigen::Index r = 0; r < n; ++r) {
    out(r * S + static_cast<Eigen::Index>(s)) = v(r);
    out(n * S + r) = v(r);
  }
  return out;
}

Vector PolicySet::jacobian_transpose_times(std::size_t agent, std::size_t s, const Vector& g) const {
  if (static_cast<std::size_t>(g.size()) != param_dim(agent)) {
    throw DimensionMismatch("jacobian_transpose_times: vector length must equal the parameter dimension");
  }
  if (form_ == PolicyForm::Constant) return g;
  const auto n = static_cast<Eigen::Index>(action_dims_[agent]);
  const auto S = static_cast<Eigen::Index>(states_);
  Vector out(n);
  for (Eigen::Index r = 0; r < n; ++r) out(r) = g(r * S + static_cast<Eigen::Index>(s)) + g(n * S + r);
  return out;
}

void PolicySet::apply_step(std::size_t agent, const Vector& step) {
  theta_.at(agent) = linalg::project_box(theta_[agent] + step, lo_[agent], hi_[agent]);
}

PolicySet constant_policy(std::size_t agents, std::size_t dim, double lo, double hi) {
  return PolicySet(PolicyForm::Constant, 1, std::vector<std::size_t>(agents, dim), lo, hi);
}

}  // namespace netdac
