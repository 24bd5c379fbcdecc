#include "netdac/features.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "netdac/errors.hpp"

namespace netdac {

Vector FeatureMap::grad_action_dot(const PolicySet& policy, std::size_t s, const JointAction& a,
                                   std::size_t agent, const Vector& weights) const {
  if (static_cast<std::size_t>(weights.size()) != dim()) throw DimensionMismatch("weights length != feature dim");
  return grad_action(policy, s, a, agent) * weights;
}

// ---------------------------------------------------------------------------

Vector TabularFeatures::eval(const PolicySet&, std::size_t s, const JointAction&) const {
  if (s >= states_) throw DimensionMismatch("tabular features: state out of range");
  Vector phi = Vector::Zero(static_cast<Eigen::Index>(states_));
  phi(static_cast<Eigen::Index>(s)) = 1.0;
  return phi;
}

Matrix TabularFeatures::grad_action(const PolicySet&, std::size_t, const JointAction& a, std::size_t agent) const {
  return Matrix::Zero(a.at(agent).size(), static_cast<Eigen::Index>(states_));
}

// ---------------------------------------------------------------------------

FourierFeatures::FourierFeatures(std::size_t states, std::vector<std::size_t> action_dims, std::size_t features,
                                 double scale, std::uint64_t seed)
    : states_(states), action_dims_(std::move(action_dims)) {
  if (features == 0) throw DimensionMismatch("fourier features: K must be positive");
  std::size_t off = states_;
  for (auto n : action_dims_) {
    offsets_.push_back(off);
    off += n;
  }
  Rng rng = make_stream(seed, "fourier-features");
  std::normal_distribution<double> normal(0.0, scale);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
  const auto k = static_cast<Eigen::Index>(features);
  freq_.resize(k, static_cast<Eigen::Index>(off));
  shift_.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < freq_.cols(); ++c) freq_(r, c) = normal(rng);
    shift_(r) = unif(rng);
  }
}

Vector FourierFeatures::phase(std::size_t s, const JointAction& a) const {
  if (s >= states_ || a.size() != action_dims_.size()) throw DimensionMismatch("fourier features: bad input");
  Vector ph = shift_ + freq_.col(static_cast<Eigen::Index>(s));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<std::size_t>(a[i].size()) != action_dims_[i]) throw DimensionMismatch("fourier features: bad action");
    ph += freq_.middleCols(static_cast<Eigen::Index>(offsets_[i]), a[i].size()) * a[i];
  }
  return ph;
}

Vector FourierFeatures::eval(const PolicySet&, std::size_t s, const JointAction& a) const {
  return phase(s, a).array().cos().matrix();
}

Matrix FourierFeatures::grad_action(const PolicySet&, std::size_t s, const JointAction& a, std::size_t agent) const {
  const Vector sn = phase(s, a).array().sin().matrix();
  const auto block = freq_.middleCols(static_cast<Eigen::Index>(offsets_.at(agent)),
                                      static_cast<Eigen::Index>(action_dims_[agent]));
  // ∂φₖ/∂aⁱ_r = −sin(phaseₖ) · wₖ,r
  return -(sn.asDiagonal() * block).transpose();
}

// ---------------------------------------------------------------------------

CompatibleFeatures::CompatibleFeatures(const PolicySet& shape, bool centered, bool bias)
    : params_(shape.total_param_dim()), centered_(centered), bias_(bias) {}

void CompatibleFeatures::check(const PolicySet& policy) const {
  if (policy.total_param_dim() != params_) {
    throw DimensionMismatch("compatible features built for " + std::to_string(params_) +
                            " policy parameters, got " + std::to_string(policy.total_param_dim()));
  }
}

Vector CompatibleFeatures::eval(const PolicySet& policy, std::size_t s, const JointAction& a) const {
  check(policy);
  if (a.size() != policy.agent_count()) throw DimensionMismatch("compatible features: agent count mismatch");
  Vector phi(static_cast<Eigen::Index>(dim()));
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (static_cast<std::size_t>(a[i].size()) != policy.action_dim(i)) {
      throw DimensionMismatch("compatible features: action dimension mismatch");
    }
    const Vector dir = centered_ ? Vector(a[i] - policy.action(i, s)) : a[i];
    const Vector block = policy.jacobian_times(i, s, dir);
    phi.segment(off, block.size()) = block;
    off += block.size();
  }
  if (bias_) phi(off) = 1.0;
  return phi;
}

Matrix CompatibleFeatures::grad_action(const PolicySet& policy, std::size_t s, const JointAction& a,
                                       std::size_t agent) const {
  check(policy);
  const auto n = static_cast<Eigen::Index>(policy.action_dim(agent));
  if (a.at(agent).size() != n) throw DimensionMismatch("compatible features: action dimension mismatch");
  Matrix g = Matrix::Zero(n, static_cast<Eigen::Index>(dim()));
  const auto off = static_cast<Eigen::Index>(policy.param_offset(agent));
  const Matrix jac = policy.jacobian(agent, s);
  g.middleCols(off, jac.rows()) = jac.transpose();
  return g;
}

Vector CompatibleFeatures::grad_action_dot(const PolicySet& policy, std::size_t s, const JointAction& a,
                                           std::size_t agent, const Vector& weights) const {
  check(policy);
  if (static_cast<std::size_t>(weights.size()) != dim()) throw DimensionMismatch("weights length != feature dim");
  if (static_cast<std::size_t>(a.at(agent).size()) != policy.action_dim(agent)) {
    throw DimensionMismatch("compatible features: action dimension mismatch");
  }
  const auto off = static_cast<Eigen::Index>(policy.param_offset(agent));
  const auto m = static_cast<Eigen::Index>(policy.param_dim(agent));
  return policy.jacobian_transpose_times(agent, s, weights.segment(off, m));
}

// ---------------------------------------------------------------------------

LinearModel::LinearModel(std::shared_ptr<const FeatureMap> f, Vector w) : features(std::move(f)), weights(std::move(w)) {
  if (!features) throw std::invalid_argument("linear model needs a feature map");
  if (static_cast<std::size_t>(weights.size()) != features->dim()) {
    throw DimensionMismatch("linear model: weights length != feature dim");
  }
}

LinearModel::LinearModel(std::shared_ptr<const FeatureMap> f)
    : LinearModel(f, Vector::Zero(static_cast<Eigen::Index>(f ? f->dim() : 0))) {}

double q_value(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a) {
  const Vector phi = model.features->eval(policy, s, a);
  if (phi.size() != model.weights.size()) throw DimensionMismatch("q_value: weights length != feature dim");
  return phi.dot(model.weights);
}

Vector q_grad_action(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a,
                     std::size_t agent) {
  return model.features->grad_action_dot(policy, s, a, agent, model.weights);
}

double r_value(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a) {
  return q_value(model, policy, s, a);
}

Vector r_grad_action(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a,
                     std::size_t agent) {
  return q_grad_action(model, policy, s, a, agent);
}

Matrix feature_matrix(const FeatureMap& features, const PolicySet& policy) {
  const auto states = policy.state_count();
  Matrix phi(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(features.dim()));
  for (std::size_t s = 0; s < states; ++s) phi.row(static_cast<Eigen::Index>(s)) = features.eval(policy, s, policy.act(s)).transpose();
  return phi;
}

}  // namespace netdac
