#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "netdac/env.hpp"
#include "netdac/linalg.hpp"
#include "netdac/policy.hpp"

namespace netdac {

/// Feature map φ(s, a) ∈ R^K. Compatible features depend on the current
/// policy, so every call receives it; policy-free maps ignore it.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;

  virtual std::size_t dim() const = 0;
  virtual Vector eval(const PolicySet& policy, std::size_t s, const JointAction& a) const = 0;

  /// ∂φ/∂aⁱ as an nᵢ × K matrix.
  virtual Matrix grad_action(const PolicySet& policy, std::size_t s, const JointAction& a,
                             std::size_t agent) const = 0;

  /// grad_action(…) · weights. Overridden where the product has a cheap form.
  virtual Vector grad_action_dot(const PolicySet& policy, std::size_t s, const JointAction& a,
                                 std::size_t agent, const Vector& weights) const;
};

/// One-hot state indicator, K = |S|; independent of the action.
class TabularFeatures final : public FeatureMap {
 public:
  explicit TabularFeatures(std::size_t states) : states_(states) {}
  std::size_t dim() const override { return states_; }
  Vector eval(const PolicySet& policy, std::size_t s, const JointAction& a) const override;
  Matrix grad_action(const PolicySet& policy, std::size_t s, const JointAction& a,
                     std::size_t agent) const override;

 private:
  std::size_t states_;
};

/// Random Fourier features φₖ = cos(wₖ·[onehot(s); a] + bₖ) with
/// wₖ ~ N(0, scale²) and bₖ ~ U[0, 2π). Bounded along with their action
/// gradients (|∂φₖ/∂a| ≤ ‖wₖ‖).
class FourierFeatures final : public FeatureMap {
 public:
  FourierFeatures(std::size_t states, std::vector<std::size_t> action_dims, std::size_t features, double scale,
                  std::uint64_t seed);

  std::size_t dim() const override { return static_cast<std::size_t>(freq_.rows()); }
  Vector eval(const PolicySet& policy, std::size_t s, const JointAction& a) const override;
  Matrix grad_action(const PolicySet& policy, std::size_t s, const JointAction& a,
                     std::size_t agent) const override;

 private:
  Vector phase(std::size_t s, const JointAction& a) const;

  std::size_t states_;
  std::vector<std::size_t> action_dims_;
  std::vector<std::size_t> offsets_;
  Matrix freq_;   // K × (|S| + Σnᵢ)
  Vector shift_;  // K
};

/// Compatible features built from ∇_θ μ_θ(s), agent-major blocks:
///   block i = ∇_θⁱ μⁱ(s) · (aⁱ − c·μⁱ(s)),
/// c = 0 for the action-value form and c = 1 for the centred form. An
/// optional trailing constant feature models the state value / mean reward.
class CompatibleFeatures : public FeatureMap {
 public:
  CompatibleFeatures(const PolicySet& shape, bool centered, bool bias);

  std::size_t dim() const override { return params_ + (bias_ ? 1 : 0); }
  bool centered() const { return centered_; }
  bool bias() const { return bias_; }

  Vector eval(const PolicySet& policy, std::size_t s, const JointAction& a) const override;
  Matrix grad_action(const PolicySet& policy, std::size_t s, const JointAction& a,
                     std::size_t agent) const override;
  Vector grad_action_dot(const PolicySet& policy, std::size_t s, const JointAction& a, std::size_t agent,
                         const Vector& weights) const override;

 private:
  void check(const PolicySet& policy) const;

  std::size_t params_;
  bool centered_;
  bool bias_;
};

/// φ(s,a) = a · ∇_θ μ_θ(s)ᵀ (optionally centred at μ_θ(s), as in the
/// bandit experiment's "a − θ" features).
class CompatibleQFeatures final : public CompatibleFeatures {
 public:
  explicit CompatibleQFeatures(const PolicySet& shape, bool bias = false, bool centered = false)
      : CompatibleFeatures(shape, centered, bias) {}
};

/// w_θ(s,a) = (a − μ_θ(s)) · ∇_θ μ_θ(s)ᵀ.
class CompatibleRFeatures final : public CompatibleFeatures {
 public:
  explicit CompatibleRFeatures(const PolicySet& shape, bool bias = false)
      : CompatibleFeatures(shape, true, bias) {}
};

/// Linear model f(s,a) = φ(s,a)·weights. Serves as Q̂_ω and as R̄̂_λ.
struct LinearModel {
  std::shared_ptr<const FeatureMap> features;
  Vector weights;

  LinearModel(std::shared_ptr<const FeatureMap> f, Vector w);
  explicit LinearModel(std::shared_ptr<const FeatureMap> f);
};

double q_value(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a);
Vector q_grad_action(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a,
                     std::size_t agent);
double r_value(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a);
Vector r_grad_action(const LinearModel& model, const PolicySet& policy, std::size_t s, const JointAction& a,
                     std::size_t agent);

/// Φ_θ with rows φ(s, μ_θ(s))ᵀ, |S| × K.
Matrix feature_matrix(const FeatureMap& features, const PolicySet& policy);

}  // namespace netdac
