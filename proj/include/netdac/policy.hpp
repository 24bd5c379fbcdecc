#pragma once

#include <cstddef>
#include <vector>

#include "netdac/env.hpp"
#include "netdac/linalg.hpp"

namespace netdac {

enum class PolicyForm {
  /// μⁱ(s) = θⁱ, independent of the state.
  Constant,
  /// μⁱ(s) = Θⁱ·onehot(s) + bⁱ with θⁱ = [vec_rowmajor(Θⁱ); bⁱ].
  Affine,
};

/// Per-agent deterministic policies μⁱ_θⁱ with box projection bounds.
/// Parameters are packed agent-major: θ = [θ¹; …; θᴺ].
class PolicySet {
 public:
  PolicySet(PolicyForm form, std::size_t states, std::vector<std::size_t> action_dims,
            double lo = -1e3, double hi = 1e3);

  PolicyForm form() const { return form_; }
  std::size_t agent_count() const { return action_dims_.size(); }
  std::size_t state_count() const { return states_; }
  std::size_t action_dim(std::size_t agent) const { return action_dims_[agent]; }
  const std::vector<std::size_t>& action_dims() const { return action_dims_; }

  std::size_t param_dim(std::size_t agent) const;
  std::size_t total_param_dim() const;
  /// Offset of agent i's block inside the packed θ.
  std::size_t param_offset(std::size_t agent) const;

  const Vector& theta(std::size_t agent) const { return theta_[agent]; }
  void set_theta(std::size_t agent, const Vector& value);
  Vector packed() const;
  void unpack(const Vector& packed);

  const Vector& lower(std::size_t agent) const { return lo_[agent]; }
  const Vector& upper(std::size_t agent) const { return hi_[agent]; }
  void set_bounds(std::size_t agent, const Vector& lo, const Vector& hi);

  Vector action(std::size_t agent, std::size_t s) const;
  JointAction act(std::size_t s) const;

  /// ∇_θⁱ μⁱ(s) as an mᵢ × nᵢ matrix, so that jacobian · ∇_aⁱ f is the
  /// chain-rule gradient with respect to θⁱ.
  Matrix jacobian(std::size_t agent, std::size_t s) const;
  /// jacobian(i, s) · v without forming the matrix (v has length nᵢ).
  Vector jacobian_times(std::size_t agent, std::size_t s, const Vector& v) const;
  /// jacobian(i, s)ᵀ · g without forming the matrix (g has length mᵢ).
  Vector jacobian_transpose_times(std::size_t agent, std::size_t s, const Vector& g) const;

  /// θⁱ ← Γⁱ[θⁱ + step] with Γⁱ the box projection.
  void apply_step(std::size_t agent, const Vector& step);

 private:
  PolicyForm form_;
  std::size_t states_;
  std::vector<std::size_t> action_dims_;
  std::vector<Vector> theta_;
  std::vector<Vector> lo_;
  std::vector<Vector> hi_;
};

/// Constant policies μⁱ = θⁱ for a bandit with `agents` agents of dimension `dim`.
PolicySet constant_policy(std::size_t agents, std::size_t dim, double lo = -1e3, double hi = 1e3);

}  // namespace netdac
