#pragma once

#include <cstddef>

#include "netdac/env.hpp"
#include "netdac/features.hpp"
#include "netdac/linalg.hpp"
#include "netdac/policy.hpp"
#include "netdac/quadrature.hpp"
#include "netdac/rng.hpp"

namespace netdac::oracle {

/// Exact average-reward evaluation of a deterministic joint policy.
struct ExactEvaluation {
  Matrix p_theta;   // P_θ(s'|s) = P(s'|s, μ_θ(s))
  Vector rewards;   // R̄(s, μ_θ(s))
  Vector d_theta;   // stationary distribution of P_θ
  double j = 0.0;   // Σ_s d(s) R̄(s, μ_θ(s))
  Vector values;    // V_θ(s) = Q_θ(s, μ_θ(s)), normalised so Σ d(s) V(s) = 0
};

/// Stationary distribution, J and the relative value function from the
/// Poisson equation V = R̄_θ − J·1 + P_θ V.
ExactEvaluation exact_eval(const NetworkedMdp& mdp, const PolicySet& policy);

/// ‖R̄_θ − J·1 + P_θ V − V‖∞
double poisson_residual(const ExactEvaluation& eval);

/// Q_θ(s, a) = R̄(s, a) − J + Σ_s' P(s'|s, a) V_θ(s')
double action_value(const NetworkedMdp& mdp, const ExactEvaluation& eval, std::size_t s, const JointAction& a);

/// ∇_θⁱ J = Σ_s d(s) ∇_θⁱμⁱ(s) [∇_aⁱ R̄(s,a) + Σ_s' ∇_aⁱ P(s'|s,a) V(s')] at a = μ_θ(s),
/// packed agent-major.
Vector exact_policy_gradient(const NetworkedMdp& mdp, const PolicySet& policy);

struct MspbeOptions {
  double rank_tolerance = 1e-8;
  /// When 1 lies in the span of Φ_θ the fixed-point set is a line
  /// {ω : Φω = Φω₀ + c·1}. By default that is rejected; with this flag the
  /// solution with dᵀΦω = 0 is returned instead.
  bool pin_constant_direction = false;
};

struct CriticFixedPoint {
  Vector omega;
  double mspbe = 0.0;
  double residual = 0.0;  // ‖Φᵀ D (T(Φω) − Φω)‖∞
};

/// Solves Φᵀ D (R̄_θ − J·1 + P_θ Φ ω − Φ ω) = 0 for the on-policy critic limit.
/// Throws RankDeficientFeatures if Φ_θ is rank deficient or (unless pinned)
/// Φ_θ u = 1 has a solution.
CriticFixedPoint mspbe_fixed_point(const NetworkedMdp& mdp, const PolicySet& policy, const FeatureMap& features,
                                   const MspbeOptions& options = {});

/// ‖Φω − Π T(Φω)‖²_D with Π the D-weighted projection onto span(Φ).
double mspbe(const NetworkedMdp& mdp, const PolicySet& policy, const FeatureMap& features, const Vector& omega);

struct OffPolicyFixedPoint {
  Vector lambda;
  Matrix a_pi;  // K × |S|
  Matrix b_pi;  // K × K
  Vector d_pi;
};

/// Limit of the off-policy critic: B λ = A d^π, with behaviour policy
/// π(·|s) = N(μ_behavior(s), σ²I). Target policy `policy` feeds the
/// (possibly policy-dependent) reward features. Throws NearSingularB when
/// B's smallest eigenvalue is below 1e-10.
OffPolicyFixedPoint offpolicy_fixed_point(const NetworkedMdp& mdp, const PolicySet& policy,
                                          const FeatureMap& features, const PolicySet& behavior_center, double sigma,
                                          const QuadratureConfig& quadrature = {});

/// Exact evaluation of the Gaussian-smoothed policy π_{θ,σ} = N(μ_θ(s), σ²I).
struct SmoothedEvaluation {
  Matrix p_pi;
  Vector rewards;
  Vector d_pi;
  double j = 0.0;
  Vector values;
};

SmoothedEvaluation smoothed_eval(const NetworkedMdp& mdp, const PolicySet& policy, double sigma,
                                 const QuadratureConfig& quadrature = {});

struct GradientEstimate {
  Vector mean;
  Vector std_error;
  std::size_t samples = 0;
};

/// Score-function estimate of ∇_θ J(π_{θ,σ}): mean over samples of
/// ∇_θ log π_{θ,σ}(a|s) · A_π(s, a), s ~ d^π (exact), a ~ π(·|s), with
/// the advantage A_π taken from the smoothed policy's exact evaluation.
GradientEstimate stochastic_pg_estimate(const NetworkedMdp& mdp, const PolicySet& policy, double sigma,
                                        std::size_t samples, Rng& rng, const QuadratureConfig& quadrature = {});

}  // namespace netdac::oracle
