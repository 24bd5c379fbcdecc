#include "netdac/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "netdac/errors.hpp"

namespace netdac::oracle {

namespace {

/// Relative value function of a chain: (I − P + 1dᵀ) V = r − J·1.
Vector solve_poisson(const Matrix& p, const Vector& d, const Vector& r, double j) {
  const auto n = p.rows();
  Matrix system = Matrix::Identity(n, n) - p + Vector::Ones(n) * d.transpose();
  return linalg::solve_linear(system, r - Vector::Constant(n, j));
}

}  // namespace

ExactEvaluation exact_eval(const NetworkedMdp& mdp, const PolicySet& policy) {
  const auto states = mdp.state_count();
  const auto n = static_cast<Eigen::Index>(states);
  ExactEvaluation out;
  out.p_theta.resize(n, n);
  out.rewards.resize(n);
  for (std::size_t s = 0; s < states; ++s) {
    const JointAction a = policy.act(s);
    out.p_theta.row(static_cast<Eigen::Index>(s)) = mdp.transition_row(s, a).transpose();
    out.rewards(static_cast<Eigen::Index>(s)) = mdp.mean_reward(s, a);
  }
  out.d_theta = linalg::stationary_distribution(out.p_theta);
  out.j = out.d_theta.dot(out.rewards);
  out.values = solve_poisson(out.p_theta, out.d_theta, out.rewards, out.j);
  return out;
}

double poisson_residual(const ExactEvaluation& eval) {
  const auto n = eval.values.size();
  return (eval.rewards - Vector::Constant(n, eval.j) + eval.p_theta * eval.values - eval.values).cwiseAbs().maxCoeff();
}

double action_value(const NetworkedMdp& mdp, const ExactEvaluation& eval, std::size_t s, const JointAction& a) {
  return mdp.mean_reward(s, a) - eval.j + mdp.transition_row(s, a).dot(eval.values);
}

Vector exact_policy_gradient(const NetworkedMdp& mdp, const PolicySet& policy) {
  const ExactEvaluation eval = exact_eval(mdp, policy);
  Vector grad = Vector::Zero(static_cast<Eigen::Index>(policy.total_param_dim()));
  for (std::size_t i = 0; i < policy.agent_count(); ++i) {
    const auto off = static_cast<Eigen::Index>(policy.param_offset(i));
    const auto m = static_cast<Eigen::Index>(policy.param_dim(i));
    for (std::size_t s = 0; s < mdp.state_count(); ++s) {
      const JointAction a = policy.act(s);
      const Vector dq = mdp.mean_reward_grad(i, s, a) + mdp.transition_row_grad(s, a, i) * eval.values;
      grad.segment(off, m) += eval.d_theta(static_cast<Eigen::Index>(s)) * policy.jacobian_times(i, s, dq);
    }
  }
  return grad;
}

namespace {

struct ProjectedSystem {
  ExactEvaluation eval;
  Matrix phi;
  Matrix lhs;  // Φᵀ D (I − P) Φ
  Vector rhs;  // Φᵀ D (R̄ − J·1)
};

ProjectedSystem build_projected_system(const NetworkedMdp& mdp, const PolicySet& policy, const FeatureMap& features) {
  ProjectedSystem sys{exact_eval(mdp, policy), feature_matrix(features, policy), {}, {}};
  const auto n = sys.phi.rows();
  const Matrix weighted = sys.phi.transpose() * sys.eval.d_theta.asDiagonal();
  sys.lhs = weighted * (Matrix::Identity(n, n) - sys.eval.p_theta) * sys.phi;
  sys.rhs = weighted * (sys.eval.rewards - Vector::Constant(n, sys.eval.j));
  return sys;
}

double mspbe_of(const ProjectedSystem& sys, const Vector& omega) {
  const auto n = sys.phi.rows();
  const Vector v = sys.phi * omega;
  const Vector tv = sys.eval.rewards - Vector::Constant(n, sys.eval.j) + sys.eval.p_theta * v;
  const Matrix& phi = sys.phi;
  const auto& d = sys.eval.d_theta;
  const Matrix gram = phi.transpose() * d.asDiagonal() * phi;
  const Vector coef = linalg::solve_linear(gram, phi.transpose() * d.asDiagonal() * tv);
  const Vector diff = v - phi * coef;
  return diff.dot(d.asDiagonal() * diff);
}

}  // namespace

double mspbe(const NetworkedMdp& mdp, const PolicySet& policy, const FeatureMap& features, const Vector& omega) {
  const auto sys = build_projected_system(mdp, policy, features);
  if (omega.size() != sys.phi.cols()) throw DimensionMismatch("mspbe: omega length != feature dim");
  return mspbe_of(sys, omega);
}

CriticFixedPoint mspbe_fixed_point(const NetworkedMdp& mdp, const PolicySet& policy, const FeatureMap& features,
                                   const MspbeOptions& options) {
  const auto sys = build_projected_system(mdp, policy, features);
  const auto k = sys.phi.cols();
  if (linalg::numerical_rank(sys.phi, options.rank_tolerance) < static_cast<std::size_t>(k)) {
    throw RankDeficientFeatures("feature matrix has numerical rank below K");
  }
  const Vector ones = Vector::Ones(sys.phi.rows());
  const Vector u = sys.phi.colPivHouseholderQr().solve(ones);
  const bool constant_in_span = (sys.phi * u - ones).cwiseAbs().maxCoeff() < 1e-8;

  CriticFixedPoint out;
  if (constant_in_span) {
    if (!options.pin_constant_direction) {
      throw RankDeficientFeatures("constant vector lies in the span of the features (Φu = 1 is solvable)");
    }
    // Stack the rank-(K−1) projected equations with dᵀΦω = 0; normal equations.
    const Vector pin = sys.phi.transpose() * sys.eval.d_theta;
    const Matrix normal = sys.lhs.transpose() * sys.lhs + pin * pin.transpose();
    out.omega = linalg::solve_linear(normal, sys.lhs.transpose() * sys.rhs);
  } else {
    out.omega = linalg::solve_linear(sys.lhs, sys.rhs);
  }
  out.residual = (sys.rhs - sys.lhs * out.omega).cwiseAbs().maxCoeff();
  out.mspbe = mspbe_of(sys, out.omega);
  return out;
}

OffPolicyFixedPoint offpolicy_fixed_point(const NetworkedMdp& mdp, const PolicySet& policy,
                                          const FeatureMap& features, const PolicySet& behavior_center, double sigma,
                                          const QuadratureConfig& quadrature) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("behaviour policy sigma must be non-negative");
  const auto states = mdp.state_count();
  const auto n = static_cast<Eigen::Index>(states);
  const auto k = static_cast<Eigen::Index>(features.dim());
  const auto dims = mdp.action_dims();

  OffPolicyFixedPoint out;
  out.a_pi = Matrix::Zero(k, n);
  Matrix p_pi = Matrix::Zero(n, n);
  std::vector<Matrix> second_moment(states, Matrix::Zero(k, k));
  for (std::size_t s = 0; s < states; ++s) {
    const auto col = static_cast<Eigen::Index>(s);
    gaussian_expectation(flatten(behavior_center.act(s)), sigma, quadrature, [&](const Vector& x, double w) {
      const JointAction a = unflatten(x, dims);
      const Vector feat = features.eval(policy, s, a);
      out.a_pi.col(col) += w * mdp.mean_reward(s, a) * feat;
      second_moment[s].noalias() += w * feat * feat.transpose();
      p_pi.row(col) += w * mdp.transition_row(s, a).transpose();
    });
  }
  out.d_pi = linalg::stationary_distribution(p_pi);
  out.b_pi = Matrix::Zero(k, k);
  for (std::size_t s = 0; s < states; ++s) out.b_pi += out.d_pi(static_cast<Eigen::Index>(s)) * second_moment[s];
  out.b_pi = 0.5 * (out.b_pi + out.b_pi.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.b_pi, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 1e-10) {
    throw NearSingularB("B has smallest eigenvalue below 1e-10");
  }
  out.lambda = linalg::solve_linear(out.b_pi, out.a_pi * out.d_pi);
  return out;
}

SmoothedEvaluation smoothed_eval(const NetworkedMdp& mdp, const PolicySet& policy, double sigma,
                                 const QuadratureConfig& quadrature) {
  const auto states = mdp.state_count();
  const auto n = static_cast<Eigen::Index>(states);
  const auto dims = mdp.action_dims();
  SmoothedEvaluation out;
  out.p_pi = Matrix::Zero(n, n);
  out.rewards = Vector::Zero(n);
  for (std::size_t s = 0; s < states; ++s) {
    const auto row = static_cast<Eigen::Index>(s);
    gaussian_expectation(flatten(policy.act(s)), sigma, quadrature, [&](const Vector& x, double w) {
      const JointAction a = unflatten(x, dims);
      out.p_pi.row(row) += w * mdp.transition_row(s, a).transpose();
      out.rewards(row) += w * mdp.mean_reward(s, a);
    });
  }
  out.d_pi = linalg::stationary_distribution(out.p_pi);
  out.j = out.d_pi.dot(out.rewards);
  out.values = solve_poisson(out.p_pi, out.d_pi, out.rewards, out.j);
  return out;
}

GradientEstimate stochastic_pg_estimate(const NetworkedMdp& mdp, const PolicySet& policy, double sigma,
                                        std::size_t samples, Rng& rng, const QuadratureConfig& quadrature) {
  if (!(sigma > 0.0)) throw std::invalid_argument("stochastic_pg_estimate needs sigma > 0");
  if (samples < 2) throw std::invalid_argument("stochastic_pg_estimate needs at least two samples");
  const SmoothedEvaluation eval = smoothed_eval(mdp, policy, sigma, quadrature);
  const auto m = static_cast<Eigen::Index>(policy.total_param_dim());
  std::discrete_distribution<std::size_t> state_dist(eval.d_pi.data(), eval.d_pi.data() + eval.d_pi.size());
  std::normal_distribution<double> normal;

  Vector sum = Vector::Zero(m);
  Vector sum_sq = Vector::Zero(m);
  Vector g(m);
  for (std::size_t k = 0; k < samples; ++k) {
    const std::size_t s = state_dist(rng);
    JointAction a = policy.act(s);
    JointAction eps = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (Eigen::Index r = 0; r < a[i].size(); ++r) {
        eps[i](r) = normal(rng);
        a[i](r) += sigma * eps[i](r);
      }
    }
    const double advantage = mdp.mean_reward(s, a) - eval.j + mdp.transition_row(s, a).dot(eval.values) -
                             eval.values(static_cast<Eigen::Index>(s));
    for (std::size_t i = 0; i < a.size(); ++i) {
      // ∇_θⁱ log N(a | μ(s), σ²I) = ∇_θⁱμⁱ(s) (aⁱ − μⁱ(s)) / σ²
      const Vector score = policy.jacobian_times(i, s, eps[i] / sigma);
      g.segment(static_cast<Eigen::Index>(policy.param_offset(i)), score.size()) = advantage * score;
    }
    sum += g;
    sum_sq += g.cwiseProduct(g);
  }
  const double count = static_cast<double>(samples);
  GradientEstimate out;
  out.samples = samples;
  out.mean = sum / count;
  const Vector var = ((sum_sq / count) - out.mean.cwiseProduct(out.mean)) * (count / (count - 1.0));
  out.std_error = (var.cwiseMax(0.0) / count).cwiseSqrt();
  return out;
}

}  // namespace netdac::oracle
