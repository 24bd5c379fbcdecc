#include "netdac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

#include "netdac/env.hpp"
#include "netdac/features.hpp"
#include "netdac/network.hpp"
#include "netdac/oracle.hpp"
#include "netdac/parallel.hpp"
#include "netdac/policy.hpp"
#include "netdac/rng.hpp"

namespace netdac {

namespace {

CheckResult finish(std::string name, double value, double reference, double tolerance, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.value = value;
  r.reference = reference;
  r.tolerance = tolerance;
  r.passed = std::isfinite(value) && value < tolerance;
  r.detail = std::move(detail);
  return r;
}

PolicySet random_affine_policy(std::size_t states, std::size_t agents, Rng& rng, double scale = 0.5) {
  PolicySet policy(PolicyForm::Affine, states, std::vector<std::size_t>(agents, 1));
  std::normal_distribution<double> normal(0.0, scale);
  Vector theta(static_cast<Eigen::Index>(policy.total_param_dim()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = normal(rng);
  policy.unpack(theta);
  return policy;
}

std::vector<std::pair<std::string, GraphProcess>> consensus_cases(std::uint64_t seed) {
  constexpr std::size_t n = 6;
  std::vector<std::pair<std::string, CommGraph>> graphs{
      {"path", CommGraph::path(n)},
      {"ring", CommGraph::ring(n)},
      {"star", CommGraph::star(n)},
      {"complete", CommGraph::complete(n)},
      {"random", CommGraph::random_connected(n, 0.4, derive_seed(seed, "random-graph"))},
  };
  std::vector<std::pair<std::string, GraphProcess>> out;
  for (const auto& [name, g] : graphs) {
    for (double p : {0.0, 0.3}) {
      char label[64];
      std::snprintf(label, sizeof label, "%s/p=%.1f", name.c_str(), p);
      out.emplace_back(label, GraphProcess(g, p, derive_seed(seed, label)));
    }
  }
  return out;
}

}  // namespace

CheckResult check_policy_gradient_fd(std::uint64_t seed, std::size_t draws, bool corrupt) {
  constexpr double h = 1e-6;
  Rng rng = make_stream(seed, "gradient-draws");
  double worst = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const FiniteTestMdp mdp = make_finite_mdp(5, 3, rng());
    PolicySet policy = random_affine_policy(5, 3, rng);
    Vector exact = oracle::exact_policy_gradient(mdp, policy);
    if (corrupt) exact *= 1.01;
    const Vector theta = policy.packed();
    Vector fd(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
      Vector tp = theta, tm = theta;
      tp(k) += h;
      tm(k) -= h;
      policy.unpack(tp);
      const double jp = oracle::exact_eval(mdp, policy).j;
      policy.unpack(tm);
      const double jm = oracle::exact_eval(mdp, policy).j;
      fd(k) = (jp - jm) / (2 * h);
    }
    policy.unpack(theta);
    worst = std::max(worst, (exact - fd).norm() / std::max(fd.norm(), 1e-12));
  }
  return finish("policy_gradient_fd", worst, 0.0, 1e-4, std::to_string(draws) + " random MDP/policy draws");
}

CheckResult check_bandit_gradient(std::uint64_t seed, bool corrupt) {
  const ContinuousBandit bandit = make_bandit(4, 3, derive_seed(seed, "bandit-gradient"));
  PolicySet policy = constant_policy(4, 3);
  Rng rng = make_stream(seed, "bandit-theta");
  std::normal_distribution<double> normal(0.0, 2.0);
  Vector theta(static_cast<Eigen::Index>(policy.total_param_dim()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = normal(rng);
  policy.unpack(theta);

  Vector exact = oracle::exact_policy_gradient(bandit, policy);
  if (corrupt) exact(0) += 1e-6;
  Vector sum = Vector::Zero(3);
  for (std::size_t i = 0; i < 4; ++i) sum += policy.theta(i);
  const Vector closed = -2.0 * bandit.cost() * (sum - bandit.target());
  double worst = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    worst = std::max(worst, (exact.segment(static_cast<Eigen::Index>(3 * i), 3) - closed).cwiseAbs().maxCoeff());
  }
  return finish("bandit_gradient", worst, 0.0, 1e-10, "max abs error against -2C(sum(theta) - a*)");
}

CheckResult check_poisson_residual(std::uint64_t seed, std::size_t draws, bool corrupt) {
  Rng rng = make_stream(seed, "poisson-draws");
  double worst = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    const FiniteTestMdp mdp = make_finite_mdp(6, 2, rng());
    const PolicySet policy = random_affine_policy(6, 2, rng);
    oracle::ExactEvaluation eval = oracle::exact_eval(mdp, policy);
    if (corrupt) eval.values(0) += 1e-3;
    worst = std::max(worst, oracle::poisson_residual(eval));
  }
  return finish("poisson_residual", worst, 0.0, 1e-8, std::to_string(draws) + " random MDP/policy draws");
}

CheckResult check_mspbe_fixed_point(std::uint64_t seed, bool corrupt) {
  const FiniteTestMdp mdp = make_finite_mdp(5, 3, derive_seed(seed, "mspbe-mdp"));
  Rng rng = make_stream(seed, "mspbe-policy");
  const PolicySet policy = random_affine_policy(5, 3, rng);
  const FourierFeatures features(5, policy.action_dims(), 3, 1.0, derive_seed(seed, "fourier-features"));
  oracle::CriticFixedPoint fp = oracle::mspbe_fixed_point(mdp, policy, features);
  if (corrupt) fp.omega(0) += 1e-3;

  // Relative residual of Φᵀ D (R̄ − J1 + PΦω − Φω) = 0.
  const auto eval = oracle::exact_eval(mdp, policy);
  const Matrix phi = feature_matrix(features, policy);
  const Vector d = eval.d_theta;
  const Vector bellman = eval.rewards - eval.j * Vector::Ones(d.size()) + eval.p_theta * phi * fp.omega - phi * fp.omega;
  const Vector rhs = phi.transpose() * d.asDiagonal() * (eval.rewards - eval.j * Vector::Ones(d.size()));
  const double residual = (phi.transpose() * d.asDiagonal() * bellman).norm() / std::max(rhs.norm(), 1e-300);

  // No nearby ω has a lower MSPBE.
  const double base = oracle::mspbe(mdp, policy, features, fp.omega);
  std::normal_distribution<double> normal(0.0, 1e-3);
  std::size_t lower = 0;
  for (int trial = 0; trial < 20; ++trial) {
    Vector w = fp.omega;
    for (Eigen::Index k = 0; k < w.size(); ++k) w(k) += normal(rng);
    if (oracle::mspbe(mdp, policy, features, w) < base - 1e-14) ++lower;
  }
  const double value = lower > 0 ? std::max(residual, 1.0) : residual;
  return finish("mspbe_fixed_point", value, 0.0, 1e-8,
                "normal-equation residual; " + std::to_string(lower) + " of 20 perturbations lowered the MSPBE");
}

CheckResult check_offpolicy_quadrature(std::uint64_t seed, bool corrupt) {
  const FiniteTestMdp mdp = make_finite_mdp(4, 2, derive_seed(seed, "offpolicy-mdp"));
  Rng rng = make_stream(seed, "offpolicy-policy");
  const PolicySet policy = random_affine_policy(4, 2, rng);
  const FourierFeatures features(4, policy.action_dims(), 4, 1.0, derive_seed(seed, "fourier-features"));
  QuadratureConfig q9;
  q9.order = 9;
  QuadratureConfig q13;
  q13.order = 13;
  Vector l9 = oracle::offpolicy_fixed_point(mdp, policy, features, policy, 0.1, q9).lambda;
  const Vector l13 = oracle::offpolicy_fixed_point(mdp, policy, features, policy, 0.1, q13).lambda;
  if (corrupt) l9 *= 1.01;
  return finish("offpolicy_quadrature", (l9 - l13).norm() / std::max(l13.norm(), 1e-300), 0.0, 1e-6,
                "relative gap between 9- and 13-point Gauss-Hermite rules");
}

CheckResult check_offpolicy_bandit(std::uint64_t seed, bool corrupt) {
  constexpr std::size_t n = 3;
  constexpr double sigma = 0.1;
  const ContinuousBandit bandit = make_bandit(n, 1, derive_seed(seed, "offpolicy-bandit"));
  PolicySet policy = constant_policy(n, 1);
  Vector theta(3);
  theta << 0.5, -0.3, 1.2;
  policy.unpack(theta);
  const CompatibleRFeatures features(policy, true);
  Vector lambda = oracle::offpolicy_fixed_point(bandit, policy, features, policy, sigma).lambda;
  if (corrupt) lambda *= 1.01;

  // Linear regression of a quadratic on Gaussian perturbations: slope is the
  // mean gradient, intercept the mean reward.
  const double c = bandit.cost()(0, 0);
  const double gap = theta.sum() - bandit.target()(0);
  Vector expected(static_cast<Eigen::Index>(n + 1));
  expected.head(n).setConstant(-2.0 * c * gap);
  expected(n) = -c * gap * gap - static_cast<double>(n) * sigma * sigma * c;
  return finish("offpolicy_bandit", (lambda - expected).norm() / expected.norm(), 0.0, 1e-10,
                "relative error against the closed-form regression");
}

CheckResult check_consensus_assumption(std::uint64_t seed, std::size_t samples, bool corrupt) {
  double worst_norm = 0.0;
  double worst_row = 0.0;
  double worst_col = 0.0;
  std::string detail;
  bool structural_ok = true;
  for (auto& [label, process] : consensus_cases(seed)) {
    const RandomMatrixReport report = check_assumption_random_matrices(process, samples);
    worst_norm = std::max(worst_norm, report.spectral_norm);
    worst_row = std::max(worst_row, report.row_residual);
    worst_col = std::max(worst_col, report.column_residual);
    structural_ok = structural_ok && report.respects_graph && report.min_positive >= process.eta();
  }
  if (corrupt) worst_norm = 1.0;
  // Encode every clause as a margin below 1 − 1e-3 so one number carries the verdict.
  double value = worst_norm;
  if (worst_row > 1e-12 || worst_col > 1e-3 || !structural_ok) value = std::max(value, 1.0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "spectral norm %.6g, row residual %.3g, mean column residual %.3g", worst_norm,
                worst_row, worst_col);
  return finish("consensus_assumption", value, 0.0, 1.0 - 1e-3, buf);
}

CheckResult check_consensus_disagreement(std::uint64_t seed, bool corrupt) {
  double worst = 0.0;
  Rng rng = make_stream(seed, "consensus-init");
  std::normal_distribution<double> normal;
  for (auto& [label, process] : consensus_cases(seed)) {
    std::vector<Vector> params(6, Vector(4));
    for (auto& p : params)
      for (Eigen::Index k = 0; k < p.size(); ++k) p(k) = normal(rng);
    std::vector<Vector> next;
    for (int it = 0; it < 500; ++it) {
      consensus_step_into(process.next_weights(), params, next);
      std::swap(params, next);
    }
    worst = std::max(worst, disagreement_norm(params));
  }
  if (corrupt) worst = 1.0;
  return finish("consensus_disagreement", worst, 0.0, 1e-8, "500 iterations from N(0,1) starts");
}

CheckResult check_limit_theorem(std::uint64_t seed, std::size_t samples, bool corrupt) {
  const ContinuousBandit bandit = make_bandit(3, 2, derive_seed(seed, "limit-bandit"));
  const PolicySet policy = constant_policy(3, 2);  // θ = 0, far from the optimum
  const Vector exact = oracle::exact_policy_gradient(bandit, policy);
  Rng rng = make_stream(seed, "limit-samples");
  const std::vector<double> sigmas{0.5, 0.2, 0.1, 0.05};
  std::vector<double> dev, se;
  for (double sigma : sigmas) {
    const auto est = oracle::stochastic_pg_estimate(bandit, policy, sigma, samples, rng);
    dev.push_back((est.mean - exact).norm());
    se.push_back(est.std_error.norm());
  }
  if (corrupt) dev.back() += 0.1 * exact.norm();
  bool decreasing = true;
  for (std::size_t k = 1; k < dev.size(); ++k) decreasing = decreasing && dev[k] <= dev[k - 1] + 3.0 * (se[k] + se[k - 1]);
  const double rel = dev.back() / exact.norm();
  char buf[200];
  std::snprintf(buf, sizeof buf, "deviations %.3g %.3g %.3g %.3g; %s", dev[0], dev[1], dev[2], dev[3],
                decreasing ? "non-increasing within 3 standard errors" : "increase beyond 3 standard errors");
  return finish("limit_theorem", decreasing ? rel : std::max(rel, 1.0), 0.0, 0.05, buf);
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "policy_gradient_fd",    "bandit_gradient",     "poisson_residual",
      "mspbe_fixed_point",     "offpolicy_quadrature", "offpolicy_bandit",
      "consensus_assumption",  "consensus_disagreement", "limit_theorem",
  };
  return names;
}

CheckResult run_check(const std::string& name, const VerifyOptions& o) {
  const bool bad = o.fault_inject == name;
  if (name == "policy_gradient_fd") return check_policy_gradient_fd(o.seed, 20, bad);
  if (name == "bandit_gradient") return check_bandit_gradient(o.seed, bad);
  if (name == "poisson_residual") return check_poisson_residual(o.seed, 20, bad);
  if (name == "mspbe_fixed_point") return check_mspbe_fixed_point(o.seed, bad);
  if (name == "offpolicy_quadrature") return check_offpolicy_quadrature(o.seed, bad);
  if (name == "offpolicy_bandit") return check_offpolicy_bandit(o.seed, bad);
  if (name == "consensus_assumption") return check_consensus_assumption(o.seed, 2000, bad);
  if (name == "consensus_disagreement") return check_consensus_disagreement(o.seed, bad);
  if (name == "limit_theorem") return check_limit_theorem(o.seed, 100000, bad);
  throw std::invalid_argument("unknown check: " + name);
}

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  const auto& names = check_names();
  if (!options.fault_inject.empty() &&
      std::find(names.begin(), names.end(), options.fault_inject) == names.end()) {
    throw std::invalid_argument("unknown check for fault injection: " + options.fault_inject);
  }
  std::vector<CheckResult> results(names.size());
  const auto errors = parallel_for(names.size(), options.workers,
                                   [&](std::size_t k) { results[k] = run_check(names[k], options); });
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (!errors[k]) continue;
    results[k].name = names[k];
    results[k].passed = false;
    results[k].value = std::numeric_limits<double>::quiet_NaN();
    try {
      std::rethrow_exception(errors[k]);
    } catch (const std::exception& e) {
      results[k].detail = std::string("error: ") + e.what();
    }
  }
  return results;
}

void write_report(std::ostream& out, const std::vector<CheckResult>& results) {
  out << "name\tvalue\treference\ttolerance\tstatus\tdetail\n";
  for (const auto& r : results) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6g\t%.6g\t%.6g", r.value, r.reference, r.tolerance);
    out << r.name << '\t' << buf << '\t' << (r.passed ? "pass" : "FAIL") << '\t' << r.detail << '\n';
  }
}

}  // namespace netdac
