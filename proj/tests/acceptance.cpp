// Acceptance harness: one PASS/FAIL line per top-level criterion, with the
// measured quantities indented underneath. Exit status is nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "netdac/algorithms.hpp"
#include "netdac/config.hpp"
#include "netdac/oracle.hpp"
#include "netdac/runner.hpp"
#include "netdac/verify.hpp"

using namespace netdac;

namespace {

int failures = 0;

void report(const std::string& name, bool ok) {
  std::printf("%s  %s\n", ok ? "PASS" : "FAIL", name.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  std::printf("      ");
  va_list args;
  va_start(args, fmt);
  std::vprintf(fmt, args);
  va_end(args);
  std::printf("\n");
  std::fflush(stdout);
}

void note_check(const CheckResult& r) {
  note("%s: %.3g (tolerance %.3g) %s", r.name.c_str(), r.value, r.tolerance, r.detail.c_str());
}

// Bandit experiment at the published scale, averaged over five seeds.
void bandit_reproduction() {
  bool ok = true;
  for (Algorithm alg : {Algorithm::OnPolicy, Algorithm::OffPolicy}) {
    for (std::size_t m : {10u, 20u, 50u}) {
      RunConfig c;
      c.algorithm = alg;
      c.action_dim = m;
      c.batch_size = 2 * m;
      c.batches = 5000;
      const auto start = std::chrono::steady_clock::now();
      const auto runs = run_seeds(c, workers_from_env());
      const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      const std::vector<double> curve = mean_cost_curve(runs);
      constexpr std::size_t window = 10;
      std::vector<double> smooth;
      for (std::size_t b = window - 1; b < curve.size(); ++b) {
        double acc = 0.0;
        for (std::size_t k = b + 1 - window; k <= b; ++k) acc += curve[k];
        smooth.push_back(acc / window);
      }
      std::size_t rises = 0;
      double worst_rise = 0.0;
      std::size_t first_rise = 0;
      for (std::size_t k = 1; k < smooth.size(); ++k) {
        if (smooth[k] > smooth[k - 1]) {
          if (rises++ == 0) first_rise = k + window - 1;
          worst_rise = std::max(worst_rise, smooth[k] / smooth[k - 1] - 1.0);
        }
      }
      const double ratio = curve.back() / curve.front();
      const bool monotone = rises == 0;
      const bool converged = ratio < 0.01;
      const bool fast = seconds < 120.0;
      ok = ok && monotone && converged && fast;
      note("%s m=%zu: cost %.4g -> %.4g (ratio %.2e %s), smoothed rises %zu%s (worst +%.2e, first at batch %zu), "
           "%.1f s %s",
           alg == Algorithm::OnPolicy ? "alg1" : "alg2", m, curve.front(), curve.back(), ratio,
           converged ? "ok" : "too high", rises, monotone ? " ok" : "", worst_rise, first_rise, seconds,
           fast ? "ok" : "too slow");
    }
  }
  report("bandit reproduction: smoothed mean cost non-increasing, final < 1% of initial, < 120 s per run", ok);
}

void policy_gradient() {
  const CheckResult fd = check_policy_gradient_fd(101, 20);
  const CheckResult bandit = check_bandit_gradient(101);
  note_check(fd);
  note_check(bandit);
  report("policy gradient: finite differences rel. error < 1e-4, bandit closed form within 1e-10",
         fd.passed && bandit.passed);
}

PolicySet random_affine(std::size_t states, std::size_t agents, std::uint64_t seed) {
  PolicySet p(PolicyForm::Affine, states, std::vector<std::size_t>(agents, 1));
  Rng rng = make_stream(seed, "critic-policy");
  std::normal_distribution<double> normal(0.0, 0.5);
  Vector theta(static_cast<Eigen::Index>(p.total_param_dim()));
  for (Eigen::Index k = 0; k < theta.size(); ++k) theta(k) = normal(rng);
  p.unpack(theta);
  return p;
}

// Frozen-actor on-policy critic on a 5-state MDP, K = 3 Fourier features,
// 3 agents on a path graph, 10⁶ steps with β_ω(t) = 1/(1+t)^0.6.
void critic_fixed_point() {
  bool ok = true;
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const FiniteTestMdp mdp = make_finite_mdp(5, 3, derive_seed(seed, "critic-mdp"));
    const PolicySet policy = random_affine(5, 3, seed);
    const FourierFeatures features(5, policy.action_dims(), 3, 1.0, derive_seed(seed, "fourier-features"));
    const auto fp = oracle::mspbe_fixed_point(mdp, policy, features);
    const double j = oracle::exact_eval(mdp, policy).j;

    TrainState st = make_train_state(mdp, policy, features.dim(), seed, {0.0});
    GraphProcess network(CommGraph::path(3), 0.0, seed);
    const Schedule schedule = Schedule::polynomial(1.0, 0.6, 0.0, 0.9);
    StepOptions frozen;
    frozen.update_actor = false;
    for (int t = 0; t < 1000000; ++t) alg1_step(st, mdp, features, network, schedule, {0.0}, frozen);

    double worst = 0.0, j_hat = 0.0;
    for (const auto& w : st.critic) worst = std::max(worst, (w - fp.omega).norm() / fp.omega.norm());
    for (double v : st.j_hat) j_hat += v / 3.0;
    const double spread = max_pairwise_distance(st.critic);
    const double j_err = std::abs(j_hat - j) / std::abs(j);
    const bool good = spread < 1e-3 && worst < 0.02 && j_err < 0.02 && st.policy.packed() == policy.packed();
    ok = ok && good;
    note("instance %llu: consensus spread %.2e, max rel. error to fixed point %.4f, J %.5f, mean J-hat %.5f "
         "(rel. error %.4f)",
         static_cast<unsigned long long>(seed), spread, worst, j, j_hat, j_err);
  }
  report("on-policy critic: consensus within 1e-3, within 2% of the MSPBE fixed point, mean J-hat within 2% of J", ok);
}

// Frozen-actor off-policy critic on the scalar-action bandit, Gaussian
// behaviour policy σ = 0.1, critic step 0.1, 10⁶ steps.
void offpolicy_fixed_point() {
  bool ok = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ContinuousBandit bandit = make_bandit(3, 1, derive_seed(seed, "acceptance-bandit"));
    PolicySet policy = constant_policy(3, 1);
    Vector theta(3);
    theta << 0.5, -0.3, 1.2;
    policy.unpack(theta * static_cast<double>(seed));
    const CompatibleRFeatures features(policy, true);
    const auto fp = oracle::offpolicy_fixed_point(bandit, policy, features, policy, 0.1);

    TrainState st = make_train_state(bandit, policy, features.dim(), seed, {0.1});
    GraphProcess network(CommGraph::ring(3), 0.0, seed);
    StepOptions frozen;
    frozen.update_actor = false;
    for (int t = 0; t < 1000000; ++t) alg2_step(st, bandit, features, network, Schedule::constant(0.1, 0.0), {0.1}, frozen);

    double worst = 0.0;
    for (const auto& l : st.critic) worst = std::max(worst, (l - fp.lambda).norm() / fp.lambda.norm());
    ok = ok && worst < 0.02;
    note("instance %llu: max rel. error of lambda to the fixed point %.4f", static_cast<unsigned long long>(seed),
         worst);
  }
  report("off-policy critic: every agent's lambda within 2% of the fixed point", ok);
}

void limit_theorem() {
  const CheckResult r = check_limit_theorem(101, 100000);
  note_check(r);
  report("limit theorem: deviation non-increasing in sigma within MC error, < 5% of gradient norm at sigma = 0.05",
         r.passed);
}

void consensus() {
  const CheckResult assumption = check_consensus_assumption(101, 5000);
  const CheckResult disagreement = check_consensus_disagreement(101);
  note_check(assumption);
  note_check(disagreement);
  report("consensus: row-stochastic, mean column-stochastic within 1e-3, spectral norm < 1 - 1e-3, "
         "disagreement < 1e-8 after 500 steps",
         assumption.passed && disagreement.passed);
}

std::string csv_body(const RunConfig& c) {
  std::ostringstream out;
  write_metrics_csv(out, run_seeds(c, workers_from_env()));
  std::istringstream in(out.str());
  std::string body;
  for (std::string line; std::getline(in, line);) body += line.substr(0, line.rfind(',')) + "\n";
  return body;
}

void determinism() {
  bool ok = true;
  for (Algorithm alg : {Algorithm::OnPolicy, Algorithm::OffPolicy}) {
    RunConfig c;
    c.algorithm = alg;
    c.batches = 300;
    c.failure_prob = 0.2;
    c.topology = Topology::Random;
    const std::string a = csv_body(c);
    const std::string b = csv_body(c);
    ok = ok && a == b;
    note("%s: %zu bytes per body, %s", alg == Algorithm::OnPolicy ? "alg1" : "alg2", a.size(),
         a == b ? "identical" : "DIFFERENT");
  }
  report("determinism: identical config and seeds give byte-identical CSV bodies", ok);
}

}  // namespace

int main() {
  policy_gradient();
  critic_fixed_point();
  offpolicy_fixed_point();
  limit_theorem();
  consensus();
  determinism();
  bandit_reproduction();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
