#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace netdac {

/// One verification record. `value` is compared against `tolerance`; the
/// comparison direction is fixed per check (all are "value < tolerance").
struct CheckResult {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 2024;
  /// Name of a check whose computed quantity is deliberately corrupted.
  std::string fault_inject;
  std::size_t workers = 1;
};

/// Registered check names, in report order.
const std::vector<std::string>& check_names();

/// Runs one registered check. Throws std::invalid_argument for unknown names.
CheckResult run_check(const std::string& name, const VerifyOptions& options);

/// Runs every registered check, at most options.workers at a time.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

/// Tab-separated records: name, value, reference, tolerance, status, detail.
void write_report(std::ostream& out, const std::vector<CheckResult>& results);

// Individual checks, also used directly by the acceptance harness.

/// Max relative error between the exact policy gradient and central finite
/// differences of the exact J over `draws` random finite MDP / θ pairs.
CheckResult check_policy_gradient_fd(std::uint64_t seed, std::size_t draws, bool corrupt = false);

/// Max abs error between the exact bandit gradient and −2C(Σθ − a*).
CheckResult check_bandit_gradient(std::uint64_t seed, bool corrupt = false);

/// Max Poisson-equation residual of the exact evaluation.
CheckResult check_poisson_residual(std::uint64_t seed, std::size_t draws, bool corrupt = false);

/// Relative residual of the MSPBE normal equations at the fixed point, and
/// that random perturbations never lower the MSPBE.
CheckResult check_mspbe_fixed_point(std::uint64_t seed, bool corrupt = false);

/// Off-policy fixed point with 9- and 13-point Gauss–Hermite rules agree.
CheckResult check_offpolicy_quadrature(std::uint64_t seed, bool corrupt = false);

/// Off-policy fixed point on a scalar-action bandit against its closed form.
CheckResult check_offpolicy_bandit(std::uint64_t seed, bool corrupt = false);

/// Random-matrix assumption for Metropolis weights on path, ring, star,
/// complete and random graphs, with and without link failures.
CheckResult check_consensus_assumption(std::uint64_t seed, std::size_t samples, bool corrupt = false);

/// Disagreement after 500 consensus iterations on the same topologies.
CheckResult check_consensus_disagreement(std::uint64_t seed, bool corrupt = false);

/// Score-function gradient of the σ-smoothed policy approaches the
/// deterministic gradient as σ shrinks.
CheckResult check_limit_theorem(std::uint64_t seed, std::size_t samples, bool corrupt = false);

}  // namespace netdac
