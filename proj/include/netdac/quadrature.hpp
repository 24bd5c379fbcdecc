#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "netdac/linalg.hpp"

namespace netdac {

struct QuadratureConfig {
  /// Gauss–Hermite nodes per dimension.
  std::size_t order = 9;
  /// Tensor-product rule up to this many action dimensions, Monte-Carlo above.
  std::size_t max_tensor_dim = 3;
  std::size_t mc_samples = 1'000'000;
  std::uint64_t seed = 0;
};

/// Nodes and weights for E[f(Z)], Z ~ N(0, 1) (probabilists' Hermite),
/// via Golub–Welsch. Weights sum to 1.
struct GaussHermiteRule {
  Vector nodes;
  Vector weights;
};

GaussHermiteRule gauss_hermite(std::size_t order);

/// Visits (x, w) pairs with Σw = 1 approximating E[f(X)] for
/// X ~ N(mean, σ²I): tensor-product Gauss–Hermite when dim(mean) is at most
/// max_tensor_dim, seeded Monte-Carlo otherwise.
void gaussian_expectation(const Vector& mean, double sigma, const QuadratureConfig& config,
                          const std::function<void(const Vector&, double)>& visit);

}  // namespace netdac
