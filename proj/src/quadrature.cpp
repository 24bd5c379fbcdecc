#include "netdac/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "netdac/rng.hpp"

namespace netdac {

GaussHermiteRule gauss_hermite(std::size_t order) {
  if (order == 0) throw std::invalid_argument("quadrature order must be positive");
  const auto n = static_cast<Eigen::Index>(order);
  Matrix jacobi = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  GaussHermiteRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = eig.eigenvectors().row(0).transpose().array().square();
  rule.weights /= rule.weights.sum();
  return rule;
}

void gaussian_expectation(const Vector& mean, double sigma, const QuadratureConfig& config,
                          const std::function<void(const Vector&, double)>& visit) {
  const auto dim = static_cast<std::size_t>(mean.size());
  if (sigma == 0.0 || dim == 0) {
    visit(mean, 1.0);
    return;
  }
  if (dim <= config.max_tensor_dim) {
    const auto rule = gauss_hermite(config.order);
    const auto q = static_cast<std::size_t>(rule.nodes.size());
    std::vector<std::size_t> idx(dim, 0);
    Vector x(mean.size());
    while (true) {
      double w = 1.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const auto k = static_cast<Eigen::Index>(idx[d]);
        x(static_cast<Eigen::Index>(d)) = mean(static_cast<Eigen::Index>(d)) + sigma * rule.nodes(k);
        w *= rule.weights(k);
      }
      visit(x, w);
      std::size_t d = 0;
      while (d < dim && ++idx[d] == q) idx[d++] = 0;
      if (d == dim) break;
    }
    return;
  }
  Rng rng = make_stream(config.seed, "quadrature-mc");
  std::normal_distribution<double> normal;
  const double w = 1.0 / static_cast<double>(config.mc_samples);
  Vector x(mean.size());
  for (std::size_t k = 0; k < config.mc_samples; ++k) {
    for (Eigen::Index d = 0; d < x.size(); ++d) x(d) = mean(d) + sigma * normal(rng);
    visit(x, w);
  }
}

}  // namespace netdac
