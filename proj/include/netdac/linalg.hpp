#pragma once

#include <Eigen/Dense>

namespace netdac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

inline constexpr double kPivotThreshold = 1e-12;

/// Gaussian elimination with partial pivoting. Throws SingularMatrix when a
/// pivot falls below kPivotThreshold in magnitude after row exchange.
Vector solve_linear(const Matrix& a, const Vector& b);

/// Stationary distribution d of a row-stochastic matrix (dᵀP = dᵀ, Σd = 1).
/// One balance equation is replaced by the normalisation row and the
/// resulting system is solved directly; a reducible chain makes it singular.
Vector stationary_distribution(const Matrix& p);

/// Largest singular value via power iteration on AᵀA.
double spectral_norm(const Matrix& a);

Vector project_box(const Vector& x, const Vector& lo, const Vector& hi);

/// Number of singular values above `tol`.
std::size_t numerical_rank(const Matrix& a, double tol = 1e-8);

bool all_finite(const Matrix& a);

}  // namespace linalg
}  // namespace netdac
