#include "netdac/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netdac/errors.hpp"

namespace netdac::linalg {

Vector solve_linear(const Matrix& a, const Vector& b) {
  const auto n = a.rows();
  if (a.cols() != n || b.size() != n) {
    throw DimensionMismatch("solve_linear: expected square system matching rhs length");
  }
  Matrix m = a;
  Vector x = b;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    }
    if (std::abs(m(pivot, col)) < kPivotThreshold) {
      throw SingularMatrix("solve_linear: pivot below threshold at column " + std::to_string(col));
    }
    if (pivot != col) {
      m.row(col).swap(m.row(pivot));
      std::swap(x(col), x(pivot));
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const double factor = m(r, col) / m(col, col);
      if (factor == 0.0) continue;
      m.row(r).tail(n - col) -= factor * m.row(col).tail(n - col);
      x(r) -= factor * x(col);
    }
  }
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    double acc = x(r);
    for (Eigen::Index c = r + 1; c < n; ++c) acc -= m(r, c) * x(c);
    x(r) = acc / m(r, r);
  }
  return x;
}

Vector stationary_distribution(const Matrix& p) {
  const auto n = p.rows();
  if (p.cols() != n) throw DimensionMismatch("stationary_distribution: matrix must be square");
  // (Pᵀ − I) d = 0 with the last balance row swapped for Σd = 1.
  Matrix system = p.transpose() - Matrix::Identity(n, n);
  system.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Vector d = solve_linear(system, rhs);
  if ((d.array() <= 0.0).any()) {
    throw SingularMatrix("stationary_distribution: non-positive mass, chain is not irreducible");
  }
  return d;
}

double spectral_norm(const Matrix& a) {
  const Matrix gram = a.transpose() * a;
  const auto n = gram.rows();
  if (gram.norm() == 0.0) return 0.0;
  // Deterministic, non-degenerate start vector.
  Vector v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = 1.0 + 0.1 * static_cast<double>(k % 7);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Vector w = gram * v;
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  // Rayleigh quotient of the converged vector.
  lambda = v.dot(gram * v);
  return std::sqrt(std::max(lambda, 0.0));
}

Vector project_box(const Vector& x, const Vector& lo, const Vector& hi) {
  if (x.size() != lo.size() || x.size() != hi.size()) {
    throw DimensionMismatch("project_box: bounds and point differ in length");
  }
  return x.cwiseMax(lo).cwiseMin(hi);
}

std::size_t numerical_rank(const Matrix& a, double tol) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return static_cast<std::size_t>((s.array() > tol).count());
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

}  // namespace netdac::linalg
