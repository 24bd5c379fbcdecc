#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "netdac/errors.hpp"
#include "netdac/linalg.hpp"
#include "netdac/rng.hpp"

using namespace netdac;
using namespace netdac::linalg;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  return m;
}

}  // namespace

TEST_CASE("solve_linear small systems") {
  CHECK((solve_linear(Matrix::Identity(3, 3), vec({1, 2, 3})) - vec({1, 2, 3})).norm() < 1e-14);
  Matrix d(2, 2);
  d << 2, 0, 0, 4;
  CHECK((solve_linear(d, vec({2, 8})) - vec({1, 2})).norm() < 1e-14);
  Matrix e(2, 2);
  e << 1, 1, 1, -1;
  CHECK((solve_linear(e, vec({3, 1})) - vec({2, 1})).norm() < 1e-14);
}

TEST_CASE("solve_linear rejects singular and mismatched input") {
  CHECK_THROWS_AS(solve_linear(Matrix::Zero(2, 2), vec({1, 1})), SingularMatrix);
  CHECK_THROWS_AS(solve_linear(Matrix::Identity(2, 2), vec({1, 1, 1})), DimensionMismatch);
}

TEST_CASE("solve_linear residual on random well-conditioned systems") {
  Rng rng = make_stream(11, "linalg-test");
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(8, 8, rng) + 8.0 * Matrix::Identity(8, 8);
    const Vector b = random_matrix(8, 1, rng);
    const Vector x = solve_linear(a, b);
    CHECK((a * x - b).lpNorm<Eigen::Infinity>() < 1e-10);
  }
}

TEST_CASE("stationary_distribution examples") {
  CHECK_THROWS_AS(stationary_distribution(Matrix::Identity(2, 2)), SingularMatrix);
  Matrix half(2, 2);
  half << 0.5, 0.5, 0.5, 0.5;
  CHECK((stationary_distribution(half) - vec({0.5, 0.5})).norm() < 1e-14);
  Matrix p(2, 2);
  p << 0.9, 0.1, 0.2, 0.8;
  CHECK((stationary_distribution(p) - vec({2.0 / 3.0, 1.0 / 3.0})).norm() < 1e-12);
}

TEST_CASE("stationary_distribution on random smoothed chains") {
  Rng rng = make_stream(12, "linalg-test");
  std::uniform_real_distribution<double> unif;
  for (int trial = 0; trial < 20; ++trial) {
    Matrix p(7, 7);
    for (Eigen::Index r = 0; r < 7; ++r) {
      for (Eigen::Index c = 0; c < 7; ++c) p(r, c) = unif(rng) + 0.05;
      p.row(r) /= p.row(r).sum();
    }
    const Vector d = stationary_distribution(p);
    CHECK((d.transpose() * p - d.transpose()).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(std::abs(d.sum() - 1.0) < 1e-10);
    CHECK(d.minCoeff() > 0.0);
  }
}

TEST_CASE("spectral_norm examples") {
  CHECK(spectral_norm(Matrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  CHECK(spectral_norm(d) == doctest::Approx(3.0).epsilon(1e-12));
  Matrix n = Matrix::Zero(2, 2);
  n(0, 1) = 2;
  CHECK(spectral_norm(n) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("spectral_norm dominates random unit-vector images") {
  Rng rng = make_stream(13, "linalg-test");
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(5, 4, rng);
    const double norm = spectral_norm(a);
    double best = 0.0;
    for (int k = 0; k < 100; ++k) {
      Vector v = random_matrix(4, 1, rng);
      v.normalize();
      best = std::max(best, (a * v).norm());
    }
    CHECK(best <= norm + 1e-6);
    CHECK(norm == doctest::Approx(Eigen::JacobiSVD<Matrix>(a).singularValues()(0)).epsilon(1e-9));
  }
}

TEST_CASE("project_box examples and idempotence") {
  CHECK(project_box(vec({5}), vec({0}), vec({10})) == vec({5}));
  CHECK(project_box(vec({-1, 12}), vec({0, 0}), vec({10, 10})) == vec({0, 10}));
  CHECK(project_box(vec({4, 4}), vec({4, 4}), vec({4, 4})) == vec({4, 4}));
  Rng rng = make_stream(14, "linalg-test");
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = 3.0 * random_matrix(6, 1, rng);
    const Vector lo = Vector::Constant(6, -1.0), hi = Vector::Constant(6, 2.0);
    const Vector once = project_box(x, lo, hi);
    CHECK(project_box(once, lo, hi) == once);
  }
}

TEST_CASE("numerical_rank") {
  Matrix a(3, 2);
  a << 1, 2, 2, 4, 3, 6;
  CHECK(numerical_rank(a) == 1);
  CHECK(numerical_rank(Matrix::Identity(4, 4)) == 4);
}
