#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "netdac/errors.hpp"
#include "netdac/linalg.hpp"
#include "netdac/network.hpp"

using namespace netdac;

namespace {

std::vector<Vector> random_params(std::size_t agents, Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<Vector> out(agents, Vector(dim));
  for (auto& v : out)
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = normal(rng);
  return out;
}

Vector average(const std::vector<Vector>& params) {
  Vector acc = Vector::Zero(params.front().size());
  for (const auto& p : params) acc += p;
  return acc / static_cast<double>(params.size());
}

std::vector<CommGraph> connected_graphs() {
  return {CommGraph::path(6), CommGraph::ring(6), CommGraph::star(6), CommGraph::complete(6),
          CommGraph::random_connected(6, 0.4, 3), CommGraph::random_connected(9, 0.2, 4)};
}

}  // namespace

TEST_CASE("graph factories") {
  CHECK(CommGraph::path(4).edges().size() == 3);
  CHECK(CommGraph::ring(5).edges().size() == 5);
  CHECK(CommGraph::star(5).degree(0) == 4);
  CHECK(CommGraph::complete(5).edges().size() == 10);
  CHECK_FALSE(CommGraph::edgeless(3).is_connected());
  CHECK(CommGraph::edgeless(1).is_connected());
  for (std::uint64_t seed = 0; seed < 20; ++seed) CHECK(CommGraph::random_connected(8, 0.2, seed).is_connected());
  CHECK(CommGraph::random_connected(8, 0.3, 5).edges() == CommGraph::random_connected(8, 0.3, 5).edges());
  CommGraph g(3);
  CHECK_THROWS(g.add_edge(1, 1));
  CHECK_THROWS(g.add_edge(0, 3));
}

TEST_CASE("edge list parsing") {
  std::istringstream in("# triangle plus tail\n0 1\n1 2\n\n2 0\n2 3\n");
  const CommGraph g = read_edge_list(in);
  CHECK(g.agent_count() == 4);
  CHECK(g.has_edge(0, 2));
  CHECK(g.has_edge(3, 2));
  CHECK_FALSE(g.has_edge(0, 3));
  std::istringstream bad("0 x\n");
  CHECK_THROWS_AS(read_edge_list(bad), ConfigError);
  std::istringstream range("0 5\n");
  CHECK_THROWS_AS(read_edge_list(range, 3), ConfigError);
}

TEST_CASE("metropolis weights examples") {
  const Matrix path = metropolis_weights(CommGraph::path(3));
  CHECK(path(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(path(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(path(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(path(0, 2) == 0.0);
  CHECK(metropolis_weights(CommGraph::edgeless(4)) == Matrix::Identity(4, 4));
  const Matrix complete = metropolis_weights(CommGraph::complete(5));
  CHECK((complete - Matrix::Constant(5, 5, 0.2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("metropolis weights properties") {
  for (const auto& g : connected_graphs()) {
    const Matrix c = metropolis_weights(g);
    const WeightCheck check = inspect_weights(c, g);
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(check.row_residual < 1e-12);
    CHECK(check.column_residual < 1e-12);
    CHECK(check.respects_graph);
    CHECK(check.nonnegative);
    CHECK(check.min_positive >= 1.0 / (1.0 + static_cast<double>(g.agent_count())) - 1e-15);
  }
}

TEST_CASE("consensus_step examples") {
  Rng rng = make_stream(1, "network-test");
  const auto params = random_params(4, 3, rng);
  const auto same = consensus_step(Matrix::Identity(4, 4), params);
  for (std::size_t i = 0; i < 4; ++i) CHECK(same[i] == params[i]);
  const auto avg = consensus_step(Matrix::Constant(4, 4, 0.25), params);
  for (std::size_t i = 0; i < 4; ++i) CHECK((avg[i] - average(params)).norm() < 1e-14);
  CHECK_THROWS_AS(consensus_step(Matrix::Identity(3, 3), params), DimensionMismatch);
}

TEST_CASE("iterated metropolis consensus converges to the initial average") {
  Rng rng = make_stream(2, "network-test");
  for (const auto& g : connected_graphs()) {
    auto params = random_params(g.agent_count(), 4, rng);
    const Vector target = average(params);
    const Matrix c = metropolis_weights(g);
    for (int it = 0; it < 200; ++it) {
      params = consensus_step(c, params);
      CHECK((average(params) - target).norm() < 1e-12);
    }
    for (const auto& p : params) CHECK((p - target).norm() < 1e-6);
  }
}

TEST_CASE("disagreement contracts at the predicted rate") {
  Rng rng = make_stream(3, "network-test");
  for (const auto& g : connected_graphs()) {
    const auto n = static_cast<Eigen::Index>(g.agent_count());
    const Matrix c = metropolis_weights(g);
    const Matrix j_perp = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    const double rho = std::sqrt(linalg::spectral_norm(c.transpose() * j_perp * c));
    CHECK(rho < 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const auto params = random_params(g.agent_count(), 3, rng);
      CHECK(disagreement_norm(consensus_step(c, params)) <= rho * disagreement_norm(params) + 1e-12);
    }
  }
}

TEST_CASE("graph process with failures keeps every sample doubly stochastic") {
  GraphProcess process(CommGraph::ring(7), 0.3, 9);
  for (int k = 0; k < 200; ++k) {
    const auto sample = process.next();
    const WeightCheck check = inspect_weights(sample.weights, process.base());
    CHECK(check.row_residual < 1e-12);
    CHECK(check.column_residual < 1e-12);
    CHECK(check.nonnegative);
    CHECK(check.respects_graph);
    for (const auto& [i, j] : process.base().edges()) {
      const bool alive = sample.graph.has_edge(i, j);
      CHECK((sample.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0) == alive);
    }
  }
  GraphProcess a(CommGraph::ring(5), 0.2, 4), b(CommGraph::ring(5), 0.2, 4);
  for (int k = 0; k < 20; ++k) CHECK(a.next_weights() == b.next_weights());
}

TEST_CASE("random matrix assumption checks") {
  const auto complete = check_assumption_random_matrices(GraphProcess(CommGraph::complete(5), 0.0, 1), 10);
  CHECK(complete.spectral_norm < 1e-12);
  CHECK_FALSE(complete.violated);

  const auto edgeless = check_assumption_random_matrices(GraphProcess(CommGraph::edgeless(4), 0.0, 1), 10);
  CHECK(edgeless.spectral_norm == doctest::Approx(1.0));
  CHECK(edgeless.violated);

  const auto path = check_assumption_random_matrices(GraphProcess(CommGraph::path(6), 0.2, 2), 10000);
  CHECK(path.spectral_norm < 1.0);
  CHECK_FALSE(path.violated);
  CHECK(path.row_residual < 1e-12);
  CHECK(path.column_residual < 1e-3);
}
