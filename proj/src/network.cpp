#include "netdac/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "netdac/errors.hpp"

namespace netdac {

CommGraph::CommGraph(std::size_t agents) : agents_(agents) {
  if (agents == 0) throw std::invalid_argument("graph needs at least one agent");
}

void CommGraph::add_edge(std::size_t i, std::size_t j) {
  if (i >= agents_ || j >= agents_) throw std::out_of_range("edge endpoint out of range");
  if (i == j) throw std::invalid_argument("self-loops are not edges");
  auto e = std::minmax(i, j);
  std::pair<std::size_t, std::size_t> edge{e.first, e.second};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), edge);
  if (it == edges_.end() || *it != edge) edges_.insert(it, edge);
}

bool CommGraph::has_edge(std::size_t i, std::size_t j) const {
  if (i == j) return false;
  auto e = std::minmax(i, j);
  return std::binary_search(edges_.begin(), edges_.end(), std::pair<std::size_t, std::size_t>{e.first, e.second});
}

std::size_t CommGraph::degree(std::size_t i) const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [i](const auto& e) { return e.first == i || e.second == i; }));
}

bool CommGraph::is_connected() const {
  std::vector<std::size_t> parent(agents_);
  for (std::size_t i = 0; i < agents_; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = agents_;
  for (const auto& [a, b] : edges_) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components == 1;
}

CommGraph CommGraph::edgeless(std::size_t agents) { return CommGraph(agents); }

CommGraph CommGraph::path(std::size_t agents) {
  CommGraph g(agents);
  for (std::size_t i = 0; i + 1 < agents; ++i) g.add_edge(i, i + 1);
  return g;
}

CommGraph CommGraph::ring(std::size_t agents) {
  CommGraph g = path(agents);
  if (agents > 2) g.add_edge(agents - 1, 0);
  return g;
}

CommGraph CommGraph::star(std::size_t agents) {
  CommGraph g(agents);
  for (std::size_t i = 1; i < agents; ++i) g.add_edge(0, i);
  return g;
}

CommGraph CommGraph::complete(std::size_t agents) {
  CommGraph g(agents);
  for (std::size_t i = 0; i < agents; ++i)
    for (std::size_t j = i + 1; j < agents; ++j) g.add_edge(i, j);
  return g;
}

CommGraph CommGraph::random_connected(std::size_t agents, double edge_prob, std::uint64_t seed) {
  Rng rng = make_stream(seed, "random-graph");
  std::bernoulli_distribution coin(edge_prob);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    CommGraph g(agents);
    for (std::size_t i = 0; i < agents; ++i)
      for (std::size_t j = i + 1; j < agents; ++j)
        if (coin(rng)) g.add_edge(i, j);
    if (g.is_connected()) return g;
  }
  CommGraph g = ring(agents);
  for (std::size_t i = 0; i < agents; ++i)
    for (std::size_t j = i + 1; j < agents; ++j)
      if (coin(rng)) g.add_edge(i, j);
  return g;
}

CommGraph read_edge_list(std::istream& in, std::size_t agents) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::string line;
  std::size_t lineno = 0;
  std::size_t max_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    long long i = -1, j = -1;
    std::string rest;
    if (!(ls >> i >> j) || (ls >> rest) || i < 0 || j < 0) {
      throw ConfigError("edge list line " + std::to_string(lineno) + ": expected \"i j\" with 0-indexed agents");
    }
    pairs.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    max_index = std::max({max_index, static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
  }
  if (agents == 0) agents = pairs.empty() ? 1 : max_index + 1;
  CommGraph g(agents);
  for (const auto& [i, j] : pairs) {
    if (i >= agents || j >= agents) throw ConfigError("edge list references agent beyond the agent count");
    if (i == j) throw ConfigError("edge list contains a self-loop");
    g.add_edge(i, j);
  }
  return g;
}

CommGraph load_edge_list(const std::string& path, std::size_t agents) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list: " + path);
  return read_edge_list(in, agents);
}

Matrix metropolis_weights(const CommGraph& g) {
  const auto n = g.agent_count();
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [i, j] : g.edges()) {
    ++deg[i];
    ++deg[j];
  }
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& [i, j] : g.edges()) {
    const double w = 1.0 / (1.0 + static_cast<double>(std::max(deg[i], deg[j])));
    c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
    c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = w;
  }
  for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, i) = 1.0 - (c.row(i).sum() - c(i, i));
  return c;
}

WeightCheck inspect_weights(const Matrix& c, const CommGraph& g) {
  WeightCheck out;
  const auto n = c.rows();
  out.row_residual = (c.rowwise().sum().array() - 1.0).abs().maxCoeff();
  out.column_residual = (c.colwise().sum().array() - 1.0).abs().maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = c(i, j);
      if (v < 0.0) out.nonnegative = false;
      if (v > 0.0) out.min_positive = std::min(out.min_positive, v);
      if (i != j && v != 0.0 && !g.has_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
        out.respects_graph = false;
      }
    }
  }
  return out;
}

GraphProcess::GraphProcess(CommGraph base, double failure_prob, std::uint64_t seed, double eta)
    : base_(std::move(base)),
      failure_prob_(failure_prob),
      eta_(eta),
      base_weights_(metropolis_weights(base_)),
      scratch_(base_weights_),
      alive_(base_.edges().size(), true),
      rng_(make_stream(seed, "graph")) {
  if (!(failure_prob >= 0.0 && failure_prob < 1.0)) throw std::invalid_argument("failure probability must lie in [0, 1)");
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must lie in (0, 1)");
  const auto check = inspect_weights(base_weights_, base_);
  if (check.min_positive < eta_) {
    throw std::invalid_argument("Metropolis weights fall below eta; graph degree too large for the configured bound");
  }
}

const Matrix& GraphProcess::next_weights() {
  if (failure_prob_ == 0.0) return base_weights_;
  std::bernoulli_distribution fail(failure_prob_);
  scratch_ = base_weights_;
  const auto& edges = base_.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    alive_[e] = !fail(rng_);
    if (alive_[e]) continue;
    const auto i = static_cast<Eigen::Index>(edges[e].first);
    const auto j = static_cast<Eigen::Index>(edges[e].second);
    const double w = scratch_(i, j);
    scratch_(i, j) = 0.0;
    scratch_(j, i) = 0.0;
    scratch_(i, i) += w;
    scratch_(j, j) += w;
  }
  return scratch_;
}

GraphProcess::Sample GraphProcess::next() {
  const Matrix& w = next_weights();
  CommGraph g(base_.agent_count());
  const auto& edges = base_.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (failure_prob_ == 0.0 || alive_[e]) g.add_edge(edges[e].first, edges[e].second);
  }
  return Sample{std::move(g), w};
}

void consensus_step_into(const Matrix& c, const std::vector<Vector>& params, std::vector<Vector>& out) {
  const auto n = params.size();
  if (static_cast<std::size_t>(c.rows()) != n || static_cast<std::size_t>(c.cols()) != n) {
    throw DimensionMismatch("consensus_step: weight matrix does not match agent count");
  }
  if (n == 0) {
    out.clear();
    return;
  }
  const auto len = params[0].size();
  for (const auto& p : params) {
    if (p.size() != len) throw DimensionMismatch("consensus_step: per-agent vectors differ in length");
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool first = true;
    for (std::size_t j = 0; j < n; ++j) {
      const double w = c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (w == 0.0) continue;
      if (first) {
        out[i].noalias() = w * params[j];
        first = false;
      } else {
        out[i].noalias() += w * params[j];
      }
    }
    if (first) out[i].setZero(len);
  }
}

std::vector<Vector> consensus_step(const Matrix& c, const std::vector<Vector>& params) {
  std::vector<Vector> out;
  consensus_step_into(c, params, out);
  return out;
}

double disagreement_norm(const std::vector<Vector>& params) {
  if (params.empty()) return 0.0;
  Vector mean = Vector::Zero(params[0].size());
  for (const auto& p : params) mean += p;
  mean /= static_cast<double>(params.size());
  double sq = 0.0;
  for (const auto& p : params) sq += (p - mean).squaredNorm();
  return std::sqrt(sq);
}

RandomMatrixReport check_assumption_random_matrices(GraphProcess process, std::size_t samples) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  const auto n = static_cast<Eigen::Index>(process.base().agent_count());
  const Matrix jperp = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  Matrix mean_c = Matrix::Zero(n, n);
  Matrix mean_q = Matrix::Zero(n, n);
  RandomMatrixReport report;
  report.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    auto sample = process.next();
    const Matrix& c = sample.weights;
    const auto check = inspect_weights(c, sample.graph);
    report.row_residual = std::max(report.row_residual, check.row_residual);
    report.min_positive = std::min(report.min_positive, check.min_positive);
    report.respects_graph = report.respects_graph && check.respects_graph && check.nonnegative;
    mean_c += c;
    mean_q += c.transpose() * jperp * c;
  }
  mean_c /= static_cast<double>(samples);
  mean_q /= static_cast<double>(samples);
  report.column_residual = (mean_c.colwise().sum().array() - 1.0).abs().maxCoeff();
  report.spectral_norm = linalg::spectral_norm(mean_q);
  report.violated = report.spectral_norm >= 1.0 - 1e-6 || !report.respects_graph ||
                    report.min_positive < process.eta() || report.row_residual > 1e-12;
  return report;
}

}  // namespace netdac
