#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "netdac/linalg.hpp"
#include "netdac/rng.hpp"

namespace netdac {

/// Undirected communication graph over agents 0..N-1; edges stored once
/// with i < j, no self-loops.
class CommGraph {
 public:
  explicit CommGraph(std::size_t agents);

  std::size_t agent_count() const { return agents_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

  void add_edge(std::size_t i, std::size_t j);
  bool has_edge(std::size_t i, std::size_t j) const;
  std::size_t degree(std::size_t i) const;
  bool is_connected() const;

  static CommGraph edgeless(std::size_t agents);
  static CommGraph path(std::size_t agents);
  static CommGraph ring(std::size_t agents);
  static CommGraph star(std::size_t agents);
  static CommGraph complete(std::size_t agents);
  /// Erdős–Rényi G(N, p), redrawn until connected (at most 1000 attempts,
  /// then a ring is overlaid).
  static CommGraph random_connected(std::size_t agents, double edge_prob, std::uint64_t seed);

 private:
  std::size_t agents_;
  std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

/// Reads an edge list: one "i j" pair per line, 0-indexed; blank lines and
/// lines starting with '#' are skipped. The agent count is given by the
/// caller, or inferred as max index + 1 when zero.
CommGraph read_edge_list(std::istream& in, std::size_t agents = 0);
CommGraph load_edge_list(const std::string& path, std::size_t agents = 0);

/// cᵢⱼ = 1/(1 + max(dᵢ, dⱼ)) on edges, cᵢᵢ = 1 − Σⱼ cᵢⱼ. Symmetric and
/// doubly stochastic.
Matrix metropolis_weights(const CommGraph& g);

struct WeightCheck {
  double row_residual = 0.0;     // max |C·1 − 1|
  double column_residual = 0.0;  // max |1ᵀC − 1ᵀ|
  double min_positive = 1.0;     // smallest positive entry
  bool respects_graph = true;    // zero off the edge set
  bool nonnegative = true;
};

WeightCheck inspect_weights(const Matrix& c, const CommGraph& g);

/// Time-varying graph: each step every base edge fails independently with
/// probability `failure_prob`. Weights are the base graph's Metropolis
/// weights with each failed edge's mass moved back onto both diagonals, so
/// every sample stays symmetric and doubly stochastic.
class GraphProcess {
 public:
  struct Sample {
    CommGraph graph;
    Matrix weights;
  };

  GraphProcess(CommGraph base, double failure_prob, std::uint64_t seed, double eta = 1e-3);

  const CommGraph& base() const { return base_; }
  double failure_prob() const { return failure_prob_; }
  double eta() const { return eta_; }

  Sample next();
  /// Weights only; skips building the sampled graph.
  const Matrix& next_weights();

 private:
  CommGraph base_;
  double failure_prob_;
  double eta_;
  Matrix base_weights_;
  Matrix scratch_;
  std::vector<bool> alive_;
  Rng rng_;
};

/// outputⁱ = Σⱼ cᵢⱼ · paramsʲ
std::vector<Vector> consensus_step(const Matrix& c, const std::vector<Vector>& params);

/// Same as consensus_step, writing into `out` (resized as needed).
void consensus_step_into(const Matrix& c, const std::vector<Vector>& params, std::vector<Vector>& out);

/// ‖params − 1 ⊗ mean(params)‖₂ over the stacked vectors.
double disagreement_norm(const std::vector<Vector>& params);

struct RandomMatrixReport {
  double spectral_norm = 0.0;    // of the Monte-Carlo mean of Cᵀ(I − 11ᵀ/N)C
  double row_residual = 0.0;     // worst per-sample |C·1 − 1|
  double column_residual = 0.0;  // |1ᵀ E[C] − 1ᵀ| for the sample mean
  double min_positive = 1.0;     // smallest positive entry seen
  bool respects_graph = true;
  std::size_t samples = 0;
  bool violated = false;         // spectral norm ≥ 1 − 1e-6, or any clause broken
};

RandomMatrixReport check_assumption_random_matrices(GraphProcess process, std::size_t samples);

}  // namespace netdac
