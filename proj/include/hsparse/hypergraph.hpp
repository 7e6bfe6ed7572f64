#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hsparse/rng.hpp"

namespace hsparse {

using Vertex = int;

struct Hyperedge {
  std::vector<Vertex> vertices;  // sorted ascending, distinct
  double weight = 0.0;

  std::size_t size() const noexcept { return vertices.size(); }
  bool operator==(const Hyperedge&) const = default;
};

/// Unvalidated hyperedge as read from a file or built by hand.
struct RawHyperedge {
  std::vector<Vertex> vertices;
  double weight = 0.0;
};

/// Weighted hypergraph on vertices [0, n). Immutable once built; the only
/// way to obtain one is through validate(), so every instance satisfies:
/// |e| >= 2, w_e > 0, vertex ids distinct within an edge and in range.
/// Duplicate hyperedges (same vertex set) are kept as distinct edges.
class Hypergraph {
 public:
  static Hypergraph validate(int n, std::vector<RawHyperedge> edges);

  int num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Hyperedge>& edges() const noexcept { return edges_; }
  const Hyperedge& edge(std::size_t e) const { return edges_.at(e); }

  /// Rank D = max |e|; zero for an edgeless hypergraph.
  int rank() const noexcept { return rank_; }
  double total_weight() const noexcept;

  /// Same vertex sets, weights multiplied by `factor` (> 0).
  Hypergraph scaled(double factor) const;
  /// Same vertex sets, weights replaced (must be positive, one per edge).
  Hypergraph reweighted(std::span<const double> weights) const;

  bool operator==(const Hypergraph&) const = default;

 private:
  Hypergraph(int n, std::vector<Hyperedge> edges);

  int n_ = 0;
  std::vector<Hyperedge> edges_;
  int rank_ = 0;
};

/// Potential x in R^V. Length is checked against n at each use.
using VertexAssignment = std::vector<double>;

struct VertexPair {
  Vertex i = 0;  // i < j
  Vertex j = 0;
  bool operator==(const VertexPair&) const = default;
  auto operator<=>(const VertexPair&) const = default;
};

/// The pair set F of the clique expansion plus the incidence bookkeeping the
/// balancer and sampler need.
struct CliqueExpansion {
  int n = 0;
  std::vector<VertexPair> pairs;                   // deduplicated, sorted
  std::vector<std::vector<std::size_t>> pair_edges;  // pair -> hyperedges containing it
  // Per hyperedge, the pairs of (e choose 2) in lexicographic order of the
  // sorted vertex list, given as indices into `pairs`. Flattened: the pairs
  // of edge e are edge_pairs[edge_offsets[e] .. edge_offsets[e+1]).
  std::vector<std::size_t> edge_offsets;
  std::vector<std::size_t> edge_pairs;

  std::size_t num_pairs() const noexcept { return pairs.size(); }
  std::size_t num_edges() const noexcept { return edge_offsets.empty() ? 0 : edge_offsets.size() - 1; }
  std::span<const std::size_t> pairs_of(std::size_t e) const {
    return {edge_pairs.data() + edge_offsets[e], edge_offsets[e + 1] - edge_offsets[e]};
  }
};

/// Q_e(x) = max over pairs in e of (x_i - x_j)^2.
double edge_energy(const Hyperedge& e, std::span<const double> x);

/// Q_H(x) = sum_e w_e Q_e(x).
double total_energy(const Hypergraph& h, std::span<const double> x);

using DirectionMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Q_H for a batch of assignments: row v holds vertex v, one column per
/// assignment.
Eigen::VectorXd total_energy_batch(const Hypergraph& h, const DirectionMatrix& x);

CliqueExpansion clique_expansion(const Hypergraph& h);

/// Number of connected components of the clique expansion.
int count_components(const Hypergraph& h);

struct GeneratorParams {
  int n = 0;
  int m = 0;
  int max_cardinality = 2;
  double weight_lo = 1.0;
  double weight_hi = 1.0;
  Seed seed = 0;
};

struct GeneratedHypergraph {
  Hypergraph hypergraph;
  // Number of spanning-path edges {k, k+1} appended because the random
  // draw left the clique expansion disconnected.
  int connecting_edges_added = 0;
};

/// Random hypergraph: m edges, |e| uniform on [2, D], vertices drawn without
/// replacement, weights uniform on [lo, hi]. If the clique expansion comes
/// out disconnected, cardinality-2 bridge edges (weight drawn from the same
/// range) are appended, chaining consecutive components into one.
GeneratedHypergraph random_hypergraph(const GeneratorParams& params);

}  // namespace hsparse
