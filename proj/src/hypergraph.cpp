#include "hsparse/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "hsparse/error.hpp"

namespace hsparse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingletonEdge: return "SingletonEdge";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::VertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::DuplicateVertexInEdge: return "DuplicateVertexInEdge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InfeasibleParameters: return "InfeasibleParameters";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DisconnectedPair: return "DisconnectedPair";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::ZeroEnergyDirection: return "ZeroEnergyDirection";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<int> parent_;
};

void check_dimension(const Hypergraph& h, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(h.num_vertices())) {
    throw Error(ErrorCode::DimensionMismatch, "assignment has length " + std::to_string(x.size()) +
                                                  ", hypergraph has " +
                                                  std::to_string(h.num_vertices()) + " vertices");
  }
}

}  // namespace

Hypergraph::Hypergraph(int n, std::vector<Hyperedge> edges) : n_(n), edges_(std::move(edges)) {
  for (const auto& e : edges_) rank_ = std::max(rank_, static_cast<int>(e.size()));
}

Hypergraph Hypergraph::validate(int n, std::vector<RawHyperedge> raw) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "vertex count must be >= 1");
  std::vector<Hyperedge> edges;
  edges.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    auto& r = raw[k];
    const auto where = " (edge " + std::to_string(k) + ")";
    if (r.vertices.size() < 2) throw Error(ErrorCode::SingletonEdge, "hyperedge needs >= 2 vertices" + where);
    if (!(r.weight > 0.0) || !std::isfinite(r.weight)) {
      throw Error(ErrorCode::NonpositiveWeight, "weight must be positive and finite" + where);
    }
    for (Vertex v : r.vertices) {
      if (v < 0 || v >= n) throw Error(ErrorCode::VertexOutOfRange, "vertex " + std::to_string(v) + where);
    }
    std::sort(r.vertices.begin(), r.vertices.end());
    if (std::adjacent_find(r.vertices.begin(), r.vertices.end()) != r.vertices.end()) {
      throw Error(ErrorCode::DuplicateVertexInEdge, "repeated vertex" + where);
    }
    edges.push_back(Hyperedge{std::move(r.vertices), r.weight});
  }
  return Hypergraph(n, std::move(edges));
}

double Hypergraph::total_weight() const noexcept {
  double s = 0.0;
  for (const auto& e : edges_) s += e.weight;
  return s;
}

Hypergraph Hypergraph::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
  auto edges = edges_;
  for (auto& e : edges) e.weight *= factor;
  return Hypergraph(n_, std::move(edges));
}

Hypergraph Hypergraph::reweighted(std::span<const double> weights) const {
  if (weights.size() != edges_.size()) throw Error(ErrorCode::DimensionMismatch, "one weight per edge required");
  std::vector<RawHyperedge> raw;
  raw.reserve(edges_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) raw.push_back({edges_[e].vertices, weights[e]});
  return validate(n_, std::move(raw));
}

double edge_energy(const Hyperedge& e, std::span<const double> x) {
  // The largest pairwise gap is attained by the extreme values.
  double lo = x[e.vertices.front()];
  double hi = lo;
  for (Vertex v : e.vertices) {
    lo = std::min(lo, x[v]);
    hi = std::max(hi, x[v]);
  }
  const double gap = hi - lo;
  return gap * gap;
}

double total_energy(const Hypergraph& h, std::span<const double> x) {
  check_dimension(h, x);
  double q = 0.0;
  for (const auto& e : h.edges()) q += e.weight * edge_energy(e, x);
  return q;
}

Eigen::VectorXd total_energy_batch(const Hypergraph& h, const DirectionMatrix& x) {
  if (x.rows() != h.num_vertices()) throw Error(ErrorCode::DimensionMismatch, "direction matrix has wrong row count");
  Eigen::ArrayXd q = Eigen::ArrayXd::Zero(x.cols());
  Eigen::ArrayXd lo(x.cols());
  Eigen::ArrayXd hi(x.cols());
  for (const auto& e : h.edges()) {
    lo = x.row(e.vertices.front()).array().transpose();
    hi = lo;
    for (std::size_t a = 1; a < e.size(); ++a) {
      const auto row = x.row(e.vertices[a]).array().transpose();
      lo = lo.min(row);
      hi = hi.max(row);
    }
    q += e.weight * (hi - lo).square();
  }
  return q.matrix();
}

CliqueExpansion clique_expansion(const Hypergraph& h) {
  CliqueExpansion out;
  out.n = h.num_vertices();

  std::map<VertexPair, std::size_t> index;
  for (const auto& e : h.edges()) {
    for (std::size_t a = 0; a < e.size(); ++a) {
      for (std::size_t b = a + 1; b < e.size(); ++b) index.emplace(VertexPair{e.vertices[a], e.vertices[b]}, 0);
    }
  }
  out.pairs.reserve(index.size());
  for (auto& [pair, idx] : index) {
    idx = out.pairs.size();
    out.pairs.push_back(pair);
  }
  out.pair_edges.resize(out.pairs.size());

  out.edge_offsets.reserve(h.num_edges() + 1);
  out.edge_offsets.push_back(0);
  for (std::size_t k = 0; k < h.num_edges(); ++k) {
    const auto& e = h.edge(k);
    for (std::size_t a = 0; a < e.size(); ++a) {
      for (std::size_t b = a + 1; b < e.size(); ++b) {
        const std::size_t p = index.at(VertexPair{e.vertices[a], e.vertices[b]});
        out.edge_pairs.push_back(p);
        if (out.pair_edges[p].empty() || out.pair_edges[p].back() != k) out.pair_edges[p].push_back(k);
      }
    }
    out.edge_offsets.push_back(out.edge_pairs.size());
  }
  return out;
}

int count_components(const Hypergraph& h) {
  UnionFind uf(h.num_vertices());
  int components = h.num_vertices();
  for (const auto& e : h.edges()) {
    for (std::size_t a = 1; a < e.size(); ++a) {
      if (uf.unite(e.vertices[0], e.vertices[a])) --components;
    }
  }
  return components;
}

GeneratedHypergraph random_hypergraph(const GeneratorParams& p) {
  if (p.max_cardinality < 2 || p.n < p.max_cardinality || p.m < 1) {
    throw Error(ErrorCode::InfeasibleParameters, "need n >= D >= 2 and m >= 1");
  }
  if (!(p.weight_lo > 0.0) || p.weight_hi < p.weight_lo) {
    throw Error(ErrorCode::InfeasibleParameters, "weight range must be a positive interval");
  }

  Rng rng = make_rng(p.seed);
  std::uniform_int_distribution<int> card(2, p.max_cardinality);
  std::uniform_real_distribution<double> weight(p.weight_lo, p.weight_hi);
  auto draw_weight = [&] { return p.weight_lo == p.weight_hi ? p.weight_lo : weight(rng); };

  std::vector<int> perm(static_cast<std::size_t>(p.n));
  std::vector<RawHyperedge> raw;
  raw.reserve(static_cast<std::size_t>(p.m));
  for (int k = 0; k < p.m; ++k) {
    const int size = card(rng);
    // Partial Fisher-Yates: the first `size` entries are a uniform subset.
    std::iota(perm.begin(), perm.end(), 0);
    for (int a = 0; a < size; ++a) {
      std::uniform_int_distribution<int> pick(a, p.n - 1);
      std::swap(perm[a], perm[pick(rng)]);
    }
    raw.push_back({std::vector<Vertex>(perm.begin(), perm.begin() + size), draw_weight()});
  }

  UnionFind uf(p.n);
  for (const auto& e : raw) {
    for (std::size_t a = 1; a < e.vertices.size(); ++a) uf.unite(e.vertices[0], e.vertices[a]);
  }
  int added = 0;
  for (int v = 1; v < p.n; ++v) {
    if (uf.find(v) != uf.find(0)) {
      // v is the smallest vertex outside 0's component; link it to v - 1.
      raw.push_back({{v - 1, v}, draw_weight()});
      uf.unite(0, v);
      ++added;
    }
  }
  return {Hypergraph::validate(p.n, std::move(raw)), added};
}

}  // namespace hsparse
