#include "hsparse/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hsparse/error.hpp"
#include "hsparse/laplacian.hpp"

namespace hsparse {

SamplingPlan build_plan(const Hypergraph& h, const ConductanceSplit& split) {
  const auto aggregate = split.aggregate();
  const auto lap = build_laplacian(h.num_vertices(), aggregate);
  if (!lap.connected()) throw Error(ErrorCode::Disconnected, "conductance support is disconnected");

  const auto& layout = split.layout();
  SamplingPlan plan;
  plan.pair_resistance.resize(layout.num_pairs());
  for (std::size_t p = 0; p < layout.num_pairs(); ++p) {
    plan.pair_resistance[p] = lap.effective_resistance(layout.pairs[p].i, layout.pairs[p].j);
  }
  plan.r_max.resize(h.num_edges());
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    double best = 0.0;
    for (std::size_t p : layout.pairs_of(e)) best = std::max(best, plan.pair_resistance[p]);
    plan.r_max[e] = best;
    plan.z += h.edge(e).weight * best;
  }
  plan.mu.resize(h.num_edges());
  for (std::size_t e = 0; e < h.num_edges(); ++e) plan.mu[e] = h.edge(e).weight * plan.r_max[e] / plan.z;
  return plan;
}

std::int64_t sample_count(int n, int rank, double z, double epsilon, double constant_c) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  if (n < 2 || rank < 2 || !(z > 0.0) || !(constant_c > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sample_count needs n >= 2, D >= 2, Z > 0, C > 0");
  }
  const double m = constant_c / (epsilon * epsilon) * std::log(2.0 * rank) * z * std::log(std::max(n, 3));
  return static_cast<std::int64_t>(std::ceil(m));
}

Sparsifier draw(const Hypergraph& h, const SamplingPlan& plan, std::int64_t m, Seed seed) {
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "sample count must be >= 1");
  if (plan.mu.size() != h.num_edges()) throw Error(ErrorCode::DimensionMismatch, "plan does not match hypergraph");

  Rng rng = make_rng(seed);
  std::discrete_distribution<std::size_t> pick(plan.mu.begin(), plan.mu.end());
  std::vector<std::int64_t> counts(h.num_edges(), 0);
  for (std::int64_t k = 0; k < m; ++k) ++counts[pick(rng)];

  Sparsifier s;
  s.n = h.num_vertices();
  s.samples = m;
  s.seed = seed;
  for (std::size_t e = 0; e < counts.size(); ++e) {
    if (counts[e] == 0) continue;
    const double weight = static_cast<double>(counts[e]) / static_cast<double>(m) * (h.edge(e).weight / plan.mu[e]);
    s.edges.push_back({e, counts[e], weight});
  }
  return s;
}

Hypergraph Sparsifier::to_hypergraph(const Hypergraph& source) const {
  std::vector<RawHyperedge> raw;
  raw.reserve(edges.size());
  for (const auto& se : edges) raw.push_back({source.edge(se.edge).vertices, se.weight});
  return Hypergraph::validate(source.num_vertices(), std::move(raw));
}

double sparsifier_energy(const Hypergraph& h, const Sparsifier& s, std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(h.num_vertices())) {
    throw Error(ErrorCode::DimensionMismatch, "assignment length does not match vertex count");
  }
  double q = 0.0;
  for (const auto& se : s.edges) q += se.weight * edge_energy(h.edge(se.edge), x);
  return q;
}

}  // namespace hsparse
