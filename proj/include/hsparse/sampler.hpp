#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hsparse/balancer.hpp"
#include "hsparse/hypergraph.hpp"
#include "hsparse/rng.hpp"

namespace hsparse {

/// Importance distribution over hyperedges: mu_e = w_e R_max(e) / Z.
struct SamplingPlan {
  std::vector<double> pair_resistance;  // indexed like CliqueExpansion::pairs
  std::vector<double> r_max;            // per hyperedge
  double z = 0.0;
  std::vector<double> mu;               // per hyperedge
};

/// Resistances come from the pseudoinverse of L_G(c) for the aggregate of
/// `split`. Throws Disconnected if that support is disconnected.
SamplingPlan build_plan(const Hypergraph& h, const ConductanceSplit& split);

inline constexpr double kDefaultConstantC = 8.0;

/// M = ceil(C eps^-2 ln(2D) Z ln(max(n, 3))).
std::int64_t sample_count(int n, int rank, double z, double epsilon, double constant_c = kDefaultConstantC);

struct SampledEdge {
  std::size_t edge = 0;     // index into the source hypergraph
  std::int64_t count = 0;   // times drawn, >= 1
  double weight = 0.0;      // (count / M) (w_e / mu_e)
};

struct Sparsifier {
  int n = 0;
  std::int64_t samples = 0;  // M
  Seed seed = 0;
  std::vector<SampledEdge> edges;  // ascending source index

  std::size_t distinct_edges() const noexcept { return edges.size(); }
  /// The sparsifier as a hypergraph on the same vertex set.
  Hypergraph to_hypergraph(const Hypergraph& source) const;
};

/// M i.i.d. draws from plan.mu (taken proportionally, so an unnormalized
/// plan still samples but reweights by the values given).
Sparsifier draw(const Hypergraph& h, const SamplingPlan& plan, std::int64_t m, Seed seed);

/// Q of the sparsifier without materializing it as a Hypergraph.
double sparsifier_energy(const Hypergraph& h, const Sparsifier& s, std::span<const double> x);

}  // namespace hsparse
