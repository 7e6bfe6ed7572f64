#include "hsparse/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hsparse/error.hpp"
#include "hsparse/laplacian.hpp"

namespace hsparse {

namespace {

void require_same_vertices(const Hypergraph& h, const Hypergraph& sparse) {
  if (h.num_vertices() != sparse.num_vertices()) {
    throw Error(ErrorCode::DimensionMismatch, "hypergraphs have different vertex counts");
  }
}

// Standard Gaussian vector with its mean removed.
void centered_gaussian(Rng& rng, std::vector<double>& x) {
  std::normal_distribution<double> normal;
  double mean = 0.0;
  for (auto& v : x) mean += v = normal(rng);
  mean /= static_cast<double>(x.size());
  for (auto& v : x) v -= mean;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  MeanSe out;
  for (double s : samples) out.mean += s;
  out.mean /= n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double s : samples) ss += (s - out.mean) * (s - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

// Runs `score` on every nonconstant cut, with the last vertex pinned to -1
// so each cut appears once.
template <typename Score>
void for_each_cut(int n, Score&& score) {
  std::vector<double> x(static_cast<std::size_t>(n));
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    for (int v = 0; v + 1 < n; ++v) x[v] = (mask >> v) & 1u ? 1.0 : -1.0;
    x[n - 1] = -1.0;
    score(x);
  }
}

}  // namespace

std::string_view to_string(DirectionClass c) {
  switch (c) {
    case DirectionClass::None: return "none";
    case DirectionClass::Random: return "random";
    case DirectionClass::Cut: return "cut";
  }
  return "none";
}

double relative_error(const Hypergraph& h, const Hypergraph& sparse, std::span<const double> x) {
  require_same_vertices(h, sparse);
  const double q = total_energy(h, x);
  if (!(q > 0.0)) throw Error(ErrorCode::ZeroEnergyDirection, "Q_H(x) = 0; relative error undefined");
  return std::abs(q - total_energy(sparse, x)) / q;
}

double cut_error_exhaustive(const Hypergraph& h, const Hypergraph& sparse) {
  require_same_vertices(h, sparse);
  const int n = h.num_vertices();
  if (n > kMaxExhaustiveCutVertices) {
    throw Error(ErrorCode::TooLarge, "exhaustive cut enumeration limited to n <= 16");
  }
  double worst = 0.0;
  if (n < 2) return worst;
  for_each_cut(n, [&](const std::vector<double>& x) {
    const double q = total_energy(h, x);
    if (q > 0.0) worst = std::max(worst, std::abs(q - total_energy(sparse, x)) / q);
  });
  return worst;
}

DirectionProbe::DirectionProbe(const Hypergraph& h, std::int64_t num_random, Seed seed, bool include_cuts)
    : n_(h.num_vertices()) {
  if (num_random < 0) throw Error(ErrorCode::InvalidArgument, "num_random must be >= 0");
  Rng rng = make_rng(seed);
  std::vector<double> x(static_cast<std::size_t>(n_));
  random_.resize(n_, static_cast<Eigen::Index>(num_random));
  for (Eigen::Index t = 0; t < random_.cols(); ++t) {
    centered_gaussian(rng, x);
    for (int v = 0; v < n_; ++v) random_(v, t) = x[v];
  }
  random_energy_ = total_energy_batch(h, random_);

  if (include_cuts && n_ >= 2) {
    if (n_ > kMaxExhaustiveCutVertices) throw Error(ErrorCode::TooLarge, "exhaustive cuts limited to n <= 16");
    cuts_.resize(n_, (Eigen::Index{1} << (n_ - 1)) - 1);
    Eigen::Index col = 0;
    for_each_cut(n_, [&](const std::vector<double>& cut) {
      for (int v = 0; v < n_; ++v) cuts_(v, col) = cut[v];
      ++col;
    });
    cut_energy_ = total_energy_batch(h, cuts_);
    has_cuts_ = true;
  }
}

ErrorReport DirectionProbe::evaluate(const Hypergraph& sparse) const {
  if (sparse.num_vertices() != n_) throw Error(ErrorCode::DimensionMismatch, "hypergraphs have different vertex counts");
  ErrorReport report;
  const Eigen::VectorXd qs = total_energy_batch(sparse, random_);
  for (Eigen::Index t = 0; t < random_.cols(); ++t) {
    const double q = random_energy_(t);
    if (!(q > 0.0)) continue;
    const double err = std::abs(q - qs(t)) / q;
    ++report.num_directions;
    if (err > report.max_relative_error || report.argmax == DirectionClass::None) {
      report.max_relative_error = err;
      report.argmax = DirectionClass::Random;
    }
  }
  if (has_cuts_) {
    const Eigen::VectorXd cs = total_energy_batch(sparse, cuts_);
    double worst = 0.0;
    for (Eigen::Index t = 0; t < cuts_.cols(); ++t) {
      const double q = cut_energy_(t);
      if (!(q > 0.0)) continue;
      ++report.num_directions;
      worst = std::max(worst, std::abs(q - cs(t)) / q);
    }
    report.exhaustive_cuts = true;
    report.cut_error = worst;
    if (worst > report.max_relative_error || report.argmax == DirectionClass::None) {
      report.max_relative_error = worst;
      report.argmax = DirectionClass::Cut;
    }
  }
  return report;
}

ErrorReport empirical_epsilon(const Hypergraph& h, const Hypergraph& sparse, std::int64_t num_random, Seed seed) {
  require_same_vertices(h, sparse);
  if (num_random < 1) throw Error(ErrorCode::InvalidArgument, "num_random must be >= 1");
  const bool cuts = h.num_vertices() >= 2 && h.num_vertices() <= kMaxExhaustiveCutVertices;
  return DirectionProbe(h, num_random, seed, cuts).evaluate(sparse);
}

NormDominationResult norm_domination_check(const Hypergraph& h, const ConductanceSplit& split, int trials,
                                           Seed seed) {
  const auto lap = build_laplacian(h.num_vertices(), split.aggregate());
  if (!lap.connected()) throw Error(ErrorCode::Disconnected, "conductance support is disconnected");

  NormDominationResult result;
  Rng rng = make_rng(seed);
  std::vector<double> x(static_cast<std::size_t>(h.num_vertices()));
  for (int t = 0; t < trials; ++t) {
    centered_gaussian(rng, x);
    double norm_sq = 0.0;
    for (double v : x) norm_sq += v * v;
    if (!(norm_sq > 0.0)) continue;
    const auto v = lap.pinv_sqrt_apply(x);
    const double ratio = norm_sq / total_energy(h, v);
    result.worst_ratio = std::max(result.worst_ratio, ratio);
    if (!(ratio <= 1.0 + 1e-8)) result.holds = false;
    ++result.trials;
  }
  return result;
}

ChainingDiagnostics chaining_diagnostics(const Hypergraph& h, const ConductanceSplit& split,
                                         const SamplingPlan& plan, std::span<const std::size_t> sampled_edges,
                                         int num_gaussians, Seed seed) {
  if (num_gaussians < 2) throw Error(ErrorCode::InvalidArgument, "need at least two Gaussian samples");
  const int n = h.num_vertices();
  const auto lap = build_laplacian(n, split.aggregate());
  if (!lap.connected()) throw Error(ErrorCode::Disconnected, "conductance support is disconnected");
  const auto& root = lap.pseudoinverse_sqrt();

  ChainingDiagnostics diag;
  diag.z = plan.z;
  diag.num_gaussians = num_gaussians;

  // ||A||_{2->inf} = max over all hyperedges and their pairs of ||y_ij^e||.
  double a_sq = 0.0;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto& verts = h.edge(e).vertices;
    const double scale = plan.z / plan.r_max[e];
    for (std::size_t a = 0; a < verts.size(); ++a) {
      for (std::size_t b = a + 1; b < verts.size(); ++b) {
        a_sq = std::max(a_sq, scale * (root.col(verts[a]) - root.col(verts[b])).squaredNorm());
      }
    }
  }
  diag.a_two_to_inf = std::sqrt(a_sq);
  diag.a_bound_holds = a_sq <= plan.z * (1.0 + 1e-9);

  std::vector<std::size_t> edges(sampled_edges.begin(), sampled_edges.end());
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  diag.num_norms = edges.size();
  if (edges.empty()) return diag;

  std::vector<double> weight(edges.size());
  for (std::size_t k = 0; k < edges.size(); ++k) weight[k] = std::sqrt(plan.z / plan.r_max[edges[k]]);

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd g(n);
  std::vector<double> maxima(static_cast<std::size_t>(num_gaussians));
  Eigen::MatrixXd squares(static_cast<Eigen::Index>(edges.size()), num_gaussians);
  Eigen::VectorXd norm_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(edges.size()));
  for (int t = 0; t < num_gaussians; ++t) {
    for (int v = 0; v < n; ++v) g(v) = normal(rng);
    // <g, y_ij^e> = weight_e (u_i - u_j) with u = L^{+/2} g.
    const Eigen::VectorXd u = root * g;
    double best = 0.0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& verts = h.edge(edges[k]).vertices;
      double lo = u(verts[0]);
      double hi = lo;
      for (Vertex v : verts) {
        lo = std::min(lo, u(v));
        hi = std::max(hi, u(v));
      }
      const double norm = weight[k] * (hi - lo);
      squares(static_cast<Eigen::Index>(k), t) = norm * norm;
      norm_sum(static_cast<Eigen::Index>(k)) += norm;
      best = std::max(best, norm);
    }
    maxima[t] = best;
  }

  const auto kappa = mean_and_se(maxima);
  diag.kappa = kappa.mean;
  diag.kappa_se = kappa.se;
  diag.max_mean_norm = norm_sum.maxCoeff() / num_gaussians;

  Eigen::Index top = 0;
  squares.rowwise().mean().maxCoeff(&top);
  std::vector<double> top_row(static_cast<std::size_t>(num_gaussians));
  for (int t = 0; t < num_gaussians; ++t) top_row[t] = squares(top, t);
  const auto moment = mean_and_se(top_row);
  diag.lambda = std::sqrt(moment.mean);
  // Delta method: d sqrt(m) = dm / (2 sqrt(m)).
  diag.lambda_se = diag.lambda > 0.0 ? moment.se / (2.0 * diag.lambda) : 0.0;
  return diag;
}

UnbiasednessResult unbiasedness_check(const Hypergraph& h, const SamplingPlan& plan, std::int64_t m, int trials,
                                      std::span<const double> x, Seed seed) {
  if (trials < 30) throw Error(ErrorCode::InvalidArgument, "unbiasedness check needs at least 30 trials");
  UnbiasednessResult result;
  result.expected = total_energy(h, x);
  if (!(result.expected > 0.0)) throw Error(ErrorCode::ZeroEnergyDirection, "Q_H(x) = 0");

  std::vector<double> values(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    values[t] = sparsifier_energy(h, draw(h, plan, m, derive_seed(seed, static_cast<std::uint64_t>(t))), x);
  }
  const auto stats = mean_and_se(values);
  result.mean = stats.mean;
  result.std_error = stats.se;
  const double diff = stats.mean - result.expected;
  if (stats.se > 0.0) {
    result.z_score = diff / stats.se;
  } else {
    // Zero variance: the estimator is either exact or certainly biased.
    const bool exact = std::abs(diff) <= 1e-12 * result.expected;
    result.z_score = exact ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  result.passed = std::abs(result.z_score) <= 3.0;
  return result;
}

SignProcessDiagnostic sign_process_diagnostic(const Hypergraph& h, const SamplingPlan& plan,
                                              const Sparsifier& sample, int sign_draws, int directions, Seed seed) {
  if (sign_draws < 2 || directions < 1) throw Error(ErrorCode::InvalidArgument, "need >= 2 sign draws, >= 1 direction");
  const std::size_t distinct = sample.edges.size();
  Rng rng = make_rng(seed);

  // Per direction, the scaled edge energies (w_e / mu_e) Q_e(x) / Q_H(x).
  Eigen::MatrixXd terms(directions, static_cast<Eigen::Index>(distinct));
  std::vector<double> x(static_cast<std::size_t>(h.num_vertices()));
  int kept = 0;
  while (kept < directions) {
    centered_gaussian(rng, x);
    const double q = total_energy(h, x);
    if (!(q > 0.0)) continue;
    for (std::size_t k = 0; k < distinct; ++k) {
      const auto e = sample.edges[k].edge;
      terms(kept, static_cast<Eigen::Index>(k)) = h.edge(e).weight / plan.mu[e] * edge_energy(h.edge(e), x) / q;
    }
    ++kept;
  }

  std::vector<double> sups(static_cast<std::size_t>(sign_draws));
  Eigen::VectorXd signed_counts(static_cast<Eigen::Index>(distinct));
  for (int s = 0; s < sign_draws; ++s) {
    for (std::size_t k = 0; k < distinct; ++k) {
      // Sum of `count` independent signs is 2 Bin(count, 1/2) - count.
      std::binomial_distribution<std::int64_t> heads(sample.edges[k].count, 0.5);
      signed_counts(static_cast<Eigen::Index>(k)) = static_cast<double>(2 * heads(rng) - sample.edges[k].count);
    }
    sups[s] = (terms * signed_counts).maxCoeff() / static_cast<double>(sample.samples);
  }
  const auto stats = mean_and_se(sups);
  return {stats.mean, stats.se, sign_draws, directions};
}

}  // namespace hsparse
