#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hsparse/balancer.hpp"
#include "hsparse/hypergraph.hpp"
#include "hsparse/rng.hpp"
#include "hsparse/sampler.hpp"

namespace hsparse {

/// |Q_H(x) - Q_Ht(x)| / Q_H(x). Throws ZeroEnergyDirection when Q_H(x) == 0.
double relative_error(const Hypergraph& h, const Hypergraph& sparse, std::span<const double> x);

enum class DirectionClass { None, Random, Cut };
std::string_view to_string(DirectionClass c);

/// Empirical epsilon: a lower bound on the true sparsifier error, taken as
/// the max relative error over the directions actually tested.
struct ErrorReport {
  double max_relative_error = 0.0;
  DirectionClass argmax = DirectionClass::None;
  std::int64_t num_directions = 0;  // directions with Q_H(x) > 0 that were scored
  bool exhaustive_cuts = false;
  std::optional<double> cut_error;  // set when exhaustive_cuts
};

inline constexpr int kMaxExhaustiveCutVertices = 16;

/// Max relative error over `num_random` Gaussian directions projected onto
/// the complement of the all-ones vector, plus every nonconstant cut when
/// n <= 16. Deterministic per seed.
ErrorReport empirical_epsilon(const Hypergraph& h, const Hypergraph& sparse, std::int64_t num_random, Seed seed);

/// A fixed direction set with Q_H precomputed, for scoring many candidate
/// sparsifiers of the same H against identical directions.
class DirectionProbe {
 public:
  DirectionProbe(const Hypergraph& h, std::int64_t num_random, Seed seed, bool include_cuts);

  ErrorReport evaluate(const Hypergraph& sparse) const;
  std::int64_t num_random() const noexcept { return random_.cols(); }

 private:
  int n_ = 0;
  DirectionMatrix random_;
  Eigen::VectorXd random_energy_;
  DirectionMatrix cuts_;
  Eigen::VectorXd cut_energy_;
  bool has_cuts_ = false;
};

/// Max relative error over all nonconstant x in {-1, 1}^n, each cut counted
/// once (x and -x give the same energies). Throws TooLarge for n > 16.
double cut_error_exhaustive(const Hypergraph& h, const Hypergraph& sparse);

struct NormDominationResult {
  bool holds = true;
  double worst_ratio = 0.0;  // max ||x||^2 / Q_H(L^{+/2} x)
  int trials = 0;
};

/// Checks ||x||^2 <= Q_H(L^{+/2} x) (to 1e-8 relative) on random x orthogonal
/// to the all-ones vector, L built from the split's aggregate conductances.
NormDominationResult norm_domination_check(const Hypergraph& h, const ConductanceSplit& split, int trials,
                                           Seed seed);

struct ChainingDiagnostics {
  double kappa = 0.0;            // E max_k N_k(g)
  double kappa_se = 0.0;
  double lambda = 0.0;           // max_k (E N_k(g)^2)^{1/2}
  double lambda_se = 0.0;
  double max_mean_norm = 0.0;    // max_k E N_k(g); kappa dominates it pathwise
  double a_two_to_inf = 0.0;     // ||A||_{2 -> inf}, exact
  double z = 0.0;
  bool a_bound_holds = false;    // ||A||^2 <= Z (1 + 1e-9)
  int num_gaussians = 0;
  std::size_t num_norms = 0;
};

/// Gaussian estimates of the norm statistics of the sampled edges, where
/// N_k(x) = max over pairs {i,j} in e_k of |<x, y_ij^{e_k}>| and
/// y_ij^e = sqrt(Z / R_max(e)) L^{+/2}(chi_i - chi_j). Repeated edges are
/// collapsed; neither the max nor the second-moment max depends on them.
ChainingDiagnostics chaining_diagnostics(const Hypergraph& h, const ConductanceSplit& split,
                                         const SamplingPlan& plan, std::span<const std::size_t> sampled_edges,
                                         int num_gaussians, Seed seed);

struct UnbiasednessResult {
  bool passed = false;
  double z_score = 0.0;
  double expected = 0.0;  // Q_H(x)
  double mean = 0.0;      // mean of Q_Ht(x) across trials
  double std_error = 0.0;
};

/// Draws `trials` independent sparsifiers of size M and tests whether the
/// mean of Q_Ht(x) lies within 3 standard errors of Q_H(x).
UnbiasednessResult unbiasedness_check(const Hypergraph& h, const SamplingPlan& plan, std::int64_t m, int trials,
                                      std::span<const double> x, Seed seed);

/// Symmetrized sign process for a fixed sample: mean over sign draws of
/// max over tested directions (normalized to Q_H(x) = 1) of
/// (1/M) sum_k eps_k (w_{e_k} / mu_{e_k}) Q_{e_k}(x). Reported only.
struct SignProcessDiagnostic {
  double mean_sup = 0.0;
  double std_error = 0.0;
  int sign_draws = 0;
  int directions = 0;
};

SignProcessDiagnostic sign_process_diagnostic(const Hypergraph& h, const SamplingPlan& plan,
                                              const Sparsifier& sample, int sign_draws, int directions, Seed seed);

}  // namespace hsparse
