#pragma once

#include <memory>
#include <span>
#include <vector>

#include "hsparse/hypergraph.hpp"
#include "hsparse/laplacian.hpp"

namespace hsparse {

struct BalanceOptions;
struct BalanceResult;

/// Per-(hyperedge, pair) conductances c_ij^e with sum over (e choose 2) equal
/// to w_e. Coordinates are laid out like CliqueExpansion::edge_pairs; the
/// layout is shared between copies.
class ConductanceSplit {
 public:
  /// Validates nonnegativity and the per-edge sums (1e-9 relative).
  static ConductanceSplit from_values(const Hypergraph& h, std::shared_ptr<const CliqueExpansion> layout,
                                      std::vector<double> values);

  const CliqueExpansion& layout() const noexcept { return *layout_; }
  std::shared_ptr<const CliqueExpansion> shared_layout() const noexcept { return layout_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> of_edge(std::size_t e) const {
    return std::span<const double>(values_).subspan(layout_->edge_offsets[e],
                                                    layout_->edge_offsets[e + 1] - layout_->edge_offsets[e]);
  }

  /// c_ij = sum over hyperedges containing {i,j} of c_ij^e.
  Conductances aggregate() const;

 private:
  ConductanceSplit(std::shared_ptr<const CliqueExpansion> layout, std::vector<double> values)
      : layout_(std::move(layout)), values_(std::move(values)) {}

  std::shared_ptr<const CliqueExpansion> layout_;
  std::vector<double> values_;

  friend ConductanceSplit initialize_split(const Hypergraph& h);
  friend BalanceResult balance(const Hypergraph& h, const BalanceOptions& options);
};

/// c_ij^e = w_e / |(e choose 2)|.
ConductanceSplit initialize_split(const Hypergraph& h);

/// -log det(L(c) + J) for aggregate conductances c. Throws SingularMatrix
/// when L(c) + J is not positive definite (disconnected support).
double log_det_objective(int n, const Conductances& c);

/// Phi(s) = -log det(L_G + J) of the aggregate of `s`.
double objective(const Hypergraph& h, const ConductanceSplit& s);

/// d Phi / d c_ij^e = -R_ij, one entry per split coordinate.
std::vector<double> gradient(const Hypergraph& h, const ConductanceSplit& s);

/// Per-pair effective resistances of the aggregate conductances, indexed like
/// CliqueExpansion::pairs, computed from (L + J)^{-1}.
std::vector<double> pair_resistances(const Hypergraph& h, const ConductanceSplit& s);

/// K = max over e and supported pairs (c_ij^e > support_eps * w_e) of
/// R_max(e) / R_ij. Always >= 1.
double kkt_residual(const Hypergraph& h, const ConductanceSplit& s, double support_eps = 1e-6);

struct BalanceOptions {
  double tol = 1e-2;
  int max_iters = 500;
  double support_eps = 1e-6;
  double floor = 1e-12;  // coordinates never drop below floor * w_e
};

struct BalanceReport {
  int iterations = 0;
  std::vector<double> objective_trace;  // Phi of the initial point and every accepted step
  double final_k = 0.0;
  double final_z = 0.0;
  // Balanced resistance level of each hyperedge (R_max(e)); the KKT
  // multiplier of the edge's sum constraint at an exact optimum.
  std::vector<double> alpha;
  // R_max(e) - R_ij on coordinates at or below the support threshold, zero
  // elsewhere; the complementary multipliers at an exact optimum.
  std::vector<double> zero_mass_slack;
  double support_eps = 0.0;
  bool converged = false;
  bool stalled = false;  // line search could not make progress
};

struct BalanceResult {
  ConductanceSplit split;
  BalanceReport report;
};

/// Minimizes Phi over the product of per-edge simplices by exponentiated
/// gradient with backtracking. Stops once K <= 1 + tol. When max_iters runs
/// out first the best iterate is returned with report.converged == false.
/// Throws Disconnected if the clique expansion is disconnected.
BalanceResult balance(const Hypergraph& h, const BalanceOptions& options = {});

}  // namespace hsparse
