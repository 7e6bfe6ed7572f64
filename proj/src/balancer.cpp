#include "hsparse/balancer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsparse/error.hpp"

namespace hsparse {

namespace {

Eigen::MatrixXd shifted_laplacian(int n, const Conductances& c) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto [i, j] = c.pairs[k];
    const double w = c.values[k];
    m(i, i) += w;
    m(j, j) += w;
    m(i, j) -= w;
    m(j, i) -= w;
  }
  return m;
}

// Cholesky factor of L + J; the one factorization yields both Phi and the
// resistances for a step.
struct Factored {
  double phi = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt;
};

Factored factor(int n, const Conductances& c) {
  Factored f;
  f.llt.compute(shifted_laplacian(n, c));
  if (f.llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularMatrix, "L + J is not positive definite; conductance support is disconnected");
  }
  const auto diag = f.llt.matrixLLT().diagonal();
  // Rounding can leave a tiny positive pivot where the matrix is singular;
  // treat pivots at the eigenvalue-zero cutoff scale as zero.
  const double top = diag.array().square().maxCoeff();
  if (diag.array().square().minCoeff() <= n * std::numeric_limits<double>::epsilon() * top) {
    throw Error(ErrorCode::SingularMatrix, "L + J is numerically singular; conductance support is disconnected");
  }
  double log_det = 0.0;
  for (int k = 0; k < n; ++k) log_det += std::log(diag(k));
  f.phi = -2.0 * log_det;
  if (!std::isfinite(f.phi)) throw Error(ErrorCode::SingularMatrix, "log det is not finite");
  return f;
}

std::vector<double> resistances(const Factored& f, int n, const CliqueExpansion& layout) {
  const Eigen::MatrixXd inv = f.llt.solve(Eigen::MatrixXd::Identity(n, n));
  std::vector<double> r(layout.num_pairs());
  for (std::size_t p = 0; p < r.size(); ++p) {
    const auto [i, j] = layout.pairs[p];
    r[p] = inv(i, i) + inv(j, j) - 2.0 * inv(i, j);
  }
  return r;
}

Conductances aggregate_values(const CliqueExpansion& layout, std::span<const double> values) {
  Conductances c{layout.pairs, std::vector<double>(layout.num_pairs(), 0.0)};
  for (std::size_t k = 0; k < values.size(); ++k) c.values[layout.edge_pairs[k]] += values[k];
  return c;
}

double max_resistance(const CliqueExpansion& layout, std::size_t e, const std::vector<double>& r) {
  double best = 0.0;
  for (std::size_t p : layout.pairs_of(e)) best = std::max(best, r[p]);
  return best;
}

double k_from_resistances(const Hypergraph& h, const CliqueExpansion& layout, std::span<const double> values,
                          const std::vector<double>& r, double support_eps) {
  double k = 1.0;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const double r_max = max_resistance(layout, e, r);
    const double threshold = support_eps * h.edge(e).weight;
    const auto begin = layout.edge_offsets[e];
    for (std::size_t q = begin; q < layout.edge_offsets[e + 1]; ++q) {
      if (values[q] > threshold) k = std::max(k, r_max / r[layout.edge_pairs[q]]);
    }
  }
  return k;
}

void require_layout(const Hypergraph& h, const ConductanceSplit& s) {
  if (s.layout().num_edges() != h.num_edges() || s.layout().n != h.num_vertices()) {
    throw Error(ErrorCode::DimensionMismatch, "split does not belong to this hypergraph");
  }
}

}  // namespace

ConductanceSplit ConductanceSplit::from_values(const Hypergraph& h, std::shared_ptr<const CliqueExpansion> layout,
                                               std::vector<double> values) {
  if (!layout || layout->num_edges() != h.num_edges() || values.size() != layout->edge_pairs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "split values do not match the hypergraph layout");
  }
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    double sum = 0.0;
    for (std::size_t q = layout->edge_offsets[e]; q < layout->edge_offsets[e + 1]; ++q) {
      if (!(values[q] >= 0.0)) throw Error(ErrorCode::InvalidArgument, "split coordinates must be nonnegative");
      sum += values[q];
    }
    const double w = h.edge(e).weight;
    if (std::abs(sum - w) > 1e-9 * w) {
      throw Error(ErrorCode::InvalidArgument, "split of edge " + std::to_string(e) + " does not sum to its weight");
    }
  }
  return ConductanceSplit(std::move(layout), std::move(values));
}

Conductances ConductanceSplit::aggregate() const { return aggregate_values(*layout_, values_); }

ConductanceSplit initialize_split(const Hypergraph& h) {
  auto layout = std::make_shared<const CliqueExpansion>(clique_expansion(h));
  std::vector<double> values(layout->edge_pairs.size());
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto begin = layout->edge_offsets[e];
    const auto end = layout->edge_offsets[e + 1];
    const double share = h.edge(e).weight / static_cast<double>(end - begin);
    std::fill(values.begin() + begin, values.begin() + end, share);
  }
  return ConductanceSplit(std::move(layout), std::move(values));
}

double log_det_objective(int n, const Conductances& c) { return factor(n, c).phi; }

double objective(const Hypergraph& h, const ConductanceSplit& s) {
  require_layout(h, s);
  return log_det_objective(h.num_vertices(), s.aggregate());
}

std::vector<double> pair_resistances(const Hypergraph& h, const ConductanceSplit& s) {
  require_layout(h, s);
  const int n = h.num_vertices();
  return resistances(factor(n, s.aggregate()), n, s.layout());
}

std::vector<double> gradient(const Hypergraph& h, const ConductanceSplit& s) {
  const auto r = pair_resistances(h, s);
  std::vector<double> g(s.values().size());
  for (std::size_t q = 0; q < g.size(); ++q) g[q] = -r[s.layout().edge_pairs[q]];
  return g;
}

double kkt_residual(const Hypergraph& h, const ConductanceSplit& s, double support_eps) {
  const auto r = pair_resistances(h, s);
  return k_from_resistances(h, s.layout(), s.values(), r, support_eps);
}

BalanceResult balance(const Hypergraph& h, const BalanceOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (options.max_iters < 0) throw Error(ErrorCode::InvalidArgument, "max_iters must be nonnegative");
  if (count_components(h) != 1) {
    throw Error(ErrorCode::Disconnected, "clique expansion is disconnected; no finite objective exists");
  }

  const int n = h.num_vertices();
  ConductanceSplit current = initialize_split(h);
  const CliqueExpansion& layout = current.layout();

  Factored f = factor(n, current.aggregate());
  std::vector<double> r = resistances(f, n, layout);

  BalanceReport report;
  report.support_eps = options.support_eps;
  report.objective_trace.push_back(f.phi);

  // Step size in units of the per-edge mean resistance; persists across
  // iterations so the backtracking only has to correct it occasionally.
  double step = 1.0;
  constexpr double kMinStep = 1e-10;
  constexpr double kMaxStep = 1e4;

  std::vector<double> trial(current.values_.size());
  std::vector<double> exponent;
  int iter = 0;
  for (;; ++iter) {
    const double k = k_from_resistances(h, layout, current.values_, r, options.support_eps);
    if (k <= 1.0 + options.tol) {
      report.converged = true;
      break;
    }
    if (iter >= options.max_iters) break;

    bool accepted = false;
    while (!accepted) {
      for (std::size_t e = 0; e < h.num_edges(); ++e) {
        const auto begin = layout.edge_offsets[e];
        const auto end = layout.edge_offsets[e + 1];
        const double w = h.edge(e).weight;

        double mean_r = 0.0;
        for (auto q = begin; q < end; ++q) mean_r += current.values_[q] * r[layout.edge_pairs[q]];
        mean_r /= w;

        // Multiplicative update on the simplex of mass w, normalized in log
        // space so large steps cannot overflow.
        exponent.resize(end - begin);
        double top = -std::numeric_limits<double>::infinity();
        for (auto q = begin; q < end; ++q) {
          const double x = std::log(current.values_[q]) + step * r[layout.edge_pairs[q]] / mean_r;
          exponent[q - begin] = x;
          top = std::max(top, x);
        }
        double sum = 0.0;
        for (auto q = begin; q < end; ++q) sum += trial[q] = std::exp(exponent[q - begin] - top);
        double clamped_sum = 0.0;
        for (auto q = begin; q < end; ++q) clamped_sum += trial[q] = std::max(w * trial[q] / sum, options.floor * w);
        for (auto q = begin; q < end; ++q) trial[q] *= w / clamped_sum;
      }

      Factored candidate;
      bool finite = true;
      try {
        candidate = factor(n, aggregate_values(layout, trial));
      } catch (const Error&) {
        finite = false;
      }
      if (finite && candidate.phi <= f.phi) {
        current.values_.swap(trial);
        f = std::move(candidate);
        r = resistances(f, n, layout);
        report.objective_trace.push_back(f.phi);
        step = std::min(step * 2.0, kMaxStep);
        accepted = true;
      } else {
        step *= 0.5;
        if (step < kMinStep) break;
      }
    }
    if (!accepted) {
      report.stalled = true;
      break;
    }
  }

  report.iterations = iter;
  report.final_k = k_from_resistances(h, layout, current.values_, r, options.support_eps);
  report.alpha.resize(h.num_edges());
  report.zero_mass_slack.assign(current.values_.size(), 0.0);
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const double r_max = max_resistance(layout, e, r);
    report.alpha[e] = r_max;
    report.final_z += h.edge(e).weight * r_max;
    const double threshold = options.support_eps * h.edge(e).weight;
    for (auto q = layout.edge_offsets[e]; q < layout.edge_offsets[e + 1]; ++q) {
      if (current.values_[q] <= threshold) report.zero_mass_slack[q] = r_max - r[layout.edge_pairs[q]];
    }
  }
  return {std::move(current), std::move(report)};
}

}  // namespace hsparse
