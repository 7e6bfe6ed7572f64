#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hsparse/hypergraph.hpp"

namespace hsparse {

/// Nonnegative conductances c_ij on a pair set.
struct Conductances {
  std::vector<VertexPair> pairs;
  std::vector<double> values;

  std::size_t size() const noexcept { return pairs.size(); }
};

/// Weighted graph Laplacian L = sum c_ij (chi_i - chi_j)(chi_i - chi_j)^T,
/// held together with its eigendecomposition so that L^+ and L^{+/2} are
/// available without refactoring. Eigenvalues at or below
/// n * eps * lambda_max are treated as zero.
///
/// Disconnected support is allowed; only resistance queries that straddle
/// two components fail.
class LaplacianOperator {
 public:
  int dimension() const noexcept { return n_; }
  const Eigen::MatrixXd& matrix() const noexcept { return laplacian_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  const Eigen::MatrixXd& pseudoinverse() const noexcept { return pinv_; }
  const Eigen::MatrixXd& pseudoinverse_sqrt() const noexcept { return pinv_sqrt_; }

  int rank() const noexcept { return rank_; }
  bool connected() const noexcept { return num_components_ == 1; }
  int num_components() const noexcept { return num_components_; }
  int component(Vertex v) const { return component_.at(static_cast<std::size_t>(v)); }
  double zero_cutoff() const noexcept { return cutoff_; }

  std::vector<double> pinv_apply(std::span<const double> b) const;
  std::vector<double> pinv_sqrt_apply(std::span<const double> b) const;

  /// R_ij = <chi_i - chi_j, L^+ (chi_i - chi_j)>.
  double effective_resistance(Vertex i, Vertex j) const;

  friend LaplacianOperator build_laplacian(int n, const Conductances& c);

 private:
  int n_ = 0;
  Eigen::MatrixXd laplacian_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd pinv_;
  Eigen::MatrixXd pinv_sqrt_;
  int rank_ = 0;
  int num_components_ = 0;
  std::vector<int> component_;
  double cutoff_ = 0.0;
};

LaplacianOperator build_laplacian(int n, const Conductances& c);

/// sum over pairs with c_ij > 0 of c_ij R_ij; equals rank(L) = n - #components.
double foster_sum(const LaplacianOperator& lap, const Conductances& c);

}  // namespace hsparse
