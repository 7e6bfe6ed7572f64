#include "hsparse/laplacian.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "hsparse/error.hpp"

namespace hsparse {

namespace {

std::vector<int> label_components(int n, const Conductances& c, int& count) {
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c.values[k] > 0.0) {
      const int a = find(c.pairs[k].i);
      const int b = find(c.pairs[k].j);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  count = 0;
  for (int v = 0; v < n; ++v) {
    const int root = find(v);
    if (label[root] < 0) label[root] = count++;
    label[v] = label[root];
  }
  return label;
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> b, int n) {
  if (b.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::DimensionMismatch, "vector length does not match Laplacian dimension");
  }
  return {b.data(), n};
}

}  // namespace

LaplacianOperator build_laplacian(int n, const Conductances& c) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
  if (c.pairs.size() != c.values.size()) throw Error(ErrorCode::DimensionMismatch, "pairs/values length mismatch");

  LaplacianOperator op;
  op.n_ = n;
  op.laplacian_ = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < c.size(); ++k) {
    const auto [i, j] = c.pairs[k];
    const double w = c.values[k];
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "conductances must be nonnegative");
    if (i == j || i < 0 || j < 0 || i >= n || j >= n) throw Error(ErrorCode::VertexOutOfRange, "bad pair");
    op.laplacian_(i, i) += w;
    op.laplacian_(j, j) += w;
    op.laplacian_(i, j) -= w;
    op.laplacian_(j, i) -= w;
  }

  op.component_ = label_components(n, c, op.num_components_);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op.laplacian_);
  op.eigenvalues_ = eig.eigenvalues();
  const double lambda_max = std::max(0.0, op.eigenvalues_.maxCoeff());
  op.cutoff_ = n * std::numeric_limits<double>::epsilon() * lambda_max;

  Eigen::VectorXd inv = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(n);
  op.rank_ = 0;
  for (int k = 0; k < n; ++k) {
    const double lam = op.eigenvalues_(k);
    if (lam > op.cutoff_ && lam > 0.0) {
      inv(k) = 1.0 / lam;
      inv_sqrt(k) = 1.0 / std::sqrt(lam);
      ++op.rank_;
    }
  }
  const auto& u = eig.eigenvectors();
  op.pinv_ = u * inv.asDiagonal() * u.transpose();
  op.pinv_sqrt_ = u * inv_sqrt.asDiagonal() * u.transpose();
  return op;
}

std::vector<double> LaplacianOperator::pinv_apply(std::span<const double> b) const {
  const Eigen::VectorXd y = pinv_ * as_vector(b, n_);
  return {y.data(), y.data() + n_};
}

std::vector<double> LaplacianOperator::pinv_sqrt_apply(std::span<const double> b) const {
  const Eigen::VectorXd y = pinv_sqrt_ * as_vector(b, n_);
  return {y.data(), y.data() + n_};
}

double LaplacianOperator::effective_resistance(Vertex i, Vertex j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw Error(ErrorCode::VertexOutOfRange, "resistance query");
  if (i == j) throw Error(ErrorCode::InvalidArgument, "resistance query needs distinct vertices");
  if (component_[i] != component_[j]) {
    throw Error(ErrorCode::DisconnectedPair,
                "vertices " + std::to_string(i) + " and " + std::to_string(j) + " lie in different components");
  }
  return std::max(0.0, pinv_(i, i) + pinv_(j, j) - 2.0 * pinv_(i, j));
}

double foster_sum(const LaplacianOperator& lap, const Conductances& c) {
  double sum = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c.values[k] > 0.0) sum += c.values[k] * lap.effective_resistance(c.pairs[k].i, c.pairs[k].j);
  }
  return sum;
}

}  // namespace hsparse
