#pragma once

// Reference computations that share no code with the library: dense
// pseudoinverses via complete orthogonal decomposition, pairwise energies by
// brute force, connectivity by a plain DFS.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "hsparse/hypergraph.hpp"

namespace oracle {

using Pairs = std::vector<std::pair<int, int>>;

inline Eigen::MatrixXd laplacian(int n, const Pairs& pairs, const std::vector<double>& c) {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    l(i, i) += c[k];
    l(j, j) += c[k];
    l(i, j) -= c[k];
    l(j, i) -= c[k];
  }
  return l;
}

inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& l) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(l);
  cod.setThreshold(1e-10);
  return cod.pseudoInverse();
}

inline double resistance(const Eigen::MatrixXd& p, int i, int j) { return p(i, i) + p(j, j) - 2.0 * p(i, j); }

// Every pair of every edge, scanned directly.
inline double energy(const hsparse::Hypergraph& h, const std::vector<double>& x) {
  double total = 0.0;
  for (const auto& e : h.edges()) {
    double best = 0.0;
    for (std::size_t a = 0; a < e.vertices.size(); ++a) {
      for (std::size_t b = a + 1; b < e.vertices.size(); ++b) {
        const double d = x[e.vertices[a]] - x[e.vertices[b]];
        best = std::max(best, d * d);
      }
    }
    total += e.weight * best;
  }
  return total;
}

inline int components(const hsparse::Hypergraph& h) {
  const int n = h.num_vertices();
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : h.edges()) {
    for (std::size_t a = 1; a < e.vertices.size(); ++a) {
      adj[e.vertices[0]].push_back(e.vertices[a]);
      adj[e.vertices[a]].push_back(e.vertices[0]);
    }
  }
  std::vector<bool> seen(n, false);
  int count = 0;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    ++count;
    std::vector<int> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : adj[v]) {
        if (!seen[u]) {
          seen[u] = true;
          stack.push_back(u);
        }
      }
    }
  }
  return count;
}

// Leverage scores of a graph: diagonal of W^{1/2} B L^+ B^T W^{1/2}, divided
// by its trace.
inline std::vector<double> leverage_scores(const hsparse::Hypergraph& g) {
  const int n = g.num_vertices();
  const auto m = static_cast<Eigen::Index>(g.num_edges());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd sqrt_w(m);
  for (Eigen::Index e = 0; e < m; ++e) {
    const auto& edge = g.edge(static_cast<std::size_t>(e));
    b(e, edge.vertices[0]) = 1.0;
    b(e, edge.vertices[1]) = -1.0;
    sqrt_w(e) = std::sqrt(edge.weight);
  }
  const Eigen::MatrixXd l = b.transpose() * (sqrt_w.array().square().matrix().asDiagonal()) * b;
  const Eigen::MatrixXd proj = sqrt_w.asDiagonal() * b * pinv(l) * b.transpose() * sqrt_w.asDiagonal();
  const double trace = proj.trace();
  std::vector<double> out(static_cast<std::size_t>(m));
  for (Eigen::Index e = 0; e < m; ++e) out[static_cast<std::size_t>(e)] = proj(e, e) / trace;
  return out;
}

inline std::vector<double> gaussian_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> x(n);
  double mean = 0.0;
  for (auto& v : x) {
    v = normal(rng);
    mean += v;
  }
  mean /= n;
  for (auto& v : x) v -= mean;
  return x;
}

}  // namespace oracle
