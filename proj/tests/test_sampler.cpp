#include <doctest.h>

#include <cmath>
#include <numeric>

#include "hsparse/error.hpp"
#include "hsparse/sampler.hpp"
#include "oracles.hpp"

using namespace hsparse;

namespace {

SamplingPlan balanced_plan(const Hypergraph& h) { return build_plan(h, balance(h).split); }

Hypergraph path3() { return Hypergraph::validate(3, {{{0, 1}, 1.0}, {{1, 2}, 1.0}}); }

}  // namespace

TEST_CASE("plans of a triangle hyperedge and a path") {
  const auto tri = balanced_plan(Hypergraph::validate(3, {{{0, 1, 2}, 1.0}}));
  CHECK(tri.r_max[0] == doctest::Approx(2.0));
  CHECK(tri.z == doctest::Approx(2.0));
  CHECK(tri.mu[0] == 1.0);

  const auto path = balanced_plan(path3());
  CHECK(path.r_max[0] == doctest::Approx(1.0));
  CHECK(path.r_max[1] == doctest::Approx(1.0));
  CHECK(path.z == doctest::Approx(2.0));
  CHECK(path.mu[0] == doctest::Approx(0.5));
  CHECK(path.mu[1] == doctest::Approx(0.5));
}

TEST_CASE("graph plans are leverage-score distributions") {
  for (Seed seed = 0; seed < 8; ++seed) {
    const auto g = random_hypergraph({16, 40, 2, 0.5, 2.0, seed}).hypergraph;
    const auto plan = balanced_plan(g);
    const auto lev = oracle::leverage_scores(g);
    CHECK(plan.z == doctest::Approx(15.0).epsilon(1e-9));
    for (std::size_t e = 0; e < g.num_edges(); ++e) CHECK(plan.mu[e] == doctest::Approx(lev[e]).epsilon(1e-6));
  }
}

TEST_CASE("plan invariants on random hypergraphs") {
  for (Seed seed = 0; seed < 8; ++seed) {
    const auto h = random_hypergraph({14, 25, 5, 0.5, 2.0, seed}).hypergraph;
    const auto plan = balanced_plan(h);
    CHECK(plan.z > 0.0);
    double sum = 0.0;
    for (double m : plan.mu) {
      CHECK(m > 0.0);
      sum += m;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("Z and mu are invariant under weight scaling") {
  const auto h = random_hypergraph({12, 20, 4, 0.5, 2.0, 5}).hypergraph;
  const auto split = balance(h).split;
  std::vector<double> scaled(split.values().begin(), split.values().end());
  for (auto& v : scaled) v *= 7.0;
  const auto hs = h.scaled(7.0);
  const auto split_s = ConductanceSplit::from_values(hs, split.shared_layout(), scaled);
  const auto a = build_plan(h, split);
  const auto b = build_plan(hs, split_s);
  CHECK(b.z == doctest::Approx(a.z).epsilon(1e-10));
  for (std::size_t e = 0; e < h.num_edges(); ++e) CHECK(b.mu[e] == doctest::Approx(a.mu[e]).epsilon(1e-10));
}

TEST_CASE("sample count formula") {
  const double expect = 8.0 * 4.0 * std::log(8.0) * 63.0 * std::log(64.0);
  CHECK(sample_count(64, 4, 63.0, 0.5, 8.0) == static_cast<std::int64_t>(std::ceil(expect)));
  CHECK(std::abs(sample_count(64, 4, 63.0, 0.5, 8.0) - 17435) <= 1);
  CHECK(sample_count(2, 2, 1.0, 0.5, 1.0) == static_cast<std::int64_t>(std::ceil(4.0 * std::log(4.0) * std::log(3.0))));
}

TEST_CASE("sample count is monotone and follows the epsilon law") {
  const auto base = sample_count(64, 4, 63.0, 0.5, 8.0);
  const auto doubled_d = sample_count(64, 8, 63.0, 0.5, 8.0);
  CHECK(doubled_d > base);
  CHECK(static_cast<double>(doubled_d) / base == doctest::Approx(std::log(16.0) / std::log(8.0)).epsilon(1e-3));
  CHECK(sample_count(64, 4, 63.0, 0.25, 8.0) == doctest::Approx(4.0 * base).epsilon(1e-3));
  CHECK(sample_count(128, 4, 63.0, 0.5, 8.0) > base);
  CHECK(sample_count(64, 4, 70.0, 0.5, 8.0) > base);
  CHECK(sample_count(64, 4, 63.0, 0.5, 9.0) > base);
}

TEST_CASE("sample count rejects invalid arguments") {
  CHECK_THROWS_AS(sample_count(64, 4, 63.0, 0.0, 8.0), Error);
  CHECK_THROWS_AS(sample_count(64, 4, 63.0, 1.0, 8.0), Error);
  CHECK_THROWS_AS(sample_count(1, 4, 63.0, 0.5, 8.0), Error);
  CHECK_THROWS_AS(sample_count(64, 1, 63.0, 0.5, 8.0), Error);
  CHECK_THROWS_AS(sample_count(64, 4, 0.0, 0.5, 8.0), Error);
}

TEST_CASE("a single hyperedge is reproduced exactly") {
  const auto h = Hypergraph::validate(4, {{{0, 1, 2, 3}, 2.5}});
  const auto s = draw(h, balanced_plan(h), 37, 9);
  REQUIRE(s.edges.size() == 1);
  CHECK(s.edges[0].count == 37);
  CHECK(s.edges[0].weight == 2.5);
  CHECK(s.to_hypergraph(h) == h);
}

TEST_CASE("draw bookkeeping") {
  const auto h = random_hypergraph({20, 60, 5, 0.5, 2.0, 12}).hypergraph;
  const auto plan = balanced_plan(h);
  const std::int64_t m = 150;
  const auto s = draw(h, plan, m, 44);
  std::int64_t total = 0;
  for (std::size_t k = 0; k < s.edges.size(); ++k) {
    const auto& se = s.edges[k];
    total += se.count;
    CHECK(se.count >= 1);
    CHECK(se.weight == doctest::Approx(static_cast<double>(se.count) / m * h.edge(se.edge).weight / plan.mu[se.edge]));
    if (k > 0) CHECK(se.edge > s.edges[k - 1].edge);
  }
  CHECK(total == m);
  CHECK(s.distinct_edges() <= static_cast<std::size_t>(m));
  CHECK(s.distinct_edges() <= h.num_edges());

  const auto again = draw(h, plan, m, 44);
  CHECK(again.to_hypergraph(h) == s.to_hypergraph(h));
  std::mt19937_64 rng(1);
  const auto x = oracle::gaussian_orthogonal(20, rng);
  CHECK(sparsifier_energy(h, s, x) == doctest::Approx(oracle::energy(s.to_hypergraph(h), x)).epsilon(1e-12));
}

TEST_CASE("two-edge path counts stay within three binomial deviations") {
  const auto h = path3();
  const auto plan = balanced_plan(h);
  const std::int64_t m = 10000;
  const double bound = 3.0 * std::sqrt(m / 4.0);
  int within = 0;
  const int seeds = 200;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto s = draw(h, plan, m, static_cast<Seed>(seed));
    std::int64_t first = 0;
    for (const auto& se : s.edges) {
      if (se.edge == 0) first = se.count;
    }
    if (std::abs(static_cast<double>(first) - m / 2.0) <= bound) ++within;
  }
  CHECK(within >= seeds * 99 / 100);
}

TEST_CASE("build_plan rejects a split with disconnected support") {
  const auto h = Hypergraph::validate(4, {{{0, 1}, 1.0}, {{2, 3}, 1.0}});
  CHECK_THROWS_AS(build_plan(h, initialize_split(h)), Error);
}
