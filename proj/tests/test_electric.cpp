#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qwsearch/electric.hpp"
#include "qwsearch/random_instances.hpp"

#include <random>

using namespace qws;

namespace {

WeightedGraph path(Index n) {
  Matrix w = Matrix::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) w(i, i + 1) = w(i + 1, i) = 1.0;
  return WeightedGraph(w);
}

Distribution sigma_uv() {
  Vector s(3);
  s << 1.0 / 3.0, 2.0 / 3.0, 0.0;
  return Distribution(s);
}

}  // namespace

TEST_CASE("three-vertex path: resistance and commute quantity") {
  const WeightedGraph g = path(3);
  const VertexSet M{2};
  CHECK(effective_resistance(g, sigma_uv(), M).value == doctest::Approx(10.0 / 9.0).epsilon(1e-12));
  CHECK(commute_quantity(g, sigma_uv(), M) == doctest::Approx(40.0 / 9.0).epsilon(1e-12));
  // Pr = 1/3 and pi(S) = 3/4 force C_{S,M} = 4, so R_{S,M} = 1
  CHECK(set_resistance(g, VertexSet{0, 1}, M) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("series resistances add") {
  for (Index k = 1; k <= 6; ++k) {
    const WeightedGraph g = path(k + 1);
    CHECK(effective_resistance(g, Distribution::point_mass(k + 1, 0), VertexSet{k}).value ==
          doctest::Approx(static_cast<double>(k)));
  }
  Matrix w(2, 2);
  w << 0, 1, 1, 0;
  const WeightedGraph edge(w);
  CHECK(edge.total_weight() == 2.0);
  CHECK(commute_quantity(edge, Distribution::point_mass(2, 0), VertexSet{1}) == doctest::Approx(2.0));
}

TEST_CASE("Laplacian resistance matches projected-gradient flow minimization") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const WeightedGraph g = random_connected_graph(10, seed);
    const VertexSet M = random_subset(10, 2, {}, rng);
    const Distribution sigma = random_distribution(10, random_subset(10, 3, M, rng), rng);
    const Resistance r = effective_resistance(g, sigma, M);
    const double oracle_value = oracle::min_energy_flow(g.weights(), sigma.probabilities(), M.items());
    CHECK(std::abs(r.value - oracle_value) <= 1e-8 * oracle_value);
    CHECK(flow_energy(g, r.flow.flow) == doctest::Approx(r.value).epsilon(1e-10));
    CHECK(flow_constraint_residual(g, r.flow.flow, sigma, M) < 1e-10);
  }
}

TEST_CASE("stationary source: W R_{pi,M} equals the hitting time") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const WeightedGraph g = random_ergodic_graph(8, seed);
    const VertexSet M{static_cast<Index>(seed % 8)};
    const double lhs = g.total_weight() * stationary_resistance(g, M);
    const double ht = oracle::hitting_time(oracle::transition(g.weights()), oracle::stationary(g.weights()), M.items());
    CHECK(std::abs(lhs - ht) <= 1e-8 * ht);
  }
}

TEST_CASE("resistance preconditions") {
  const WeightedGraph g = path(3);
  CHECK_THROWS_AS(effective_resistance(g, Distribution::point_mass(3, 2), VertexSet{2}), ValidationError);
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = w(1, 0) = w(2, 3) = w(3, 2) = 1.0;
  CHECK_THROWS_AS(effective_resistance(WeightedGraph(w), Distribution::point_mass(4, 0), VertexSet{3}),
                  InfiniteResistanceError);
}

TEST_CASE("flow energy rejects flow on an absent edge") {
  const WeightedGraph g = path(3);
  Matrix f = Matrix::Zero(3, 3);
  f(0, 2) = 1.0;
  f(2, 0) = -1.0;
  CHECK_THROWS_AS(flow_energy(g, f), ValidationError);
}

TEST_CASE("contraction") {
  const Contraction c = contract_set(path(3), VertexSet{0, 1});
  CHECK(c.graph.size() == 2);
  CHECK(c.graph.weight(0, 1) == 1.0);
  CHECK(c.graph.weight(0, 0) == 2.0);
  CHECK(c.graph.total_weight() == 4.0);
  CHECK(c.map(VertexSet{2}) == VertexSet{1});

  const WeightedGraph g = random_connected_graph(6, 4);
  const Contraction single = contract_set(g, VertexSet{3});
  CHECK(single.graph.total_weight() == doctest::Approx(g.total_weight()));
  for (Index u = 0; u < 6; ++u)
    for (Index v = 0; v < 6; ++v)
      CHECK(single.graph.weight(single.relabel[u], single.relabel[v]) == doctest::Approx(g.weight(u, v)));
}

TEST_CASE("set resistance is the minimum over sources on S") {
  std::mt19937_64 rng(17);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const WeightedGraph g = random_connected_graph(8, seed);
    const VertexSet M{7};
    const VertexSet S{0, 1, 2};
    const double rs = set_resistance(g, S, M);
    for (int k = 0; k < 100; ++k) {
      const double r = effective_resistance(g, random_distribution(8, S, rng), M).value;
      CHECK(rs <= r + 1e-10);
    }
    // ternary search over the segment between the two endpoints of a pair
    const VertexSet pair{0, 1};
    auto along = [&](double a) {
      Vector s = Vector::Zero(8);
      s[0] = a;
      s[1] = 1.0 - a;
      return effective_resistance(g, Distribution(s), M).value;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (along(m1) < along(m2))
        hi = m2;
      else
        lo = m1;
    }
    CHECK(set_resistance(g, pair, M) == doctest::Approx(along(0.5 * (lo + hi))).epsilon(1e-9));
  }
  const WeightedGraph g = random_connected_graph(8, 9);
  CHECK(set_resistance(g, VertexSet{2}, VertexSet{6}) ==
        doctest::Approx(effective_resistance(g, Distribution::point_mass(8, 2), VertexSet{6}).value));
}

TEST_CASE("modified graph") {
  const WeightedGraph g = path(3);
  const double C = 40.0 / 9.0;
  const ModifiedInstance m = build_modified_graph(g, sigma_uv(), VertexSet{2}, C);
  CHECK(m.graph.size() == 5);  // pendants only on supp sigma
  const Vector pi = m.graph.stationary();
  double s_mass = 0.0;
  for (Index s : m.start_prime) s_mass += pi[s];
  CHECK(s_mass == doctest::Approx(1.0 / (C + 2.0)).epsilon(1e-12));
  CHECK(m.marked_prime == VertexSet{2});

  // C' recomputed directly on G'
  const double direct = commute_quantity(m.graph, m.sigma_prime, m.marked_prime);
  CHECK(direct == doctest::Approx(116.0 / 9.0).epsilon(1e-10));
  CHECK(modified_commute_prediction(g, sigma_uv(), sigma_uv(), VertexSet{2}, C) ==
        doctest::Approx(direct).epsilon(1e-10));

  const ModifiedInstance point = build_modified_graph(g, Distribution::point_mass(3, 0), VertexSet{2}, 2.0);
  CHECK(point.graph.size() == 4);
  CHECK(point.graph.weight(0, point.pendant[0]) == doctest::Approx(g.total_weight() / 2.0));
}

TEST_CASE("modified graph: prediction for other sources on supp sigma") {
  std::mt19937_64 rng(23);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const WeightedGraph g = random_connected_graph(7, seed);
    const VertexSet M{6};
    const VertexSet S{0, 1, 2};
    const Distribution sigma = random_distribution(7, S, rng);
    const Distribution rho = random_distribution(7, S, rng);
    const double C = 1.5 * commute_quantity(g, sigma, M);
    const ModifiedInstance m = build_modified_graph(g, sigma, M, C);
    const double direct = commute_quantity(m.graph, m.lift(rho), m.marked_prime);
    CHECK(modified_commute_prediction(g, sigma, rho, M, C) == doctest::Approx(direct).epsilon(1e-9));
  }
}
