#include "qwsearch/random_instances.hpp"

#include <algorithm>
#include <numeric>

namespace qws {

WeightedGraph random_connected_graph(Index n, std::uint64_t seed, const RandomGraphOptions& options) {
  if (n < 1) throw ValidationError("random_connected_graph: n must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(options.min_weight, options.max_weight);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix w = Matrix::Zero(n, n);
  auto connect = [&](Index u, Index v) {
    const double x = weight(rng);
    w(u, v) = x;
    w(v, u) = x;
  };

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  for (Index i = 1; i < n; ++i) {
    std::uniform_int_distribution<Index> parent(0, i - 1);
    connect(order[i], order[parent(rng)]);
  }
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (w(u, v) == 0.0 && coin(rng) < options.edge_probability) connect(u, v);
  if (options.self_loops) {
    for (Index u = 0; u < n; ++u)
      if (coin(rng) < options.edge_probability) w(u, u) = weight(rng);
  }
  if (n == 1) w(0, 0) = 1.0;
  return WeightedGraph(std::move(w));
}

WeightedGraph random_ergodic_graph(Index n, std::uint64_t seed, const RandomGraphOptions& options) {
  WeightedGraph g = random_connected_graph(n, seed, options);
  if (check_ergodic(g) == Ergodicity::ergodic) return g;
  Matrix w = g.weights();
  w(0, 0) += 1.0;
  return WeightedGraph(std::move(w));
}

Distribution random_distribution(Index n, const VertexSet& support, std::mt19937_64& rng) {
  if (support.empty()) throw ValidationError("random_distribution: empty support");
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  Vector p = Vector::Zero(n);
  for (Index u : support) p[u] = unit(rng);
  return Distribution(p / p.sum());
}

Vector random_unit_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v.normalized();
}

VertexSet random_subset(Index n, Index count, const VertexSet& exclude, std::mt19937_64& rng) {
  std::vector<Index> pool;
  for (Index u = 0; u < n; ++u)
    if (!exclude.contains(u)) pool.push_back(u);
  if (count > static_cast<Index>(pool.size())) throw ValidationError("random_subset: not enough vertices");
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(count));
  return VertexSet(std::move(pool));
}

}  // namespace qws
