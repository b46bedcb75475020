#pragma once

#include "qwsearch/graph.hpp"

#include <cstdint>
#include <random>

namespace qws {

struct RandomGraphOptions {
  double edge_probability = 0.4;
  double min_weight = 0.5;
  double max_weight = 2.0;
  bool self_loops = false;
};

/// Connected weighted graph: a random spanning tree plus independent extra
/// edges. Deterministic in `seed`.
WeightedGraph random_connected_graph(Index n, std::uint64_t seed, const RandomGraphOptions& options = {});

/// Connected and non-bipartite (a triangle or self-loop is added if needed).
WeightedGraph random_ergodic_graph(Index n, std::uint64_t seed, const RandomGraphOptions& options = {});

/// Random probability vector supported exactly on `support`.
Distribution random_distribution(Index n, const VertexSet& support, std::mt19937_64& rng);

/// Random unit vector of length n.
Vector random_unit_vector(Index n, std::mt19937_64& rng);

/// `count` distinct vertices drawn uniformly from [0,n) minus `exclude`.
VertexSet random_subset(Index n, Index count, const VertexSet& exclude, std::mt19937_64& rng);

}  // namespace qws
