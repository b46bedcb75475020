#pragma once

#include "qwsearch/graph.hpp"

#include <vector>

namespace qws {

/// Antisymmetric edge function p routing unit mass from `source` into `sinks`,
/// together with the vertex potentials that induce it (p_{u,v} = (phi_u - phi_v) w_{u,v}).
struct UnitFlow {
  Matrix flow;
  Vector potential;
  Distribution source;
  VertexSet sinks;
};

struct Resistance {
  double value = 0.0;
  UnitFlow flow;
};

/// Minimum-energy unit flow from sigma to M by grounding M and solving the
/// reduced Laplacian system. Throws ValidationError if sigma touches M and
/// InfiniteResistanceError if some source vertex cannot reach M.
Resistance effective_resistance(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked);

/// C_{sigma,M} = W * R_{sigma,M}.
double commute_quantity(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked);

/// R_{pi,M}: the flow is sourced by pi off M (pi's mass on M is already
/// delivered), so it equals (1 - pi(M))^2 R_{pi|X\M, M}.
double stationary_resistance(const WeightedGraph& g, const VertexSet& marked);

/// sum_{u<v} p_{u,v}^2 / w_{u,v}; throws if the flow uses an absent edge.
double flow_energy(const WeightedGraph& g, const Matrix& flow);

/// Largest violation of the unit-flow constraints (antisymmetry, zero on
/// absent edges, conservation off M, total inflow into M).
double flow_constraint_residual(const WeightedGraph& g, const Matrix& flow, const Distribution& sigma,
                                const VertexSet& marked);

struct Contraction {
  WeightedGraph graph;
  /// new index of every original vertex; all of S maps to 0.
  std::vector<Index> relabel;
  VertexSet map(const VertexSet& vertices) const;
};

/// Merge S into a single vertex s' (index 0). Edges into S are summed and the
/// internal S weight becomes a self-loop, so W is unchanged.
Contraction contract_set(const WeightedGraph& g, const VertexSet& subset);

/// R_{S,M} = min over distributions rho on S of R_{rho,M}.
double set_resistance(const WeightedGraph& g, const VertexSet& subset, const VertexSet& marked);

/// Two-layer graph G': layer 0 is a copy of G, and every u in supp(sigma) gets
/// a pendant copy (1,u) joined by an edge of weight sigma_u W / C.
///
/// Layer-0 vertices keep their indices 0..n-1; the pendant copies follow in
/// increasing order of u. Vertices outside supp(sigma) get no pendant copy
/// (it would be isolated).
struct ModifiedInstance {
  WeightedGraph graph;
  Distribution sigma_prime;  // sigma moved onto the pendant copies
  VertexSet marked_prime;    // layer-0 copies of M
  VertexSet start_prime;     // S' = pendant copies
  double C = 0.0;
  Index original_size = 0;
  /// pendant[u] = index of (1,u) in `graph`, or -1.
  std::vector<Index> pendant;
  /// original vertex of each vertex of `graph`.
  std::vector<Index> origin;

  /// Carry a distribution rho on supp(sigma) over to the pendant copies.
  Distribution lift(const Distribution& rho) const;
};

ModifiedInstance build_modified_graph(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked,
                                      double C);

/// Right-hand side of the modified-graph resistance identity:
/// (C_{rho,M} / C + 1/p) (C + 2) with p = 1 / sum_u rho_u^2 / sigma_u.
double modified_commute_prediction(const WeightedGraph& g, const Distribution& sigma, const Distribution& rho,
                                   const VertexSet& marked, double C);

}  // namespace qws
