#pragma once

#include "qwsearch/core.hpp"

#include <vector>

namespace qws {

/// Undirected weighted graph stored as a dense symmetric conductance matrix.
///
/// Self-loops are allowed and count once towards w_u = sum_v w_{u,v}; the
/// total weight W = sum_{u,v} w_{u,v} therefore counts every proper edge
/// twice. Zero entries mean "no edge".
class WeightedGraph {
 public:
  explicit WeightedGraph(Matrix weights, const Tolerances& tol = {});

  Index size() const { return weights_.rows(); }
  const Matrix& weights() const { return weights_; }
  double weight(Index u, Index v) const { return weights_(u, v); }
  double degree(Index u) const { return degrees_[u]; }
  const Vector& degrees() const { return degrees_; }
  double total_weight() const { return total_; }
  /// Stationary distribution of the random walk, w_u / W.
  Vector stationary() const { return degrees_ / total_; }
  std::vector<Index> neighbors(Index u) const;

 private:
  Matrix weights_;
  Vector degrees_;
  double total_ = 0.0;
};

/// Row-stochastic transition matrix with a stationary distribution in
/// detailed balance. Validated on construction and immutable afterwards.
class ReversibleChain {
 public:
  ReversibleChain(Matrix transition, Vector stationary, const Tolerances& tol = {});

  Index size() const { return transition_.rows(); }
  const Matrix& transition() const { return transition_; }
  const Vector& stationary() const { return stationary_; }
  double stationary_mass(const VertexSet& subset) const;

 private:
  Matrix transition_;
  Vector stationary_;
};

/// max_{u,v} |pi_u P_{u,v} - pi_v P_{v,u}|
double detailed_balance_residual(const Matrix& transition, const Vector& stationary);

ReversibleChain build_chain(const WeightedGraph& graph, const Tolerances& tol = {});

/// Weights w_{u,v} = 2 pi_u P_{u,v}; the result has total weight 2.
WeightedGraph chain_to_graph(const ReversibleChain& chain, const Tolerances& tol = {});

enum class Ergodicity { ergodic, disconnected, bipartite };

const char* to_string(Ergodicity verdict);

/// Structural check: connectivity by graph search, then two-coloring.
Ergodicity check_ergodic(const WeightedGraph& graph);
/// Same check on the support graph {(u,v) : P_{u,v} > 0}.
Ergodicity check_ergodic(const ReversibleChain& chain);

/// diag(sqrt(pi)) P diag(sqrt(pi))^{-1}, symmetrized. Shares P's spectrum.
Matrix symmetric_form(const ReversibleChain& chain);

/// Eigenvalues of P in descending order, computed from symmetric_form.
Vector chain_eigenvalues(const ReversibleChain& chain);

/// delta = min(1 - |lambda_1|, 1 - |lambda_{n-1}|). Throws PreconditionError
/// on disconnected or bipartite chains.
double spectral_gap(const ReversibleChain& chain);

struct ChainPower {
  ReversibleChain chain;
  bool degenerate = false;  // t == 0: identity chain, the walk never moves
};

ChainPower chain_power(const ReversibleChain& chain, long t, const Tolerances& tol = {});

}  // namespace qws
