#pragma once

// Fast-forwarding search, the interpolated-walk search with random offsets,
// amplitude amplification bookkeeping and the t-step variant.

#include "qwsearch/classical.hpp"
#include "qwsearch/electric.hpp"
#include "qwsearch/fast_forward.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace qws {

struct SearchConfig {
  long T = 0;             // horizon, positive and even
  double r_S = 0.0;       // S-holding time; 0 selects max(1, T/60)
  double eps_ff = 0.0;    // fast-forward precision; 0 selects 1/(8 ceil(log2 T))
  long aa_rounds = -1;    // -1 selects ceil(sqrt(log2 T))
  double simple_eps = 0.0;  // simple search offset cap is truncation_degree(t, simple_eps); 0 selects 1/T
  long shots_factor = 8;  // simple search repeats ceil(log2 T) * shots_factor shots
  double threshold = 0.5;
  std::uint64_t seed = 0;

  /// Copy with defaults filled in; throws ConfigError on invalid fields.
  SearchConfig resolved() const;
  /// R = {1, 2, ..., 2^ceil(log2(14T))}; the interpolation parameters are 1 - 1/r.
  std::vector<long> holding_grid() const;
  long log2_T() const;
};

/// Modified graph and everything the searches need from it.
struct SearchInstance {
  WeightedGraph graph;        // original G
  ReversibleChain chain;      // original P
  Distribution sigma;         // original sigma
  VertexSet marked;           // original M
  ModifiedInstance modified;  // G', sigma', M', S'
  ReversibleChain chain_prime;
  LambdaRotation lambda;
  double C = 0.0;

  Index size() const { return modified.graph.size(); }
  /// D(P') over the modified graph's vertices.
  Matrix base_block() const;
};

/// Builds the modified instance with budget C (default: exact C_{sigma,M}).
/// Throws ValidationError when sigma touches M.
SearchInstance prepare_search(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked,
                              std::optional<double> C = std::nullopt);

/// D(q) from a base discriminant: S-holding on `start`, M-holding on `marked`.
Matrix interpolated_two_block(const Matrix& base, const VertexSet& start, const VertexSet& marked,
                              const InterpolationParams& q);

struct Profile {
  std::vector<long> r_M;
  Matrix values;  // values(t-1, k) = ||Pi_M D^t(q_k) sqrt(sigma)||^2
  double average = 0.0;
  bool hypothesis_holds = true;  // 1/C <= pi(S) <= 2/C on the modified instance
};

/// Exact ||Pi_M D^t(q) |sqrt sigma'>||^2 over t in [1,T] and r_M in R.
Profile success_probability_profile(const SearchInstance& inst, const SearchConfig& cfg);

/// Pr(Y_t in M, Y_{t'} in S) for Y_0 ~ sigma under P.
double joint_probability(const ReversibleChain& c, const Distribution& sigma, const VertexSet& marked,
                         const VertexSet& start, long t, long t_prime);

/// ||Pi_M D^t |sqrt sigma>||
double marked_amplitude_norm(const DiscriminantMatrix& d, const Distribution& sigma, const VertexSet& marked, long t);

struct SearchCounters {
  long walk = 0;    // applications of the base walk operator W(P)
  long check = 0;   // membership reflections
  long lambda = 0;  // applications of Lambda(sigma, C)
  long setup = 0;   // preparations of |sqrt sigma>
  bool operator==(const SearchCounters&) const = default;
};

struct TraceEntry {
  long t = 0;
  long r_M = 0;
  double success = 0.0;
};

struct SearchOutcome {
  std::optional<Index> found;        // vertex of the original graph, always in M
  double success_probability = 0.0;  // fast-forward: after amplification; simple: one shot
  double pre_amplification = 0.0;    // fast-forward only
  double overall = 0.0;              // simple: 1 - (1 - p)^shots; fast-forward: = success_probability
  long T = 0;
  double r_S = 0.0;
  double eps_ff = 0.0;
  long aa_rounds = 0;
  long shots = 0;
  SearchCounters counters;
  std::vector<TraceEntry> trace;
  /// Vertex distribution over the modified graph with every ancilla traced
  /// out: before amplification for the circuit backend, one shot for the
  /// simple search. Empty for the blocks backend, which only tracks the flag.
  Vector distribution;
  /// Unnormalized vertex marginal of the flagged branch before amplification
  /// (fast-forward search only).
  Vector flagged_distribution;
};

enum class FastForwardBackend {
  blocks,   // flagged vectors from the Chebyshev polynomial of D(q)
  circuit,  // explicit fast-forward operator on the interpolated modified walk
};

SearchOutcome search_fastforward(const SearchInstance& inst, const SearchConfig& cfg,
                                 FastForwardBackend backend = FastForwardBackend::blocks);

/// n with the parity of t, Pr(n) proportional to binom(t, (t+n)/2), |n| <= cap.
/// Throws PreconditionError when the retained mass is below 1e-6.
long sample_binomial_offset(long t, long cap, std::mt19937_64& rng);

/// Exact law of sample_binomial_offset as (offset, probability) pairs.
std::vector<std::pair<long, double>> binomial_offset_law(long t, long cap);

SearchOutcome search_simple(const SearchInstance& inst, const SearchConfig& cfg);

/// The fast-forward search on P^{t_inner}, with the fast-forwarded block p(D)/alpha as the
/// inner walk. eps_inner = 0 selects 1/(4T).
SearchOutcome search_tstep(const SearchInstance& inst, long t_inner, const SearchConfig& cfg, double eps_inner = 0.0);

struct SweepResult {
  std::vector<SearchOutcome> runs;
  std::optional<long> first_success_T;
};

/// Runs `run(cfg)` for T = T_start, 2 T_start, ... up to T_max, stopping at the
/// first T whose success probability reaches cfg.threshold.
template <typename Run>
SweepResult sweep_doubling(const SearchConfig& base, long T_start, long T_max, Run run) {
  SweepResult out;
  for (long T = T_start; T <= T_max; T *= 2) {
    SearchConfig cfg = base;
    cfg.T = T;
    out.runs.push_back(run(cfg));
    if (out.runs.back().success_probability >= cfg.threshold) {
      out.first_success_T = T;
      break;
    }
  }
  return out;
}

}  // namespace qws
