#pragma once

#include "qwsearch/graph.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace qws {

/// Holding parameters of the two-set interpolated walk. r = 1/(1-q) is the
/// expected number of steps spent at a vertex of the corresponding set.
struct InterpolationParams {
  double q_S = 0.0;
  double q_M = 0.0;

  static InterpolationParams from_holding(double r_S, double r_M);
  double r_S() const { return 1.0 / (1.0 - q_S); }
  double r_M() const { return 1.0 / (1.0 - q_M); }
  void validate() const;
};

/// Rows in M become (1-s) P + s e_u. s must lie in [0,1).
ReversibleChain interpolate_absorbing(const ReversibleChain& c, const VertexSet& marked, double s);

/// Rows in S get (1-q_S) P + q_S I, rows in M get (1-q_M) P + q_M I.
ReversibleChain interpolate_two(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked,
                                const InterpolationParams& q);

/// An expectation that may be infinite (target unreachable with positive probability).
struct ExpectedTime {
  double value = 0.0;
  bool infinite = false;
};

/// Per-vertex E_u(tau_M); +infinity where M cannot be reached.
Vector hitting_times(const ReversibleChain& c, const VertexSet& marked);

ExpectedTime exact_hitting_time(const ReversibleChain& c, const VertexSet& marked, const Distribution& sigma);

/// HT(P,M) = E_pi(tau_M).
ExpectedTime hitting_time(const ReversibleChain& c, const VertexSet& marked);

/// Law of Y_{tau_M} for Y_0 ~ sigma. Requires M to be reached almost surely.
Distribution hitting_distribution(const ReversibleChain& c, const VertexSet& marked, const Distribution& sigma);

/// Pr_{pi|S}(tau_M < tau_S^+).
double exact_return_prob(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked);

/// E_{pi|S}(tau_S^+), by first-step analysis.
ExpectedTime exact_expected_return(const ReversibleChain& c, const VertexSet& start);

/// E_sigma(tau^M_S): hit M, then S.
ExpectedTime exact_commute_time(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked,
                                const Distribution& sigma);

/// C_{S,M} computed on the chain's own graph (W = 2).
double chain_set_commute(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked);

/// Per-row samplers for fast trajectory generation.
class ChainSampler {
 public:
  explicit ChainSampler(const ReversibleChain& c);
  Index step(Index from, std::mt19937_64& rng) const;
  Index start(const Distribution& sigma, std::mt19937_64& rng) const;

 private:
  std::vector<std::vector<double>> cumulative_;
};

std::vector<Index> simulate(const ReversibleChain& c, const Distribution& sigma, long steps, std::uint64_t seed);

struct FrequencyEstimate {
  long trials = 0;
  long hits = 0;
  double frequency() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
  double standard_error() const;
};

/// Monte Carlo frequency of {tau^M_S <= T} for Y_0 ~ pi|_S. Throws
/// PreconditionError unless 2/T <= pi(S) p <= 1/C_{S,M}.
FrequencyEstimate check_claim_commute(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked,
                                      double p, long horizon, long trials, std::uint64_t seed);

struct BaselineOutcome {
  std::optional<Index> found;
  long updates = 0;
  long checks = 0;
};

/// Walk from sigma, checking the current vertex every `interval` steps,
/// until found or `budget` walk steps have been spent.
BaselineOutcome classical_search_baseline(const ReversibleChain& c, const VertexSet& marked, const Distribution& sigma,
                                          long interval, long budget, std::uint64_t seed);

}  // namespace qws
