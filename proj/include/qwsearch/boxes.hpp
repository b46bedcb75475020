#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qws {

/// Trajectory abstraction: each step is in S, in M, or in neither.
enum class Box : char { S = 'S', M = 'M', other = '.' };

class BoxSequence {
 public:
  explicit BoxSequence(std::vector<Box> labels);
  /// Parse from characters 'S', 'M', '.'.
  static BoxSequence parse(const std::string& text);

  long size() const { return static_cast<long>(labels_.size()); }
  Box operator[](long i) const { return labels_[static_cast<std::size_t>(i)]; }
  const std::vector<Box>& labels() const { return labels_; }
  std::string str() const;

  /// First index in M.
  std::optional<long> ht() const;
  /// First index in S after ht.
  std::optional<long> ct() const;
  /// Number of indices i in [a,b] (inclusive, clipped to the sequence) with label `kind`.
  long count(Box kind, long a, long b) const;

  bool operator==(const BoxSequence&) const = default;

 private:
  std::vector<Box> labels_;
};

/// gamma^{(r)}: each S-box repeated r_S times, each M-box r_M times.
BoxSequence stretch_deterministic(const BoxSequence& y, long r_S, long r_M);

/// y^{(r)}: each S-box (M-box) repeated an independent Geometric number of
/// times with support {1,2,...} and mean r_S (r_M).
BoxSequence stretch_geometric(const BoxSequence& y, double r_S, double r_M, std::uint64_t seed);

/// count() on stretch_deterministic(y, r_S, r_M) without building it.
long stretched_count(const BoxSequence& y, long r_S, long r_M, Box kind, long a, long b);

/// R = {1, 2, 4, ..., 2^ceil(log2(14T))}.
std::vector<long> holding_grid(long T);

/// Hypotheses of the stretching lemma: T even and positive, y_0 in S, ct
/// exists with ct <= T, and y_0 is the only S-box in [0, ht]. Returns the
/// violated clause, or an empty string.
std::string stretching_hypothesis_violation(const BoxSequence& y, long T);

/// Some r_M in R with r_S = T/2 such that M^{(r)}[0,2T] >= T/2 and
/// S^{(r)}[7T,15T] >= T/4; nullopt if none exists. Throws PreconditionError
/// if the hypotheses fail.
std::optional<long> find_good_rM(const BoxSequence& y, long T);

/// True iff r_M satisfies both count bounds for (y, T).
bool is_good_rM(const BoxSequence& y, long T, long r_M);

struct ExhaustiveResult {
  long checked = 0;
  long counterexamples = 0;
  std::optional<BoxSequence> first_counterexample;
};

/// Runs find_good_rM on every sequence of length <= max_length that satisfies
/// the hypotheses for T.
ExhaustiveResult exhaustive_stretching_check(long T, long max_length);

}  // namespace qws
