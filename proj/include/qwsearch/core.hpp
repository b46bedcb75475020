#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace qws {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors. Every failure mode of the library surfaces as one of these.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a type invariant (asymmetric weights, bad probabilities, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An operation's stated hypothesis does not hold for the given input.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The sink set cannot be reached from the source support.
class InfiniteResistanceError : public Error {
 public:
  using Error::Error;
};

/// A dense representation would exceed its configured dimension cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// State-vector norm drifted beyond tolerance.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------

struct Tolerances {
  double algebraic = 1e-12;  // identities that need only arithmetic
  double spectral = 1e-10;   // identities that go through an eigendecomposition
  Index max_vertices = 64;
};

/// Sorted set of vertex indices.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<Index> vertices);
  explicit VertexSet(std::vector<Index> vertices);

  static VertexSet range(Index first, Index last);  // [first, last)
  static VertexSet from_mask(const std::vector<char>& mask);

  bool contains(Index v) const;
  Index size() const { return static_cast<Index>(items_.size()); }
  bool empty() const { return items_.empty(); }
  Index front() const { return items_.front(); }

  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  const std::vector<Index>& items() const { return items_; }

  std::vector<char> mask(Index n) const;
  VertexSet complement(Index n) const;
  bool intersects(const VertexSet& other) const;
  bool operator==(const VertexSet& other) const = default;

  /// Throws ValidationError unless every element lies in [0, n).
  void check_range(Index n, const char* what) const;

 private:
  std::vector<Index> items_;
};

/// Probability vector over vertices 0..n-1.
class Distribution {
 public:
  explicit Distribution(Vector probabilities, double tolerance = 1e-12);

  static Distribution point_mass(Index n, Index vertex);
  static Distribution uniform(Index n);
  /// Normalized restriction weights|_S; throws if the restriction has zero mass.
  static Distribution restricted(const Vector& weights, const VertexSet& subset);

  Index size() const { return probabilities_.size(); }
  double operator[](Index u) const { return probabilities_[u]; }
  const Vector& probabilities() const { return probabilities_; }
  VertexSet support() const;
  double mass(const VertexSet& subset) const;
  Vector sqrt_amplitudes() const { return probabilities_.cwiseSqrt(); }

 private:
  Vector probabilities_;
};

}  // namespace qws
