#pragma once

// State-vector engine: block operators over an ancilla (x) system space,
// their dense form, quantum states and amplitude amplification.
//
// Basis layout everywhere: index = ancilla * system_dim + vertex. Composite
// circuits prepend registers on the ancilla side, so a new register is always
// the most significant part of the index.

#include "qwsearch/core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>

namespace qws {

/// Applications of the primitive operations per application of an operator.
struct OpCost {
  long walk = 0;
  long check = 0;
  long lambda = 0;

  OpCost& operator+=(const OpCost& other) {
    walk += other.walk;
    check += other.check;
    lambda += other.lambda;
    return *this;
  }
  friend OpCost operator+(OpCost a, const OpCost& b) { return a += b; }
  friend OpCost operator*(OpCost a, long k) {
    a.walk *= k;
    a.check *= k;
    a.lambda *= k;
    return a;
  }
  bool operator==(const OpCost&) const = default;
};

template <typename Scalar>
double spectral_norm(const MatrixX<Scalar>& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
  return static_cast<double>(svd.singularValues()(0));
}

/// Matrix-free unitary on ancilla (x) system with a distinguished ancilla
/// basis state `flag`.
template <typename Scalar>
class BlockOperator {
 public:
  using Vec = VectorX<Scalar>;
  using Map = std::function<Vec(const Vec&)>;

  BlockOperator(Index ancilla_dim, Index system_dim, Index flag, Map forward, Map backward, OpCost cost = {})
      : ancilla_dim_(ancilla_dim),
        system_dim_(system_dim),
        flag_(flag),
        forward_(std::move(forward)),
        backward_(std::move(backward)),
        cost_(cost) {
    if (ancilla_dim < 1 || system_dim < 1) throw ValidationError("block operator: empty register");
    if (flag < 0 || flag >= ancilla_dim) throw ValidationError("block operator: flag out of range");
  }

  Index ancilla_dim() const { return ancilla_dim_; }
  Index system_dim() const { return system_dim_; }
  Index dim() const { return ancilla_dim_ * system_dim_; }
  Index flag() const { return flag_; }
  const OpCost& cost() const { return cost_; }

  Vec apply(const Vec& v) const {
    check_size(v);
    return forward_(v);
  }
  Vec apply_adjoint(const Vec& v) const {
    check_size(v);
    return backward_(v);
  }
  BlockOperator adjoint() const { return BlockOperator(ancilla_dim_, system_dim_, flag_, backward_, forward_, cost_); }

  /// |flag> (x) psi
  Vec embed(const Vec& psi) const {
    if (psi.size() != system_dim_) throw ValidationError("embed: system vector has wrong length");
    Vec out = Vec::Zero(dim());
    out.segment(flag_ * system_dim_, system_dim_) = psi;
    return out;
  }
  /// (<flag| (x) I) v
  Vec flagged_part(const Vec& v) const { return v.segment(flag_ * system_dim_, system_dim_); }

  /// (<flag| (x) I) U (|flag> (x) I)
  MatrixX<Scalar> block() const {
    MatrixX<Scalar> out(system_dim_, system_dim_);
    for (Index x = 0; x < system_dim_; ++x) out.col(x) = flagged_part(apply(embed(Vec::Unit(system_dim_, x))));
    return out;
  }

  MatrixX<Scalar> to_dense() const {
    MatrixX<Scalar> out(dim(), dim());
    for (Index i = 0; i < dim(); ++i) out.col(i) = apply(Vec::Unit(dim(), i));
    return out;
  }

 private:
  void check_size(const Vec& v) const {
    if (v.size() != dim()) {
      throw ValidationError("block operator: vector of length " + std::to_string(v.size()) + ", expected " +
                            std::to_string(dim()));
    }
  }

  Index ancilla_dim_;
  Index system_dim_;
  Index flag_;
  Map forward_;
  Map backward_;
  OpCost cost_;
};

/// Dense unitary with a flagged ancilla state.
template <typename Scalar>
struct BlockUnitary {
  MatrixX<Scalar> matrix;
  Index ancilla_dim = 1;
  Index system_dim = 1;
  Index flag = 0;
  OpCost cost;

  BlockOperator<Scalar> op() const {
    auto m = std::make_shared<const MatrixX<Scalar>>(matrix);
    return BlockOperator<Scalar>(
        ancilla_dim, system_dim, flag, [m](const VectorX<Scalar>& v) { return VectorX<Scalar>(*m * v); },
        [m](const VectorX<Scalar>& v) { return VectorX<Scalar>(m->adjoint() * v); }, cost);
  }
  MatrixX<Scalar> block() const { return matrix.block(flag * system_dim, flag * system_dim, system_dim, system_dim); }
  /// max |U^dagger U - I|
  double unitarity_residual() const {
    const MatrixX<Scalar> g = matrix.adjoint() * matrix;
    return (g - MatrixX<Scalar>::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  }
};

template <typename Scalar>
BlockUnitary<Scalar> materialize(const BlockOperator<Scalar>& op, Index max_dim = 4096) {
  if (op.dim() > max_dim) {
    throw SizeError("materialize: dimension " + std::to_string(op.dim()) + " exceeds cap " + std::to_string(max_dim));
  }
  return BlockUnitary<Scalar>{op.to_dense(), op.ancilla_dim(), op.system_dim(), op.flag(), op.cost()};
}

/// Spectral norm of (extracted block - target).
template <typename Scalar>
double verify_block_encoding(const BlockOperator<Scalar>& u, const MatrixX<Scalar>& target) {
  if (target.rows() != u.system_dim() || target.cols() != u.system_dim()) {
    throw ValidationError("verify_block_encoding: target has wrong shape");
  }
  return spectral_norm<Scalar>(u.block() - target);
}

template <typename Scalar>
double verify_block_encoding(const BlockUnitary<Scalar>& u, const MatrixX<Scalar>& target) {
  if (target.rows() != u.system_dim || target.cols() != u.system_dim) {
    throw ValidationError("verify_block_encoding: target has wrong shape");
  }
  return spectral_norm<Scalar>(u.block() - target);
}

/// Wraps an operator so that every application (either direction) bumps `counter`.
template <typename Scalar>
BlockOperator<Scalar> counted(const BlockOperator<Scalar>& op, std::shared_ptr<long> counter) {
  auto inner = std::make_shared<BlockOperator<Scalar>>(op);
  return BlockOperator<Scalar>(
      op.ancilla_dim(), op.system_dim(), op.flag(),
      [inner, counter](const VectorX<Scalar>& v) {
        ++*counter;
        return inner->apply(v);
      },
      [inner, counter](const VectorX<Scalar>& v) {
        ++*counter;
        return inner->apply_adjoint(v);
      },
      op.cost());
}

inline constexpr double kNormDrift = 1e-8;

template <typename Scalar>
class QuantumState {
 public:
  using Vec = VectorX<Scalar>;

  QuantumState(Vec amplitudes, Index ancilla_dim, Index system_dim, double tolerance = 1e-10)
      : amplitudes_(std::move(amplitudes)), ancilla_dim_(ancilla_dim), system_dim_(system_dim) {
    if (amplitudes_.size() != ancilla_dim * system_dim) throw ValidationError("state: dimension mismatch");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > tolerance) throw ValidationError("state: norm " + std::to_string(norm) + " is not 1");
  }

  /// |flag> (x) psi for a unit system vector psi.
  static QuantumState flagged(const Vec& psi, Index ancilla_dim, Index flag) {
    Vec v = Vec::Zero(ancilla_dim * psi.size());
    v.segment(flag * psi.size(), psi.size()) = psi;
    return QuantumState(std::move(v), ancilla_dim, psi.size());
  }

  const Vec& amplitudes() const { return amplitudes_; }
  Index ancilla_dim() const { return ancilla_dim_; }
  Index system_dim() const { return system_dim_; }
  Index dim() const { return amplitudes_.size(); }

 private:
  Vec amplitudes_;
  Index ancilla_dim_;
  Index system_dim_;
};

template <typename Scalar>
QuantumState<Scalar> apply_unitary(const BlockOperator<Scalar>& u, const QuantumState<Scalar>& state) {
  if (u.dim() != state.dim()) throw ValidationError("apply_unitary: dimension mismatch");
  VectorX<Scalar> out = u.apply(state.amplitudes());
  const double norm = out.norm();
  if (std::abs(norm - 1.0) > kNormDrift) {
    throw IntegrityError("apply_unitary: norm drifted to " + std::to_string(norm));
  }
  return QuantumState<Scalar>(std::move(out), state.ancilla_dim(), state.system_dim(), kNormDrift);
}

/// Probability of the vertex register landing in `vertices`, over all ancilla states.
template <typename Scalar>
Vector vertex_marginal(const QuantumState<Scalar>& state) {
  Vector p = Vector::Zero(state.system_dim());
  for (Index a = 0; a < state.ancilla_dim(); ++a)
    p += state.amplitudes().segment(a * state.system_dim(), state.system_dim()).cwiseAbs2().template cast<double>();
  return p;
}

/// Probability of the outcome `flag` on the ancilla and a vertex in `vertices`.
template <typename Scalar>
double measure_vertex(const QuantumState<Scalar>& state, const VertexSet& vertices, Index flag) {
  double total = 0.0;
  for (Index x : vertices) total += std::norm(state.amplitudes()[flag * state.system_dim() + x]);
  return total;
}

/// Probability of a vertex in `vertices` with the ancilla traced out.
template <typename Scalar>
double measure_vertex(const QuantumState<Scalar>& state, const VertexSet& vertices) {
  const Vector p = vertex_marginal(state);
  double total = 0.0;
  for (Index x : vertices) total += p[x];
  return total;
}

/// sin^2((2k+1) asin(sqrt(p)))
inline double amplified_probability(double p, long rounds) {
  const double theta = std::asin(std::sqrt(std::clamp(p, 0.0, 1.0)));
  const double s = std::sin(static_cast<double>(2 * rounds + 1) * theta);
  return s * s;
}

/// `rounds` Grover iterations (2|psi><psi| - I)(I - 2 Pi_good) starting from
/// the prepared state; `good` marks basis indices of the good subspace.
template <typename Scalar>
VectorX<Scalar> amplitude_amplify(const VectorX<Scalar>& prepared, const std::vector<char>& good, long rounds) {
  if (static_cast<Index>(good.size()) != prepared.size()) throw ValidationError("amplitude_amplify: mask size");
  if (rounds < 0) throw ValidationError("amplitude_amplify: negative round count");
  VectorX<Scalar> v = prepared;
  for (long k = 0; k < rounds; ++k) {
    for (Index i = 0; i < v.size(); ++i)
      if (good[static_cast<std::size_t>(i)]) v[i] = -v[i];
    const Scalar overlap = prepared.dot(v);  // conjugates the first argument
    v = Scalar(2) * overlap * prepared - v;
  }
  return v;
}

template <typename Scalar>
QuantumState<Scalar> amplitude_amplify(const QuantumState<Scalar>& prepared, const std::vector<char>& good,
                                       long rounds) {
  return QuantumState<Scalar>(amplitude_amplify(prepared.amplitudes(), good, rounds), prepared.ancilla_dim(),
                              prepared.system_dim(), kNormDrift);
}

}  // namespace qws
