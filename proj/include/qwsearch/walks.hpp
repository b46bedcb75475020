#pragma once

// Walk operators: discriminant matrices, the Szegedy walk on the pair space,
// the interpolated-walk circuit and the modified-graph walk.

#include "qwsearch/electric.hpp"
#include "qwsearch/graph.hpp"
#include "qwsearch/quantum.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace qws {

using WalkOperator = BlockOperator<double>;

/// Symmetric matrix with a cached eigendecomposition.
struct DiscriminantMatrix {
  Matrix D;
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns

  explicit DiscriminantMatrix(Matrix symmetric);

  Index size() const { return D.rows(); }
  /// V f(Lambda) V^T
  Matrix function(const std::function<double(double)>& f) const;
  Matrix power(long t) const;
};

/// D(P) = sqrt(P o P^T); rejects chains for which this differs from
/// diag(sqrt(pi)) P diag(sqrt(pi))^{-1}.
DiscriminantMatrix discriminant(const ReversibleChain& c, const Tolerances& tol = {});

/// D^t psi through the eigendecomposition.
Vector apply_Dt_exact(const DiscriminantMatrix& d, long t, const Vector& psi);

/// W(P) = V^dagger Shift V on the n^2 pair space; flag = ancilla state 0.
BlockUnitary<double> szegedy_walk(const ReversibleChain& c, Index max_dim = 4096);

/// Membership test for a vertex subset; counts how often it is consulted.
class MembershipOracle {
 public:
  MembershipOracle(const VertexSet& members, Index system_dim);
  explicit MembershipOracle(std::vector<char> mask);

  Index size() const { return static_cast<Index>(mask_->size()); }
  bool contains(Index x) const { return (*mask_)[static_cast<std::size_t>(x)] != 0; }
  const std::vector<char>& mask() const { return *mask_; }
  long calls() const { return *calls_; }
  void record_call() const { ++*calls_; }

 private:
  std::shared_ptr<const std::vector<char>> mask_;
  std::shared_ptr<long> calls_;
};

enum class LeftBracket {
  adjoint,  // B_R^dagger; block-encodes +D(P(s))
  literal,  // V C V Y as printed; block-encodes -D(P(s))
};

/// Walk operator for the interpolated chain P(s) from one controlled
/// application of w and two check reflections. Adds one qubit as the most
/// significant ancilla register; new flag = |0> (x) w's flag.
WalkOperator interpolated_walk_unitary(const WalkOperator& w, const MembershipOracle& check, double s,
                                       LeftBracket left = LeftBracket::adjoint);

/// Block produced by interpolated_walk_unitary given the inner block D:
/// diag(s 1_M) + B D B with B = diag(sqrt(1-s) on M, 1 elsewhere).
Matrix interpolated_block(const Matrix& D, const std::vector<char>& marked, double s);

/// Per-vertex rotation Lambda(sigma,C): |0>|u> -> (alpha_u |0> + beta_u |1>)|u>,
/// completed as [[alpha, -beta], [beta, alpha]].
struct LambdaRotation {
  Vector alpha;
  Vector beta;
  Index size() const { return alpha.size(); }
};

LambdaRotation lambda_unitary(const Distribution& sigma, const Vector& pi, double C);

/// Lambda as a dense unitary on (qubit a) (x) X, flag a = 0.
BlockUnitary<double> lambda_block_unitary(const LambdaRotation& lambda);

/// W(P') = (I (x) cbar_b Lambda^dagger) cbar_ab W(P) (I (x) SWAP_ab cbar_b Lambda).
/// Registers [A][a][b][X]: ancilla = A (x) a, system = b (x) X of size 2n.
WalkOperator modified_walk_unitary(const WalkOperator& w, const LambdaRotation& lambda);

/// [[diag(alpha) D diag(alpha), diag(beta)], [diag(beta), 0]]
Matrix modified_block(const Matrix& D, const LambdaRotation& lambda);

/// Index of system state b*n + x of the modified walk in the modified graph
/// (layer 0 keeps x, layer 1 maps to the pendant copy), -1 if pruned.
std::vector<Index> modified_layout(const ModifiedInstance& inst);

/// Scatter a matrix over the modified graph into the 2n-dimensional walk layout.
Matrix embed_modified(const ModifiedInstance& inst, const Matrix& over_graph);

/// Gather a 2n-layout vector back onto the modified graph's vertices.
Vector restrict_modified(const ModifiedInstance& inst, const Vector& layout_vector);

/// Rescatter a vector over the modified graph into the 2n layout.
Vector lift_modified(const ModifiedInstance& inst, const Vector& over_graph);

}  // namespace qws
