#include "qwsearch/graph.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace qws {

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Support graph adjacency: u ~ v iff weight(u, v) > 0 (self-loops included).
Ergodicity classify(const Matrix& support) {
  const Index n = support.rows();
  std::vector<int> color(static_cast<std::size_t>(n), -1);
  std::deque<Index> queue{0};
  color[0] = 0;
  bool bipartite = true;
  Index seen = 1;
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index v = 0; v < n; ++v) {
      if (!(support(u, v) > 0.0)) continue;
      if (color[v] < 0) {
        color[v] = 1 - color[u];
        ++seen;
        queue.push_back(v);
      } else if (color[v] == color[u]) {
        bipartite = false;  // odd cycle or self-loop
      }
    }
  }
  if (seen < n) return Ergodicity::disconnected;
  return bipartite ? Ergodicity::bipartite : Ergodicity::ergodic;
}

}  // namespace

WeightedGraph::WeightedGraph(Matrix weights, const Tolerances& tol) : weights_(std::move(weights)) {
  const Index n = weights_.rows();
  if (n == 0 || weights_.cols() != n) throw ValidationError("graph: weight matrix must be square and nonempty");
  if (n > tol.max_vertices) {
    throw SizeError("graph: " + std::to_string(n) + " vertices exceeds cap " + std::to_string(tol.max_vertices));
  }
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v) {
      const double w = weights_(u, v);
      if (!std::isfinite(w) || w < 0.0) {
        throw ValidationError("graph: weight(" + std::to_string(u) + "," + std::to_string(v) + ") = " + fmt_double(w) +
                              " must be finite and >= 0");
      }
      const double scale = std::max({1.0, std::abs(w), std::abs(weights_(v, u))});
      if (std::abs(w - weights_(v, u)) > tol.algebraic * scale) {
        throw ValidationError("graph: asymmetric edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      }
    }
  }
  weights_ = 0.5 * (weights_ + weights_.transpose()).eval();
  degrees_ = weights_.rowwise().sum();
  total_ = degrees_.sum();
  for (Index u = 0; u < n; ++u) {
    if (!(degrees_[u] > 0.0)) throw ValidationError("graph: isolated vertex " + std::to_string(u));
  }
}

std::vector<Index> WeightedGraph::neighbors(Index u) const {
  std::vector<Index> out;
  for (Index v = 0; v < size(); ++v)
    if (weights_(u, v) > 0.0) out.push_back(v);
  return out;
}

double detailed_balance_residual(const Matrix& transition, const Vector& stationary) {
  const Matrix flux = stationary.asDiagonal() * transition;
  return (flux - flux.transpose()).cwiseAbs().maxCoeff();
}

ReversibleChain::ReversibleChain(Matrix transition, Vector stationary, const Tolerances& tol)
    : transition_(std::move(transition)), stationary_(std::move(stationary)) {
  const Index n = transition_.rows();
  if (n == 0 || transition_.cols() != n || stationary_.size() != n) {
    throw ValidationError("chain: transition matrix must be square and match the stationary vector");
  }
  if (n > tol.max_vertices) {
    throw SizeError("chain: " + std::to_string(n) + " states exceeds cap " + std::to_string(tol.max_vertices));
  }
  if (!transition_.allFinite() || transition_.minCoeff() < -tol.algebraic) {
    throw ValidationError("chain: transition entries must be finite and nonnegative");
  }
  transition_ = transition_.cwiseMax(0.0);
  const double row_err = (transition_.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_err > tol.algebraic) throw ValidationError("chain: row sums deviate from 1 by " + fmt_double(row_err));
  if (stationary_.minCoeff() < 0.0 || std::abs(stationary_.sum() - 1.0) > tol.algebraic) {
    throw ValidationError("chain: stationary vector is not a probability vector");
  }
  const double balance = detailed_balance_residual(transition_, stationary_);
  if (balance > tol.algebraic) {
    throw ValidationError("chain: not reversible, max detailed-balance residual " + fmt_double(balance));
  }
  const double fixed = (stationary_.transpose() * transition_ - stationary_.transpose()).cwiseAbs().maxCoeff();
  if (fixed > tol.algebraic) throw ValidationError("chain: pi P != pi, residual " + fmt_double(fixed));
}

double ReversibleChain::stationary_mass(const VertexSet& subset) const {
  double total = 0.0;
  for (Index u : subset) total += stationary_[u];
  return total;
}

ReversibleChain build_chain(const WeightedGraph& graph, const Tolerances& tol) {
  const Vector& deg = graph.degrees();
  for (Index u = 0; u < graph.size(); ++u) {
    if (!(deg[u] > 0.0)) throw ValidationError("build_chain: isolated vertex " + std::to_string(u));
  }
  Matrix transition = deg.cwiseInverse().asDiagonal() * graph.weights();
  return ReversibleChain(std::move(transition), graph.stationary(), tol);
}

WeightedGraph chain_to_graph(const ReversibleChain& chain, const Tolerances& tol) {
  const double residual = detailed_balance_residual(chain.transition(), chain.stationary());
  if (residual > tol.algebraic) {
    throw ValidationError("chain_to_graph: chain is not reversible, max residual " + fmt_double(residual));
  }
  Matrix w = 2.0 * (chain.stationary().asDiagonal() * chain.transition());
  w = 0.5 * (w + w.transpose()).eval();
  return WeightedGraph(std::move(w), tol);
}

const char* to_string(Ergodicity verdict) {
  switch (verdict) {
    case Ergodicity::ergodic:
      return "ergodic";
    case Ergodicity::disconnected:
      return "disconnected";
    case Ergodicity::bipartite:
      return "bipartite";
  }
  return "unknown";
}

Ergodicity check_ergodic(const WeightedGraph& graph) { return classify(graph.weights()); }

Ergodicity check_ergodic(const ReversibleChain& chain) {
  // Reversible with positive pi, so the support of P is symmetric.
  return classify(chain.transition());
}

Matrix symmetric_form(const ReversibleChain& chain) {
  const Vector root = chain.stationary().cwiseSqrt();
  Matrix d = root.asDiagonal() * chain.transition() * root.cwiseInverse().asDiagonal();
  return 0.5 * (d + d.transpose());
}

Vector chain_eigenvalues(const ReversibleChain& chain) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_form(chain), Eigen::EigenvaluesOnly);
  Vector values = solver.eigenvalues();
  std::sort(values.data(), values.data() + values.size(), std::greater<>());
  return values;
}

double spectral_gap(const ReversibleChain& chain) {
  const Ergodicity verdict = check_ergodic(chain);
  if (verdict != Ergodicity::ergodic) {
    throw PreconditionError(std::string("spectral_gap: chain is ") + to_string(verdict));
  }
  const Vector values = chain_eigenvalues(chain);
  if (values.size() == 1) return 1.0;
  const double second = 1.0 - std::abs(values[1]);
  const double last = 1.0 - std::abs(values[values.size() - 1]);
  return std::clamp(std::min(second, last), 0.0, 1.0);
}

ChainPower chain_power(const ReversibleChain& chain, long t, const Tolerances& tol) {
  if (t < 0) throw PreconditionError("chain_power: negative exponent");
  const Index n = chain.size();
  if (t == 0) return {ReversibleChain(Matrix::Identity(n, n), chain.stationary(), tol), true};
  Matrix result = Matrix::Identity(n, n);
  Matrix base = chain.transition();
  for (long e = t; e > 0; e >>= 1) {
    if (e & 1) result = result * base;
    if (e > 1) base = base * base;
  }
  // Renormalize rows against drift from repeated products.
  result = result.rowwise().sum().cwiseInverse().asDiagonal() * result;
  return {ReversibleChain(std::move(result), chain.stationary(), tol), false};
}

}  // namespace qws
