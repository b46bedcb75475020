#include "qwsearch/walks.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <sstream>

namespace qws {

namespace {

using Gate = std::array<double, 4>;  // row-major 2x2

Gate multiply(const Gate& a, const Gate& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

Gate transpose(const Gate& g) { return {g[0], g[2], g[1], g[3]}; }

// Apply a single-qubit gate to the most significant qubit of v (halves of length `half`).
void apply_top(const Gate& g, Vector& v, Index half) {
  for (Index i = 0; i < half; ++i) {
    const double a = v[i];
    const double b = v[half + i];
    v[i] = g[0] * a + g[1] * b;
    v[half + i] = g[2] * a + g[3] * b;
  }
}

// Flip the top qubit wherever the vertex (index mod n) is a member.
void apply_check(const MembershipOracle& check, Vector& v, Index half) {
  check.record_call();
  const Index n = check.size();
  for (Index i = 0; i < half; ++i)
    if (check.contains(i % n)) std::swap(v[i], v[half + i]);
}

// Orthonormal basis whose first column is `first` (unit), completed by an
// ordered sweep over the standard basis.
Matrix complete_basis(const Vector& first) {
  const Index n = first.size();
  Matrix q(n, n);
  q.col(0) = first;
  Index filled = 1;
  for (Index e = 0; e < n && filled < n; ++e) {
    Vector v = Vector::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass) v -= q.leftCols(filled) * (q.leftCols(filled).transpose() * v);
    const double norm = v.norm();
    if (norm > 1e-6) q.col(filled++) = v / norm;
  }
  if (filled != n) throw Error("complete_basis: sweep did not produce a full basis");
  return q;
}

}  // namespace

DiscriminantMatrix::DiscriminantMatrix(Matrix symmetric) : D(std::move(symmetric)) {
  if (D.rows() != D.cols()) throw ValidationError("discriminant: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(D);
  values = solver.eigenvalues();
  vectors = solver.eigenvectors();
}

Matrix DiscriminantMatrix::function(const std::function<double(double)>& f) const {
  Vector fv(values.size());
  for (Index i = 0; i < values.size(); ++i) fv[i] = f(values[i]);
  return vectors * fv.asDiagonal() * vectors.transpose();
}

Matrix DiscriminantMatrix::power(long t) const {
  if (t < 0) throw ValidationError("power: negative exponent");
  return function([t](double x) { return std::pow(x, static_cast<double>(t)); });
}

DiscriminantMatrix discriminant(const ReversibleChain& c, const Tolerances& tol) {
  const Matrix& p = c.transition();
  const Matrix entrywise = p.cwiseProduct(p.transpose()).cwiseSqrt();
  const Vector root = c.stationary().cwiseSqrt();
  const Matrix conjugated = root.asDiagonal() * p * root.cwiseInverse().asDiagonal();
  const double gap = (entrywise - conjugated).cwiseAbs().maxCoeff();
  if (gap > tol.algebraic) {
    std::ostringstream msg;
    msg << "discriminant: sqrt(P o P^T) and the conjugated form differ by " << gap;
    throw ValidationError(msg.str());
  }
  return DiscriminantMatrix(entrywise);
}

Vector apply_Dt_exact(const DiscriminantMatrix& d, long t, const Vector& psi) {
  if (t < 0) throw ValidationError("apply_Dt_exact: negative exponent");
  if (t == 0) return psi;
  Vector coeff = d.vectors.transpose() * psi;
  for (Index i = 0; i < coeff.size(); ++i) coeff[i] *= std::pow(d.values[i], static_cast<double>(t));
  return d.vectors * coeff;
}

BlockUnitary<double> szegedy_walk(const ReversibleChain& c, Index max_dim) {
  const Index n = c.size();
  if (n * n > max_dim) {
    throw SizeError("szegedy_walk: pair space of dimension " + std::to_string(n * n) + " exceeds cap " +
                    std::to_string(max_dim));
  }
  // V acts on the ancilla register, controlled by the vertex x:
  // V (|a'>|x>) = sum_a local[x](a, a') |a>|x>, local[x] column 0 = (sqrt P_{x,v})_v.
  std::vector<Matrix> local;
  local.reserve(static_cast<std::size_t>(n));
  for (Index x = 0; x < n; ++x) local.push_back(complete_basis(c.transition().row(x).transpose().cwiseSqrt()));

  // W = V^T Shift V with Shift |a>|x> = |x>|a>:
  // <a,x| W |a',x'> = local[x'](x, a') * local[x](x', a).
  Matrix w(n * n, n * n);
  for (Index a = 0; a < n; ++a)
    for (Index x = 0; x < n; ++x)
      for (Index a2 = 0; a2 < n; ++a2)
        for (Index x2 = 0; x2 < n; ++x2) w(a * n + x, a2 * n + x2) = local[x2](x, a2) * local[x](x2, a);
  return BlockUnitary<double>{std::move(w), n, n, 0, OpCost{1, 0, 0}};
}

MembershipOracle::MembershipOracle(const VertexSet& members, Index system_dim)
    : MembershipOracle(members.mask(system_dim)) {
  members.check_range(system_dim, "membership oracle");
}

MembershipOracle::MembershipOracle(std::vector<char> mask)
    : mask_(std::make_shared<const std::vector<char>>(std::move(mask))), calls_(std::make_shared<long>(0)) {}

WalkOperator interpolated_walk_unitary(const WalkOperator& w, const MembershipOracle& check, double s,
                                       LeftBracket left) {
  if (!(s >= 0.0 && s < 1.0)) throw ValidationError("interpolated_walk_unitary: s must lie in [0,1)");
  if (check.size() != w.system_dim()) throw ValidationError("interpolated_walk_unitary: oracle size mismatch");
  const double theta = std::acos(std::sqrt(s)) / 2.0;
  const Gate v{std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta)};
  const Gate y{0.0, 1.0, -1.0, 0.0};
  const Gate yv = multiply(y, v);
  const Gate vy = multiply(v, y);

  // Right bracket, in application order: V, C, YV.
  // Left bracket: (YV)^T, C, V for the adjoint form; VY, C, V for the literal one.
  const Gate left_first = left == LeftBracket::adjoint ? transpose(yv) : vy;
  const Index half = w.dim();
  auto inner = std::make_shared<WalkOperator>(w);

  auto forward = [=](const Vector& in) {
    Vector out = in;
    apply_top(v, out, half);
    apply_check(check, out, half);
    apply_top(yv, out, half);
    out.tail(half) = inner->apply(out.tail(half));
    apply_top(left_first, out, half);
    apply_check(check, out, half);
    apply_top(v, out, half);
    return out;
  };
  auto backward = [=](const Vector& in) {
    Vector out = in;
    apply_top(transpose(v), out, half);
    apply_check(check, out, half);
    apply_top(transpose(left_first), out, half);
    out.tail(half) = inner->apply_adjoint(out.tail(half));
    apply_top(transpose(yv), out, half);
    apply_check(check, out, half);
    apply_top(transpose(v), out, half);
    return out;
  };
  OpCost cost = w.cost();
  cost.check += 2;
  return WalkOperator(2 * w.ancilla_dim(), w.system_dim(), w.flag(), forward, backward, cost);
}

Matrix interpolated_block(const Matrix& D, const std::vector<char>& marked, double s) {
  const Index n = D.rows();
  Vector scale = Vector::Ones(n);
  Vector hold = Vector::Zero(n);
  for (Index u = 0; u < n; ++u) {
    if (marked[static_cast<std::size_t>(u)]) {
      scale[u] = std::sqrt(1.0 - s);
      hold[u] = s;
    }
  }
  Matrix out = scale.asDiagonal() * D * scale.asDiagonal();
  out.diagonal() += hold;
  return out;
}

LambdaRotation lambda_unitary(const Distribution& sigma, const Vector& pi, double C) {
  if (!(C > 0.0)) throw ValidationError("lambda_unitary: C must be positive");
  if (sigma.size() != pi.size()) throw ValidationError("lambda_unitary: sigma and pi differ in length");
  const Index n = pi.size();
  LambdaRotation out{Vector(n), Vector(n)};
  for (Index u = 0; u < n; ++u) {
    const double extra = sigma[u] / C;
    const double total = pi[u] + extra;
    if (!(total > 0.0)) {
      throw ValidationError("lambda_unitary: pi_u + sigma_u/C = 0 at vertex " + std::to_string(u));
    }
    out.alpha[u] = std::sqrt(pi[u] / total);
    out.beta[u] = std::sqrt(extra / total);
  }
  return out;
}

BlockUnitary<double> lambda_block_unitary(const LambdaRotation& lambda) {
  const Index n = lambda.size();
  Matrix u = Matrix::Zero(2 * n, 2 * n);
  for (Index x = 0; x < n; ++x) {
    u(x, x) = lambda.alpha[x];
    u(x, n + x) = -lambda.beta[x];
    u(n + x, x) = lambda.beta[x];
    u(n + x, n + x) = lambda.alpha[x];
  }
  return BlockUnitary<double>{std::move(u), 2, n, 0, OpCost{0, 0, 1}};
}

WalkOperator modified_walk_unitary(const WalkOperator& w, const LambdaRotation& lambda) {
  const Index n = w.system_dim();
  const Index anc = w.ancilla_dim();
  if (lambda.size() != n) throw ValidationError("modified_walk_unitary: Lambda has wrong size");
  auto inner = std::make_shared<WalkOperator>(w);
  auto at = [n](Index a_outer, Index a, Index b, Index x) { return ((a_outer * 2 + a) * 2 + b) * n + x; };

  // Lambda on qubit a where b = 0; `sign` = -1 applies Lambda^T.
  auto rotate = [=](Vector& v, double sign) {
    for (Index r = 0; r < anc; ++r) {
      for (Index x = 0; x < n; ++x) {
        const Index i0 = at(r, 0, 0, x);
        const Index i1 = at(r, 1, 0, x);
        const double a0 = v[i0];
        const double a1 = v[i1];
        const double al = lambda.alpha[x];
        const double be = sign * lambda.beta[x];
        v[i0] = al * a0 - be * a1;
        v[i1] = be * a0 + al * a1;
      }
    }
  };
  auto swap_ab = [=](Vector& v) {
    for (Index r = 0; r < anc; ++r)
      for (Index x = 0; x < n; ++x) std::swap(v[at(r, 1, 0, x)], v[at(r, 0, 1, x)]);
  };
  auto walk = [=](Vector& v, bool adjoint) {
    Vector sub(anc * n);
    for (Index r = 0; r < anc; ++r)
      for (Index x = 0; x < n; ++x) sub[r * n + x] = v[at(r, 0, 0, x)];
    sub = adjoint ? inner->apply_adjoint(sub) : inner->apply(sub);
    for (Index r = 0; r < anc; ++r)
      for (Index x = 0; x < n; ++x) v[at(r, 0, 0, x)] = sub[r * n + x];
  };

  auto forward = [=](const Vector& in) {
    Vector v = in;
    rotate(v, 1.0);
    swap_ab(v);
    walk(v, false);
    rotate(v, -1.0);
    return v;
  };
  auto backward = [=](const Vector& in) {
    Vector v = in;
    rotate(v, 1.0);
    walk(v, true);
    swap_ab(v);
    rotate(v, -1.0);
    return v;
  };
  OpCost cost = w.cost();
  cost.lambda += 2;
  return WalkOperator(2 * anc, 2 * n, w.flag() * 2, forward, backward, cost);
}

Matrix modified_block(const Matrix& D, const LambdaRotation& lambda) {
  const Index n = D.rows();
  Matrix out = Matrix::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = lambda.alpha.asDiagonal() * D * lambda.alpha.asDiagonal();
  out.topRightCorner(n, n).diagonal() = lambda.beta;
  out.bottomLeftCorner(n, n).diagonal() = lambda.beta;
  return out;
}

std::vector<Index> modified_layout(const ModifiedInstance& inst) {
  const Index n = inst.original_size;
  std::vector<Index> layout(static_cast<std::size_t>(2 * n));
  for (Index x = 0; x < n; ++x) {
    layout[x] = x;
    layout[n + x] = inst.pendant[x];
  }
  return layout;
}

Matrix embed_modified(const ModifiedInstance& inst, const Matrix& over_graph) {
  const std::vector<Index> layout = modified_layout(inst);
  const Index m = static_cast<Index>(layout.size());
  Matrix out = Matrix::Zero(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j)
      if (layout[i] >= 0 && layout[j] >= 0) out(i, j) = over_graph(layout[i], layout[j]);
  return out;
}

Vector restrict_modified(const ModifiedInstance& inst, const Vector& layout_vector) {
  const std::vector<Index> layout = modified_layout(inst);
  Vector out = Vector::Zero(inst.graph.size());
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i] >= 0) out[layout[i]] = layout_vector[static_cast<Index>(i)];
  return out;
}

Vector lift_modified(const ModifiedInstance& inst, const Vector& over_graph) {
  const std::vector<Index> layout = modified_layout(inst);
  Vector out = Vector::Zero(static_cast<Index>(layout.size()));
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i] >= 0) out[static_cast<Index>(i)] = over_graph[layout[i]];
  return out;
}

}  // namespace qws
