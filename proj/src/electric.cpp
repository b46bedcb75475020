#include "qwsearch/electric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace qws {

namespace {

std::vector<char> reachable_from(const WeightedGraph& g, const VertexSet& start) {
  const Index n = g.size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<Index> queue;
  for (Index v : start) {
    seen[v] = 1;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index v = 0; v < n; ++v) {
      if (!seen[v] && g.weight(u, v) > 0.0) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

double restricted_mass(const Vector& p, const VertexSet& set) {
  double total = 0.0;
  for (Index u : set) total += p[u];
  return total;
}

}  // namespace

Resistance effective_resistance(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked) {
  const Index n = g.size();
  if (sigma.size() != n) throw ValidationError("effective_resistance: sigma has wrong length");
  if (marked.empty()) throw ValidationError("effective_resistance: marked set is empty");
  marked.check_range(n, "effective_resistance");
  if (sigma.support().intersects(marked)) {
    throw ValidationError("effective_resistance: sigma must be supported on unmarked vertices");
  }

  const std::vector<char> reach = reachable_from(g, marked);
  for (Index u : sigma.support()) {
    if (!reach[u]) {
      throw InfiniteResistanceError("effective_resistance: vertex " + std::to_string(u) + " cannot reach M");
    }
  }

  // Free vertices: those connected to M but not in M. Everything else is grounded.
  std::vector<Index> free;
  for (Index u = 0; u < n; ++u)
    if (reach[u] && !marked.contains(u)) free.push_back(u);

  Vector phi = Vector::Zero(n);
  if (!free.empty()) {
    const Index k = static_cast<Index>(free.size());
    Matrix lap(k, k);
    Vector rhs(k);
    for (Index i = 0; i < k; ++i) {
      const Index u = free[i];
      for (Index j = 0; j < k; ++j) lap(i, j) = -g.weight(u, free[j]);
      lap(i, i) += g.degree(u);
      rhs[i] = sigma[u];
    }
    const Vector x = lap.llt().solve(rhs);
    for (Index i = 0; i < k; ++i) phi[free[i]] = x[i];
  }

  Matrix flow = Matrix::Zero(n, n);
  for (Index u = 0; u < n; ++u)
    for (Index v = 0; v < n; ++v)
      if (u != v && g.weight(u, v) > 0.0) flow(u, v) = (phi[u] - phi[v]) * g.weight(u, v);

  const double value = sigma.probabilities().dot(phi);
  return {value, UnitFlow{std::move(flow), std::move(phi), sigma, marked}};
}

double stationary_resistance(const WeightedGraph& g, const VertexSet& marked) {
  const Vector pi = g.stationary();
  const VertexSet rest = marked.complement(g.size());
  if (rest.empty()) return 0.0;
  const double off = 1.0 - restricted_mass(pi, marked);
  return off * off * effective_resistance(g, Distribution::restricted(pi, rest), marked).value;
}

double commute_quantity(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked) {
  return g.total_weight() * effective_resistance(g, sigma, marked).value;
}

double flow_energy(const WeightedGraph& g, const Matrix& flow) {
  double energy = 0.0;
  for (Index u = 0; u < g.size(); ++u) {
    for (Index v = u + 1; v < g.size(); ++v) {
      const double p = flow(u, v);
      if (p == 0.0) continue;
      if (!(g.weight(u, v) > 0.0)) {
        throw ValidationError("flow_energy: flow on absent edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
      }
      energy += p * p / g.weight(u, v);
    }
  }
  return energy;
}

double flow_constraint_residual(const WeightedGraph& g, const Matrix& flow, const Distribution& sigma,
                                const VertexSet& marked) {
  const Index n = g.size();
  double worst = (flow + flow.transpose()).cwiseAbs().maxCoeff();
  double into_marked = 0.0;
  for (Index u = 0; u < n; ++u) {
    for (Index v = 0; v < n; ++v)
      if (!(g.weight(u, v) > 0.0)) worst = std::max(worst, std::abs(flow(u, v)));
    const double out = flow.row(u).sum();
    if (marked.contains(u)) {
      for (Index v = 0; v < n; ++v)
        if (!marked.contains(v)) into_marked += flow(u, v);
    } else {
      worst = std::max(worst, std::abs(out - sigma[u]));
    }
  }
  return std::max(worst, std::abs(into_marked + 1.0));
}

VertexSet Contraction::map(const VertexSet& vertices) const {
  std::vector<Index> out;
  for (Index v : vertices) out.push_back(relabel.at(static_cast<std::size_t>(v)));
  return VertexSet(std::move(out));
}

Contraction contract_set(const WeightedGraph& g, const VertexSet& subset) {
  const Index n = g.size();
  if (subset.empty()) throw ValidationError("contract_set: S is empty");
  subset.check_range(n, "contract_set");
  if (subset.size() == n) throw ValidationError("contract_set: S is the whole vertex set");

  std::vector<Index> relabel(static_cast<std::size_t>(n));
  Index next = 1;
  for (Index u = 0; u < n; ++u) relabel[u] = subset.contains(u) ? 0 : next++;

  Matrix w = Matrix::Zero(next, next);
  for (Index u = 0; u < n; ++u)
    for (Index v = 0; v < n; ++v) w(relabel[u], relabel[v]) += g.weight(u, v);
  return {WeightedGraph(std::move(w)), std::move(relabel)};
}

double set_resistance(const WeightedGraph& g, const VertexSet& subset, const VertexSet& marked) {
  if (subset.intersects(marked)) throw ValidationError("set_resistance: S and M intersect");
  const Contraction c = contract_set(g, subset);
  return effective_resistance(c.graph, Distribution::point_mass(c.graph.size(), 0), c.map(marked)).value;
}

Distribution ModifiedInstance::lift(const Distribution& rho) const {
  if (rho.size() != original_size) throw ValidationError("lift: distribution has wrong length");
  Vector p = Vector::Zero(graph.size());
  for (Index u = 0; u < original_size; ++u) {
    if (rho[u] == 0.0) continue;
    if (pendant[u] < 0) throw ValidationError("lift: rho puts mass outside supp(sigma)");
    p[pendant[u]] = rho[u];
  }
  return Distribution(std::move(p));
}

ModifiedInstance build_modified_graph(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked,
                                      double C) {
  const Index n = g.size();
  if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError("build_modified_graph: C must be positive and finite");
  if (sigma.size() != n) throw ValidationError("build_modified_graph: sigma has wrong length");
  marked.check_range(n, "build_modified_graph");

  const VertexSet support = sigma.support();
  const Index size = n + support.size();
  Matrix w = Matrix::Zero(size, size);
  w.topLeftCorner(n, n) = g.weights();

  std::vector<Index> pendant(static_cast<std::size_t>(n), -1);
  std::vector<Index> origin(static_cast<std::size_t>(size));
  for (Index u = 0; u < n; ++u) origin[u] = u;
  Vector start = Vector::Zero(size);
  Index next = n;
  for (Index u : support) {
    pendant[u] = next;
    origin[next] = u;
    const double weight = sigma[u] * g.total_weight() / C;
    w(u, next) = weight;
    w(next, u) = weight;
    start[next] = sigma[u];
    ++next;
  }

  Tolerances tol;
  tol.max_vertices = std::max<Index>(tol.max_vertices, 2 * n);
  return ModifiedInstance{WeightedGraph(std::move(w), tol),
                          Distribution(std::move(start)),
                          marked,
                          VertexSet::range(n, size),
                          C,
                          n,
                          std::move(pendant),
                          std::move(origin)};
}

double modified_commute_prediction(const WeightedGraph& g, const Distribution& sigma, const Distribution& rho,
                                   const VertexSet& marked, double C) {
  double inv_p = 0.0;
  for (Index u = 0; u < g.size(); ++u) {
    if (rho[u] == 0.0) continue;
    if (sigma[u] == 0.0) throw ValidationError("modified_commute_prediction: rho not supported on supp(sigma)");
    inv_p += rho[u] * rho[u] / sigma[u];
  }
  return (commute_quantity(g, rho, marked) / C + inv_p) * (C + 2.0);
}

}  // namespace qws
