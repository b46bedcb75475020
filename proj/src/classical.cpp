#include "qwsearch/classical.hpp"

#include "qwsearch/electric.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace qws {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Vertices from which `targets` is reachable (support of P is symmetric).
std::vector<char> reaches(const ReversibleChain& c, const VertexSet& targets) {
  const Index n = c.size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::deque<Index> queue;
  for (Index v : targets) {
    seen[v] = 1;
    queue.push_back(v);
  }
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    for (Index v = 0; v < n; ++v) {
      if (!seen[v] && c.transition()(v, u) > 0.0) {
        seen[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return seen;
}

// Interior vertices for a Dirichlet problem with boundary B: not in B, but able to reach B.
std::vector<Index> interior(const ReversibleChain& c, const VertexSet& boundary) {
  const std::vector<char> reach = reaches(c, boundary);
  std::vector<Index> out;
  for (Index u = 0; u < c.size(); ++u)
    if (reach[u] && !boundary.contains(u)) out.push_back(u);
  return out;
}

// I - P restricted to `rows`.
Matrix killed_generator(const ReversibleChain& c, const std::vector<Index>& rows) {
  const Index k = static_cast<Index>(rows.size());
  Matrix a(k, k);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) a(i, j) = (i == j ? 1.0 : 0.0) - c.transition()(rows[i], rows[j]);
  return a;
}

ReversibleChain hold(const ReversibleChain& c, const std::vector<double>& holding) {
  const Index n = c.size();
  Matrix p = c.transition();
  Vector pi = c.stationary();
  for (Index u = 0; u < n; ++u) {
    const double h = holding[u];
    if (h == 0.0) continue;
    p.row(u) *= (1.0 - h);
    p(u, u) += h;
    pi[u] /= (1.0 - h);
  }
  pi /= pi.sum();
  return ReversibleChain(std::move(p), std::move(pi));
}

void check_fraction(double q, const char* what) {
  if (!(q >= 0.0 && q < 1.0)) {
    std::ostringstream msg;
    msg << what << " = " << q << " must lie in [0,1)";
    throw ValidationError(msg.str());
  }
}

}  // namespace

InterpolationParams InterpolationParams::from_holding(double r_S, double r_M) {
  if (!(r_S >= 1.0) || !(r_M >= 1.0)) throw ValidationError("holding times must be >= 1");
  return {1.0 - 1.0 / r_S, 1.0 - 1.0 / r_M};
}

void InterpolationParams::validate() const {
  check_fraction(q_S, "q_S");
  check_fraction(q_M, "q_M");
}

ReversibleChain interpolate_absorbing(const ReversibleChain& c, const VertexSet& marked, double s) {
  check_fraction(s, "interpolate_absorbing: s");
  if (marked.empty()) throw ValidationError("interpolate_absorbing: M is empty");
  marked.check_range(c.size(), "interpolate_absorbing");
  std::vector<double> holding(static_cast<std::size_t>(c.size()), 0.0);
  for (Index u : marked) holding[u] = s;
  return hold(c, holding);
}

ReversibleChain interpolate_two(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked,
                                const InterpolationParams& q) {
  q.validate();
  start.check_range(c.size(), "interpolate_two");
  marked.check_range(c.size(), "interpolate_two");
  if (start.intersects(marked)) throw ValidationError("interpolate_two: S and M intersect");
  std::vector<double> holding(static_cast<std::size_t>(c.size()), 0.0);
  for (Index u : start) holding[u] = q.q_S;
  for (Index u : marked) holding[u] = q.q_M;
  return hold(c, holding);
}

Vector hitting_times(const ReversibleChain& c, const VertexSet& marked) {
  if (marked.empty()) throw ValidationError("hitting_times: M is empty");
  marked.check_range(c.size(), "hitting_times");
  Vector h = Vector::Constant(c.size(), kInf);
  for (Index u : marked) h[u] = 0.0;
  const std::vector<Index> rows = interior(c, marked);
  if (!rows.empty()) {
    const Vector x = killed_generator(c, rows).partialPivLu().solve(Vector::Ones(static_cast<Index>(rows.size())));
    for (std::size_t i = 0; i < rows.size(); ++i) h[rows[i]] = x[static_cast<Index>(i)];
  }
  return h;
}

ExpectedTime exact_hitting_time(const ReversibleChain& c, const VertexSet& marked, const Distribution& sigma) {
  if (sigma.size() != c.size()) throw ValidationError("exact_hitting_time: sigma has wrong length");
  const Vector h = hitting_times(c, marked);
  double total = 0.0;
  for (Index u : sigma.support()) {
    if (std::isinf(h[u])) return {kInf, true};
    total += sigma[u] * h[u];
  }
  return {total, false};
}

ExpectedTime hitting_time(const ReversibleChain& c, const VertexSet& marked) {
  return exact_hitting_time(c, marked, Distribution(c.stationary(), 1e-9));
}

Distribution hitting_distribution(const ReversibleChain& c, const VertexSet& marked, const Distribution& sigma) {
  const Index n = c.size();
  const std::vector<Index> rows = interior(c, marked);
  const std::vector<char> reach = reaches(c, marked);
  for (Index u : sigma.support())
    if (!reach[u]) throw InfiniteResistanceError("hitting_distribution: M unreachable from vertex " + std::to_string(u));

  // G(u, m) = Pr_u(Y_{tau_M} = m).
  Matrix g = Matrix::Zero(n, marked.size());
  Index col = 0;
  for (Index m : marked) g(m, col++) = 1.0;
  if (!rows.empty()) {
    const Index k = static_cast<Index>(rows.size());
    Matrix rhs(k, marked.size());
    for (Index i = 0; i < k; ++i) {
      col = 0;
      for (Index m : marked) rhs(i, col++) = c.transition()(rows[i], m);
    }
    const Matrix x = killed_generator(c, rows).partialPivLu().solve(rhs);
    for (Index i = 0; i < k; ++i) g.row(rows[i]) = x.row(i);
  }
  const Vector mu_m = g.transpose() * sigma.probabilities();
  Vector mu = Vector::Zero(n);
  col = 0;
  for (Index m : marked) mu[m] = std::max(0.0, mu_m[col++]);
  return Distribution(mu / mu.sum(), 1e-9);
}

double exact_return_prob(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked) {
  if (start.empty() || marked.empty()) throw ValidationError("exact_return_prob: S and M must be nonempty");
  start.check_range(c.size(), "exact_return_prob");
  marked.check_range(c.size(), "exact_return_prob");
  if (start.intersects(marked)) throw ValidationError("exact_return_prob: S and M intersect");

  std::vector<Index> both(start.begin(), start.end());
  both.insert(both.end(), marked.begin(), marked.end());
  const VertexSet boundary(std::move(both));

  // h = Pr(hit M before S), harmonic off S u M.
  Vector h = Vector::Zero(c.size());
  for (Index m : marked) h[m] = 1.0;
  const std::vector<Index> rows = interior(c, boundary);
  if (!rows.empty()) {
    const Index k = static_cast<Index>(rows.size());
    Vector rhs = Vector::Zero(k);
    for (Index i = 0; i < k; ++i)
      for (Index m : marked) rhs[i] += c.transition()(rows[i], m);
    const Vector x = killed_generator(c, rows).partialPivLu().solve(rhs);
    for (Index i = 0; i < k; ++i) h[rows[i]] = x[i];
  }

  const double mass = c.stationary_mass(start);
  double total = 0.0;
  for (Index s : start) total += c.stationary()[s] / mass * c.transition().row(s).dot(h);
  return total;
}

ExpectedTime exact_expected_return(const ReversibleChain& c, const VertexSet& start) {
  if (start.empty()) throw ValidationError("exact_expected_return: S is empty");
  if (check_ergodic(c) == Ergodicity::disconnected) {
    throw PreconditionError("exact_expected_return: chain is reducible");
  }
  const Vector k = hitting_times(c, start);
  const double mass = c.stationary_mass(start);
  double total = 0.0;
  for (Index s : start) total += c.stationary()[s] / mass * (1.0 + c.transition().row(s).dot(k));
  return {total, false};
}

ExpectedTime exact_commute_time(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked,
                                const Distribution& sigma) {
  if (start.intersects(marked)) throw ValidationError("exact_commute_time: S and M intersect");
  for (Index u : sigma.support())
    if (!start.contains(u)) throw ValidationError("exact_commute_time: sigma must be supported on S");
  const ExpectedTime to_marked = exact_hitting_time(c, marked, sigma);
  if (to_marked.infinite) return to_marked;
  const Distribution mu = hitting_distribution(c, marked, sigma);
  const ExpectedTime back = exact_hitting_time(c, start, mu);
  if (back.infinite) return back;
  return {to_marked.value + back.value, false};
}

double chain_set_commute(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked) {
  const WeightedGraph g = chain_to_graph(c);
  return g.total_weight() * set_resistance(g, start, marked);
}

ChainSampler::ChainSampler(const ReversibleChain& c) {
  const Index n = c.size();
  cumulative_.resize(static_cast<std::size_t>(n));
  for (Index u = 0; u < n; ++u) {
    double acc = 0.0;
    for (Index v = 0; v < n; ++v) {
      acc += c.transition()(u, v);
      cumulative_[u].push_back(acc);
    }
  }
}

Index ChainSampler::step(Index from, std::mt19937_64& rng) const {
  const auto& row = cumulative_[static_cast<std::size_t>(from)];
  std::uniform_real_distribution<double> unit(0.0, row.back());
  const double x = unit(rng);
  auto it = std::upper_bound(row.begin(), row.end(), x);
  if (it != row.end()) return static_cast<Index>(it - row.begin());
  // Rounding at the top end: take the last state with positive probability.
  Index v = static_cast<Index>(row.size()) - 1;
  while (v > 0 && row[v] == row[v - 1]) --v;
  return v;
}

Index ChainSampler::start(const Distribution& sigma, std::mt19937_64& rng) const {
  const Vector& p = sigma.probabilities();
  std::discrete_distribution<Index> pick(p.data(), p.data() + p.size());
  return pick(rng);
}

std::vector<Index> simulate(const ReversibleChain& c, const Distribution& sigma, long steps, std::uint64_t seed) {
  if (steps < 0) throw ValidationError("simulate: negative step count");
  std::mt19937_64 rng(seed);
  const ChainSampler sampler(c);
  std::vector<Index> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  path.push_back(sampler.start(sigma, rng));
  for (long i = 0; i < steps; ++i) path.push_back(sampler.step(path.back(), rng));
  return path;
}

double FrequencyEstimate::standard_error() const {
  if (trials == 0) return 0.0;
  const double f = frequency();
  return std::sqrt(f * (1.0 - f) / static_cast<double>(trials));
}

FrequencyEstimate check_claim_commute(const ReversibleChain& c, const VertexSet& start, const VertexSet& marked,
                                      double p, long horizon, long trials, std::uint64_t seed) {
  const double mass = c.stationary_mass(start);
  const double middle = mass * p;
  const double lower = 2.0 / static_cast<double>(horizon);
  const double upper = 1.0 / chain_set_commute(c, start, marked);
  // the modified graph with p = 1/2 sits on the upper edge, so allow rounding
  const double slack = 1e-12 * upper;
  if (!(lower <= middle + slack && middle <= upper + slack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "check_claim_commute: need 2/T <= pi(S) p <= 1/C_{S,M}, got 2/T = " << lower << ", pi(S) p = " << middle
        << ", 1/C_{S,M} = " << upper;
    throw PreconditionError(msg.str());
  }

  const Distribution sigma = Distribution::restricted(c.stationary(), start);
  const ChainSampler sampler(c);
  std::mt19937_64 rng(seed);
  FrequencyEstimate est;
  est.trials = trials;
  for (long trial = 0; trial < trials; ++trial) {
    Index y = sampler.start(sigma, rng);
    bool seen_marked = false;
    for (long t = 1; t <= horizon; ++t) {
      y = sampler.step(y, rng);
      if (!seen_marked) {
        seen_marked = marked.contains(y);
      } else if (start.contains(y)) {
        ++est.hits;
        break;
      }
    }
  }
  return est;
}

BaselineOutcome classical_search_baseline(const ReversibleChain& c, const VertexSet& marked, const Distribution& sigma,
                                          long interval, long budget, std::uint64_t seed) {
  if (budget < 1) throw ValidationError("classical_search_baseline: budget must be >= 1");
  if (interval < 1) throw ValidationError("classical_search_baseline: check interval must be >= 1");
  std::mt19937_64 rng(seed);
  const ChainSampler sampler(c);
  BaselineOutcome out;
  Index y = sampler.start(sigma, rng);
  for (;;) {
    ++out.checks;
    if (marked.contains(y)) {
      out.found = y;
      return out;
    }
    if (out.updates + interval > budget) return out;
    for (long i = 0; i < interval; ++i) y = sampler.step(y, rng);
    out.updates += interval;
  }
}

}  // namespace qws
