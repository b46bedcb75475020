#include "qwsearch/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qws {

namespace {

long ceil_log2(double x) {
  long k = 0;
  while (std::ldexp(1.0, static_cast<int>(k)) < x) ++k;
  return k;
}

std::vector<char> mask_of(const VertexSet& set, Index n) {
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  for (Index u : set) m[static_cast<std::size_t>(u)] = 1;
  return m;
}

double restricted_mass(const Vector& p, const VertexSet& set) {
  double total = 0.0;
  for (Index u : set) total += p[u];
  return total;
}

// Index of every modified-graph vertex in the 2n walk layout.
std::vector<Index> layout_of_vertex(const ModifiedInstance& m) {
  const std::vector<Index> layout = modified_layout(m);
  std::vector<Index> out(static_cast<std::size_t>(m.graph.size()), -1);
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i] >= 0) out[static_cast<std::size_t>(layout[i])] = static_cast<Index>(i);
  return out;
}

Matrix restrict_layout_matrix(const ModifiedInstance& m, const Matrix& layout_matrix) {
  const std::vector<Index> at = layout_of_vertex(m);
  const Index size = m.graph.size();
  Matrix out(size, size);
  for (Index i = 0; i < size; ++i)
    for (Index j = 0; j < size; ++j) out(i, j) = layout_matrix(at[i], at[j]);
  return out;
}

// Walk count of the fast-forward operator for horizon t at precision eps.
long ff_walks(long t, double eps) {
  const ChebyshevExpansion e = chebyshev_expansion(t, truncation_degree(t, eps));
  const long levels = 1L << ladder_qubits(e);
  return 2 * (levels - 1) + (t % 2);
}

// Cost of one application of the interpolated modified walk W(P'(q)),
// counting `walk_units` base walks per inner walk.
SearchCounters outer_step_cost(long walk_units) { return SearchCounters{walk_units, 4, 2, 0}; }

SearchCounters scaled(const SearchCounters& c, long k) { return {c.walk * k, c.check * k, c.lambda * k, c.setup * k}; }

void add(SearchCounters& a, const SearchCounters& b) {
  a.walk += b.walk;
  a.check += b.check;
  a.lambda += b.lambda;
  a.setup += b.setup;
}

// Counters of the fast-forward search given per-step cost: U costs max_t ff_walks(t) outer steps
// and is applied 1 + 2k times; each round also checks M once.
SearchCounters ff_counters(const SearchConfig& cfg, const SearchCounters& step) {
  long walks = 0;
  for (long t = 1; t <= cfg.T; ++t) walks = std::max(walks, ff_walks(t, cfg.eps_ff));
  const long uses = 1 + 2 * cfg.aa_rounds;
  SearchCounters out = scaled(step, walks * uses);
  out.setup = uses;
  out.check += cfg.aa_rounds;
  return out;
}

std::optional<Index> sample_marked(const Vector& good_marginal, const std::vector<Index>& origin, double success,
                                   std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double total = good_marginal.sum();
  if (!(total > 0.0) || unit(rng) >= success) return std::nullopt;
  std::discrete_distribution<Index> pick(good_marginal.data(), good_marginal.data() + good_marginal.size());
  return origin[static_cast<std::size_t>(pick(rng))];
}

struct FastForwardProblem {
  Matrix base;  // discriminant of the modified chain
  VertexSet start;
  VertexSet marked;
  Vector psi;  // sqrt(sigma')
  std::vector<Index> origin;
  SearchCounters step;  // cost of one outer walk step
};

SearchOutcome ff_blocks(const FastForwardProblem& prob, const SearchConfig& cfg) {
  const std::vector<long> grid = cfg.holding_grid();
  const Index n = prob.base.rows();
  const long T = cfg.T;
  const Index cells = T * static_cast<Index>(grid.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(cells));

  std::vector<ChebyshevExpansion> expansions;
  expansions.reserve(static_cast<std::size_t>(T));
  for (long t = 1; t <= T; ++t) expansions.push_back(chebyshev_expansion(t, truncation_degree(t, cfg.eps_ff)));

  // Per cell: flagged vertex amplitudes followed by one garbage coordinate.
  const Index stride = n + 1;
  Vector prepared = Vector::Zero(cells * stride);
  std::vector<char> good(static_cast<std::size_t>(prepared.size()), 0);
  Vector flagged_marginal = Vector::Zero(n);

  SearchOutcome out;
  out.trace.reserve(static_cast<std::size_t>(cells));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto q = InterpolationParams::from_holding(cfg.r_S, static_cast<double>(grid[k]));
    const DiscriminantMatrix d(interpolated_two_block(prob.base, prob.start, prob.marked, q));
    const Vector y = d.vectors.transpose() * prob.psi;
    for (long t = 1; t <= T; ++t) {
      const ChebyshevExpansion& e = expansions[static_cast<std::size_t>(t - 1)];
      Vector a(n);
      for (Index j = 0; j < n; ++j)
        a[j] = eval_poly_scalar(e, std::clamp(d.values[j], -1.0, 1.0)) / e.alpha * y[j];
      const Vector f = d.vectors * a;
      const Index cell = static_cast<Index>(k) * T + (t - 1);
      prepared.segment(cell * stride, n) = scale * f;
      prepared[cell * stride + n] = scale * std::sqrt(std::max(0.0, 1.0 - a.squaredNorm()));
      double hit = 0.0;
      for (Index u : prob.marked) {
        good[static_cast<std::size_t>(cell * stride + u)] = 1;
        hit += f[u] * f[u];
      }
      flagged_marginal += f.cwiseAbs2() / static_cast<double>(cells);
      out.trace.push_back({t, grid[k], hit / static_cast<double>(cells)});
    }
  }

  const Vector amplified = amplitude_amplify(prepared, good, cfg.aa_rounds);
  Vector good_marginal = Vector::Zero(n);
  double success = 0.0;
  double pre = 0.0;
  for (Index i = 0; i < prepared.size(); ++i) {
    if (!good[static_cast<std::size_t>(i)]) continue;
    success += amplified[i] * amplified[i];
    pre += prepared[i] * prepared[i];
    good_marginal[i % stride] += amplified[i] * amplified[i];
  }

  out.success_probability = std::clamp(success, 0.0, 1.0);
  out.pre_amplification = pre;
  out.overall = out.success_probability;
  out.flagged_distribution = flagged_marginal;
  std::mt19937_64 rng(cfg.seed);
  out.found = sample_marked(good_marginal, prob.origin, out.success_probability, rng);
  out.counters = ff_counters(cfg, prob.step);
  return out;
}

// W(P'(q)) assembled from the walk of the original chain.
WalkOperator interpolated_modified_walk(const WalkOperator& base, const SearchInstance& inst,
                                        const InterpolationParams& q) {
  const Index n = inst.modified.original_size;
  std::vector<char> marked(static_cast<std::size_t>(2 * n), 0);
  std::vector<char> start(static_cast<std::size_t>(2 * n), 0);
  for (Index u : inst.marked) marked[static_cast<std::size_t>(u)] = 1;
  for (Index u = 0; u < n; ++u)
    if (inst.modified.pendant[static_cast<std::size_t>(u)] >= 0) start[static_cast<std::size_t>(n + u)] = 1;
  const WalkOperator modified = modified_walk_unitary(base, inst.lambda);
  const WalkOperator with_m = interpolated_walk_unitary(modified, MembershipOracle(std::move(marked)), q.q_M);
  return interpolated_walk_unitary(with_m, MembershipOracle(std::move(start)), q.q_S);
}

SearchOutcome ff_circuit(const SearchInstance& inst, const SearchConfig& cfg) {
  const std::vector<long> grid = cfg.holding_grid();
  const ModifiedInstance& m = inst.modified;
  const Index n = m.original_size;
  const Index sys = 2 * n;
  const double cells = static_cast<double>(cfg.T) * static_cast<double>(grid.size());
  const Vector psi = lift_modified(m, m.sigma_prime.sqrt_amplitudes());
  const WalkOperator base = szegedy_walk(inst.chain).op();

  Vector good_layout = Vector::Zero(sys);
  Vector flag_layout = Vector::Zero(sys);
  Vector all_layout = Vector::Zero(sys);
  SearchOutcome out;
  for (long r_M : grid) {
    const auto q = InterpolationParams::from_holding(cfg.r_S, static_cast<double>(r_M));
    const WalkOperator walk = interpolated_modified_walk(base, inst, q);
    for (long t = 1; t <= cfg.T; ++t) {
      const FastForward ff = fast_forward_unitary(walk, t, cfg.eps_ff);
      const Vector v = ff.op.apply(ff.op.embed(psi));
      const Index anc = v.size() / sys;
      double hit = 0.0;
      for (Index a = 0; a < anc; ++a) {
        const Vector part = v.segment(a * sys, sys).cwiseAbs2() / cells;
        all_layout += part;
        if (a != ff.op.flag()) continue;
        flag_layout += part;
        for (Index u : inst.marked) {
          good_layout[u] += part[u];
          hit += part[u];
        }
      }
      out.trace.push_back({t, r_M, hit});
    }
  }

  const double pre = good_layout.sum();
  out.pre_amplification = pre;
  out.success_probability = amplified_probability(pre, cfg.aa_rounds);
  out.overall = out.success_probability;
  out.distribution = restrict_modified(m, all_layout);
  out.flagged_distribution = restrict_modified(m, flag_layout);
  std::mt19937_64 rng(cfg.seed);
  out.found = sample_marked(restrict_modified(m, good_layout), m.origin, out.success_probability, rng);
  out.counters = ff_counters(cfg, outer_step_cost(1));
  return out;
}

void stamp(SearchOutcome& out, const SearchConfig& cfg) {
  out.T = cfg.T;
  out.r_S = cfg.r_S;
  out.eps_ff = cfg.eps_ff;
  out.aa_rounds = cfg.aa_rounds;
}

}  // namespace

SearchConfig SearchConfig::resolved() const {
  SearchConfig c = *this;
  if (c.T < 2 || c.T % 2 != 0) throw ConfigError("search: T must be a positive even integer");
  if (c.r_S == 0.0) c.r_S = std::max(1.0, static_cast<double>(c.T) / 60.0);
  if (!(c.r_S >= 1.0) || !std::isfinite(c.r_S)) throw ConfigError("search: r_S must be >= 1");
  if (c.eps_ff == 0.0) c.eps_ff = 1.0 / (8.0 * static_cast<double>(c.log2_T()));
  if (!(c.eps_ff > 0.0 && c.eps_ff < 1.0)) throw ConfigError("search: eps_ff must lie in (0,1)");
  if (c.aa_rounds == -1) c.aa_rounds = static_cast<long>(std::ceil(std::sqrt(std::log2(static_cast<double>(c.T)))));
  if (c.aa_rounds < 0) throw ConfigError("search: aa_rounds must be >= 0");
  if (c.simple_eps == 0.0) c.simple_eps = 1.0 / static_cast<double>(c.T);
  if (!(c.simple_eps > 0.0 && c.simple_eps < 1.0)) throw ConfigError("search: simple_eps must lie in (0,1)");
  if (c.shots_factor < 1) throw ConfigError("search: shots_factor must be >= 1");
  if (!(c.threshold > 0.0 && c.threshold <= 1.0)) throw ConfigError("search: threshold must lie in (0,1]");
  return c;
}

long SearchConfig::log2_T() const { return std::max(1L, ceil_log2(static_cast<double>(T))); }

std::vector<long> SearchConfig::holding_grid() const {
  if (T < 1) throw ConfigError("search: T must be positive");
  const long top = ceil_log2(14.0 * static_cast<double>(T));
  if (top > 62) throw ConfigError("search: T too large for the holding grid");
  std::vector<long> r;
  for (long k = 0; k <= top; ++k) r.push_back(1L << k);
  return r;
}

Matrix SearchInstance::base_block() const { return discriminant(chain_prime).D; }

SearchInstance prepare_search(const WeightedGraph& g, const Distribution& sigma, const VertexSet& marked,
                              std::optional<double> C) {
  if (sigma.size() != g.size()) throw ValidationError("prepare_search: sigma has wrong length");
  marked.check_range(g.size(), "prepare_search");
  if (sigma.support().intersects(marked)) throw ValidationError("prepare_search: sigma must vanish on M");
  double budget = 0.0;
  if (C) {
    budget = *C;
  } else if (marked.empty()) {
    budget = g.total_weight();
  } else {
    budget = commute_quantity(g, sigma, marked);
  }
  ModifiedInstance mod = build_modified_graph(g, sigma, marked, budget);
  ReversibleChain chain = build_chain(g);
  ReversibleChain prime = build_chain(mod.graph);
  LambdaRotation lambda = lambda_unitary(sigma, chain.stationary(), budget);
  return SearchInstance{g, std::move(chain), sigma, marked, std::move(mod), std::move(prime), std::move(lambda),
                        budget};
}

Matrix interpolated_two_block(const Matrix& base, const VertexSet& start, const VertexSet& marked,
                              const InterpolationParams& q) {
  q.validate();
  const Index n = base.rows();
  const Matrix with_m = interpolated_block(base, mask_of(marked, n), q.q_M);
  return interpolated_block(with_m, mask_of(start, n), q.q_S);
}

Profile success_probability_profile(const SearchInstance& inst, const SearchConfig& config) {
  const SearchConfig cfg = config.resolved();
  const ModifiedInstance& m = inst.modified;
  Profile out;
  out.r_M = cfg.holding_grid();
  out.values = Matrix::Zero(cfg.T, static_cast<Index>(out.r_M.size()));

  if (!m.marked_prime.empty()) {
    const double c_prime = commute_quantity(m.graph, m.sigma_prime, m.marked_prime);
    const double mass = restricted_mass(m.graph.stationary(), m.start_prime);
    out.hypothesis_holds = mass >= 1.0 / c_prime - 1e-12 && mass <= 2.0 / c_prime + 1e-12;
  }

  const Matrix base = inst.base_block();
  const Vector psi = m.sigma_prime.sqrt_amplitudes();
  for (std::size_t k = 0; k < out.r_M.size(); ++k) {
    const auto q = InterpolationParams::from_holding(cfg.r_S, static_cast<double>(out.r_M[k]));
    const DiscriminantMatrix d(interpolated_two_block(base, m.start_prime, m.marked_prime, q));
    Vector z = d.vectors.transpose() * psi;
    for (long t = 1; t <= cfg.T; ++t) {
      z = z.cwiseProduct(d.values);
      const Vector f = d.vectors * z;
      double hit = 0.0;
      for (Index u : m.marked_prime) hit += f[u] * f[u];
      out.values(t - 1, static_cast<Index>(k)) = hit;
    }
  }
  out.average = out.values.mean();
  return out;
}

double joint_probability(const ReversibleChain& c, const Distribution& sigma, const VertexSet& marked,
                         const VertexSet& start, long t, long t_prime) {
  if (t < 0 || t_prime < t) throw ValidationError("joint_probability: need 0 <= t <= t'");
  const Index n = c.size();
  Eigen::RowVectorXd row = sigma.probabilities().transpose();
  for (long i = 0; i < t; ++i) row = row * c.transition();
  for (Index u = 0; u < n; ++u)
    if (!marked.contains(u)) row[u] = 0.0;
  for (long i = t; i < t_prime; ++i) row = row * c.transition();
  double total = 0.0;
  for (Index u : start) total += row[u];
  return total;
}

double marked_amplitude_norm(const DiscriminantMatrix& d, const Distribution& sigma, const VertexSet& marked, long t) {
  const Vector f = apply_Dt_exact(d, t, sigma.sqrt_amplitudes());
  double total = 0.0;
  for (Index u : marked) total += f[u] * f[u];
  return std::sqrt(total);
}

SearchOutcome search_fastforward(const SearchInstance& inst, const SearchConfig& config, FastForwardBackend backend) {
  const SearchConfig cfg = config.resolved();
  SearchOutcome out;
  if (backend == FastForwardBackend::circuit) {
    out = ff_circuit(inst, cfg);
  } else {
    const ModifiedInstance& m = inst.modified;
    out = ff_blocks(FastForwardProblem{inst.base_block(), m.start_prime, m.marked_prime, m.sigma_prime.sqrt_amplitudes(),
                                  m.origin, outer_step_cost(1)},
                      cfg);
  }
  stamp(out, cfg);
  return out;
}

std::vector<std::pair<long, double>> binomial_offset_law(long t, long cap) {
  if (t < 1) throw ValidationError("binomial_offset_law: t must be >= 1");
  if (cap < 1) throw ValidationError("binomial_offset_law: cap must be >= 1");
  std::vector<std::pair<long, double>> law;
  double mass = 0.0;
  for (long j = 0; j <= t; ++j) {
    const long n = 2 * j - t;
    if (std::abs(n) > cap) continue;
    const double w = binomial_weight(t, j);
    law.emplace_back(n, w);
    mass += w;
  }
  if (mass < 1e-6) throw PreconditionError("binomial_offset_law: retained mass below 1e-6");
  for (auto& entry : law) entry.second /= mass;
  return law;
}

long sample_binomial_offset(long t, long cap, std::mt19937_64& rng) {
  binomial_offset_law(t, cap);  // validates the acceptance mass
  std::binomial_distribution<long> draw(t, 0.5);
  for (;;) {
    const long n = 2 * draw(rng) - t;
    if (std::abs(n) <= cap) return n;
  }
}

SearchOutcome search_simple(const SearchInstance& inst, const SearchConfig& config) {
  const SearchConfig cfg = config.resolved();
  const std::vector<long> grid = cfg.holding_grid();
  const ModifiedInstance& m = inst.modified;
  const Index n = m.original_size;
  const Index sys = 2 * n;
  const Vector psi = lift_modified(m, m.sigma_prime.sqrt_amplitudes());
  const WalkOperator base = szegedy_walk(inst.chain).op();

  std::vector<long> caps(static_cast<std::size_t>(cfg.T));
  long max_cap = 0;
  for (long t = 1; t <= cfg.T; ++t) {
    caps[static_cast<std::size_t>(t - 1)] = truncation_degree(t, cfg.simple_eps);
    max_cap = std::max(max_cap, caps[static_cast<std::size_t>(t - 1)]);
  }

  // marginals[k][s]: vertex-register law after s alternating steps W, Z W^dagger Z, ...
  std::vector<std::vector<Vector>> marginals(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto q = InterpolationParams::from_holding(cfg.r_S, static_cast<double>(grid[k]));
    const WalkOperator walk = interpolated_modified_walk(base, inst, q);
    Vector v = walk.embed(psi);
    const Index flag_offset = walk.flag() * sys;
    for (long s = 0; s <= max_cap; ++s) {
      if (s > 0) {
        if (s % 2 == 1) {
          v = walk.apply(v);
        } else {
          v.segment(flag_offset, sys) *= -1.0;
          v = walk.apply_adjoint(v);
          v.segment(flag_offset, sys) *= -1.0;
        }
      }
      Vector p = Vector::Zero(sys);
      for (Index a = 0; a < walk.ancilla_dim(); ++a) p += v.segment(a * sys, sys).cwiseAbs2();
      marginals[k].push_back(restrict_modified(m, p));
    }
  }

  const double cells = static_cast<double>(cfg.T) * static_cast<double>(grid.size());
  Vector shot = Vector::Zero(m.graph.size());
  SearchOutcome out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (long t = 1; t <= cfg.T; ++t) {
      Vector cell = Vector::Zero(m.graph.size());
      for (const auto& [offset, prob] : binomial_offset_law(t, caps[static_cast<std::size_t>(t - 1)]))
        cell += prob * marginals[k][static_cast<std::size_t>(std::abs(offset))];
      out.trace.push_back({t, grid[k], restricted_mass(cell, m.marked_prime) / cells});
      shot += cell / cells;
    }
  }
  out.distribution = shot;
  out.success_probability = std::clamp(restricted_mass(shot, m.marked_prime), 0.0, 1.0);

  out.shots = cfg.log2_T() * cfg.shots_factor;
  out.overall = 1.0 - std::pow(1.0 - out.success_probability, static_cast<double>(out.shots));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick_q(0, grid.size() - 1);
  std::uniform_int_distribution<long> pick_t(1, cfg.T);
  const SearchCounters step = outer_step_cost(1);
  long used = 0;
  for (long s = 0; s < out.shots && !out.found; ++s) {
    ++used;
    const std::size_t k = pick_q(rng);
    const long t = pick_t(rng);
    const long steps = std::abs(sample_binomial_offset(t, caps[static_cast<std::size_t>(t - 1)], rng));
    add(out.counters, scaled(step, steps));
    out.counters.setup += 1;
    out.counters.check += 1;
    const Vector& law = marginals[k][static_cast<std::size_t>(steps)];
    std::discrete_distribution<Index> measure(law.data(), law.data() + law.size());
    const Index v = measure(rng);
    if (m.marked_prime.contains(v)) out.found = m.origin[static_cast<std::size_t>(v)];
  }
  out.shots = used;
  stamp(out, cfg);
  return out;
}

SearchOutcome search_tstep(const SearchInstance& inst, long t_inner, const SearchConfig& config, double eps_inner) {
  if (t_inner < 1) throw ValidationError("search_tstep: t_inner must be >= 1");
  const SearchConfig cfg = config.resolved();
  if (eps_inner == 0.0) eps_inner = 1.0 / (4.0 * static_cast<double>(cfg.T));
  if (!(eps_inner > 0.0 && eps_inner < 1.0)) throw ConfigError("search_tstep: eps_inner must lie in (0,1)");

  // Budget for P^t keeps the ratio of the supplied budget to the exact value.
  const WeightedGraph powered = chain_to_graph(chain_power(inst.chain, t_inner).chain);
  double budget = inst.C;
  if (t_inner > 1 && !inst.marked.empty()) {
    budget *= commute_quantity(powered, inst.sigma, inst.marked) /
              commute_quantity(inst.graph, inst.sigma, inst.marked);
  }
  const SearchInstance sub = prepare_search(powered, inst.sigma, inst.marked, budget);

  const DiscriminantMatrix d = discriminant(inst.chain);
  const ChebyshevExpansion e = chebyshev_expansion(t_inner, truncation_degree(t_inner, eps_inner));
  const Matrix inner = eval_poly_matrix(e, d) / e.alpha;
  const Matrix layout = modified_block(inner, sub.lambda);
  const ModifiedInstance& m = sub.modified;
  const long inner_walks = t_inner == 1 ? 1 : ff_walks(t_inner, eps_inner);

  SearchOutcome out = ff_blocks(FastForwardProblem{restrict_layout_matrix(m, layout), m.start_prime, m.marked_prime,
                                              m.sigma_prime.sqrt_amplitudes(), m.origin, outer_step_cost(inner_walks)},
                                  cfg);
  stamp(out, cfg);
  return out;
}

}  // namespace qws
