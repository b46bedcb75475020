#include "qwsearch/suites.hpp"

#include "qwsearch/boxes.hpp"
#include "qwsearch/classical.hpp"
#include "qwsearch/electric.hpp"
#include "qwsearch/fast_forward.hpp"
#include "qwsearch/instance.hpp"
#include "qwsearch/random_instances.hpp"
#include "qwsearch/search.hpp"
#include "qwsearch/walks.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <thread>

namespace qws {

namespace {

struct Item {
  std::string label;
  std::function<std::vector<ReportRow>(std::uint64_t)> run;
};

double relative(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ReportRow relative_row(std::string instance, std::string op, double lhs, double rhs, double tol, std::uint64_t seed) {
  ReportRow r = check_close(std::move(instance), std::move(op), lhs, rhs, tol, seed);
  r.residual = relative(lhs, rhs);
  r.pass = r.residual <= tol;
  return r;
}

struct RandomCase {
  WeightedGraph g;
  ReversibleChain c;
  VertexSet marked;
  VertexSet start;
  std::string name;
};

RandomCase random_case(std::uint64_t seed, Index n) {
  std::mt19937_64 rng(seed);
  WeightedGraph g = random_ergodic_graph(n, seed);
  VertexSet marked = random_subset(n, 1 + static_cast<Index>(rng() % 2), {}, rng);
  VertexSet start = random_subset(n, 1 + static_cast<Index>(rng() % 2), marked, rng);
  ReversibleChain c = build_chain(g);
  return {std::move(g), std::move(c), std::move(marked), std::move(start), "random-" + std::to_string(seed % 100000)};
}

// ---- electric -------------------------------------------------------------

std::vector<ReportRow> path3_rows(std::uint64_t seed) {
  const InstanceFile inst = path3_instance();
  const WeightedGraph g = inst.graph();
  const ReversibleChain c = build_chain(g);
  const VertexSet S{0, 1};
  const VertexSet M = inst.marked_set();
  const Distribution sigma = inst.distribution();
  const double C = commute_quantity(g, sigma, M);
  const double commute = exact_commute_time(c, S, M, sigma).value;
  const ModifiedInstance mod = build_modified_graph(g, sigma, M, C);
  const std::string name = inst.name;
  return {
      check_close(name, "effective_resistance", effective_resistance(g, sigma, M).value, 10.0 / 9.0, 1e-9, seed),
      check_close(name, "commute_quantity", C, 40.0 / 9.0, 1e-9, seed),
      check_close(name, "exact_return_prob", exact_return_prob(c, S, M), 1.0 / 3.0, 1e-9, seed),
      check_close(name, "exact_commute_time", commute, 13.0 / 3.0, 1e-9, seed),
      check_at_least(name, "commute_quantity > exact_commute_time", C - commute, 1.0 / 9.0, 1e-9, seed),
      check_close(name, "hitting_time from v", hitting_times(c, M)[1], 3.0, 1e-9, seed),
      check_close(name, "set_resistance", set_resistance(g, S, M), 1.0, 1e-9, seed),
      check_close(name, "stationary_mass(S)", c.stationary_mass(S), 0.75, 1e-12, seed),
      check_close(name, "modified commute quantity", commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime),
                  116.0 / 9.0, 1e-9, seed),
  };
}

std::vector<ReportRow> electric_random_rows(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = 4 + static_cast<Index>(rng() % 9);
  const RandomCase rc = random_case(seed, n);
  const double W = rc.g.total_weight();
  const Index s = rc.start.items().front();
  const Distribution point = Distribution::point_mass(n, s);
  std::vector<ReportRow> rows;
  rows.push_back(relative_row(rc.name, "W R_{s,M} = E_s(commute)",
                              W * effective_resistance(rc.g, point, rc.marked).value,
                              exact_commute_time(rc.c, VertexSet{s}, rc.marked, point).value, 1e-8, seed));
  rows.push_back(relative_row(rc.name, "W R_{pi,M} = HT(P,M)", W * stationary_resistance(rc.g, rc.marked),
                              hitting_time(rc.c, rc.marked).value, 1e-8, seed));
  const double pS = rc.c.stationary_mass(rc.start);
  rows.push_back(check_close(rc.name, "Pr(return) C_{S,M} pi(S)",
                             exact_return_prob(rc.c, rc.start, rc.marked) * W *
                                 set_resistance(rc.g, rc.start, rc.marked) * pS,
                             1.0, 1e-8, seed));
  rows.push_back(check_close(rc.name, "Kac E(return) pi(S)", exact_expected_return(rc.c, rc.start).value * pS, 1.0,
                             1e-8, seed));

  const Distribution sigma = Distribution::restricted(rc.g.stationary(), rc.start);
  const Resistance r = effective_resistance(rc.g, sigma, rc.marked);
  rows.push_back(relative_row(rc.name, "flow energy = R", flow_energy(rc.g, r.flow.flow), r.value, 1e-9, seed));
  rows.push_back(check_close(rc.name, "flow constraints",
                             flow_constraint_residual(rc.g, r.flow.flow, sigma, rc.marked), 0.0, 1e-10, seed));

  const double C = commute_quantity(rc.g, sigma, rc.marked) * (1.0 + static_cast<double>(rng() % 100) / 100.0);
  const ModifiedInstance mod = build_modified_graph(rc.g, sigma, rc.marked, C);
  rows.push_back(check_close(rc.name, "pi'(S') = 1/(C+2)", mod.graph.stationary()(mod.start_prime.items()).sum(),
                             1.0 / (C + 2.0), 1e-12, seed));
  rows.push_back(relative_row(rc.name, "C' prediction",
                              commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime),
                              modified_commute_prediction(rc.g, sigma, sigma, rc.marked, C), 1e-9, seed));
  return rows;
}

// ---- classical -------------------------------------------------------------

std::vector<ReportRow> hitting_monte_carlo_rows(std::uint64_t seed) {
  const RandomCase rc = random_case(seed, 6);
  const Distribution sigma = Distribution::restricted(rc.g.stationary(), rc.start);
  const double exact = exact_hitting_time(rc.c, rc.marked, sigma).value;
  const ChainSampler sampler(rc.c);
  std::mt19937_64 rng(seed);
  const long trials = 20000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (long i = 0; i < trials; ++i) {
    Index x = sampler.start(sigma, rng);
    long steps = 0;
    while (!rc.marked.contains(x)) {
      x = sampler.step(x, rng);
      ++steps;
    }
    sum += static_cast<double>(steps);
    sum2 += static_cast<double>(steps) * static_cast<double>(steps);
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
  return {check_close(rc.name, "Monte Carlo hitting time (4 s.e.)", mean, exact, 4.0 * se, seed)};
}

std::vector<ReportRow> commute_frequency_rows(std::uint64_t seed) {
  const InstanceFile inst = path3_instance();
  const WeightedGraph g = inst.graph();
  const Distribution sigma = inst.distribution();
  const double C = commute_quantity(g, sigma, inst.marked_set());
  const ModifiedInstance mod = build_modified_graph(g, sigma, inst.marked_set(), C);
  const ReversibleChain c = build_chain(mod.graph);
  const double c_prime = commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime);
  const long horizon = static_cast<long>(std::ceil(4.0 * c_prime));
  const FrequencyEstimate f = check_claim_commute(c, mod.start_prime, mod.marked_prime, 0.5, horizon, 20000, seed);
  return {check_at_least(inst.name + "-modified", "Pr(commute <= T) >= 1/4 - 3 s.e.", f.frequency(), 0.25,
                         3.0 * f.standard_error(), seed)};
}

std::vector<ReportRow> boxes_rows(std::uint64_t seed) {
  const ExhaustiveResult r = exhaustive_stretching_check(4, 12);
  return {check_close("boxes T=4 len<=12", "counterexamples", static_cast<double>(r.counterexamples), 0.0, 0.0, seed)};
}

// ---- quantum ---------------------------------------------------------------

std::vector<ReportRow> block_encoding_rows(std::uint64_t seed) {
  const Index n = 3 + static_cast<Index>(seed % 5);
  const RandomCase rc = random_case(seed, n);
  const DiscriminantMatrix d = discriminant(rc.c);
  const BlockUnitary<double> w = szegedy_walk(rc.c);
  std::vector<ReportRow> rows;
  rows.push_back(check_close(rc.name, "Szegedy block = D", verify_block_encoding(w, d.D), 0.0, 1e-10, seed));
  rows.push_back(check_close(rc.name, "Szegedy unitarity", w.unitarity_residual(), 0.0, 1e-10, seed));
  for (double s : {0.0, 0.25, 0.5, 0.9}) {
    const WalkOperator iw = interpolated_walk_unitary(w.op(), MembershipOracle(rc.marked, n), s);
    const Matrix target = discriminant(interpolate_absorbing(rc.c, rc.marked, s)).D;
    rows.push_back(check_close(rc.name, "interpolated block s=" + format_double(s),
                               verify_block_encoding(iw, target), 0.0, 1e-10, seed));
  }
  const Distribution sigma = Distribution::restricted(rc.g.stationary(), rc.start);
  const double C = commute_quantity(rc.g, sigma, rc.marked);
  const ModifiedInstance mod = build_modified_graph(rc.g, sigma, rc.marked, C);
  const WalkOperator mw = modified_walk_unitary(w.op(), lambda_unitary(sigma, rc.c.stationary(), C));
  const Matrix target = embed_modified(mod, discriminant(build_chain(mod.graph)).D);
  rows.push_back(check_close(rc.name, "modified walk block", verify_block_encoding(mw, target), 0.0, 1e-10, seed));
  return rows;
}

std::vector<ReportRow> reflection_rows(std::uint64_t seed) {
  const RandomCase rc = random_case(seed, 3 + static_cast<Index>(seed % 4));
  const DiscriminantMatrix d = discriminant(rc.c);
  const WalkOperator w = szegedy_walk(rc.c).op();
  std::vector<ReportRow> rows;
  for (long k : {1L, 3L, 8L}) {
    const Matrix target = d.function([k](double x) { return chebyshev_T(2 * k, std::clamp(x, -1.0, 1.0)); });
    rows.push_back(check_close(rc.name, "G^" + std::to_string(k) + " block = T_" + std::to_string(2 * k) + "(D)",
                               verify_block_encoding(walk_power_reflections(w, k), target), 0.0, 1e-9, seed));
  }
  return rows;
}

std::vector<ReportRow> amplification_rows(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ReportRow> rows;
  for (int rep = 0; rep < 4; ++rep) {
    const Index dim = 16;
    const Vector psi = random_unit_vector(dim, rng);
    std::vector<char> good(dim, 0);
    double p = 0.0;
    for (Index i = 0; i < 3; ++i) {
      good[static_cast<std::size_t>(i)] = 1;
      p += psi[i] * psi[i];
    }
    const long k = static_cast<long>(rng() % 6);
    const Vector out = amplitude_amplify(psi, good, k);
    double got = 0.0;
    for (Index i = 0; i < 3; ++i) got += out[i] * out[i];
    rows.push_back(check_close("random-state", "amplitude amplification k=" + std::to_string(k), got,
                               amplified_probability(p, k), 1e-10, seed));
  }
  return rows;
}

// ---- ffwd ------------------------------------------------------------------

std::vector<ReportRow> fast_forward_rows(std::uint64_t seed) {
  const RandomCase rc = random_case(seed, 4);
  const DiscriminantMatrix d = discriminant(rc.c);
  const WalkOperator w = szegedy_walk(rc.c).op();
  std::mt19937_64 rng(seed);
  std::vector<ReportRow> rows;
  for (long t : {8L, 32L, 64L}) {
    for (double eps : {1e-1, 1e-2}) {
      const FastForward ff = fast_forward_unitary(w, t, eps);
      const Matrix block = ff.op.block();
      double worst = 0.0;
      for (int rep = 0; rep < 5; ++rep) {
        const Vector psi = random_unit_vector(d.size(), rng);
        worst = std::max(worst, (apply_Dt_exact(d, t, psi) - block * psi).norm());
      }
      const std::string tag = "t=" + std::to_string(t) + " eps=" + format_double(eps);
      rows.push_back(check_at_most(rc.name, "|D^t psi - U psi| <= 2 eps, " + tag, worst, 2.0 * eps, 0.0, seed));
      const double bound = 4.0 * std::ceil(std::sqrt(2.0 * t * std::log(2.0 / eps))) + 4.0;
      rows.push_back(check_at_most(rc.name, "walk count bound, " + tag, static_cast<double>(ff.op.cost().walk), bound,
                                   0.0, seed));
    }
  }
  return rows;
}

std::vector<ReportRow> chebyshev_rows(std::uint64_t seed) {
  std::vector<ReportRow> rows;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    double worst = 0.0;
    for (long t = 1; t <= 64; ++t) {
      const ChebyshevExpansion e = chebyshev_expansion(t, truncation_degree(t, eps));
      for (int i = 0; i <= 400; ++i) {
        const double x = -1.0 + i / 200.0;
        worst = std::max(worst, std::abs(eval_poly_scalar(e, x) - std::pow(x, static_cast<double>(t))));
      }
    }
    rows.push_back(check_at_most("scalar", "max |p_{t,d}(x) - x^t|, t<=64, eps=" + format_double(eps), worst, eps,
                                 0.0, seed));
  }
  return rows;
}

// ---- search ----------------------------------------------------------------

std::vector<ReportRow> amplitude_bound_rows(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const RandomCase rc = random_case(seed, 3 + static_cast<Index>(rng() % 4));
  const Distribution sigma = Distribution::restricted(rc.g.stationary(), rc.start);
  const SearchInstance inst = prepare_search(rc.g, sigma, rc.marked);
  const ModifiedInstance& m = inst.modified;
  std::vector<ReportRow> rows;
  for (int rep = 0; rep < 3; ++rep) {
    const auto q = InterpolationParams::from_holding(1.0 + static_cast<double>(rng() % 8),
                                                     std::ldexp(1.0, static_cast<int>(rng() % 6)));
    const ReversibleChain cq = interpolate_two(inst.chain_prime, m.start_prime, m.marked_prime, q);
    const long t = 1 + static_cast<long>(rng() % 12);
    const long t_prime = t + 1 + static_cast<long>(rng() % 12);
    const double lhs = marked_amplitude_norm(discriminant(cq), m.sigma_prime, m.marked_prime, t);
    const double rhs = joint_probability(cq, m.sigma_prime, m.marked_prime, m.start_prime, t, t_prime);
    const std::string tag = "t=" + std::to_string(t) + " t'=" + std::to_string(t_prime);
    rows.push_back(check_at_least(rc.name, "marked amplitude >= joint probability " + tag, lhs, rhs, 1e-10, seed));
  }
  return rows;
}

std::vector<ReportRow> ff_sweep_rows(const InstanceFile& file, std::uint64_t seed) {
  const SearchInstance inst = prepare_search(file.graph(), file.distribution(), file.marked_set(), file.C);
  SearchConfig cfg;
  cfg.seed = seed;
  const long limit = static_cast<long>(64.0 * inst.C);
  const SweepResult sweep =
      sweep_doubling(cfg, 4, limit, [&](const SearchConfig& c) { return search_fastforward(inst, c); });
  const double best = sweep.runs.back().success_probability;
  return {check_at_least(file.name, "fast-forward success within T <= 64 C", best, 0.5, 0.0, seed)};
}

std::vector<ReportRow> equivalence_rows(std::uint64_t seed) {
  const InstanceFile file = path3_instance();
  const SearchInstance inst = prepare_search(file.graph(), file.distribution(), file.marked_set());
  std::vector<ReportRow> rows;
  for (long T : {8L, 32L}) {
    SearchConfig cfg;
    cfg.T = T;
    cfg.seed = seed;
    cfg = cfg.resolved();
    cfg.simple_eps = cfg.eps_ff;
    const SearchOutcome a = search_fastforward(inst, cfg, FastForwardBackend::circuit);
    const SearchOutcome b = search_simple(inst, cfg);
    const double tv = 0.5 * (a.distribution - b.distribution).cwiseAbs().sum();
    rows.push_back(check_close(file.name, "TV(fast-forward, simple search) T=" + std::to_string(T), tv, 0.0,
                               1e-8, seed));
    const SearchOutcome blocks = search_fastforward(inst, cfg);
    rows.push_back(check_close(file.name, "fast-forward blocks vs circuit T=" + std::to_string(T),
                               blocks.pre_amplification, a.pre_amplification, 1e-10, seed));
    rows.push_back(check_close(file.name, "t-step t_inner=1 vs fast-forward T=" + std::to_string(T),
                               search_tstep(inst, 1, cfg).success_probability, blocks.success_probability, 1e-9,
                               seed));
  }
  return rows;
}

std::vector<Item> build_items(const std::string& name) {
  std::vector<Item> items;
  auto add = [&](std::string label, std::function<std::vector<ReportRow>(std::uint64_t)> run) {
    items.push_back(Item{std::move(label), std::move(run)});
  };
  const bool all = name == "all";
  if (all || name == "electric") {
    add("electric/path3", path3_rows);
    for (int i = 0; i < 10; ++i) add("electric/random-" + std::to_string(i), electric_random_rows);
  }
  if (all || name == "classical") {
    for (int i = 0; i < 3; ++i) add("classical/hitting-mc-" + std::to_string(i), hitting_monte_carlo_rows);
    add("classical/commute-frequency", commute_frequency_rows);
    add("classical/boxes", boxes_rows);
  }
  if (all || name == "quantum") {
    for (int i = 0; i < 5; ++i) add("quantum/blocks-" + std::to_string(i), block_encoding_rows);
    for (int i = 0; i < 3; ++i) add("quantum/reflections-" + std::to_string(i), reflection_rows);
    add("quantum/amplification", amplification_rows);
  }
  if (all || name == "ffwd") {
    for (int i = 0; i < 2; ++i) add("ffwd/bound-table-" + std::to_string(i), fast_forward_rows);
    add("ffwd/chebyshev", chebyshev_rows);
  }
  if (all || name == "search") {
    for (int i = 0; i < 5; ++i) add("search/amplitude-bound-" + std::to_string(i), amplitude_bound_rows);
    add("search/ff-path3", [](std::uint64_t s) { return ff_sweep_rows(path3_instance(), s); });
    add("search/ff-complete5", [](std::uint64_t s) { return ff_sweep_rows(suite_instances()[2], s); });
    add("search/equivalence", equivalence_rows);
  }
  if (items.empty()) throw ConfigError("run_suite: unknown suite \"" + name + "\"");
  return items;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"electric", "classical", "quantum", "ffwd", "search", "all"};
  return names;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ExperimentReport run_suite(const std::string& name, const SuiteOptions& options) {
  const std::vector<Item> items = build_items(name);
  struct Result {
    std::vector<ReportRow> rows;
    std::string error;
  };
  std::vector<Result> results(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < items.size(); i = next++) {
      const std::uint64_t seed = derive_seed(options.seed, i);
      const auto start = std::chrono::steady_clock::now();
      try {
        results[i].rows = items[i].run(seed);
      } catch (const std::exception& e) {
        results[i].error = items[i].label + ": " + e.what();
      }
      if (options.timing) {
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        for (ReportRow& r : results[i].rows) r.wall_ms = ms;
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(items.size()));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  ExperimentReport report;
  report.suite = name;
  report.seed = options.seed;
  nlohmann::json config = {{"suite", name}, {"seed", options.seed}, {"items", items.size()}, {"timing", options.timing}};
  report.config = config.dump();
  for (Result& r : results) {
    for (ReportRow& row : r.rows) report.rows.push_back(std::move(row));
    if (!r.error.empty()) report.errors.push_back(std::move(r.error));
  }
  return report;
}

}  // namespace qws
