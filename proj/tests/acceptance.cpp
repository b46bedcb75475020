// One line per acceptance criterion; exit status is the number of failures.

#include "oracles.hpp"
#include "qwsearch/boxes.hpp"
#include "qwsearch/classical.hpp"
#include "qwsearch/electric.hpp"
#include "qwsearch/fast_forward.hpp"
#include "qwsearch/instance.hpp"
#include "qwsearch/random_instances.hpp"
#include "qwsearch/search.hpp"
#include "qwsearch/walks.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace qws;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = Clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool ok = v.pass && in_time;
  failures += ok ? 0 : 1;
  std::printf("[%s] %2d %s: %s; %.2f s%s\n", ok ? "PASS" : "FAIL", id, title.c_str(), v.detail.c_str(), secs,
              in_time ? "" : " (over time limit)");
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Random connected graph with marked and start sets drawn from the same seed.
struct Case {
  WeightedGraph g;
  VertexSet marked;
  VertexSet start;
};

Case random_case(std::uint64_t seed, Index n_max) {
  std::mt19937_64 rng(seed);
  const Index n = 3 + static_cast<Index>(rng() % static_cast<std::uint64_t>(n_max - 2));
  WeightedGraph g = random_connected_graph(n, seed);
  VertexSet m = random_subset(n, 1 + static_cast<Index>(rng() % 2), {}, rng);
  VertexSet s = random_subset(n, std::min<Index>(1 + static_cast<Index>(rng() % 2), n - m.size()), m, rng);
  return {std::move(g), std::move(m), std::move(s)};
}

Matrix chebyshev_matrix(long k, const Matrix& a) {
  Matrix prev = Matrix::Identity(a.rows(), a.cols());
  if (k == 0) return prev;
  Matrix cur = a;
  for (long j = 1; j < k; ++j) {
    Matrix next = 2.0 * a * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

SearchInstance prepared(const InstanceFile& f) {
  return prepare_search(f.graph(), f.distribution(), f.marked_set(), f.C);
}

long next_pow2(double x) {
  long t = 1;
  while (static_cast<double>(t) < x) t *= 2;
  return t;
}

// calibrated on the built-in suite; see README
constexpr double kKappaPrime = 0.5;
constexpr double kHittingConstant = 2.0;

}  // namespace

int main() {
  criterion(1, "three-vertex path golden values", 1.0, [] {
    const InstanceFile f = path3_instance();
    const WeightedGraph g = f.graph();
    const ReversibleChain c = build_chain(g);
    const VertexSet S{0, 1};
    const VertexSet M = f.marked_set();
    const double R = effective_resistance(g, f.distribution(), M).value;
    const double C = commute_quantity(g, f.distribution(), M);
    const double pr = exact_return_prob(c, S, M);
    const double E = exact_commute_time(c, S, M, f.distribution()).value;
    const double worst = std::max({std::abs(R - 10.0 / 9.0), std::abs(C - 40.0 / 9.0), std::abs(pr - 1.0 / 3.0),
                                   std::abs(E - 13.0 / 3.0)});
    std::ostringstream d;
    d << "R=" << R << " C=" << C << " Pr=" << pr << " E=" << E << " max err " << worst;
    return Verdict{worst <= 1e-9 && E < C, d.str()};
  });

  criterion(2, "resistance identities for commute and hitting times, 50 graphs", 10.0, [] {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const Case k = random_case(seed, 12);
      const ReversibleChain c = build_chain(k.g);
      const double W = k.g.total_weight();
      const Index s = k.start.items().front();
      const Distribution point = Distribution::point_mass(k.g.size(), s);
      const double E = exact_commute_time(c, VertexSet{s}, k.marked, point).value;
      worst = std::max(worst, rel(W * effective_resistance(k.g, point, k.marked).value, E));
      const double HT = hitting_time(c, k.marked).value;
      worst = std::max(worst, rel(W * stationary_resistance(k.g, k.marked), HT));
    }
    return Verdict{worst <= 1e-8, "max relative error " + fmt("%.2e", worst)};
  });

  criterion(3, "escape probability times set commute quantity, and Kac", 0.0, [] {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const Case k = random_case(seed, 12);
      const ReversibleChain c = build_chain(k.g);
      const double pS = c.stationary_mass(k.start);
      const double Csm = k.g.total_weight() * set_resistance(k.g, k.start, k.marked);
      worst = std::max(worst, std::abs(exact_return_prob(c, k.start, k.marked) * Csm * pS - 1.0));
      worst = std::max(worst, std::abs(exact_expected_return(c, k.start).value * pS - 1.0));
    }
    return Verdict{worst <= 1e-8, "max error " + fmt("%.2e", worst)};
  });

  criterion(4, "modified graph: pi'(S') = 1/(C+2) and C' formula, 20 instances", 0.0, [] {
    double worst_pi = 0.0;
    double worst_c = 0.0;
    for (std::uint64_t seed = 101; seed <= 120; ++seed) {
      const Case k = random_case(seed, 12);
      const Distribution sigma = Distribution::restricted(k.g.stationary(), k.start);
      const double base = commute_quantity(k.g, sigma, k.marked);
      const double C = base * (1.0 + static_cast<double>(seed % 7) / 3.0);
      const ModifiedInstance m = build_modified_graph(k.g, sigma, k.marked, C);
      const Vector pi = m.graph.stationary();
      worst_pi = std::max(worst_pi, std::abs(pi(m.start_prime.items()).sum() - 1.0 / (C + 2.0)));
      const double c_prime = commute_quantity(m.graph, m.sigma_prime, m.marked_prime);
      worst_c = std::max(worst_c, rel(c_prime, (base / C + 1.0) * (C + 2.0)));
    }
    return Verdict{worst_pi <= 1e-12 && worst_c <= 1e-9,
                   "max |pi'(S') - 1/(C+2)| " + fmt("%.2e", worst_pi) + ", max rel C' error " + fmt("%.2e", worst_c)};
  });

  criterion(5, "walk unitaries block-encode their discriminants, n <= 10", 30.0, [] {
    double worst = 0.0;
    for (Index n = 3; n <= 10; ++n) {
      const WeightedGraph g = random_connected_graph(n, 300 + static_cast<std::uint64_t>(n));
      std::mt19937_64 rng(static_cast<std::uint64_t>(n));
      const VertexSet M = random_subset(n, 1 + n / 4, {}, rng);
      const VertexSet S = random_subset(n, 1, M, rng);
      const ReversibleChain c = build_chain(g);
      const Matrix p = oracle::transition(g.weights());
      const WalkOperator w = szegedy_walk(c).op();
      worst = std::max(worst, verify_block_encoding(w, oracle::discriminant(p)));
      for (double s : {0.0, 0.25, 0.5, 0.9}) {
        Matrix ps = p;
        for (Index m : M.items()) {
          ps.row(m) *= 1.0 - s;
          ps(m, m) += s;
        }
        const WalkOperator iw = interpolated_walk_unitary(w, MembershipOracle(M, n), s);
        worst = std::max(worst, verify_block_encoding(iw, oracle::discriminant(ps)));
      }
      const Distribution sigma = Distribution::restricted(c.stationary(), S);
      const double C = commute_quantity(g, sigma, M);
      const ModifiedInstance mod = build_modified_graph(g, sigma, M, C);
      const WalkOperator mw = modified_walk_unitary(w, lambda_unitary(sigma, c.stationary(), C));
      const Matrix target = embed_modified(mod, oracle::discriminant(oracle::transition(mod.graph.weights())));
      worst = std::max(worst, verify_block_encoding(mw, target));
    }
    return Verdict{worst <= 1e-10, "max spectral deviation " + fmt("%.2e", worst)};
  });

  criterion(6, "reflection products give T_{2n}(D), n <= 8", 0.0, [] {
    double worst = 0.0;
    for (Index v = 2; v <= 6; ++v) {
      const WeightedGraph g = random_ergodic_graph(v, 400 + static_cast<std::uint64_t>(v));
      const WalkOperator w = szegedy_walk(build_chain(g)).op();
      const Matrix d = oracle::discriminant(oracle::transition(g.weights()));
      for (long n = 1; n <= 8; ++n)
        worst = std::max(worst, verify_block_encoding(walk_power_reflections(w, n), chebyshev_matrix(2 * n, d)));
    }
    return Verdict{worst < 1e-9, "max deviation " + fmt("%.2e", worst)};
  });

  criterion(7, "fast-forward error and walk count", 120.0, [] {
    const WeightedGraph g = random_ergodic_graph(6, 77);
    const ReversibleChain c = build_chain(g);
    const Matrix d = oracle::discriminant(c.transition());
    const WalkOperator w = szegedy_walk(c).op();
    std::mt19937_64 rng(7);
    bool ok = true;
    double worst_ratio = 0.0;
    long worst_count = 0;
    for (long t : {8L, 32L, 64L}) {
      const Matrix dt = oracle::matrix_power(d, t);
      for (double eps : {1e-1, 1e-2}) {
        auto calls = std::make_shared<long>(0);
        const FastForward ff = fast_forward_unitary(counted(w, calls), t, eps);
        const long levels = 1L << ff.ell;
        for (int rep = 0; rep < 20; ++rep) {
          const Vector psi = random_unit_vector(6, rng);
          const Vector out = ff.op.apply(ff.op.embed(psi));
          const double err = (dt * psi - ff.op.flagged_part(out)).norm();
          worst_ratio = std::max(worst_ratio, err / eps);
          ok = ok && err <= 2.0 * eps;
        }
        // each run of U applies I (x) W once per control level
        const long per_run = *calls / (20 * levels);
        const long bound = 4 * static_cast<long>(std::ceil(std::sqrt(2.0 * t * std::log(2.0 / eps)))) + 4;
        ok = ok && *calls % (20 * levels) == 0 && per_run <= bound;
        worst_count = std::max(worst_count, per_run - bound);
      }
    }
    return Verdict{ok, "max err/eps " + fmt("%.3f", worst_ratio) + ", max (count - bound) " +
                           std::to_string(worst_count)};
  });

  criterion(8, "truncated Chebyshev expansion error, t <= 256", 5.0, [] {
    double worst_ratio = 0.0;
    for (double eps : {1e-1, 1e-2, 1e-3}) {
      for (long t = 1; t <= 256; ++t) {
        const ChebyshevExpansion e = chebyshev_expansion(t, truncation_degree(t, eps));
        for (int i = 0; i <= 1000; ++i) {
          const double x = -1.0 + i / 500.0;
          worst_ratio = std::max(worst_ratio, std::abs(eval_poly_scalar(e, x) - std::pow(x, static_cast<double>(t))) / eps);
        }
      }
    }
    return Verdict{worst_ratio <= 1.0, "max error/eps " + fmt("%.3f", worst_ratio)};
  });

  criterion(9, "stretching witness exists for every box sequence, length <= 16", 0.0, [] {
    long checked = 0;
    long bad = 0;
    long sampled_bad = 0;
    std::mt19937_64 rng(9);
    for (long T : {4L, 8L}) {
      const ExhaustiveResult r = exhaustive_stretching_check(T, 16);
      checked += r.checked;
      bad += r.counterexamples;
      // independent recount on random sequences satisfying the hypotheses
      const std::vector<long> grid = holding_grid(T);
      for (int k = 0; k < 5000; ++k) {
        const long ht = std::uniform_int_distribution<long>(1, T - 1)(rng);
        const long ct = std::uniform_int_distribution<long>(ht + 1, T)(rng);
        const long len = std::uniform_int_distribution<long>(ct + 1, 16)(rng);
        std::string y(static_cast<std::size_t>(len), '.');
        y[0] = 'S';
        y[static_cast<std::size_t>(ht)] = 'M';
        for (long i = ht + 1; i < ct; ++i) y[static_cast<std::size_t>(i)] = rng() % 2 ? 'M' : '.';
        y[static_cast<std::size_t>(ct)] = 'S';
        for (long i = ct + 1; i < len; ++i) y[static_cast<std::size_t>(i)] = "SM."[rng() % 3];
        bool found = false;
        for (long r : grid) found = found || oracle::good_witness(y, T, r);
        sampled_bad += found ? 0 : 1;
      }
    }
    return Verdict{bad == 0 && sampled_bad == 0, std::to_string(checked) + " sequences, " + std::to_string(bad) +
                                                     " counterexamples, " + std::to_string(sampled_bad) +
                                                     " in an independent sample of 10000"};
  });

  criterion(10, "marked amplitude dominates the hit-then-return probability, 100 tuples", 0.0, [] {
    double margin = 1e300;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      std::mt19937_64 rng(seed);
      const Case k = random_case(500 + seed, 7);
      const Distribution sigma = Distribution::restricted(k.g.stationary(), k.start);
      const SearchInstance inst = prepare_search(k.g, sigma, k.marked);
      const ModifiedInstance& m = inst.modified;
      const auto q = InterpolationParams::from_holding(1.0 + static_cast<double>(rng() % 8),
                                                       std::ldexp(1.0, static_cast<int>(rng() % 6)));
      const ReversibleChain cq = interpolate_two(inst.chain_prime, m.start_prime, m.marked_prime, q);
      const long t = 1 + static_cast<long>(rng() % 16);
      const long t_prime = t + 1 + static_cast<long>(rng() % 16);
      const double lhs = marked_amplitude_norm(discriminant(cq), m.sigma_prime, m.marked_prime, t);
      const double rhs = joint_probability(cq, m.sigma_prime, m.marked_prime, m.start_prime, t, t_prime);
      margin = std::min(margin, lhs - rhs);
    }
    return Verdict{margin >= -1e-10, "min margin " + fmt("%.3e", margin)};
  });

  criterion(11, "fast-forward search doubling sweep reaches 1/2 within T <= 64 C", 300.0, [] {
    bool ok = true;
    std::ostringstream d;
    for (const InstanceFile& f : suite_instances()) {
      const SearchInstance inst = prepared(f);
      SearchConfig cfg;
      const long limit = static_cast<long>(64.0 * inst.C);
      const SweepResult s =
          sweep_doubling(cfg, 4, limit, [&](const SearchConfig& c) { return search_fastforward(inst, c); });
      ok = ok && s.first_success_T.has_value();
      d << f.name << " T=" << (s.first_success_T ? std::to_string(*s.first_success_T) : "none") << "/"
        << fmt("%.1f", 64.0 * inst.C) << " p=" << fmt("%.3f", s.runs.back().success_probability) << " ";
    }
    return Verdict{ok, d.str()};
  });

  criterion(12, "simple search matches the fast-forward circuit, single-shot floor", 0.0, [] {
    double worst_tv = 0.0;
    std::vector<InstanceFile> small = {path3_instance(), complete_with_loops(5)};
    for (const InstanceFile& f : suite_instances())
      if (f.size() <= 8) small.push_back(f);
    for (const InstanceFile& f : small) {
      const SearchInstance inst = prepared(f);
      for (long T : {16L, 32L, 64L}) {
        SearchConfig cfg;
        cfg.T = T;
        cfg = cfg.resolved();
        cfg.simple_eps = cfg.eps_ff;
        const SearchOutcome a = search_fastforward(inst, cfg, FastForwardBackend::circuit);
        const SearchOutcome b = search_simple(inst, cfg);
        worst_tv = std::max(worst_tv, 0.5 * (a.distribution - b.distribution).cwiseAbs().sum());
      }
    }
    double worst_kappa = 1e300;
    for (const InstanceFile& f : suite_instances()) {
      const SearchInstance inst = prepared(f);
      SearchConfig cfg;
      cfg.T = next_pow2(8.0 * (inst.C + 2.0));
      const SearchOutcome o = search_simple(inst, cfg);
      worst_kappa = std::min(worst_kappa, o.success_probability * static_cast<double>(cfg.resolved().log2_T()));
    }
    return Verdict{worst_tv <= 1e-8 && worst_kappa >= kKappaPrime,
                   std::to_string(small.size()) + " instances, max TV " + fmt("%.2e", worst_tv) +
                       ", min single-shot * log2 T " + fmt("%.3f", worst_kappa) + " (floor " +
                       fmt("%.2f", kKappaPrime) + ")"};
  });

  criterion(13, "t-step search regimes", 0.0, [] {
    double worst = 0.0;
    for (const InstanceFile& f : suite_instances()) {
      const SearchInstance inst = prepared(f);
      for (long T : {16L, 64L}) {
        SearchConfig cfg;
        cfg.T = T;
        worst = std::max(worst, std::abs(search_tstep(inst, 1, cfg).success_probability -
                                         search_fastforward(inst, cfg).success_probability));
      }
    }

    const InstanceFile k5 = complete_with_loops(5);
    const ReversibleChain c5 = build_chain(k5.graph());
    const long t5 = static_cast<long>(std::ceil(1.0 / spectral_gap(c5)));
    const double C5 = commute_quantity(chain_to_graph(chain_power(c5, t5).chain), k5.distribution(), k5.marked_set());
    const double bound5 = 2.0 / c5.stationary_mass(k5.marked_set());

    // bipartite chains are skipped: P^t with even t is reducible there
    double c_max = 0.0;
    std::ostringstream per;
    for (const InstanceFile& f : suite_instances()) {
      const ReversibleChain c = build_chain(f.graph());
      if (check_ergodic(c) != Ergodicity::ergodic) continue;
      const VertexSet M = f.marked_set();
      const double pm = c.stationary_mass(M);
      const long t = static_cast<long>(std::ceil(pm * hitting_time(c, M).value));
      const double ct = pm * hitting_time(chain_power(c, t).chain, M).value;
      c_max = std::max(c_max, ct);
      per << f.name << " c=" << fmt("%.3f", ct) << " ";
    }
    return Verdict{worst <= 1e-9 && C5 <= bound5 && c_max <= kHittingConstant,
                   "t_inner=1 max diff " + fmt("%.1e", worst) + "; K5-loops C(P^t)=" + fmt("%.3f", C5) +
                       " <= " + fmt("%.3f", bound5) + "; " + per.str() + "(c <= " + fmt("%.1f", kHittingConstant) +
                       ")"};
  });

  criterion(14, "Monte Carlo hit-then-return frequency on modified instances", 0.0, [] {
    bool ok = true;
    std::ostringstream d;
    std::vector<InstanceFile> all = suite_instances();
    all.insert(all.begin(), path3_instance());
    std::uint64_t seed = 14;
    for (const InstanceFile& f : all) {
      const WeightedGraph g = f.graph();
      const Distribution sigma = f.distribution();
      const double C = commute_quantity(g, sigma, f.marked_set());
      const ModifiedInstance m = build_modified_graph(g, sigma, f.marked_set(), C);
      const double c_prime = commute_quantity(m.graph, m.sigma_prime, m.marked_prime);
      const long T = static_cast<long>(std::ceil(4.0 * c_prime));
      const FrequencyEstimate e =
          check_claim_commute(build_chain(m.graph), m.start_prime, m.marked_prime, 0.5, T, 100000, seed++);
      const bool pass = e.frequency() >= 0.25 - 3.0 * e.standard_error();
      ok = ok && pass;
      d << f.name << " " << fmt("%.3f", e.frequency()) << " ";
    }
    return Verdict{ok, d.str()};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
