#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qwsearch/instance.hpp"
#include "qwsearch/random_instances.hpp"
#include "qwsearch/search.hpp"

#include <map>
#include <random>

using namespace qws;

namespace {

SearchInstance from_file(const InstanceFile& f, std::optional<double> C = std::nullopt) {
  return prepare_search(f.graph(), f.distribution(), f.marked_set(), C);
}

double marked_mass(const Vector& p, const VertexSet& m) {
  double s = 0.0;
  for (Index x : m) s += p[x];
  return s;
}

// Two-set interpolation of the modified chain, built from the weights alone.
Matrix oracle_interpolated(const SearchInstance& inst, double q_s, double q_m) {
  Matrix p = oracle::transition(inst.modified.graph.weights());
  for (Index s : inst.modified.start_prime) {
    p.row(s) *= 1.0 - q_s;
    p(s, s) += q_s;
  }
  for (Index m : inst.modified.marked_prime) {
    p.row(m) *= 1.0 - q_m;
    p(m, m) += q_m;
  }
  return p;
}

double oracle_norm(const Matrix& p, const SearchInstance& inst, long t) {
  const Vector v = oracle::matrix_power(oracle::discriminant(p), t) * inst.modified.sigma_prime.sqrt_amplitudes();
  double s = 0.0;
  for (Index m : inst.modified.marked_prime) s += v[m] * v[m];
  return std::sqrt(s);
}

double oracle_joint(const Matrix& p, const SearchInstance& inst, long t, long t_prime) {
  Vector row = inst.modified.sigma_prime.probabilities().transpose() * oracle::matrix_power(p, t);
  for (Index x = 0; x < row.size(); ++x)
    if (!inst.modified.marked_prime.contains(x)) row[x] = 0.0;
  const Vector after = (row.transpose() * oracle::matrix_power(p, t_prime - t)).transpose();
  return marked_mass(after, inst.modified.start_prime);
}

}  // namespace

TEST_CASE("configuration defaults") {
  SearchConfig cfg;
  cfg.T = 64;
  const SearchConfig r = cfg.resolved();
  CHECK(r.r_S == doctest::Approx(64.0 / 60.0));
  CHECK(r.eps_ff == doctest::Approx(1.0 / 48.0));
  CHECK(r.aa_rounds == 3);
  CHECK(r.simple_eps == doctest::Approx(1.0 / 64.0));
  CHECK(r.holding_grid().size() == 11);  // 14 * 64 = 896 -> 2^10
  cfg.T = 8;
  CHECK(cfg.resolved().r_S == 1.0);
  cfg.T = 7;
  CHECK_THROWS_AS(cfg.resolved(), ConfigError);
  cfg.T = 0;
  CHECK_THROWS_AS(cfg.resolved(), ConfigError);
}

TEST_CASE("search instances") {
  const InstanceFile a = path3_instance();
  const SearchInstance inst = from_file(a);
  CHECK(inst.C == doctest::Approx(40.0 / 9.0));
  CHECK(marked_mass(inst.modified.sigma_prime.probabilities(), inst.modified.marked_prime) == 0.0);
  CHECK((inst.base_block() - oracle::discriminant(oracle::transition(inst.modified.graph.weights())))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK_THROWS_AS(prepare_search(a.graph(), Distribution::point_mass(3, 2), VertexSet{2}), ValidationError);
}

TEST_CASE("success profile matches direct matrix powers") {
  const SearchInstance inst = from_file(path3_instance());
  SearchConfig cfg;
  cfg.T = 16;
  cfg = cfg.resolved();
  const Profile prof = success_probability_profile(inst, cfg);
  REQUIRE(prof.values.rows() == 16);
  REQUIRE(prof.values.cols() == static_cast<Index>(cfg.holding_grid().size()));
  CHECK(prof.average == doctest::Approx(prof.values.mean()));
  CHECK(prof.hypothesis_holds);
  const double q_s = 1.0 - 1.0 / cfg.r_S;
  for (long t : {1L, 5L, 16L}) {
    for (std::size_t k = 0; k < prof.r_M.size(); k += 3) {
      const Matrix p = oracle_interpolated(inst, q_s, 1.0 - 1.0 / static_cast<double>(prof.r_M[k]));
      const double expect = oracle_norm(p, inst, t);
      CHECK(prof.values(t - 1, static_cast<Index>(k)) == doctest::Approx(expect * expect).epsilon(1e-10));
    }
  }
}

// Grid-average success times log2 T; smallest measured value 0.091 (cycle5-loops, 2C).
TEST_CASE("grid-average success stays above kappa / log2 T on the suite") {
  const double kappa = 0.08;
  for (const InstanceFile& f : suite_instances()) {
    const double base = commute_quantity(f.graph(), f.distribution(), f.marked_set());
    for (double scale : {1.0, 2.0}) {
      const SearchInstance inst = from_file(f, scale * base);
      const ModifiedInstance& m = inst.modified;
      const double c_prime = commute_quantity(m.graph, m.sigma_prime, m.marked_prime);
      SearchConfig cfg;
      cfg.T = 2;
      while (cfg.T < 4.0 * c_prime) cfg.T *= 2;
      const Profile p = success_probability_profile(inst, cfg);
      INFO(f.name, " C x", scale, " T=", cfg.T);
      CHECK(p.hypothesis_holds);
      CHECK(p.average * static_cast<double>(cfg.resolved().log2_T()) >= kappa);
    }
  }
}

TEST_CASE("no marked vertices: profile is zero and nothing is found") {
  Matrix w = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
  const WeightedGraph g(w);
  const SearchInstance inst = prepare_search(g, Distribution::point_mass(4, 0), VertexSet{});
  SearchConfig cfg;
  cfg.T = 8;
  cfg.seed = 3;
  CHECK(success_probability_profile(inst, cfg.resolved()).values.cwiseAbs().maxCoeff() == 0.0);
  const SearchOutcome s = search_simple(inst, cfg);
  CHECK_FALSE(s.found.has_value());
  CHECK(s.success_probability == 0.0);
  CHECK_FALSE(search_fastforward(inst, cfg).found.has_value());
}

TEST_CASE("marked amplitude dominates the hit-then-return probability") {
  std::mt19937_64 rng(77);
  int tuples = 0;
  for (std::uint64_t seed = 1; tuples < 40; ++seed) {
    const WeightedGraph g = random_connected_graph(6, seed);
    const VertexSet M{5};
    const Distribution sigma = Distribution::restricted(g.stationary(), VertexSet{0, 1});
    const SearchInstance inst = prepare_search(g, sigma, M);
    const long t = std::uniform_int_distribution<long>(1, 12)(rng);
    const long tp = t + std::uniform_int_distribution<long>(1, 12)(rng);
    const double q_s = std::uniform_real_distribution<double>(0.0, 0.9)(rng);
    const double q_m = std::uniform_real_distribution<double>(0.0, 0.99)(rng);
    const ReversibleChain cq =
        interpolate_two(inst.chain_prime, inst.modified.start_prime, inst.modified.marked_prime, {q_s, q_m});
    const double lhs = marked_amplitude_norm(discriminant(cq), inst.modified.sigma_prime, inst.modified.marked_prime, t);
    const double rhs =
        joint_probability(cq, inst.modified.sigma_prime, inst.modified.marked_prime, inst.modified.start_prime, t, tp);
    const Matrix p = oracle_interpolated(inst, q_s, q_m);
    CHECK(lhs == doctest::Approx(oracle_norm(p, inst, t)).epsilon(1e-10));
    CHECK(rhs == doctest::Approx(oracle_joint(p, inst, t, tp)).epsilon(1e-10));
    CHECK(lhs - rhs >= -1e-10);
    ++tuples;
  }
}

TEST_CASE("binomial offsets") {
  const auto law = binomial_offset_law(2, 2);
  REQUIRE(law.size() == 3);
  CHECK(law[0] == std::pair<long, double>{-2, 0.25});
  CHECK(law[1].first == 0);
  CHECK(law[1].second == doctest::Approx(0.5));
  // cap 1 drops the +-2 offsets; t = 2 has only even offsets
  const auto capped = binomial_offset_law(2, 1);
  REQUIRE(capped.size() == 1);
  CHECK(capped[0].second == doctest::Approx(1.0));

  const long t = 30, cap = 10;
  const auto exact = binomial_offset_law(t, cap);
  std::map<long, double> by_offset(exact.begin(), exact.end());
  for (const auto& [n, p] : exact) CHECK(by_offset[-n] == doctest::Approx(p));

  std::mt19937_64 rng(2024);
  std::map<long, long> seen;
  std::vector<double> absn;
  const long draws = 100000;
  for (long k = 0; k < draws; ++k) {
    const long n = sample_binomial_offset(t, cap, rng);
    CHECK(std::abs(n) <= cap);
    CHECK((n - t) % 2 == 0);
    ++seen[n];
    absn.push_back(static_cast<double>(std::abs(n)));
  }
  std::vector<long> observed;
  std::vector<double> probs;
  double mean_abs = 0.0;
  for (const auto& [n, p] : exact) {
    observed.push_back(seen[n]);
    probs.push_back(p);
    mean_abs += p * std::abs(n);
  }
  CHECK(oracle::chi_square(observed, probs, draws) < oracle::chi_square_crit_1pct(static_cast<int>(exact.size()) - 1));
  const auto est = oracle::mean_of(absn);
  CHECK(std::abs(est.mean - mean_abs) <= 3.0 * est.se);

  CHECK_THROWS_AS(binomial_offset_law(5, 0), ValidationError);
}

TEST_CASE("fast-forward search on the three-vertex path") {
  const SearchInstance inst = from_file(path3_instance());
  SearchConfig base;
  base.seed = 11;
  const SweepResult sweep = sweep_doubling(base, 4, 1024, [&](const SearchConfig& c) { return search_fastforward(inst, c); });
  REQUIRE(sweep.first_success_T.has_value());
  CHECK(static_cast<double>(*sweep.first_success_T) <= 64.0 * 40.0 / 9.0);
  const SearchOutcome& last = sweep.runs.back();
  CHECK(last.success_probability >= 0.5);
  if (last.found) CHECK(inst.marked.contains(*last.found));
  CHECK(last.success_probability == doctest::Approx(amplified_probability(last.pre_amplification, last.aa_rounds)).epsilon(1e-9));
}

TEST_CASE("fast-forward search: backends, determinism, counters") {
  const SearchInstance inst = from_file(suite_instances()[1]);
  SearchConfig cfg;
  cfg.T = 16;
  cfg.seed = 5;
  const SearchOutcome a = search_fastforward(inst, cfg, FastForwardBackend::blocks);
  const SearchOutcome b = search_fastforward(inst, cfg, FastForwardBackend::circuit);
  CHECK(std::abs(a.success_probability - b.success_probability) < 1e-10);
  CHECK(a.distribution.size() == 0);
  CHECK((a.flagged_distribution - b.flagged_distribution).cwiseAbs().sum() < 1e-10);
  CHECK(marked_mass(b.flagged_distribution, inst.modified.marked_prime) == doctest::Approx(b.pre_amplification));
  const SearchOutcome again = search_fastforward(inst, cfg, FastForwardBackend::blocks);
  CHECK(again.found == a.found);
  CHECK(again.success_probability == a.success_probability);
  CHECK(again.counters == a.counters);
  CHECK(a.counters.setup == 1 + 2 * a.aa_rounds);
  CHECK(a.counters.walk > 0);
  CHECK(a.counters.check > a.counters.walk);
  CHECK(a.trace.size() == static_cast<std::size_t>(16 * cfg.resolved().holding_grid().size()));
  CHECK(a.pre_amplification == doctest::Approx(success_probability_profile(inst, cfg.resolved()).average).epsilon(1e-3));
}

TEST_CASE("simple search reproduces the fast-forward measurement statistics") {
  for (const InstanceFile& f : {path3_instance(), suite_instances()[2]}) {
    const SearchInstance inst = from_file(f);
    for (double r_s : {0.0, 8.0}) {  // default T/60 and T/2
      SearchConfig cfg;
      cfg.T = 16;
      cfg.r_S = r_s;
      cfg.seed = 9;
      SearchConfig same = cfg.resolved();
      same.simple_eps = same.eps_ff;
      const SearchOutcome one = search_fastforward(inst, same, FastForwardBackend::circuit);
      const SearchOutcome two = search_simple(inst, same);
      CHECK(0.5 * (one.distribution - two.distribution).cwiseAbs().sum() < 1e-8);
      CHECK(two.success_probability ==
            doctest::Approx(marked_mass(one.distribution, inst.modified.marked_prime)).epsilon(1e-10));
      // the flagged branch alone is a lower bound
      CHECK(two.success_probability >= one.pre_amplification - 1e-12);
      CHECK(two.overall == doctest::Approx(1.0 - std::pow(1.0 - two.success_probability,
                                                          static_cast<double>(same.log2_T() * same.shots_factor))));
      if (two.found) CHECK(inst.marked.contains(*two.found));
    }
  }
}

TEST_CASE("t-step search") {
  const SearchInstance inst = from_file(suite_instances()[2]);
  SearchConfig cfg;
  cfg.T = 32;
  cfg.seed = 2;
  const SearchOutcome plain = search_fastforward(inst, cfg);
  const SearchOutcome one = search_tstep(inst, 1, cfg);
  CHECK(std::abs(plain.success_probability - one.success_probability) < 1e-9);
  const SearchOutcome three = search_tstep(inst, 3, cfg);
  CHECK(three.success_probability >= 0.0);
  CHECK(three.success_probability <= 1.0);
  CHECK(three.counters.walk > plain.counters.walk);
  CHECK_THROWS_AS(search_tstep(inst, 0, cfg), ValidationError);
}
