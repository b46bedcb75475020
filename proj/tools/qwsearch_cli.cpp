// qwsearch: command-line front end for the library.

#include "qwsearch/classical.hpp"
#include "qwsearch/electric.hpp"
#include "qwsearch/fast_forward.hpp"
#include "qwsearch/instance.hpp"
#include "qwsearch/report.hpp"
#include "qwsearch/search.hpp"
#include "qwsearch/suites.hpp"
#include "qwsearch/walks.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>

using nlohmann::ordered_json;
using namespace qws;

namespace {

struct Common {
  std::uint64_t seed = 7;
  double tolerance = 1e-10;
  std::string format = "text";
  std::string out;
  bool lenient = false;
};

struct SearchFlags {
  long T = 64;
  double r_S = 0.0;
  double eps_ff = 0.0;
  long aa_rounds = -1;
  long t_inner = 1;
  bool sweep = false;
  long sweep_start = 4;
  std::string backend = "blocks";
  bool trace = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--tolerance", c.tolerance, "tolerance for reported checks");
  cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"text", "csv", "json"}));
  cmd->add_option("--out", c.out, "write output to PATH instead of stdout");
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_file(c.out, text);
  }
}

std::string scalar_text(const ordered_json& v) {
  if (v.is_number_float()) return format_double(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Flat record: text is key=value lines, csv is a header and one row.
std::string render_record(const ordered_json& record, const std::string& format) {
  if (format == "json") return record.dump(2) + "\n";
  std::string keys;
  std::string values;
  std::string text;
  for (const auto& [key, value] : record.items()) {
    if (value.is_structured()) continue;
    keys += (keys.empty() ? "" : ",") + key;
    values += (values.empty() ? "" : ",") + scalar_text(value);
    text += key + "=" + scalar_text(value) + "\n";
  }
  return format == "csv" ? keys + "\n" + values + "\n" : text;
}

std::string render_report(const ExperimentReport& r, const std::string& format) {
  if (format == "json") return report_json(r);
  if (format == "csv") return report_csv(r);
  return report_text(r);
}

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(format_double(x)); }

InstanceFile load(const std::string& path, const Common& c, bool require_marked) {
  LoadOptions opts;
  opts.lenient = c.lenient;
  InstanceFile inst = load_instance(path, opts);
  for (const std::string& w : inst.warnings) std::cerr << "warning: " << w << "\n";
  if (require_marked && inst.detect_mode()) throw InstanceError(path + ": /marked: this command needs a marked set");
  return inst;
}

VertexSet start_set(const InstanceFile& inst) { return inst.distribution().support(); }

ordered_json outcome_json(const SearchOutcome& o, const InstanceFile& inst, const std::string& algorithm,
                          std::uint64_t seed, bool trace) {
  ordered_json j;
  j["instance"] = inst.name;
  j["algorithm"] = algorithm;
  j["found"] = o.found ? ordered_json(inst.vertices[static_cast<std::size_t>(*o.found)]) : ordered_json(nullptr);
  j["success_probability"] = o.success_probability;
  j["pre_amplification"] = o.pre_amplification;
  j["overall"] = o.overall;
  j["T"] = o.T;
  j["r_S"] = o.r_S;
  j["eps_ff"] = o.eps_ff;
  j["aa_rounds"] = o.aa_rounds;
  j["shots"] = o.shots;
  j["seed"] = seed;
  j["walk"] = o.counters.walk;
  j["check"] = o.counters.check;
  j["lambda"] = o.counters.lambda;
  j["setup"] = o.counters.setup;
  if (trace) {
    ordered_json rows = ordered_json::array();
    for (const TraceEntry& e : o.trace) rows.push_back({{"t", e.t}, {"r_M", e.r_M}, {"success", e.success}});
    j["trace"] = rows;
  }
  return j;
}

int run_resistance(const std::string& path, const Common& c) {
  const InstanceFile inst = load(path, c, true);
  const WeightedGraph g = inst.graph();
  const Distribution sigma = inst.distribution();
  const VertexSet M = inst.marked_set();
  const double R = effective_resistance(g, sigma, M).value;
  const double RS = set_resistance(g, start_set(inst), M);
  ordered_json j;
  j["instance"] = inst.name;
  j["W"] = g.total_weight();
  j["R"] = R;
  j["C"] = g.total_weight() * R;
  j["R_SM"] = RS;
  j["C_SM"] = g.total_weight() * RS;
  emit(c, render_record(j, c.format));
  return 0;
}

int run_hitting(const std::string& path, const Common& c) {
  const InstanceFile inst = load(path, c, true);
  const ReversibleChain chain = build_chain(inst.graph());
  const Distribution sigma = inst.distribution();
  const VertexSet M = inst.marked_set();
  const VertexSet S = start_set(inst);
  const ExpectedTime ht = hitting_time(chain, M);
  const ExpectedTime from_sigma = exact_hitting_time(chain, M, sigma);
  const ExpectedTime commute = exact_commute_time(chain, S, M, sigma);
  ordered_json j;
  j["instance"] = inst.name;
  j["HT"] = ht.infinite ? number(INFINITY) : ordered_json(ht.value);
  j["E_sigma_hit"] = from_sigma.infinite ? number(INFINITY) : ordered_json(from_sigma.value);
  j["E_sigma_commute"] = commute.infinite ? number(INFINITY) : ordered_json(commute.value);
  j["return_probability"] = exact_return_prob(chain, S, M);
  j["expected_return"] = exact_expected_return(chain, S).value;
  j["pi_S"] = chain.stationary_mass(S);
  emit(c, render_record(j, c.format));
  return 0;
}

int run_simulate(const std::string& path, const Common& c, long trials, long budget) {
  const InstanceFile inst = load(path, c, true);
  const ReversibleChain chain = build_chain(inst.graph());
  const Distribution sigma = inst.distribution();
  const VertexSet M = inst.marked_set();
  const ChainSampler sampler(chain);
  std::mt19937_64 rng(c.seed);
  double sum = 0.0;
  double sum2 = 0.0;
  long censored = 0;
  for (long i = 0; i < trials; ++i) {
    Index x = sampler.start(sigma, rng);
    long steps = 0;
    while (!M.contains(x) && steps < budget) {
      x = sampler.step(x, rng);
      ++steps;
    }
    if (!M.contains(x)) ++censored;
    sum += static_cast<double>(steps);
    sum2 += static_cast<double>(steps) * static_cast<double>(steps);
  }
  const double mean = sum / static_cast<double>(trials);
  ordered_json j;
  j["instance"] = inst.name;
  j["trials"] = trials;
  j["censored"] = censored;
  j["mean_hitting"] = mean;
  j["standard_error"] = std::sqrt(std::max(0.0, sum2 / static_cast<double>(trials) - mean * mean) / trials);
  j["exact_hitting"] = exact_hitting_time(chain, M, sigma).value;
  emit(c, render_record(j, c.format));
  return 0;
}

int run_qwalk_verify(const std::string& path, const Common& c) {
  const InstanceFile inst = load(path, c, true);
  const WeightedGraph g = inst.graph();
  const ReversibleChain chain = build_chain(g);
  const VertexSet M = inst.marked_set();
  const Distribution sigma = inst.distribution();
  const BlockUnitary<double> w = szegedy_walk(chain);
  ExperimentReport r;
  r.suite = "qwalk-verify";
  r.seed = c.seed;
  r.rows.push_back(check_close(inst.name, "Szegedy block = D", verify_block_encoding(w, discriminant(chain).D), 0.0,
                               c.tolerance, c.seed));
  for (double s : {0.0, 0.25, 0.5, 0.9}) {
    const WalkOperator iw = interpolated_walk_unitary(w.op(), MembershipOracle(M, g.size()), s);
    r.rows.push_back(check_close(inst.name, "interpolated block s=" + format_double(s),
                                 verify_block_encoding(iw, discriminant(interpolate_absorbing(chain, M, s)).D), 0.0,
                                 c.tolerance, c.seed));
  }
  const double C = inst.C.value_or(commute_quantity(g, sigma, M));
  const ModifiedInstance mod = build_modified_graph(g, sigma, M, C);
  const WalkOperator mw = modified_walk_unitary(w.op(), lambda_unitary(sigma, chain.stationary(), C));
  r.rows.push_back(check_close(inst.name, "modified walk block",
                               verify_block_encoding(mw, embed_modified(mod, discriminant(build_chain(mod.graph)).D)),
                               0.0, c.tolerance, c.seed));
  emit(c, render_report(r, c.format));
  return r.passed() ? 0 : 1;
}

int run_fastforward(const std::string& path, const Common& c, long t, double eps) {
  const InstanceFile inst = load(path, c, false);
  const ReversibleChain chain = build_chain(inst.graph());
  const DiscriminantMatrix d = discriminant(chain);
  const FastForward ff = fast_forward_unitary(szegedy_walk(chain).op(), t, eps);
  const double err = spectral_norm<double>(ff.op.block() - d.power(t));
  const double bound = 4.0 * std::ceil(std::sqrt(2.0 * t * std::log(2.0 / eps))) + 4.0;
  ExperimentReport r;
  r.suite = "fastforward";
  r.seed = c.seed;
  const std::string tag = " t=" + std::to_string(t) + " eps=" + format_double(eps);
  r.rows.push_back(check_at_most(inst.name, "||block - D^t||" + tag, err, 2.0 * eps, 0.0, c.seed));
  r.rows.push_back(check_at_most(inst.name, "walk applications" + tag, static_cast<double>(ff.op.cost().walk), bound,
                                 0.0, c.seed));
  emit(c, render_report(r, c.format));
  return r.passed() ? 0 : 1;
}

SearchConfig make_config(const SearchFlags& f, const Common& c) {
  SearchConfig cfg;
  cfg.T = f.T;
  cfg.r_S = f.r_S;
  cfg.eps_ff = f.eps_ff;
  cfg.aa_rounds = f.aa_rounds;
  cfg.seed = c.seed;
  return cfg;
}

int run_search(const std::string& kind, const std::string& path, const Common& c, const SearchFlags& f) {
  const InstanceFile inst = load(path, c, false);
  const SearchInstance si = prepare_search(inst.graph(), inst.distribution(), inst.marked_set(), inst.C);
  const FastForwardBackend backend = f.backend == "circuit" ? FastForwardBackend::circuit : FastForwardBackend::blocks;
  auto run = [&](const SearchConfig& cfg) {
    if (kind == "search-simple") return search_simple(si, cfg);
    if (kind == "search-tstep") return search_tstep(si, f.t_inner, cfg);
    return search_fastforward(si, cfg, backend);
  };
  const SearchConfig cfg = make_config(f, c);
  if (!f.sweep) {
    emit(c, render_record(outcome_json(run(cfg), inst, kind, c.seed, f.trace), c.format));
    return 0;
  }
  const SweepResult sweep = sweep_doubling(cfg, f.sweep_start, f.T, run);
  ordered_json runs = ordered_json::array();
  for (const SearchOutcome& o : sweep.runs) runs.push_back(outcome_json(o, inst, kind, c.seed, f.trace));
  if (c.format == "json") {
    ordered_json j;
    j["instance"] = inst.name;
    j["first_success_T"] = sweep.first_success_T ? ordered_json(*sweep.first_success_T) : ordered_json(nullptr);
    j["runs"] = runs;
    emit(c, j.dump(2) + "\n");
  } else {
    std::string text;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const std::string rec = render_record(runs[i], c.format);
      text += (c.format == "csv" && i > 0) ? rec.substr(rec.find('\n') + 1) : rec;
      if (c.format == "text") text += "\n";
    }
    if (c.format == "text")
      text += "first_success_T=" + (sweep.first_success_T ? std::to_string(*sweep.first_success_T) : "none") + "\n";
    emit(c, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum walk search simulator"};
  app.require_subcommand(1);
  Common common;
  SearchFlags sf;
  std::string path;
  long trials = 10000;
  long budget = 1000000;
  long t = 16;
  double eps = 0.01;
  std::string suite_name;
  unsigned threads = 0;
  bool timing = false;

  std::map<std::string, CLI::App*> cmds;
  auto instance_cmd = [&](const std::string& name, const std::string& help) {
    CLI::App* cmd = app.add_subcommand(name, help);
    cmd->add_option("instance", path, "instance JSON file")->required();
    cmd->add_flag("--lenient", common.lenient, "warn about unknown fields instead of failing");
    add_common(cmd, common);
    cmds[name] = cmd;
    return cmd;
  };
  instance_cmd("resistance", "effective resistance and C_{sigma,M}");
  instance_cmd("hitting", "exact hitting, commute and return quantities");
  CLI::App* sim = instance_cmd("simulate", "Monte Carlo hitting time");
  sim->add_option("--trials", trials, "number of trajectories")->check(CLI::PositiveNumber);
  sim->add_option("--budget", budget, "step cap per trajectory")->check(CLI::PositiveNumber);
  instance_cmd("qwalk-verify", "check the walk operators against their discriminants");
  CLI::App* ffc = instance_cmd("fastforward", "fast-forwarded D^t block and walk count");
  ffc->add_option("--t", t, "power")->check(CLI::PositiveNumber);
  ffc->add_option("--eps", eps, "precision")->check(CLI::Range(1e-15, 0.999));
  for (const std::string name : {"search-ff", "search-simple", "search-tstep"}) {
    CLI::App* cmd = instance_cmd(name, "run " + name);
    cmd->add_option("--T", sf.T, "horizon (even)");
    cmd->add_option("--rS", sf.r_S, "S-holding time (default max(1, T/60))");
    cmd->add_option("--eps-ff", sf.eps_ff, "fast-forward precision (default 1/(8 ceil(log2 T)))");
    cmd->add_option("--aa-rounds", sf.aa_rounds, "amplification rounds (default ceil(sqrt(log2 T)))");
    cmd->add_option("--t-inner", sf.t_inner, "inner power for search-tstep")->check(CLI::PositiveNumber);
    cmd->add_flag("--sweep-doubling", sf.sweep, "double T from --sweep-start up to --T until success >= 1/2");
    cmd->add_option("--sweep-start", sf.sweep_start, "first T of the sweep");
    cmd->add_option("--backend", sf.backend, "fast-forward search backend")->check(CLI::IsMember({"blocks", "circuit"}));
    cmd->add_flag("--trace", sf.trace, "include per-(t, r_M) contributions (json)");
  }
  CLI::App* suite = app.add_subcommand("suite", "run an invariant suite");
  suite->add_option("name", suite_name, "suite name")->required()->check(CLI::IsMember(suite_names()));
  suite->add_option("--threads", threads, "worker threads (0 = all cores)");
  suite->add_flag("--timing", timing, "record wall-clock times");
  add_common(suite, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (suite->parsed()) {
      const ExperimentReport r = run_suite(suite_name, SuiteOptions{common.seed, threads, timing});
      emit(common, render_report(r, common.format));
      return r.passed() ? 0 : 1;
    }
    if (cmds["resistance"]->parsed()) return run_resistance(path, common);
    if (cmds["hitting"]->parsed()) return run_hitting(path, common);
    if (cmds["simulate"]->parsed()) return run_simulate(path, common, trials, budget);
    if (cmds["qwalk-verify"]->parsed()) return run_qwalk_verify(path, common);
    if (cmds["fastforward"]->parsed()) return run_fastforward(path, common, t, eps);
    for (const std::string name : {"search-ff", "search-simple", "search-tstep"})
      if (cmds[name]->parsed()) return run_search(name, path, common, sf);
  } catch (const IntegrityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
