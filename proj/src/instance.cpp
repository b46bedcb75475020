#include "qwsearch/instance.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qws {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& pointer, const std::string& what) {
  throw InstanceError(source + ": " + (pointer.empty() ? "/" : pointer) + ": " + what);
}

std::pair<long, long> line_col(const std::string& text, std::size_t byte) {
  long line = 1;
  long col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

double number_at(const json& j, const std::string& source, const std::string& pointer) {
  if (!j.is_number()) fail(source, pointer, "expected a number, got " + j.dump());
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(source, pointer, "number is not finite");
  return x;
}

std::string string_at(const json& j, const std::string& source, const std::string& pointer) {
  if (!j.is_string()) fail(source, pointer, "expected a string, got " + j.dump());
  return j.get<std::string>();
}

}  // namespace

Index InstanceFile::index_of(const std::string& vertex) const {
  const auto it = std::find(vertices.begin(), vertices.end(), vertex);
  if (it == vertices.end()) throw InstanceError("unknown vertex \"" + vertex + "\"");
  return static_cast<Index>(it - vertices.begin());
}

WeightedGraph InstanceFile::graph() const {
  Matrix w = Matrix::Zero(size(), size());
  for (const Edge& e : edges) {
    w(e.u, e.v) += e.weight;
    if (e.u != e.v) w(e.v, e.u) += e.weight;
  }
  return WeightedGraph(std::move(w));
}

VertexSet InstanceFile::marked_set() const { return VertexSet(marked); }

Distribution InstanceFile::distribution() const {
  Vector p = Vector::Zero(size());
  for (const auto& [u, mass] : sigma) p[u] = mass;
  return Distribution(p / p.sum());
}

bool InstanceFile::operator==(const InstanceFile& other) const {
  auto same_edges = [](const std::vector<Edge>& a, const std::vector<Edge>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const Edge& x, const Edge& y) {
             return x.u == y.u && x.v == y.v && x.weight == y.weight;
           });
  };
  return name == other.name && vertices == other.vertices && same_edges(edges, other.edges) &&
         marked == other.marked && sigma == other.sigma && C == other.C;
}

InstanceFile parse_instance(const std::string& text, const LoadOptions& options, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    throw InstanceError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                        e.what() + ")");
  }
  if (!doc.is_object()) fail(source, "", "top level must be an object");

  InstanceFile out;
  static const std::set<std::string> known = {"version", "name", "vertices", "edges", "marked", "sigma", "C"};
  for (const auto& [key, value] : doc.items()) {
    if (known.count(key)) continue;
    if (!options.lenient) fail(source, "/" + key, "unknown field");
    out.warnings.push_back(source + ": /" + key + ": unknown field ignored");
  }

  if (!doc.contains("version")) fail(source, "/version", "missing");
  if (!doc["version"].is_number_integer() || doc["version"].get<long>() != 1)
    fail(source, "/version", "unsupported version " + doc["version"].dump());
  if (doc.contains("name")) out.name = string_at(doc["name"], source, "/name");

  if (!doc.contains("vertices") || !doc["vertices"].is_array()) fail(source, "/vertices", "expected an array");
  std::map<std::string, Index> index;
  for (std::size_t i = 0; i < doc["vertices"].size(); ++i) {
    const std::string ptr = "/vertices/" + std::to_string(i);
    std::string name = string_at(doc["vertices"][i], source, ptr);
    if (!index.emplace(name, static_cast<Index>(i)).second) fail(source, ptr, "duplicate vertex \"" + name + "\"");
    out.vertices.push_back(std::move(name));
  }
  if (out.vertices.empty()) fail(source, "/vertices", "no vertices");
  auto lookup = [&](const json& j, const std::string& ptr) {
    const std::string name = string_at(j, source, ptr);
    const auto it = index.find(name);
    if (it == index.end()) fail(source, ptr, "unknown vertex \"" + name + "\"");
    return it->second;
  };

  if (!doc.contains("edges") || !doc["edges"].is_array()) fail(source, "/edges", "expected an array");
  std::map<std::pair<Index, Index>, std::pair<double, std::size_t>> seen;
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const std::string ptr = "/edges/" + std::to_string(i);
    const json& e = doc["edges"][i];
    if (!e.is_array() || e.size() != 3) fail(source, ptr, "expected [u, v, weight]");
    const Index u = lookup(e[0], ptr + "/0");
    const Index v = lookup(e[1], ptr + "/1");
    const double w = number_at(e[2], source, ptr + "/2");
    const std::string label = "(" + out.vertices[u] + ", " + out.vertices[v] + ")";
    if (w < 0.0) fail(source, ptr + "/2", "negative weight " + e[2].dump() + " on edge " + label);
    const auto key = std::minmax(u, v);
    const auto [it, fresh] = seen.emplace(key, std::make_pair(w, i));
    if (!fresh) {
      if (it->second.first != w)
        fail(source, ptr, "asymmetric edge " + label + ": weight " + e[2].dump() + " conflicts with /edges/" +
                              std::to_string(it->second.second));
      fail(source, ptr, "duplicate edge " + label);
    }
    out.edges.push_back(Edge{u, v, w});
  }

  if (!doc.contains("marked") || !doc["marked"].is_array()) fail(source, "/marked", "expected an array");
  for (std::size_t i = 0; i < doc["marked"].size(); ++i)
    out.marked.push_back(lookup(doc["marked"][i], "/marked/" + std::to_string(i)));
  std::sort(out.marked.begin(), out.marked.end());
  if (std::adjacent_find(out.marked.begin(), out.marked.end()) != out.marked.end())
    fail(source, "/marked", "duplicate marked vertex");

  if (!doc.contains("sigma") || !doc["sigma"].is_object()) fail(source, "/sigma", "expected an object");
  double total = 0.0;
  for (const auto& [name, value] : doc["sigma"].items()) {
    const std::string ptr = "/sigma/" + name;
    const auto it = index.find(name);
    if (it == index.end()) fail(source, ptr, "unknown vertex \"" + name + "\"");
    const double p = number_at(value, source, ptr);
    if (p < 0.0) fail(source, ptr, "negative probability");
    if (options.require_sigma_off_marked && p > 0.0 &&
        std::binary_search(out.marked.begin(), out.marked.end(), it->second))
      fail(source, ptr, "sigma puts mass on marked vertex \"" + name + "\"");
    out.sigma.emplace_back(it->second, p);
    total += p;
  }
  std::sort(out.sigma.begin(), out.sigma.end());
  if (std::abs(total - 1.0) > 1e-9) fail(source, "/sigma", "probabilities sum to " + std::to_string(total));

  if (doc.contains("C")) {
    const double c = number_at(doc["C"], source, "/C");
    if (!(c > 0.0)) fail(source, "/C", "budget must be positive");
    out.C = c;
  }

  try {
    out.graph();
  } catch (const ValidationError& e) {
    fail(source, "/edges", e.what());
  }
  return out;
}

InstanceFile load_instance(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InstanceError(path + ": cannot open");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_instance(text.str(), options, path);
}

std::string dump_instance(const InstanceFile& inst) {
  json doc = json::object();
  doc["version"] = 1;
  if (!inst.name.empty()) doc["name"] = inst.name;
  doc["vertices"] = inst.vertices;
  json edges = json::array();
  for (const Edge& e : inst.edges) edges.push_back({inst.vertices[e.u], inst.vertices[e.v], e.weight});
  doc["edges"] = edges;
  json marked = json::array();
  for (Index u : inst.marked) marked.push_back(inst.vertices[u]);
  doc["marked"] = marked;
  json sigma = json::object();
  for (const auto& [u, p] : inst.sigma) sigma[inst.vertices[u]] = p;
  doc["sigma"] = sigma;
  if (inst.C) doc["C"] = *inst.C;
  return doc.dump(2) + "\n";
}

void save_instance(const InstanceFile& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError(path + ": cannot write");
  out << dump_instance(inst);
}

InstanceFile make_instance(std::string name, const WeightedGraph& g, const VertexSet& marked,
                           const Distribution& sigma, std::optional<double> C, std::vector<std::string> names) {
  InstanceFile out;
  out.name = std::move(name);
  const Index n = g.size();
  if (names.empty()) {
    for (Index u = 0; u < n; ++u) names.push_back(std::to_string(u));
  }
  if (static_cast<Index>(names.size()) != n) throw ValidationError("make_instance: wrong number of names");
  out.vertices = std::move(names);
  for (Index u = 0; u < n; ++u)
    for (Index v = u; v < n; ++v)
      if (g.weight(u, v) > 0.0) out.edges.push_back(Edge{u, v, g.weight(u, v)});
  out.marked = marked.items();
  for (Index u = 0; u < n; ++u)
    if (sigma[u] > 0.0) out.sigma.emplace_back(u, sigma[u]);
  out.C = C;
  return out;
}

namespace {

WeightedGraph unit_graph(Index n, const std::vector<std::pair<Index, Index>>& edges) {
  Matrix w = Matrix::Zero(n, n);
  for (const auto& [u, v] : edges) {
    w(u, v) = 1.0;
    w(v, u) = 1.0;
  }
  return WeightedGraph(std::move(w));
}

InstanceFile stationary_start(std::string name, const WeightedGraph& g, const VertexSet& start,
                              const VertexSet& marked) {
  return make_instance(std::move(name), g, marked, Distribution::restricted(g.stationary(), start));
}

}  // namespace

InstanceFile path3_instance() {
  const WeightedGraph g = unit_graph(3, {{0, 1}, {1, 2}});
  return make_instance("path3", g, VertexSet{2}, Distribution::restricted(g.stationary(), VertexSet{0, 1}),
                       std::nullopt, {"u", "v", "w"});
}

std::vector<InstanceFile> suite_instances() {
  std::vector<InstanceFile> out;
  out.push_back(stationary_start("path6", unit_graph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}), VertexSet{0},
                                 VertexSet{5}));

  Matrix c5 = Matrix::Identity(5, 5);
  for (Index u = 0; u < 5; ++u) {
    c5(u, (u + 1) % 5) = 1.0;
    c5((u + 1) % 5, u) = 1.0;
  }
  out.push_back(stationary_start("cycle5-loops", WeightedGraph(c5), VertexSet{0}, VertexSet{2}));

  Matrix k5 = Matrix::Ones(5, 5) - Matrix::Identity(5, 5);
  out.push_back(stationary_start("complete5", WeightedGraph(k5), VertexSet{0, 1}, VertexSet{4}));

  Matrix cliques = Matrix::Zero(8, 8);
  cliques.topLeftCorner(4, 4) = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
  cliques.bottomRightCorner(4, 4) = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
  cliques(3, 4) = cliques(4, 3) = 1.0;
  out.push_back(stationary_start("two-cliques", WeightedGraph(cliques), VertexSet{0}, VertexSet{7}));

  std::vector<std::pair<Index, Index>> grid;
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 4; ++c) {
      if (c < 3) grid.emplace_back(4 * r + c, 4 * r + c + 1);
      if (r < 3) grid.emplace_back(4 * r + c, 4 * r + c + 4);
    }
  out.push_back(stationary_start("grid4x4", unit_graph(16, grid), VertexSet{0}, VertexSet{15}));
  return out;
}

InstanceFile complete_with_loops(Index n) {
  if (n < 2) throw ValidationError("complete_with_loops: n must be >= 2");
  const WeightedGraph g(Matrix::Ones(n, n));
  return make_instance("complete" + std::to_string(n) + "-loops", g, VertexSet{n - 1},
                       Distribution::restricted(Vector::Ones(n), VertexSet{n - 1}.complement(n)));
}

}  // namespace qws
