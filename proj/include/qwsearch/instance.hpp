#pragma once

// Instance files (JSON, "version": 1) and the built-in instance set.
//
//   {"version": 1, "name": "...", "vertices": ["u", "v"], "edges": [["u", "v", 1.0]],
//    "marked": ["v"], "sigma": {"u": 1.0}, "C": 4.0}
//
// "name" and "C" are optional. An empty "marked" list loads in detect mode.

#include "qwsearch/graph.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qws {

/// Malformed instance file; what() carries "source:line:col" or a JSON pointer.
class InstanceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Edge {
  Index u = 0;
  Index v = 0;
  double weight = 0.0;
};

struct InstanceFile {
  std::string name;
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<Index> marked;
  std::vector<std::pair<Index, double>> sigma;  // sorted by vertex
  std::optional<double> C;
  std::vector<std::string> warnings;  // lenient mode only

  Index size() const { return static_cast<Index>(vertices.size()); }
  bool detect_mode() const { return marked.empty(); }
  Index index_of(const std::string& vertex) const;

  WeightedGraph graph() const;
  VertexSet marked_set() const;
  Distribution distribution() const;

  bool operator==(const InstanceFile& other) const;
};

struct LoadOptions {
  bool lenient = false;                  // unknown fields become warnings
  bool require_sigma_off_marked = true;  // sigma must vanish on M
};

InstanceFile parse_instance(const std::string& text, const LoadOptions& options = {},
                            const std::string& source = "<input>");
InstanceFile load_instance(const std::string& path, const LoadOptions& options = {});

std::string dump_instance(const InstanceFile& inst);
void save_instance(const InstanceFile& inst, const std::string& path);

/// Instance over vertices named "0", "1", ... (or `names`), one edge per
/// positive weight with u <= v.
InstanceFile make_instance(std::string name, const WeightedGraph& g, const VertexSet& marked,
                           const Distribution& sigma, std::optional<double> C = std::nullopt,
                           std::vector<std::string> names = {});

/// Path u - v - w with unit weights, S = {u, v}, M = {w}, sigma = pi|_S.
InstanceFile path3_instance();

/// Path P6, cycle C5 with self-loops, K5, two K4 joined by an edge, 4x4 grid.
/// Each has sigma = pi restricted to a start set far from M.
std::vector<InstanceFile> suite_instances();

/// K_n with a unit self-loop at every vertex; M = {n-1}, sigma uniform off M.
InstanceFile complete_with_loops(Index n);

}  // namespace qws
