#include "qwsearch/core.hpp"

#include <algorithm>
#include <sstream>

namespace qws {

VertexSet::VertexSet(std::initializer_list<Index> vertices) : VertexSet(std::vector<Index>(vertices)) {}

VertexSet::VertexSet(std::vector<Index> vertices) : items_(std::move(vertices)) {
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

VertexSet VertexSet::range(Index first, Index last) {
  std::vector<Index> v;
  for (Index i = first; i < last; ++i) v.push_back(i);
  return VertexSet(std::move(v));
}

VertexSet VertexSet::from_mask(const std::vector<char>& mask) {
  std::vector<Index> v;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) v.push_back(static_cast<Index>(i));
  return VertexSet(std::move(v));
}

bool VertexSet::contains(Index v) const { return std::binary_search(items_.begin(), items_.end(), v); }

std::vector<char> VertexSet::mask(Index n) const {
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  for (Index v : items_)
    if (v >= 0 && v < n) m[static_cast<std::size_t>(v)] = 1;
  return m;
}

VertexSet VertexSet::complement(Index n) const {
  std::vector<Index> v;
  for (Index i = 0; i < n; ++i)
    if (!contains(i)) v.push_back(i);
  return VertexSet(std::move(v));
}

bool VertexSet::intersects(const VertexSet& other) const {
  auto a = items_.begin();
  auto b = other.items_.begin();
  while (a != items_.end() && b != other.items_.end()) {
    if (*a == *b) return true;
    if (*a < *b)
      ++a;
    else
      ++b;
  }
  return false;
}

void VertexSet::check_range(Index n, const char* what) const {
  for (Index v : items_) {
    if (v < 0 || v >= n) {
      std::ostringstream msg;
      msg << what << ": vertex " << v << " out of range [0, " << n << ")";
      throw ValidationError(msg.str());
    }
  }
}

Distribution::Distribution(Vector probabilities, double tolerance) : probabilities_(std::move(probabilities)) {
  if (probabilities_.size() == 0) throw ValidationError("distribution: empty vector");
  for (Index u = 0; u < probabilities_.size(); ++u) {
    if (!(probabilities_[u] >= 0.0)) {
      std::ostringstream msg;
      msg << "distribution: entry " << u << " is " << probabilities_[u] << " (must be >= 0)";
      throw ValidationError(msg.str());
    }
  }
  const double total = probabilities_.sum();
  if (std::abs(total - 1.0) > tolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "distribution: entries sum to " << total << ", expected 1";
    throw ValidationError(msg.str());
  }
}

Distribution Distribution::point_mass(Index n, Index vertex) {
  if (vertex < 0 || vertex >= n) throw ValidationError("point_mass: vertex out of range");
  Vector p = Vector::Zero(n);
  p[vertex] = 1.0;
  return Distribution(std::move(p));
}

Distribution Distribution::uniform(Index n) { return Distribution(Vector::Constant(n, 1.0 / static_cast<double>(n))); }

Distribution Distribution::restricted(const Vector& weights, const VertexSet& subset) {
  subset.check_range(weights.size(), "restricted");
  Vector p = Vector::Zero(weights.size());
  double total = 0.0;
  for (Index u : subset) {
    p[u] = weights[u];
    total += weights[u];
  }
  if (!(total > 0.0)) throw ValidationError("restricted: subset carries no mass");
  return Distribution(p / total);
}

VertexSet Distribution::support() const {
  std::vector<Index> v;
  for (Index u = 0; u < size(); ++u)
    if (probabilities_[u] > 0.0) v.push_back(u);
  return VertexSet(std::move(v));
}

double Distribution::mass(const VertexSet& subset) const {
  double total = 0.0;
  for (Index u : subset)
    if (u >= 0 && u < size()) total += probabilities_[u];
  return total;
}

}  // namespace qws
