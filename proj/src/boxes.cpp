#include "qwsearch/boxes.hpp"

#include "qwsearch/core.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qws {

BoxSequence::BoxSequence(std::vector<Box> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("box sequence must be nonempty");
}

BoxSequence BoxSequence::parse(const std::string& text) {
  std::vector<Box> labels;
  for (char ch : text) {
    switch (ch) {
      case 'S':
        labels.push_back(Box::S);
        break;
      case 'M':
        labels.push_back(Box::M);
        break;
      case '.':
        labels.push_back(Box::other);
        break;
      default:
        throw ValidationError(std::string("box sequence: unexpected character '") + ch + "'");
    }
  }
  return BoxSequence(std::move(labels));
}

std::string BoxSequence::str() const {
  std::string out;
  for (Box b : labels_) out.push_back(static_cast<char>(b));
  return out;
}

std::optional<long> BoxSequence::ht() const {
  for (long i = 0; i < size(); ++i)
    if ((*this)[i] == Box::M) return i;
  return std::nullopt;
}

std::optional<long> BoxSequence::ct() const {
  const auto h = ht();
  if (!h) return std::nullopt;
  for (long i = *h + 1; i < size(); ++i)
    if ((*this)[i] == Box::S) return i;
  return std::nullopt;
}

long BoxSequence::count(Box kind, long a, long b) const {
  long total = 0;
  for (long i = std::max(a, 0L); i <= std::min(b, size() - 1); ++i) total += (*this)[i] == kind;
  return total;
}

BoxSequence stretch_deterministic(const BoxSequence& y, long r_S, long r_M) {
  if (r_S < 1 || r_M < 1) throw ValidationError("stretch_deterministic: holding counts must be positive");
  std::vector<Box> out;
  for (Box b : y.labels()) {
    const long copies = b == Box::S ? r_S : b == Box::M ? r_M : 1;
    out.insert(out.end(), static_cast<std::size_t>(copies), b);
  }
  return BoxSequence(std::move(out));
}

BoxSequence stretch_geometric(const BoxSequence& y, double r_S, double r_M, std::uint64_t seed) {
  if (!(r_S >= 1.0) || !(r_M >= 1.0)) throw ValidationError("stretch_geometric: holding times must be >= 1");
  std::mt19937_64 rng(seed);
  // std::geometric_distribution counts failures, so shift by one.
  std::geometric_distribution<long> hold_s(1.0 / r_S);
  std::geometric_distribution<long> hold_m(1.0 / r_M);
  std::vector<Box> out;
  for (Box b : y.labels()) {
    long copies = 1;
    if (b == Box::S) copies = 1 + hold_s(rng);
    if (b == Box::M) copies = 1 + hold_m(rng);
    out.insert(out.end(), static_cast<std::size_t>(copies), b);
  }
  return BoxSequence(std::move(out));
}

long stretched_count(const BoxSequence& y, long r_S, long r_M, Box kind, long a, long b) {
  long pos = 0;
  long total = 0;
  for (Box box : y.labels()) {
    if (pos > b) break;
    const long len = box == Box::S ? r_S : box == Box::M ? r_M : 1;
    if (box == kind) {
      const long lo = std::max(pos, a);
      const long hi = std::min(pos + len - 1, b);
      if (hi >= lo) total += hi - lo + 1;
    }
    pos += len;
  }
  return total;
}

std::vector<long> holding_grid(long T) {
  if (T < 1) throw ValidationError("holding_grid: T must be positive");
  const long top = static_cast<long>(std::ceil(std::log2(14.0 * static_cast<double>(T))));
  std::vector<long> out;
  for (long k = 0; k <= top; ++k) out.push_back(1L << k);
  return out;
}

std::string stretching_hypothesis_violation(const BoxSequence& y, long T) {
  if (T < 2 || T % 2 != 0) return "T must be a positive even integer";
  if (y[0] != Box::S) return "y_0 must be an S-box";
  const auto h = y.ht();
  const auto c = y.ct();
  if (!h || !c) return "ct must exist";
  if (*c > T) return "ct <= T";
  if (y.count(Box::S, 0, *h) != 1) return "S_y[0,ht] = 1";
  return {};
}

bool is_good_rM(const BoxSequence& y, long T, long r_M) {
  const long r_S = T / 2;
  return 2 * stretched_count(y, r_S, r_M, Box::M, 0, 2 * T) >= T &&
         4 * stretched_count(y, r_S, r_M, Box::S, 7 * T, 15 * T) >= T;
}

std::optional<long> find_good_rM(const BoxSequence& y, long T) {
  const std::string violation = stretching_hypothesis_violation(y, T);
  if (!violation.empty()) throw PreconditionError("find_good_rM: hypothesis violated: " + violation);

  const std::vector<long> grid = holding_grid(T);
  // Candidate from the constructive argument: the largest r_M with ct^{(1,r_M)} <= 14T.
  const long ct = *y.ct();
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const long stretched_ct = ct + (*it - 1) * y.count(Box::M, 0, ct);
    if (stretched_ct <= 14 * T) {
      if (is_good_rM(y, T, *it)) return *it;
      break;
    }
  }
  for (long r : grid)
    if (is_good_rM(y, T, r)) return r;
  return std::nullopt;
}

ExhaustiveResult exhaustive_stretching_check(long T, long max_length) {
  if (max_length > 24) throw SizeError("exhaustive_stretching_check: max_length above 24");
  ExhaustiveResult out;
  std::vector<Box> labels;
  // Before ht only '.' and 'M' are allowed; an S after ht must come by index T.
  auto visit = [&](auto&& self, bool hit, bool returned) -> void {
    const long i = static_cast<long>(labels.size());
    if (returned) {
      BoxSequence y(labels);
      ++out.checked;
      if (!find_good_rM(y, T)) {
        if (!out.first_counterexample) out.first_counterexample = y;
        ++out.counterexamples;
      }
    }
    if (i >= max_length) return;
    if (hit && !returned && i > T) return;
    for (Box b : {Box::other, Box::M, Box::S}) {
      if (b == Box::S && !hit) continue;
      labels.push_back(b);
      self(self, hit || b == Box::M, returned || (hit && b == Box::S));
      labels.pop_back();
    }
  };
  labels.push_back(Box::S);
  visit(visit, false, false);
  return out;
}

}  // namespace qws
