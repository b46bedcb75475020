#pragma once

// Independent reference computations for the tests. None of these call into
// the library's solvers: flows are minimized by projected gradient, hitting
// quantities come from propagating killed mass, and matrix functions from
// repeated multiplication.

#include "qwsearch/boxes.hpp"
#include "qwsearch/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using qws::Index;
using qws::Matrix;
using qws::Vector;

inline std::vector<char> mask(Index n, const std::vector<Index>& items) {
  std::vector<char> m(static_cast<std::size_t>(n), 0);
  for (Index v : items) m[static_cast<std::size_t>(v)] = 1;
  return m;
}

inline Matrix transition(const Matrix& w) {
  Matrix p = w;
  for (Index u = 0; u < w.rows(); ++u) p.row(u) /= w.row(u).sum();
  return p;
}

inline Vector stationary(const Matrix& w) {
  Vector d = w.rowwise().sum();
  return d / d.sum();
}

// Minimum of sum_e p_e^2 / w_e over unit flows sigma -> M, by gradient steps
// projected onto the affine space of feasible flows.
inline double min_energy_flow(const Matrix& w, const Vector& sigma, const std::vector<Index>& marked,
                              int iterations = 4000) {
  const Index n = w.rows();
  const auto in_m = mask(n, marked);
  std::vector<std::pair<Index, Index>> edges;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (w(u, v) > 0) edges.emplace_back(u, v);
  const Index m = static_cast<Index>(edges.size());
  std::vector<Index> rows;
  for (Index u = 0; u < n; ++u)
    if (!in_m[static_cast<std::size_t>(u)]) rows.push_back(u);
  // net outflow at every vertex off M equals sigma
  Matrix a = Matrix::Zero(static_cast<Index>(rows.size()), m);
  Vector b(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    b[static_cast<Index>(r)] = sigma[rows[r]];
    for (Index e = 0; e < m; ++e) {
      if (edges[static_cast<std::size_t>(e)].first == rows[r]) a(static_cast<Index>(r), e) = 1.0;
      if (edges[static_cast<std::size_t>(e)].second == rows[r]) a(static_cast<Index>(r), e) = -1.0;
    }
  }
  const Matrix pinv = a.completeOrthogonalDecomposition().pseudoInverse();
  const Matrix proj = Matrix::Identity(m, m) - pinv * a;
  Vector inv_w(m);
  for (Index e = 0; e < m; ++e) inv_w[e] = 1.0 / w(edges[static_cast<std::size_t>(e)].first, edges[static_cast<std::size_t>(e)].second);
  Vector p = pinv * b;
  const double step = 0.5 / inv_w.maxCoeff();
  for (int k = 0; k < iterations; ++k) {
    const Vector g = 2.0 * inv_w.cwiseProduct(p);
    const Vector dir = proj * g;
    p -= step * dir;
    if (dir.norm() < 1e-15) break;
  }
  return p.cwiseAbs2().dot(inv_w);
}

// sum_{t>=0} (surviving mass), stepping `step` until the mass is negligible.
template <typename Step>
double expected_lifetime(Vector mass, Step step, long max_steps = 50'000'000) {
  double total = 0.0;
  for (long t = 0; t < max_steps; ++t) {
    const double alive = mass.sum();
    if (alive < 1e-16) return total;
    total += alive;
    mass = step(mass);
  }
  return std::numeric_limits<double>::infinity();
}

// E_sigma(tau_M)
inline double hitting_time(const Matrix& p, const Vector& sigma, const std::vector<Index>& marked) {
  const auto in_m = mask(p.rows(), marked);
  auto kill = [&](Vector v) {
    for (Index x = 0; x < v.size(); ++x)
      if (in_m[static_cast<std::size_t>(x)]) v[x] = 0.0;
    return v;
  };
  return expected_lifetime(kill(sigma), [&](const Vector& v) { return kill(p.transpose() * v); });
}

// E_sigma(tau^M_S): hit M, then return to S. Mass is tracked in two phases.
inline double commute_time(const Matrix& p, const Vector& sigma, const std::vector<Index>& start,
                           const std::vector<Index>& marked) {
  const Index n = p.rows();
  const auto in_m = mask(n, marked);
  const auto in_s = mask(n, start);
  Vector mass = Vector::Zero(2 * n);
  mass.head(n) = sigma;
  auto step = [&](const Vector& v) {
    Vector a = p.transpose() * v.head(n);
    Vector b = p.transpose() * v.tail(n);
    for (Index x = 0; x < n; ++x) {
      if (in_m[static_cast<std::size_t>(x)]) {
        b[x] += a[x];
        a[x] = 0.0;
      }
      if (in_s[static_cast<std::size_t>(x)]) b[x] = 0.0;
    }
    Vector out(2 * n);
    out << a, b;
    return out;
  };
  return expected_lifetime(mass, step);
}

// Pr_{pi|S}(tau_M < tau_S^+)
inline double escape_probability(const Matrix& p, const Vector& pi, const std::vector<Index>& start,
                                 const std::vector<Index>& marked) {
  const Index n = p.rows();
  const auto in_m = mask(n, marked);
  const auto in_s = mask(n, start);
  Vector v = Vector::Zero(n);
  for (Index s : start) v[s] = pi[s];
  v /= v.sum();
  double escaped = 0.0;
  for (long t = 0; t < 50'000'000 && v.sum() > 1e-17; ++t) {
    v = p.transpose() * v;
    for (Index x = 0; x < n; ++x) {
      if (in_m[static_cast<std::size_t>(x)]) {
        escaped += v[x];
        v[x] = 0.0;
      } else if (in_s[static_cast<std::size_t>(x)]) {
        v[x] = 0.0;
      }
    }
  }
  return escaped;
}

// E_{pi|S}(tau_S^+)
inline double return_time(const Matrix& p, const Vector& pi, const std::vector<Index>& start) {
  const Index n = p.rows();
  const auto in_s = mask(n, start);
  Vector v = Vector::Zero(n);
  for (Index s : start) v[s] = pi[s];
  v /= v.sum();
  auto step = [&](const Vector& x) {
    Vector y = p.transpose() * x;
    for (Index u = 0; u < n; ++u)
      if (in_s[static_cast<std::size_t>(u)]) y[u] = 0.0;
    return y;
  };
  return expected_lifetime(v, step);
}

inline Matrix matrix_power(const Matrix& a, long t) {
  Matrix out = Matrix::Identity(a.rows(), a.cols());
  for (long k = 0; k < t; ++k) out = out * a;
  return out;
}

// D_{u,v} = sqrt(P_{u,v} P_{v,u})
inline Matrix discriminant(const Matrix& p) { return p.cwiseProduct(p.transpose()).cwiseSqrt(); }

inline double log_binomial(long t, long j) {
  return std::lgamma(t + 1.0) - std::lgamma(j + 1.0) - std::lgamma(t - j + 1.0);
}

// sum_{j : |2j-t| <= d} 2^{-t} binom(t,j) cos(|2j-t| acos x)
inline double chebyshev_truncation(long t, long d, double x) {
  const double theta = std::acos(std::clamp(x, -1.0, 1.0));
  double s = 0.0;
  for (long j = 0; j <= t; ++j) {
    const long k = std::abs(2 * j - t);
    if (k > d) continue;
    s += std::exp(log_binomial(t, j) - t * std::log(2.0)) * std::cos(static_cast<double>(k) * theta);
  }
  return s;
}

// Same polynomial applied to a symmetric matrix through the three-term recurrence.
inline Matrix chebyshev_truncation(long t, long d, const Matrix& a) {
  const Index n = a.rows();
  Matrix prev = Matrix::Identity(n, n), cur = a, out = Matrix::Zero(n, n);
  for (long k = 0; k <= t; ++k) {
    const Matrix& tk = k == 0 ? prev : cur;
    if (k <= d && (t - k) % 2 == 0) {
      const double c = std::exp(log_binomial(t, (t + k) / 2) - t * std::log(2.0));
      out += (k == 0 ? 1.0 : 2.0) * c * tk;
    }
    if (k >= 1) {
      Matrix next = 2.0 * a * cur - prev;
      prev = cur;
      cur = next;
    }
  }
  return out;
}

// Stretch by building the sequence, then count by scanning it.
inline std::string stretch(const std::string& y, long r_s, long r_m) {
  std::string out;
  for (char c : y) out.append(static_cast<std::size_t>(c == 'S' ? r_s : c == 'M' ? r_m : 1), c);
  return out;
}

inline long count(const std::string& y, char kind, long a, long b) {
  long c = 0;
  for (long i = std::max(0L, a); i <= b && i < static_cast<long>(y.size()); ++i) c += y[static_cast<std::size_t>(i)] == kind;
  return c;
}

inline bool good_witness(const std::string& y, long T, long r_m) {
  const std::string s = stretch(y, T / 2, r_m);
  return 2 * count(s, 'M', 0, 2 * T) >= T && 4 * count(s, 'S', 7 * T, 15 * T) >= T;
}

// Monte Carlo helpers with their own sampling code.
inline Index sample_row(const Matrix& p, Index from, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng), acc = 0.0;
  for (Index v = 0; v < p.cols(); ++v) {
    acc += p(from, v);
    if (x < acc && p(from, v) > 0) return v;
  }
  for (Index v = p.cols() - 1; v >= 0; --v)
    if (p(from, v) > 0) return v;
  return from;
}

inline Index sample_vector(const Vector& w, std::mt19937_64& rng) {
  std::discrete_distribution<Index> d(w.data(), w.data() + w.size());
  return d(rng);
}

struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanEstimate mean_of(const std::vector<double>& xs) {
  double s = 0.0, s2 = 0.0;
  for (double x : xs) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = s / n;
  return {mean, std::sqrt(std::max(0.0, s2 / n - mean * mean) / n)};
}

// chi-square statistic of observed counts against expected probabilities
inline double chi_square(const std::vector<long>& observed, const std::vector<double>& probs, long total) {
  double x = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double e = probs[i] * static_cast<double>(total);
    if (e > 0) x += (observed[i] - e) * (observed[i] - e) / e;
  }
  return x;
}

// Upper 1% point of chi-square with k degrees of freedom (Wilson-Hilferty).
inline double chi_square_crit_1pct(int k) {
  const double z = 2.326347874;
  const double h = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - h + z * std::sqrt(h), 3);
}

}  // namespace oracle
