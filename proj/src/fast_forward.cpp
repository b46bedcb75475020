#include "qwsearch/fast_forward.hpp"

#include <cmath>
#include <sstream>

namespace qws {

namespace {

// Z = (I - 2|flag><flag|) (x) I
void reflect_flag(const WalkOperator& w, Vector& v, Index offset) {
  v.segment(offset + w.flag() * w.system_dim(), w.system_dim()) *= -1.0;
}

// Apply w (or its adjoint) independently to each of `copies` consecutive blocks of v.
void apply_each(const WalkOperator& w, Vector& v, Index copies, bool adjoint) {
  const Index size = w.dim();
  for (Index j = 0; j < copies; ++j) {
    Vector part = v.segment(j * size, size);
    v.segment(j * size, size) = adjoint ? w.apply_adjoint(part) : w.apply(part);
  }
}

// Multiply the control register (most significant, `levels` values) by r.
void apply_control(const Matrix& r, Vector& v, Index levels) {
  const Index inner = v.size() / levels;
  Eigen::Map<Matrix> view(v.data(), inner, levels);  // column j = control level j
  view = (view * r.transpose()).eval();
}

}  // namespace

double binomial_weight(long t, long j) {
  if (t < 0 || j < 0 || j > t) return 0.0;
  const double lt = static_cast<double>(t);
  const double lj = static_cast<double>(j);
  return std::exp(std::lgamma(lt + 1.0) - std::lgamma(lj + 1.0) - std::lgamma(lt - lj + 1.0) - lt * std::log(2.0));
}

double chebyshev_T(long k, double x) {
  if (std::abs(x) > 1.0 + 1e-12) throw DomainError("chebyshev_T: |x| > 1");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (long i = 1; i < k; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double ChebyshevExpansion::offset_weight(long n) const {
  if (std::abs(n) > d || ((n - t) % 2) != 0) return 0.0;
  return binomial_weight(t, (t + n) / 2);
}

long truncation_degree(long t, double eps) {
  if (t < 1) throw ValidationError("truncation_degree: t must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("truncation_degree: eps must lie in (0,1)");
  long d = static_cast<long>(std::ceil(std::sqrt(2.0 * static_cast<double>(t) * std::log(2.0 / eps))));
  if ((d - t) % 2 != 0) ++d;
  return std::min(d, t);
}

ChebyshevExpansion chebyshev_expansion(long t, long d) {
  if (t < 1) throw ValidationError("chebyshev_expansion: t must be >= 1");
  if (d < 0) throw ValidationError("chebyshev_expansion: negative degree");
  d = std::min(d, t);
  if ((d - t) % 2 != 0) ++d;
  ChebyshevExpansion e;
  e.t = t;
  e.d = d;
  for (long k = t % 2; k <= d; k += 2) {
    const double c = binomial_weight(t, (t + k) / 2) * (k > 0 ? 2.0 : 1.0);
    e.degrees.push_back(k);
    e.weights.push_back(c);
    e.alpha += c;
  }
  return e;
}

double eval_poly_scalar(const ChebyshevExpansion& e, double x) {
  if (std::abs(x) > 1.0) {
    std::ostringstream msg;
    msg << "eval_poly_scalar: x = " << x << " outside [-1,1]";
    throw DomainError(msg.str());
  }
  double prev = 1.0;  // T_0
  double cur = x;     // T_1
  long k = 1;
  double total = 0.0;
  for (std::size_t m = 0; m < e.weights.size(); ++m) {
    const long target = e.degrees[m];
    if (target == 0) {
      total += e.weights[m];
      continue;
    }
    while (k < target) {
      const double next = 2.0 * x * cur - prev;
      prev = cur;
      cur = next;
      ++k;
    }
    total += e.weights[m] * cur;
  }
  return total;
}

Matrix eval_poly_matrix(const ChebyshevExpansion& e, const DiscriminantMatrix& d) {
  return d.function([&e](double x) { return eval_poly_scalar(e, std::clamp(x, -1.0, 1.0)); });
}

WalkOperator reflection_product(const WalkOperator& w) {
  auto inner = std::make_shared<WalkOperator>(w);
  auto forward = [inner](const Vector& in) {
    Vector v = inner->apply(in);
    reflect_flag(*inner, v, 0);
    v = inner->apply_adjoint(v);
    reflect_flag(*inner, v, 0);
    return v;
  };
  auto backward = [inner](const Vector& in) {
    Vector v = in;
    reflect_flag(*inner, v, 0);
    v = inner->apply(v);
    reflect_flag(*inner, v, 0);
    return inner->apply_adjoint(v);
  };
  return WalkOperator(w.ancilla_dim(), w.system_dim(), w.flag(), forward, backward, w.cost() * 2);
}

WalkOperator walk_power_reflections(const WalkOperator& w, long n) {
  if (n < 0) throw ValidationError("walk_power_reflections: n must be >= 0");
  const Matrix b = w.block();
  const double asym = (b - b.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) throw ValidationError("walk_power_reflections: block is not Hermitian");
  auto g = std::make_shared<WalkOperator>(reflection_product(w));
  auto forward = [g, n](const Vector& in) {
    Vector v = in;
    for (long i = 0; i < n; ++i) v = g->apply(v);
    return v;
  };
  auto backward = [g, n](const Vector& in) {
    Vector v = in;
    for (long i = 0; i < n; ++i) v = g->apply_adjoint(v);
    return v;
  };
  return WalkOperator(w.ancilla_dim(), w.system_dim(), w.flag(), forward, backward, g->cost() * n);
}

WalkOperator controlled_walk_ladder(const WalkOperator& w, int ell) {
  if (ell < 1) throw ValidationError("controlled_walk_ladder: ell must be >= 1");
  if (ell > 20) throw SizeError("controlled_walk_ladder: too many control qubits");
  const Index levels = Index{1} << ell;
  const Index block = w.dim();
  auto inner = std::make_shared<WalkOperator>(w);

  // C_k: reflect the walk flag in sectors whose control index has bit k set.
  auto controlled_reflect = [=](Vector& v, int k) {
    for (Index j = 0; j < levels; ++j)
      if ((j >> k) & 1) reflect_flag(*inner, v, j * block);
  };
  auto forward = [=](const Vector& in) {
    Vector v = in;
    for (int k = 0; k < ell; ++k) {
      for (long rep = 0; rep < (1L << k); ++rep) {
        apply_each(*inner, v, levels, false);
        controlled_reflect(v, k);
        apply_each(*inner, v, levels, true);
        controlled_reflect(v, k);
      }
    }
    return v;
  };
  auto backward = [=](const Vector& in) {
    Vector v = in;
    for (int k = ell - 1; k >= 0; --k) {
      for (long rep = 0; rep < (1L << k); ++rep) {
        controlled_reflect(v, k);
        apply_each(*inner, v, levels, false);
        controlled_reflect(v, k);
        apply_each(*inner, v, levels, true);
      }
    }
    return v;
  };
  return WalkOperator(levels * w.ancilla_dim(), w.system_dim(), w.flag(), forward, backward,
                      w.cost() * (2 * (levels - 1)));
}

int ladder_qubits(const ChebyshevExpansion& e) {
  int ell = 1;
  while ((1L << ell) <= e.sectors() - 1) ++ell;
  return ell;
}

BlockUnitary<double> prep_unitary(const ChebyshevExpansion& e) {
  const int ell = ladder_qubits(e);
  const Index levels = Index{1} << ell;
  Vector column = Vector::Zero(levels);
  for (long m = 0; m < e.sectors(); ++m) column[m] = std::sqrt(e.weights[m] / e.alpha);
  column.normalize();
  Matrix r = Matrix::Identity(levels, levels);
  const Vector u = Vector::Unit(levels, 0) - column;
  const double uu = u.squaredNorm();
  if (uu > 1e-30) r -= (2.0 / uu) * u * u.transpose();
  return BlockUnitary<double>{std::move(r), levels, 1, 0, OpCost{}};
}

FastForward fast_forward_unitary(const WalkOperator& w, long t, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("fast_forward_unitary: eps must lie in (0,1)");
  if (t < 1) throw ValidationError("fast_forward_unitary: t must be >= 1");
  ChebyshevExpansion e = chebyshev_expansion(t, truncation_degree(t, eps));
  const int ell = ladder_qubits(e);
  const Index levels = Index{1} << ell;
  const bool odd = t % 2 == 1;
  auto r = std::make_shared<const Matrix>(prep_unitary(e).matrix);
  auto ladder = std::make_shared<WalkOperator>(controlled_walk_ladder(w, ell));
  auto inner = std::make_shared<WalkOperator>(w);

  auto forward = [=](const Vector& in) {
    Vector v = in;
    apply_control(*r, v, levels);
    v = ladder->apply(v);
    if (odd) apply_each(*inner, v, levels, false);
    apply_control(r->transpose(), v, levels);
    return v;
  };
  auto backward = [=](const Vector& in) {
    Vector v = in;
    apply_control(*r, v, levels);
    if (odd) apply_each(*inner, v, levels, true);
    v = ladder->apply_adjoint(v);
    apply_control(r->transpose(), v, levels);
    return v;
  };
  OpCost cost = ladder->cost();
  if (odd) cost += w.cost();
  WalkOperator op(levels * w.ancilla_dim(), w.system_dim(), w.flag(), forward, backward, cost);
  return FastForward{std::move(op), std::move(e), ell};
}

std::vector<Vector> sector_states(const WalkOperator& w, const Vector& psi, long count, bool odd) {
  const WalkOperator g = reflection_product(w);
  std::vector<Vector> out;
  Vector v = w.embed(psi);
  for (long m = 0; m < count; ++m) {
    out.push_back(odd ? w.apply(v) : v);
    if (m + 1 < count) v = g.apply(v);
  }
  return out;
}

}  // namespace qws
