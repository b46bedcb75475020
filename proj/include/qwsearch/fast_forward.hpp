#pragma once

// Chebyshev truncation of x^t and its LCU block-encoding from walk operators.

#include "qwsearch/walks.hpp"

#include <vector>

namespace qws {

/// 2^{-t} binom(t, j), computed in log space.
double binomial_weight(long t, long j);

/// T_k(x) for |x| <= 1.
double chebyshev_T(long k, double x);

/// p_{t,d}(x) = sum over j with |2j - t| <= d of 2^{-t} binom(t,j) T_{|2j-t|}(x).
///
/// Terms are grouped by sector m: degree k_m = 2m + (t mod 2), weight
/// c_m = 2^{-t} binom(t, (t+k_m)/2), doubled when k_m > 0.
struct ChebyshevExpansion {
  long t = 0;
  long d = 0;
  std::vector<long> degrees;
  std::vector<double> weights;
  double alpha = 0.0;

  long sectors() const { return static_cast<long>(weights.size()); }
  /// Weight of a single signed offset n (|n| <= d, n = t mod 2): 2^{-t} binom(t, (t+n)/2).
  double offset_weight(long n) const;
};

/// Smallest d >= ceil(sqrt(2 t ln(2/eps))) with the parity of t, capped at t.
long truncation_degree(long t, double eps);

ChebyshevExpansion chebyshev_expansion(long t, long d);

/// sum_m c_m T_{k_m}(x); throws DomainError for |x| > 1.
double eval_poly_scalar(const ChebyshevExpansion& e, double x);

/// p_{t,d}(D) through the eigendecomposition.
Matrix eval_poly_matrix(const ChebyshevExpansion& e, const DiscriminantMatrix& d);

/// G = Z W^dagger Z W with Z = (I - 2|flag><flag|) (x) I; block T_2(D).
WalkOperator reflection_product(const WalkOperator& w);

/// G^n; block T_{2n}(D). Throws if w's block is not symmetric.
WalkOperator walk_power_reflections(const WalkOperator& w, long n);

/// sum_n |n><n| (x) G^n over an ell-qubit control register, built as
/// prod_k (C_k W^dagger C_k W)^{2^k}. Ancilla = control (x) w's ancilla.
WalkOperator controlled_walk_ladder(const WalkOperator& w, int ell);

/// Number of control qubits: smallest ell >= 1 with 2^ell > sectors - 1.
int ladder_qubits(const ChebyshevExpansion& e);

/// State preparation R on 2^ell levels: first column sqrt(c_m / alpha),
/// completed by a Householder reflection.
BlockUnitary<double> prep_unitary(const ChebyshevExpansion& e);

struct FastForward {
  WalkOperator op;
  ChebyshevExpansion expansion;
  int ell = 0;
};

/// U = (R^dagger (x) I) U_ell (R (x) I), followed by one plain walk step in the
/// odd sector for odd t. Flag = |0>_control (x) w's flag; block = p_{t,d}(D) / alpha.
FastForward fast_forward_unitary(const WalkOperator& w, long t, double eps);

/// Sector states G^m |flag>|psi> (even) or W G^m |flag>|psi> (odd), m < count.
std::vector<Vector> sector_states(const WalkOperator& w, const Vector& psi, long count, bool odd);

}  // namespace qws
