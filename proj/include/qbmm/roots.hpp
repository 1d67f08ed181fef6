#pragma once

#include <complex>
#include <vector>

#include "qbmm/polynomial.hpp"

namespace qbmm {

struct RealRoot {
  double value = 0.0;
  int multiplicity = 1;
};

struct RootSet {
  std::vector<RealRoot> real;                 // ascending
  std::vector<std::complex<double>> complex;  // genuinely non-real roots, one per conjugate
  // Total count of real roots with multiplicity.
  int real_count() const;
  // Flattened real roots, each repeated by multiplicity.
  std::vector<double> expanded() const;
};

// Default clustering tolerance 1e-7 * (1 + max |root|).
double default_cluster_tol(double max_abs_root);

// Roots of p via the eigenvalues of the balanced companion matrix (Hessenberg
// QR). Eigenvalues closer than `cluster_tol` are merged into one root of the
// cluster's multiplicity m, which is then polished by Newton steps on
// p^{(m-1)}. A non-positive `cluster_tol` selects default_cluster_tol and
// additionally merges clusters within 1e-3 (1 + max |root|) whose merged
// centre passes a rounding-level test on p, ..., p^{(m-1)}.
// Throws DomainError for the zero polynomial and RootFindingError (carrying
// |p(r)| per root) when the QR iteration fails.
RootSet polynomial_roots(const Polynomial& p, double cluster_tol = 0.0);

// Real roots only, ascending with multiplicities. Constants have none.
std::vector<RealRoot> real_roots(const Polynomial& p, double cluster_tol = 0.0);

// Power sums p_k = sum_i lambda_i^k over the roots of a monic polynomial, from
// its coefficients by Newton's identities. Throws DomainError if p is not
// monic (|lead - 1| > 1e-12) or has degree < 1.
std::vector<double> newton_power_sums(const Polynomial& p, int k_max);

}  // namespace qbmm
