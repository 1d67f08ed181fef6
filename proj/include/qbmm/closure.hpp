#pragma once

#include <Eigen/Core>
#include <vector>

#include "qbmm/inversion.hpp"
#include "qbmm/polynomial.hpp"

namespace qbmm {

// Last-row entries a_0 .. a_top of the coefficient matrix, a_j = d(closed
// moment)/dM_j, with the implicit a_{top+1} = -1. top = 2N-1 for QMOM and 2N
// for EQMOM.
struct ClosureCoefficients {
  std::vector<double> a;

  int top() const { return static_cast<int>(a.size()) - 1; }
  // u^{top+1} - sum_j a_j u^j.
  Polynomial characteristic() const;
};

// Convex combination of the abscissas with weights w_i prod_{j!=i}(u_j-u_i)^2.
// Returns the common abscissa when all nodes coincide, and NaN when every
// node coincides with another but not all are equal (outside the state
// space; check EqmomState::membership first).
double u_tilde(const NodeSet& ns);

// (u-u_1)^2 ... (u-u_N)^2 (u - u_tilde). Independent of sigma2.
Polynomial g_polynomial(const EqmomState& w);

// Characteristic polynomial of the EQMOM coefficient matrix, obtained as the
// inverse Gaussian smoothing of g: c = smooth(g, -sigma2).
Polynomial char_poly_eqmom(const EqmomState& w);

// a_j = -[u^j] c(u; W), j = 0..2N.
ClosureCoefficients closure_coeffs_eqmom(const EqmomState& w);

// sum_i w_i D_{2N+1}(u_i, sigma2).
double closed_moment_eqmom(const EqmomState& w);

// -sum_{j=0}^{top+1} a_j D_j(u, sigma2) as a polynomial in u (a_{top+1} = -1).
// For EQMOM coefficients this reproduces g_polynomial.
Polynomial smoothed_characteristic(const ClosureCoefficients& a, double sigma2);

// (lambda-u_1)^2 ... (lambda-u_N)^2.
Polynomial char_poly_qmom(const NodeSet& ns);

// a_j = -[lambda^j] char_poly_qmom, j = 0..2N-1.
ClosureCoefficients closure_coeffs_qmom(const NodeSet& ns);

// sum_i w_i u_i^{2N}.
double closed_moment_qmom(const NodeSet& ns);

// Shift matrix with ones on the superdiagonal and `a` as its last row.
Eigen::MatrixXd companion_matrix(const ClosureCoefficients& a);

}  // namespace qbmm
