#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "qbmm/inversion.hpp"

namespace qbmm {

struct Defect {
  double eigenvalue = 0.0;
  int algebraic = 0;
  int geometric = 0;
};

struct SpectralReport {
  std::vector<double> eigenvalues;  // real eigenvalues with multiplicity, ascending
  std::vector<std::complex<double>> complex_eigenvalues;  // one per conjugate pair
  double min_gap = 0.0;             // smallest distance between consecutive eigenvalues
  double gap_tol = 0.0;
  bool all_real = false;
  bool strictly_hyperbolic = false;
  // Every repeated eigenvalue with its multiplicities.
  std::vector<Defect> defects;
};

// Default strict-hyperbolicity gap tolerance 1e-9 * (1 + spectral radius).
double default_gap_tol(double spectral_radius);

// Dimension of the null space of A - lambda I: the number of singular values
// at or below tol * (largest singular value).
int geometric_multiplicity(const Eigen::MatrixXd& a, double lambda, double tol = 1e-8);

// Eigenstructure of the EQMOM coefficient matrix. Requires sigma2 > 0
// (DomainError otherwise); root-finder failures propagate as RootFindingError.
SpectralReport analyze_eqmom(const EqmomState& w);

// Eigenstructure of the QMOM coefficient matrix. Requires distinct abscissas.
SpectralReport analyze_qmom(const NodeSet& ns);

}  // namespace qbmm
