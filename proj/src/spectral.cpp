#include "qbmm/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "qbmm/closure.hpp"
#include "qbmm/errors.hpp"
#include "qbmm/roots.hpp"

namespace qbmm {

namespace {

SpectralReport report_from(const Polynomial& c, const Eigen::MatrixXd& a) {
  const RootSet roots = polynomial_roots(c);
  SpectralReport rep;
  rep.eigenvalues = roots.expanded();
  rep.complex_eigenvalues = roots.complex;
  rep.all_real = roots.complex.empty() && roots.real_count() == c.degree();

  double radius = 0.0;
  for (double v : rep.eigenvalues) radius = std::max(radius, std::abs(v));
  for (const auto& z : rep.complex_eigenvalues) radius = std::max(radius, std::abs(z));
  rep.gap_tol = default_gap_tol(radius);

  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i)
    rep.min_gap = std::min(rep.min_gap, rep.eigenvalues[i] - rep.eigenvalues[i - 1]);

  for (const RealRoot& r : roots.real) {
    if (r.multiplicity > 1)
      rep.defects.push_back({r.value, r.multiplicity, geometric_multiplicity(a, r.value)});
  }
  rep.strictly_hyperbolic = rep.all_real && rep.min_gap > rep.gap_tol;
  return rep;
}

}  // namespace

double default_gap_tol(double spectral_radius) { return 1e-9 * (1.0 + spectral_radius); }

int geometric_multiplicity(const Eigen::MatrixXd& a, double lambda, double tol) {
  const Eigen::MatrixXd shifted = a - lambda * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(shifted).singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = tol * sv(0);
  if (sv(0) == 0.0) return static_cast<int>(sv.size());
  int nullity = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= cutoff) ++nullity;
  return nullity;
}

SpectralReport analyze_eqmom(const EqmomState& w) {
  if (!(w.sigma2 > 0.0)) throw DomainError("analyze_eqmom: sigma2 must be positive");
  return report_from(char_poly_eqmom(w), companion_matrix(closure_coeffs_eqmom(w)));
}

SpectralReport analyze_qmom(const NodeSet& ns) {
  if (ns.size() == 0) throw DomainError("analyze_qmom: empty node set");
  if (ns.size() > 1 && !(ns.min_gap() > 0.0)) throw DomainError("analyze_qmom: abscissas must be distinct");
  return report_from(char_poly_qmom(ns), companion_matrix(closure_coeffs_qmom(ns)));
}

}  // namespace qbmm
