#include "qbmm/closure.hpp"

#include <cmath>
#include <limits>

#include "qbmm/gaussian.hpp"

namespace qbmm {

Polynomial ClosureCoefficients::characteristic() const {
  std::vector<double> c(a.size() + 1);
  for (std::size_t j = 0; j < a.size(); ++j) c[j] = -a[j];
  c.back() = 1.0;
  return Polynomial(std::move(c));
}

double u_tilde(const NodeSet& ns) {
  const std::size_t n = ns.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  bool all_equal = true;
  for (std::size_t i = 1; i < n; ++i) all_equal = all_equal && ns[i].abscissa == ns[0].abscissa;
  if (all_equal) return ns[0].abscissa;

  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double prod = ns[i].weight;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = ns[j].abscissa - ns[i].abscissa;
      prod *= d * d;
    }
    num += prod * ns[i].abscissa;
    den += prod;
  }
  if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num / den;
}

Polynomial g_polynomial(const EqmomState& w) {
  std::vector<double> roots;
  for (const Node& nd : w.nodes) {
    roots.push_back(nd.abscissa);
    roots.push_back(nd.abscissa);
  }
  roots.push_back(u_tilde(w.nodes));
  return Polynomial::from_roots(roots);
}

Polynomial char_poly_eqmom(const EqmomState& w) { return smooth(g_polynomial(w), -w.sigma2); }

ClosureCoefficients closure_coeffs_eqmom(const EqmomState& w) {
  const Polynomial c = char_poly_eqmom(w);
  const int top = 2 * static_cast<int>(w.order());
  ClosureCoefficients out;
  out.a.resize(static_cast<std::size_t>(top) + 1);
  for (int j = 0; j <= top; ++j) out.a[j] = -c.coeff(j);
  return out;
}

double closed_moment_eqmom(const EqmomState& w) {
  const int k = 2 * static_cast<int>(w.order()) + 1;
  double m = 0.0;
  for (const Node& nd : w.nodes) m += nd.weight * gaussian_moment(k, nd.abscissa, w.sigma2);
  return m;
}

Polynomial smoothed_characteristic(const ClosureCoefficients& a, double sigma2) {
  Polynomial g = smooth(Polynomial::monomial(a.top() + 1), sigma2);
  for (int j = 0; j <= a.top(); ++j) g -= smooth(Polynomial::monomial(j, a.a[j]), sigma2);
  return g;
}

Polynomial char_poly_qmom(const NodeSet& ns) {
  std::vector<double> roots;
  for (const Node& nd : ns) {
    roots.push_back(nd.abscissa);
    roots.push_back(nd.abscissa);
  }
  return Polynomial::from_roots(roots);
}

ClosureCoefficients closure_coeffs_qmom(const NodeSet& ns) {
  const Polynomial c = char_poly_qmom(ns);
  const int top = 2 * static_cast<int>(ns.size()) - 1;
  ClosureCoefficients out;
  out.a.resize(static_cast<std::size_t>(top) + 1);
  for (int j = 0; j <= top; ++j) out.a[j] = -c.coeff(j);
  return out;
}

double closed_moment_qmom(const NodeSet& ns) {
  const int k = 2 * static_cast<int>(ns.size());
  double m = 0.0;
  for (const Node& nd : ns) m += nd.weight * std::pow(nd.abscissa, k);
  return m;
}

Eigen::MatrixXd companion_matrix(const ClosureCoefficients& a) {
  const int n = a.top() + 1;
  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) mat(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) mat(n - 1, j) = a.a[j];
  return mat;
}

}  // namespace qbmm
