#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace qbmm {

// Dense univariate polynomial with real coefficients stored in ascending
// degree order. Trailing coefficients with magnitude below 1e-300 are trimmed
// so that equal polynomials have equal coefficient vectors. The zero
// polynomial has an empty coefficient vector and degree -1.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);
  Polynomial(std::initializer_list<double> coeffs);

  static Polynomial monomial(int degree, double coeff = 1.0);
  // Product of (u - r) over all r in `roots`.
  static Polynomial from_roots(std::span<const double> roots);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  // Coefficient of u^k, zero beyond the degree.
  double coeff(int k) const;
  double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

  double operator()(double u) const;

  Polynomial derivative(int order = 1) const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
  friend Polynomial operator*(Polynomial p, double s) { return p *= s; }
  friend Polynomial operator*(double s, Polynomial p) { return p *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  bool operator==(const Polynomial&) const = default;

 private:
  void trim();

  std::vector<double> coeffs_;
};

// Largest coefficientwise absolute difference.
double max_coeff_diff(const Polynomial& a, const Polynomial& b);

}  // namespace qbmm
