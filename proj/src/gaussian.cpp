#include "qbmm/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qbmm/errors.hpp"

namespace qbmm {

std::vector<double> gaussian_moments(int j_max, double u, double sigma2) {
  if (sigma2 < 0.0) throw DomainError("gaussian_moment: negative variance " + std::to_string(sigma2));
  if (j_max < 0) return {};
  std::vector<double> d(static_cast<size_t>(j_max) + 1);
  d[0] = 1.0;
  if (j_max >= 1) d[1] = u;
  for (int j = 2; j <= j_max; ++j) d[j] = u * d[j - 1] + (j - 1) * sigma2 * d[j - 2];
  return d;
}

double gaussian_moment(int j, double u, double sigma2) {
  if (j < 0) throw DomainError("gaussian_moment: negative order");
  return gaussian_moments(j, u, sigma2).back();
}

Polynomial smooth(const Polynomial& p, double theta) {
  Polynomial out = p;
  Polynomial deriv = p;
  double factor = 1.0;
  for (int k = 1; 2 * k <= p.degree(); ++k) {
    deriv = deriv.derivative(2);
    factor *= 0.5 * theta / k;
    out += factor * deriv;
  }
  return out;
}

std::vector<double> half_gaussian_moments(int j_max, double u, double sigma2, double cut,
                                          HalfLine side) {
  if (!(sigma2 > 0.0))
    throw DomainError("half_gaussian_moment: variance must be positive, got " +
                      std::to_string(sigma2));
  if (j_max < 0) return {};
  const double sigma = std::sqrt(sigma2);
  const double z = (cut - u) / sigma;
  const double density = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  // Boundary term sign: +sigma2 cut^{j-1} phi(cut) above the cut, minus below.
  const double sign = side == HalfLine::kAbove ? 1.0 : -1.0;
  const double mass = side == HalfLine::kAbove ? 0.5 * std::erfc(z / std::numbers::sqrt2)
                                               : 0.5 * std::erfc(-z / std::numbers::sqrt2);

  std::vector<double> m(static_cast<size_t>(j_max) + 1);
  m[0] = mass;
  double cut_pow = 1.0;  // cut^{j-1}
  for (int j = 1; j <= j_max; ++j) {
    const double prev2 = j >= 2 ? m[j - 2] : 0.0;
    m[j] = u * m[j - 1] + (j - 1) * sigma2 * prev2 + sign * sigma2 * cut_pow * density;
    cut_pow *= cut;
  }
  return m;
}

double half_gaussian_moment(int j, double u, double sigma2, double cut, HalfLine side) {
  if (j < 0) throw DomainError("half_gaussian_moment: negative order");
  return half_gaussian_moments(j, u, sigma2, cut, side).back();
}

}  // namespace qbmm
