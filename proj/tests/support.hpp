#pragma once

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "qbmm/inversion.hpp"

namespace qbmm::test {

// Interior state: weights in [0.1, 2], abscissas in [-2, 2] at least `min_gap`
// apart, sigma2 log-uniform in [s2_lo, s2_hi].
inline EqmomState random_interior(std::mt19937_64& rng, int n, double s2_lo = 1e-3, double s2_hi = 4.0,
                                  double min_gap = 0.05) {
  std::uniform_real_distribution<double> uw(0.1, 2.0), uu(-2.0, 2.0),
      ls(std::log(s2_lo), std::log(s2_hi));
  std::vector<double> u;
  while (static_cast<int>(u.size()) < n) {
    const double x = uu(rng);
    bool ok = true;
    for (double y : u) ok = ok && std::abs(x - y) >= min_gap;
    if (ok) u.push_back(x);
  }
  std::vector<Node> nodes;
  for (double x : u) nodes.push_back({uw(rng), x});
  return {NodeSet(std::move(nodes)), std::exp(ls(rng))};
}

inline NodeSet random_nodes(std::mt19937_64& rng, int n, double min_gap = 0.05) {
  return random_interior(rng, n, 1.0, 1.0, min_gap).nodes;
}

// Stacked (w_1, u_1, ..., w_N, u_N, sigma2).
inline std::vector<double> flatten(const EqmomState& w) {
  std::vector<double> v;
  for (const Node& nd : w.nodes) {
    v.push_back(nd.weight);
    v.push_back(nd.abscissa);
  }
  v.push_back(w.sigma2);
  return v;
}

// max_k |a_k - b_k| / max_k |b_k|.
inline double normwise_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    num = std::max(num, std::abs(a[k] - b[k]));
    den = std::max(den, std::abs(b[k]));
  }
  return num / den;
}

// max_k |a_k - b_k| / |b_k|.
inline double componentwise_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]) / std::abs(b[k]));
  return r;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// sum_k j!/(k!(j-2k)!) (sigma2/2)^k u^{j-2k}
inline double gaussian_moment_explicit(int j, double u, double sigma2) {
  double s = 0.0;
  for (int k = 0; 2 * k <= j; ++k)
    s += factorial(j) / (factorial(k) * factorial(j - 2 * k)) * std::pow(sigma2 / 2.0, k) * std::pow(u, j - 2 * k);
  return s;
}

// Adaptive Gauss-Kronrod over [a, b] of xi^j times the normal density.
inline double gaussian_partial_quadrature(int j, double u, double sigma2, double a, double b) {
  const double sd = std::sqrt(sigma2);
  auto f = [&](double xi) {
    const double z = (xi - u) / sd;
    return std::pow(xi, j) * std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-15);
}

// Central differences of a vector-valued map; column k is d f / d x_k.
inline std::vector<std::vector<double>> central_jacobian(
    const std::function<std::vector<double>(const std::vector<double>&)>& f, const std::vector<double>& x,
    double rel_step = 1e-6) {
  std::vector<std::vector<double>> cols;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double h = rel_step * std::max(1.0, std::abs(x[k]));
    auto xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const auto fp = f(xp), fm = f(xm);
    std::vector<double> col(fp.size());
    for (std::size_t i = 0; i < fp.size(); ++i) col[i] = (fp[i] - fm[i]) / (2.0 * h);
    cols.push_back(std::move(col));
  }
  return cols;
}

// Ridders' extrapolated central difference of a scalar function, starting at
// step h and shrinking by 1.4 per tableau column.
inline double ridders_derivative(const std::function<double(double)>& f, double x, double h) {
  constexpr int kTab = 10;
  constexpr double kCon = 1.4, kCon2 = kCon * kCon;
  double a[kTab][kTab];
  double best = 0.0, err = std::numeric_limits<double>::max();
  a[0][0] = (f(x + h) - f(x - h)) / (2.0 * h);
  for (int i = 1; i < kTab; ++i) {
    h /= kCon;
    a[0][i] = (f(x + h) - f(x - h)) / (2.0 * h);
    double fac = kCon2;
    for (int j = 1; j <= i; ++j) {
      a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
      fac *= kCon2;
      const double e = std::max(std::abs(a[j][i] - a[j - 1][i]), std::abs(a[j][i] - a[j - 1][i - 1]));
      if (e <= err) {
        err = e;
        best = a[j][i];
      }
    }
    if (std::abs(a[i][i] - a[i - 1][i - 1]) >= 2.0 * err) break;
  }
  return best;
}

// Determinant of d(M_0..M_2N)/d(w_1, u_1, ..., w_N, u_N, sigma2) assembled
// from the state in 50-digit arithmetic and eliminated with partial pivoting.
inline double forward_jacobian_det_hp(const EqmomState& w) {
  using R = boost::multiprecision::cpp_bin_float_50;
  const int n = static_cast<int>(w.order()), m = 2 * n + 1;
  std::vector<std::vector<R>> a(m, std::vector<R>(m, R(0)));
  const R s2 = w.sigma2;
  for (int i = 0; i < n; ++i) {
    const R u = w.nodes[i].abscissa, wt = w.nodes[i].weight;
    std::vector<R> d(m);
    d[0] = 1;
    if (m > 1) d[1] = u;
    for (int j = 2; j < m; ++j) d[j] = u * d[j - 1] + R(j - 1) * s2 * d[j - 2];
    for (int k = 0; k < m; ++k) {
      a[k][2 * i] = d[k];
      if (k > 0) a[k][2 * i + 1] = wt * R(k) * d[k - 1];
      if (k > 1) a[k][m - 1] += wt * R(k * (k - 1) / 2) * d[k - 2];
    }
  }
  R det = 1;
  for (int c = 0; c < m; ++c) {
    int p = c;
    for (int r = c + 1; r < m; ++r)
      if (abs(a[r][c]) > abs(a[p][c])) p = r;
    if (p != c) {
      std::swap(a[p], a[c]);
      det = -det;
    }
    det *= a[c][c];
    if (a[c][c] == 0) return 0.0;
    for (int r = c + 1; r < m; ++r) {
      const R f = a[r][c] / a[c][c];
      for (int k = c; k < m; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return static_cast<double>(det);
}

}  // namespace qbmm::test
