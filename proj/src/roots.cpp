#include "qbmm/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qbmm/errors.hpp"

namespace qbmm {

namespace {

// Parlett-Reinsch balancing restricted to powers of two so that the scaling
// introduces no rounding.
void balance(Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  constexpr double gamma = 0.9;
  bool changed = true;
  for (int sweep = 0; changed && sweep < 100; ++sweep) {
    changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      double col = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i) continue;
        row += std::abs(a(i, k));
        col += std::abs(a(k, i));
      }
      if (row == 0.0 || col == 0.0) continue;
      int exponent = 0;
      std::frexp(row / col, &exponent);
      exponent /= 2;
      if (exponent == 0) continue;
      const double scaled_col = std::ldexp(col, exponent);
      const double scaled_row = std::ldexp(row, -exponent);
      if (scaled_col + scaled_row < gamma * (col + row)) {
        changed = true;
        a.row(i) *= std::ldexp(1.0, -exponent);
        a.col(i) *= std::ldexp(1.0, exponent);
      }
    }
  }
}

double polish(const Polynomial& p, int multiplicity, double x) {
  const Polynomial q = p.derivative(multiplicity - 1);
  const Polynomial dq = q.derivative();
  double fx = std::abs(q(x));
  for (int it = 0; it < 8 && fx > 0.0; ++it) {
    const double slope = dq(x);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = x - q(x) / slope;
    const double fnext = std::abs(q(next));
    if (!(fnext < fx)) break;
    x = next;
    fx = fnext;
  }
  return x;
}

// p, p', ..., p^{(m-1)} all vanish at x up to evaluation rounding.
bool is_multiple_root(const Polynomial& p, int m, double x) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  Polynomial q = p;
  for (int k = 0; k < m; ++k) {
    double bound = 0.0;
    double xp = 1.0;
    for (double c : q.coeffs()) {
      bound += std::abs(c) * xp;
      xp *= std::abs(x);
    }
    if (std::abs(q(x)) > 32.0 * (q.degree() + 1) * eps * bound) return false;
    q = q.derivative();
  }
  return true;
}

std::complex<double> centroid_of(const std::vector<std::complex<double>>& eig, const std::vector<size_t>& members) {
  std::complex<double> c{0.0, 0.0};
  for (size_t i : members) c += eig[i];
  return c / static_cast<double>(members.size());
}

}  // namespace

int RootSet::real_count() const {
  int n = 0;
  for (const auto& r : real) n += r.multiplicity;
  return n;
}

std::vector<double> RootSet::expanded() const {
  std::vector<double> out;
  for (const auto& r : real) out.insert(out.end(), static_cast<size_t>(r.multiplicity), r.value);
  return out;
}

double default_cluster_tol(double max_abs_root) { return 1e-7 * (1.0 + max_abs_root); }

RootSet polynomial_roots(const Polynomial& p, double cluster_tol) {
  if (p.is_zero()) throw DomainError("polynomial_roots: zero polynomial");
  RootSet out;
  const int d = p.degree();
  if (d == 0) return out;

  std::vector<std::complex<double>> eig;
  if (d == 1) {
    eig.emplace_back(-p.coeff(0) / p.coeff(1), 0.0);
  } else {
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i + 1 < d; ++i) companion(i, i + 1) = 1.0;
    for (int j = 0; j < d; ++j) companion(d - 1, j) = -p.coeff(j) / p.leading();
    balance(companion);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      std::vector<double> residuals;
      throw RootFindingError("polynomial_roots: Hessenberg QR did not converge", residuals);
    }
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) eig.push_back(solver.eigenvalues()(i));
  }

  double max_abs = 0.0;
  for (const auto& z : eig) max_abs = std::max(max_abs, std::abs(z));
  const double tol = cluster_tol > 0.0 ? cluster_tol : default_cluster_tol(max_abs);

  // Single-linkage clustering.
  const size_t n = eig.size();
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), size_t{0});
  auto find = [&](size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (std::abs(eig[i] - eig[j]) <= tol) parent[find(i)] = find(j);

  std::vector<std::vector<size_t>> clusters;
  {
    std::vector<std::vector<size_t>> by_root(n);
    for (size_t i = 0; i < n; ++i) by_root[find(i)].push_back(i);
    for (auto& c : by_root)
      if (!c.empty()) clusters.push_back(std::move(c));
  }

  // Multiple roots split by roughly eps^{1/m} under QR, beyond the default
  // radius. Merge neighbouring clusters when the merged centre is a verified
  // multiple root.
  if (cluster_tol <= 0.0) {
    const double reach = 1e-3 * (1.0 + max_abs);
    bool merged = true;
    while (merged) {
      merged = false;
      for (size_t a = 0; a < clusters.size() && !merged; ++a) {
        for (size_t b = a + 1; b < clusters.size() && !merged; ++b) {
          if (std::abs(centroid_of(eig, clusters[a]) - centroid_of(eig, clusters[b])) > reach) continue;
          std::vector<size_t> joint = clusters[a];
          joint.insert(joint.end(), clusters[b].begin(), clusters[b].end());
          const std::complex<double> c = centroid_of(eig, joint);
          if (std::abs(c.imag()) > tol) continue;
          const int m = static_cast<int>(joint.size());
          if (!is_multiple_root(p, m, polish(p, m, c.real()))) continue;
          clusters[a] = std::move(joint);
          clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
          merged = true;
        }
      }
    }
  }

  std::vector<double> residuals;
  for (const auto& members : clusters) {
    const std::complex<double> centroid = centroid_of(eig, members);
    if (std::abs(centroid.imag()) <= tol) {
      const int m = static_cast<int>(members.size());
      const double x = polish(p, m, centroid.real());
      if (!std::isfinite(x)) {
        residuals.push_back(std::abs(p(centroid.real())));
        throw RootFindingError("polynomial_roots: non-finite root", residuals);
      }
      out.real.push_back({x, m});
    } else if (centroid.imag() > 0.0) {
      out.complex.push_back(centroid);
    }
  }
  std::sort(out.real.begin(), out.real.end(),
            [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
  return out;
}

std::vector<RealRoot> real_roots(const Polynomial& p, double cluster_tol) {
  return polynomial_roots(p, cluster_tol).real;
}

std::vector<double> newton_power_sums(const Polynomial& p, int k_max) {
  const int d = p.degree();
  if (d < 1) throw DomainError("newton_power_sums: degree must be >= 1");
  if (std::abs(p.leading() - 1.0) > 1e-12) throw DomainError("newton_power_sums: polynomial is not monic");
  std::vector<double> s(static_cast<size_t>(std::max(k_max, 0)) + 1, 0.0);
  s[0] = d;
  for (int k = 1; k <= k_max; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= std::min(k - 1, d); ++i) acc += p.coeff(d - i) * s[k - i];
    if (k <= d) acc += k * p.coeff(d - k);
    s[k] = -acc;
  }
  return s;
}

}  // namespace qbmm
