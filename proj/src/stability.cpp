#include "qbmm/stability.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "qbmm/closure.hpp"
#include "qbmm/errors.hpp"
#include "qbmm/gaussian.hpp"
#include "qbmm/spectral.hpp"

namespace qbmm {

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double norm_of(const MomentVector& m) {
  double s = 0.0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

// Shakhov rows i >= 3 pick up C(i,3) (1-Pr) times the deviation of M_3.
Eigen::MatrixXd shakhov_mixing(int size, double u, double theta, double pr) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(size, size);
  const auto d = gaussian_moments(size, u, theta);
  for (int i = 3; i < size; ++i) e(i, 3) -= (1.0 - pr) * binom(i, 3) * d[i - 3];
  return e;
}

void require_equilibrium(const MomentVector& m, const SourceModel& model, const char* who) {
  if (!on_equilibrium_manifold(m, model))
    throw UnsupportedInput(std::string(who) + ": moments are not on the equilibrium manifold");
}

Eigen::MatrixXd symmetrizer(const EqmomState& w, std::span<const double> lambda) {
  const Eigen::MatrixXd l = left_eigenmatrix(w);
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(l.rows());
  if (!lambda.empty()) {
    if (static_cast<Eigen::Index>(lambda.size()) != l.rows())
      throw DomainError("symmetrizer: scaling length must be 2N+1");
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      if (!(lambda[i] > 0.0)) throw DomainError("symmetrizer: scaling must be positive");
      scale(i) = lambda[i];
    }
  }
  return l.transpose() * scale.asDiagonal() * l;
}

// P for condition (i) and the matching diagonal D.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> diagonalizer(const MomentVector& m, const SourceModel& model) {
  const int size = static_cast<int>(m.size());
  const Eigen::MatrixXd s_bgk = source_jacobian(m, SourceModel::bgk());
  Eigen::MatrixXd p = Eigen::MatrixXd::Identity(size, size);
  p.bottomLeftCorner(size - 3, 3) = -s_bgk.bottomLeftCorner(size - 3, 3);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(size);
  for (int i = 3; i < size; ++i) d(i) = -1.0;
  if (model.kind == CollisionKind::kShakhov) {
    const MacroState macro = macro_from_moments(m);
    const auto delta = gaussian_moments(size, macro.u, macro.theta);
    Eigen::MatrixXd p_inv = Eigen::MatrixXd::Identity(size, size);
    p_inv.bottomLeftCorner(size - 3, 3) = s_bgk.bottomLeftCorner(size - 3, 3);
    for (int i = 4; i < size; ++i) p_inv(i, 3) += binom(i, 3) * delta[i - 3];
    p = p_inv.inverse();
    d(3) = -model.pr;
  }
  return {p, d};
}

}  // namespace

std::string to_string(CollisionKind kind) { return kind == CollisionKind::kBgk ? "bgk" : "shakhov"; }

MacroState macro_from_moments(const MomentVector& m) {
  if (m.size() < 3) throw DomainError("macro_from_moments: need at least M_0, M_1, M_2");
  MacroState s;
  s.rho = m[0];
  if (!(s.rho > 0.0)) throw DomainError("macro_from_moments: nonpositive density " + std::to_string(s.rho));
  s.u = m[1] / s.rho;
  s.theta = m[2] / s.rho - s.u * s.u;
  if (!(s.theta > 0.0))
    throw DomainError("macro_from_moments: nonpositive temperature " + std::to_string(s.theta));
  s.q = m.size() > 3 ? 0.5 * (m[3] - s.rho * (s.u * s.u * s.u + 3.0 * s.u * s.theta)) : 0.0;
  return s;
}

EqmomState equilibrium_state(double rho, double u, double theta, int n) {
  if (!(rho > 0.0) || !(theta > 0.0)) throw DomainError("equilibrium_state: rho and theta must be positive");
  if (n < 1) throw DomainError("equilibrium_state: N must be >= 1");
  std::vector<Node> nodes(static_cast<std::size_t>(n), Node{rho / n, u});
  return {NodeSet(std::move(nodes)), theta};
}

MomentVector bgk_source(const MomentVector& m) {
  const MacroState s = macro_from_moments(m);
  const auto d = gaussian_moments(m.max_order(), s.u, s.theta);
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t j = 3; j < m.size(); ++j) out[j] = s.rho * d[j] - m[j];
  return MomentVector(std::move(out));
}

MomentVector shakhov_source(const MomentVector& m, double pr) {
  MomentVector out = bgk_source(m);
  const MacroState s = macro_from_moments(m);
  const auto d = gaussian_moments(m.max_order(), s.u, s.theta);
  for (int j = 3; j <= m.max_order(); ++j) out[j] += binom(j, 3) * (1.0 - pr) * 2.0 * s.q * d[j - 3];
  return out;
}

MomentVector collision_source(const MomentVector& m, const SourceModel& model) {
  return model.kind == CollisionKind::kBgk ? bgk_source(m) : shakhov_source(m, model.pr);
}

bool on_equilibrium_manifold(const MomentVector& m, const SourceModel& model, double tol) {
  return norm_of(collision_source(m, model)) <= tol * norm_of(m);
}

Eigen::MatrixXd source_jacobian(const MomentVector& m, const SourceModel& model) {
  const int size = static_cast<int>(m.size());
  const MacroState s = macro_from_moments(m);
  const auto d = gaussian_moments(size, s.u, s.theta);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(size, size);
  // Derivatives of (rho, U, theta) with respect to (M_0, M_1, M_2).
  const double du[3] = {-s.u / s.rho, 1.0 / s.rho, 0.0};
  const double dtheta[3] = {(s.u * s.u - s.theta) / s.rho, -2.0 * s.u / s.rho, 1.0 / s.rho};
  const double drho[3] = {1.0, 0.0, 0.0};
  for (int i = 3; i < size; ++i) {
    for (int j = 0; j < 3; ++j) {
      jac(i, j) = drho[j] * d[i] + s.rho * du[j] * i * d[i - 1] + s.rho * dtheta[j] * binom(i, 2) * d[i - 2];
    }
    jac(i, i) = -1.0;
  }
  if (model.kind == CollisionKind::kShakhov) {
    require_equilibrium(m, model, "source_jacobian");
    jac = shakhov_mixing(size, s.u, s.theta, model.pr) * jac;
  }
  return jac;
}

Eigen::MatrixXd left_eigenmatrix(const EqmomState& w) {
  const SpectralReport spec = analyze_eqmom(w);
  if (!spec.strictly_hyperbolic) throw RootFindingError("left_eigenmatrix: eigenvalues are not distinct", {});
  const ClosureCoefficients a = closure_coeffs_eqmom(w);
  const int n = a.top() + 1;
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = n - 1; k >= 0; --k) {
      v(i, k) = p;
      p *= spec.eigenvalues[i];
    }
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
  for (int r = 1; r < n; ++r)
    for (int c = 0; c < r; ++c) t(r, c) = -a.a[n - (r - c)];
  return v * t;
}

ConditionI check_condition_i(const MomentVector& m, const SourceModel& model, const StabilityTolerances& tol) {
  require_equilibrium(m, model, "check_condition_i");
  const Eigen::MatrixXd s = source_jacobian(m, model);
  auto [p, d] = diagonalizer(m, model);
  ConditionI out;
  const Eigen::MatrixXd lhs = p * s;
  const Eigen::MatrixXd rhs = d.asDiagonal() * p;
  out.residual = (lhs - rhs).norm() / std::max(1.0, p.norm() * s.norm());
  out.p = std::move(p);
  out.diagonal = std::move(d);
  out.pass = out.residual < tol.cond_i;
  return out;
}

ConditionII check_condition_ii(const EqmomState& w, std::span<const double> lambda,
                               const StabilityTolerances& tol) {
  if (!(w.sigma2 > 0.0)) throw DomainError("check_condition_ii: sigma2 must be positive");
  const Eigen::MatrixXd a = companion_matrix(closure_coeffs_eqmom(w));
  ConditionII out;
  out.a0 = symmetrizer(w, lambda);
  const Eigen::MatrixXd a0a = out.a0 * a;
  out.symmetry_residual = (a0a - a.transpose() * out.a0).norm() / a0a.norm();
  out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(out.a0, Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .minCoeff();
  out.pass = out.symmetry_residual < tol.cond_ii && out.min_eigenvalue > 0.0;
  return out;
}

ConditionIII check_condition_iii(const MomentVector& m, const SourceModel& model,
                                 std::span<const double> lambda, const StabilityTolerances& tol) {
  require_equilibrium(m, model, "check_condition_iii");
  const int size = static_cast<int>(m.size());
  if (size % 2 != 1 || size < 5) throw DomainError("check_condition_iii: need 2N+1 moments with N >= 2");
  const MacroState macro = macro_from_moments(m);
  const EqmomState w = equilibrium_state(macro.rho, macro.u, macro.theta, size / 2);
  const Eigen::MatrixXd a0 = symmetrizer(w, lambda);
  const Eigen::MatrixXd s = source_jacobian(m, model);
  const Eigen::MatrixXd p = diagonalizer(m, model).first;
  const Eigen::MatrixXd p_inv = p.inverse();

  ConditionIII out;
  out.k = p_inv.transpose() * a0 * p_inv;
  out.off_block_norm = out.k.topRightCorner(3, size - 3).norm();
  out.k_norm = out.k.norm();
  out.block_diagonal = out.off_block_norm < tol.off_block * out.k_norm;

  // A0 S + S^T A0 + eps^2 Pt^T diag(0, I_r) Pt with Pt = diag(I_3, eps I_r) P
  // is nondecreasing in eps, so the certified set is an interval [0, eps*];
  // bisect for eps* in log space.
  const Eigen::MatrixXd base = a0 * s + s.transpose() * a0;
  const double slack = tol.dissipation * base.norm();
  auto max_eig = [&](double eps) {
    Eigen::MatrixXd pt = p;
    pt.bottomRows(size - 3) *= eps;
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(size, size);
    proj.bottomRightCorner(size - 3, size - 3).setIdentity();
    const Eigen::MatrixXd x = base + eps * eps * pt.transpose() * proj * pt;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (x + x.transpose()), Eigen::EigenvaluesOnly)
        .eigenvalues()
        .maxCoeff();
  };
  double lo = std::log(1e-12);
  double hi = std::log(1e6);
  if (max_eig(std::exp(hi)) <= slack) {
    out.epsilon_found = true;
    out.epsilon = std::exp(hi);
  } else if (max_eig(std::exp(lo)) <= slack) {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (max_eig(std::exp(mid)) <= slack) lo = mid;
      else hi = mid;
    }
    out.epsilon_found = true;
    out.epsilon = std::exp(lo);
  }
  out.max_eigenvalue = max_eig(out.epsilon_found ? out.epsilon : 1e-12);
  out.pass = out.block_diagonal && out.epsilon_found;
  return out;
}

StabilityReport check_stability(double rho, double u, double theta, int n, const SourceModel& model,
                                const StabilityTolerances& tol) {
  StabilityReport rep;
  rep.n = n;
  rep.r = 2 * n - 2;
  const EqmomState w = equilibrium_state(rho, u, theta, n);
  const MomentVector m = eqmom_forward(w, 2 * n);
  rep.macro = macro_from_moments(m);
  rep.cond_i = check_condition_i(m, model, tol);
  rep.cond_ii = check_condition_ii(w, {}, tol);
  rep.cond_iii = check_condition_iii(m, model, {}, tol);
  return rep;
}

}  // namespace qbmm
