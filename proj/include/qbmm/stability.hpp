#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <string>

#include "qbmm/inversion.hpp"

namespace qbmm {

struct MacroState {
  double rho = 1.0;    // density
  double u = 0.0;      // bulk velocity
  double theta = 1.0;  // temperature
  double q = 0.0;      // heat flux, (1/2) int (xi-U)^3 f
};

enum class CollisionKind { kBgk, kShakhov };

struct SourceModel {
  CollisionKind kind = CollisionKind::kBgk;
  double nu = 1.0;               // fixed collision frequency
  std::optional<double> kappa;   // when set, nu = kappa * rho
  double pr = 1.0;               // Prandtl number, Shakhov only

  static SourceModel bgk() { return {}; }
  static SourceModel shakhov(double pr) { return {CollisionKind::kShakhov, 1.0, std::nullopt, pr}; }

  double frequency(double rho) const { return kappa ? *kappa * rho : nu; }
};

// Inverts M_0 = rho, M_1 = rho U, M_2 = rho (U^2 + theta),
// M_3 = rho (U^3 + 3 U theta) + 2 q. q = 0 when fewer than four moments are
// given. Throws DomainError for rho <= 0 or theta <= 0.
MacroState macro_from_moments(const MomentVector& m);

// Canonical equilibrium representative: N equal weights rho/N at U with
// sigma2 = theta.
EqmomState equilibrium_state(double rho, double u, double theta, int n);

// rho D_j(U, theta) - M_j; components 0..2 are exactly zero.
MomentVector bgk_source(const MomentVector& m);

// bgk_source plus C(j,3) (1 - Pr) (2q) D_{j-3}(U, theta) for j >= 3.
MomentVector shakhov_source(const MomentVector& m, double pr);

MomentVector collision_source(const MomentVector& m, const SourceModel& model);

// ||S(m)|| <= 1e-10 ||m||.
bool on_equilibrium_manifold(const MomentVector& m, const SourceModel& model, double tol = 1e-10);

// Jacobian of the source with respect to M (the frequency factor is not
// included). BGK: analytic at any valid m. Shakhov: only on the equilibrium
// manifold; throws UnsupportedInput elsewhere.
Eigen::MatrixXd source_jacobian(const MomentVector& m, const SourceModel& model);

// Rows are left eigenvectors of the EQMOM coefficient matrix, normalised to a
// last entry of 1, ordered by ascending eigenvalue. Requires sigma2 > 0.
Eigen::MatrixXd left_eigenmatrix(const EqmomState& w);

struct ConditionI {
  Eigen::MatrixXd p;          // P with P S_M = D P
  Eigen::VectorXd diagonal;   // D
  double residual = 0.0;      // ||P S_M - D P||_F / max(1, ||P||_F ||S_M||_F)
  bool pass = false;
};

struct ConditionII {
  Eigen::MatrixXd a0;
  double symmetry_residual = 0.0;  // ||A0 A - A^T A0||_F / ||A0 A||_F
  double min_eigenvalue = 0.0;     // of A0
  bool pass = false;
};

struct ConditionIII {
  Eigen::MatrixXd k;            // P^{-T} A0 P^{-1}
  double off_block_norm = 0.0;  // ||K[0:3, 3:]||_F
  double k_norm = 0.0;          // ||K||_F
  bool block_diagonal = false;  // off_block_norm < 1e-8 ||K||
  bool epsilon_found = false;
  double epsilon = 0.0;         // largest certified scale in [1e-12, 1e6]
  double max_eigenvalue = 0.0;  // of the dissipation matrix at that epsilon
  bool pass = false;
};

struct StabilityReport {
  MacroState macro;
  int n = 0;
  int r = 0;  // size of the nonzero diagonal block, 2N - 2
  ConditionI cond_i;
  ConditionII cond_ii;
  ConditionIII cond_iii;
  bool pass() const { return cond_i.pass && cond_ii.pass && cond_iii.pass; }
};

struct StabilityTolerances {
  double cond_i = 1e-10;
  double cond_ii = 1e-8;
  double off_block = 1e-8;
  double dissipation = 1e-10;  // relative to ||A0 S_M + S_M^T A0||
};

// The pre-condition for (i) and (iii) is m on the equilibrium manifold of the
// model; UnsupportedInput is thrown otherwise. `lambda` is the optional
// positive diagonal scaling in A0 = L^T diag(lambda) L (identity when empty).
ConditionI check_condition_i(const MomentVector& m, const SourceModel& model,
                             const StabilityTolerances& tol = {});
ConditionII check_condition_ii(const EqmomState& w, std::span<const double> lambda = {},
                               const StabilityTolerances& tol = {});
ConditionIII check_condition_iii(const MomentVector& m, const SourceModel& model,
                                 std::span<const double> lambda = {},
                                 const StabilityTolerances& tol = {});

// All three conditions at the equilibrium (rho, U, theta) with N nodes.
StabilityReport check_stability(double rho, double u, double theta, int n, const SourceModel& model,
                                const StabilityTolerances& tol = {});

std::string to_string(CollisionKind kind);

}  // namespace qbmm
