#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qbmm/inversion.hpp"
#include "qbmm/stability.hpp"

namespace qbmm {

enum class ClosureKind { kQmom, kEqmom };

struct SimConfig {
  ClosureKind closure = ClosureKind::kEqmom;
  int n = 2;
  double x_lo = -1.0;
  double x_hi = 1.0;
  int cells = 1000;
  double cfl = 0.45;
  double t_end = 0.1;
  // nu = kappa * rho; +inf projects every cell onto equilibrium each step.
  double kappa = 0.0;
  MacroState left{1.0, 1.0, 1.0 / 3.0, 0.0};
  MacroState right{1.0, -1.0, 1.0 / 3.0, 0.0};
  // Snapshot spacing in time; 0 writes only the initial and final fields.
  double snapshot_interval = 0.0;
  std::string output_dir = ".";
  std::string tag = "riemann";

  // Moments carried per cell: 2N for QMOM, 2N + 1 for EQMOM.
  int moment_count() const { return closure == ClosureKind::kQmom ? 2 * n : 2 * n + 1; }
  double dx() const { return (x_hi - x_lo) / cells; }
  double x_center(int i) const { return x_lo + (i + 0.5) * dx(); }
  bool kappa_infinite() const { return kappa == std::numeric_limits<double>::infinity(); }
};

// Throws ConfigError when an invariant does not hold.
void validate(const SimConfig& cfg);

std::string to_string(ClosureKind kind);

struct FieldState {
  std::vector<MomentVector> cells;
  double time = 0.0;
};

struct SplitFlux {
  MomentVector minus;  // contribution of xi < 0
  MomentVector plus;   // contribution of xi > 0
};

// F_j = int xi^{j+1} f split at xi = 0, j = 0..k_max. Requires sigma2 > 0.
SplitFlux kinetic_flux_eqmom(const EqmomState& w, int k_max);

// Delta-kernel limit; a node exactly at 0 contributes to `plus`.
SplitFlux kinetic_flux_qmom(const NodeSet& ns, int k_max);

// Exact relaxation at frozen (rho, U, theta):
//   M(t + dt) = E + exp(-nu dt) (M - E),  E_j = rho D_j(U, theta).
// M_0, M_1 and M_2 are returned unchanged.
MomentVector collision_step(const MomentVector& m, double nu, double dt);

// E_j = rho D_j(U, theta) for every retained j, again with M_0..M_2 kept.
MomentVector project_to_equilibrium(const MomentVector& m);

// Maxwellian moments M_0..M_{count-1} of a macro state.
MomentVector maxwellian_moments(const MacroState& s, int count);

// Initial Riemann data sampled at cell centres.
FieldState initial_field(const SimConfig& cfg);

// Collisionless solution for a Maxwellian jump at x = 0: the left state
// streamed over xi > x/t plus the right state over xi < x/t.
MomentVector free_streaming_moments(double x, double t, const MacroState& left,
                                    const MacroState& right, int count);
MacroState free_streaming_reference(double x, double t, const MacroState& left,
                                    const MacroState& right);

// Largest cell density over the reference density at that cell centre.
double delta_shock_metric(const FieldState& f, const SimConfig& cfg);

// sum_i |rho_i - rho_ref(x_i)| dx against the free-streaming solution.
double l1_density_error(const FieldState& f, const SimConfig& cfg);

struct RunDiagnostics {
  int steps = 0;
  double wall_seconds = 0.0;
  double max_cfl = 0.0;              // max over steps of dt * radius / dx
  double max_radius = 0.0;           // largest spectral radius seen
  // Per step, relative change of sum_i M_j dx for j <= 2 across the collision
  // substep, maximised over steps.
  double collision_defect = 0.0;
  // Per step, relative mismatch between the change of sum_i M_j dx in the
  // transport substep and the net boundary flux, j <= K.
  double transport_defect = 0.0;
  int boundary_inversions = 0;       // cells inverted onto the equilibrium boundary
  // Free-streaming comparisons at the final time (kappa = 0 only).
  bool has_reference = false;
  double l1_rho = 0.0;
  double delta_shock = 0.0;
};

struct RunResult {
  std::vector<FieldState> snapshots;  // initial field first, final field last
  RunDiagnostics diagnostics;
};

// First-order kinetic flux splitting followed by per-cell relaxation, with
// zero-gradient boundaries and dt from the closure's spectral radius. Throws
// SolverAbort when a cell cannot be inverted.
RunResult run_riemann(const SimConfig& cfg);

}  // namespace qbmm
