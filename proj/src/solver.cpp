#include "qbmm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "qbmm/errors.hpp"
#include "qbmm/gaussian.hpp"
#include "qbmm/spectral.hpp"

namespace qbmm {

void validate(const SimConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("n must be at least 1");
  if (cfg.moment_count() < 3) throw ConfigError("qmom needs n >= 2 to carry a temperature");
  if (cfg.cells < 2) throw ConfigError("cells must be at least 2");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw ConfigError("cfl must lie in (0, 1)");
  if (!(cfg.x_hi > cfg.x_lo)) throw ConfigError("x_hi must exceed x_lo");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw ConfigError("t_end must be finite and >= 0");
  if (!(cfg.kappa >= 0.0)) throw ConfigError("kappa must be >= 0 or inf");
  if (!(cfg.snapshot_interval >= 0.0)) throw ConfigError("snapshot_interval must be >= 0");
  for (const MacroState* s : {&cfg.left, &cfg.right}) {
    if (!(s->rho > 0.0) || !(s->theta > 0.0) || !std::isfinite(s->u))
      throw ConfigError("initial states need rho > 0, theta > 0 and finite U");
  }
}

std::string to_string(ClosureKind kind) { return kind == ClosureKind::kQmom ? "qmom" : "eqmom"; }

SplitFlux kinetic_flux_eqmom(const EqmomState& w, int k_max) {
  if (!(w.sigma2 > 0.0)) throw DomainError("kinetic_flux_eqmom: sigma2 must be positive");
  std::vector<double> minus(static_cast<std::size_t>(k_max) + 1, 0.0);
  std::vector<double> plus(minus.size(), 0.0);
  for (const Node& nd : w.nodes) {
    const auto below = half_gaussian_moments(k_max + 1, nd.abscissa, w.sigma2, 0.0, HalfLine::kBelow);
    const auto above = half_gaussian_moments(k_max + 1, nd.abscissa, w.sigma2, 0.0, HalfLine::kAbove);
    for (int j = 0; j <= k_max; ++j) {
      minus[j] += nd.weight * below[j + 1];
      plus[j] += nd.weight * above[j + 1];
    }
  }
  return {MomentVector(std::move(minus)), MomentVector(std::move(plus))};
}

SplitFlux kinetic_flux_qmom(const NodeSet& ns, int k_max) {
  std::vector<double> minus(static_cast<std::size_t>(k_max) + 1, 0.0);
  std::vector<double> plus(minus.size(), 0.0);
  for (const Node& nd : ns) {
    std::vector<double>& side = nd.abscissa < 0.0 ? minus : plus;
    double p = nd.weight * nd.abscissa;
    for (int j = 0; j <= k_max; ++j) {
      side[j] += p;
      p *= nd.abscissa;
    }
  }
  return {MomentVector(std::move(minus)), MomentVector(std::move(plus))};
}

MomentVector project_to_equilibrium(const MomentVector& m) {
  const MacroState s = macro_from_moments(m);
  const auto d = gaussian_moments(m.max_order(), s.u, s.theta);
  MomentVector out = m;
  for (std::size_t j = 3; j < m.size(); ++j) out[j] = s.rho * d[j];
  return out;
}

MomentVector collision_step(const MomentVector& m, double nu, double dt) {
  if (!(nu >= 0.0) || !(dt >= 0.0)) throw DomainError("collision_step: nu and dt must be >= 0");
  const double decay = std::exp(-nu * dt);
  if (decay == 1.0) {
    macro_from_moments(m);
    return m;
  }
  const MomentVector eq = project_to_equilibrium(m);
  if (decay == 0.0) return eq;
  MomentVector out = m;
  for (std::size_t j = 3; j < m.size(); ++j) out[j] = eq[j] + decay * (m[j] - eq[j]);
  return out;
}

MomentVector maxwellian_moments(const MacroState& s, int count) {
  if (count < 1) throw DomainError("maxwellian_moments: count must be positive");
  auto d = gaussian_moments(count - 1, s.u, s.theta);
  for (double& v : d) v *= s.rho;
  return MomentVector(std::move(d));
}

FieldState initial_field(const SimConfig& cfg) {
  validate(cfg);
  const int k = cfg.moment_count();
  const MomentVector ml = maxwellian_moments(cfg.left, k);
  const MomentVector mr = maxwellian_moments(cfg.right, k);
  FieldState f;
  f.cells.reserve(static_cast<std::size_t>(cfg.cells));
  for (int i = 0; i < cfg.cells; ++i) f.cells.push_back(cfg.x_center(i) < 0.0 ? ml : mr);
  return f;
}

MomentVector free_streaming_moments(double x, double t, const MacroState& left,
                                    const MacroState& right, int count) {
  if (!(t >= 0.0)) throw DomainError("free_streaming_moments: t must be >= 0");
  if (t == 0.0) return maxwellian_moments(x < 0.0 ? left : right, count);
  const double c = x / t;
  const auto a = half_gaussian_moments(count - 1, left.u, left.theta, c, HalfLine::kAbove);
  const auto b = half_gaussian_moments(count - 1, right.u, right.theta, c, HalfLine::kBelow);
  std::vector<double> m(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) m[j] = left.rho * a[j] + right.rho * b[j];
  return MomentVector(std::move(m));
}

MacroState free_streaming_reference(double x, double t, const MacroState& left,
                                    const MacroState& right) {
  return macro_from_moments(free_streaming_moments(x, t, left, right, 4));
}

double delta_shock_metric(const FieldState& f, const SimConfig& cfg) {
  int arg = 0;
  for (int i = 1; i < static_cast<int>(f.cells.size()); ++i)
    if (f.cells[i][0] > f.cells[arg][0]) arg = i;
  const double ref = free_streaming_reference(cfg.x_center(arg), f.time, cfg.left, cfg.right).rho;
  return f.cells[arg][0] / ref;
}

double l1_density_error(const FieldState& f, const SimConfig& cfg) {
  double err = 0.0;
  for (int i = 0; i < static_cast<int>(f.cells.size()); ++i) {
    const double ref = free_streaming_reference(cfg.x_center(i), f.time, cfg.left, cfg.right).rho;
    err += std::abs(f.cells[i][0] - ref);
  }
  return err * cfg.dx();
}

namespace {

struct CellData {
  SplitFlux flux;
  double radius = 0.0;
  bool boundary = false;
};

[[noreturn]] void abort_cell(const std::string& why, int cell, double time, const MomentVector& m) {
  throw SolverAbort("cell " + std::to_string(cell) + " at t=" + std::to_string(time) + ": " + why, cell,
                    time, m.values());
}

CellData evaluate_cell(const MomentVector& m, const SimConfig& cfg, int cell, double time) {
  const int k_max = cfg.moment_count() - 1;
  CellData d;
  try {
    if (cfg.closure == ClosureKind::kQmom) {
      const NodeSet ns = qmom_invert(m).nodes;
      d.flux = kinetic_flux_qmom(ns, k_max);
      for (const Node& nd : ns) d.radius = std::max(d.radius, std::abs(nd.abscissa));
      return d;
    }
    const EqmomInversion inv = eqmom_invert(m);
    d.boundary = inv.boundary;
    if (inv.state.sigma2 > 0.0) {
      d.flux = kinetic_flux_eqmom(inv.state, k_max);
      const SpectralReport rep = analyze_eqmom(inv.state);
      for (double v : rep.eigenvalues) d.radius = std::max(d.radius, std::abs(v));
      for (const auto& z : rep.complex_eigenvalues) d.radius = std::max(d.radius, std::abs(z));
    } else {
      d.flux = kinetic_flux_qmom(inv.state.nodes, k_max);
      for (const Node& nd : inv.state.nodes) d.radius = std::max(d.radius, std::abs(nd.abscissa));
    }
  } catch (const std::exception& e) {
    abort_cell(e.what(), cell, time, m);
  }
  return d;
}

// Sum of each moment over the domain, scaled by dx.
std::vector<double> totals(const FieldState& f, double dx, std::vector<double>* abs_totals) {
  const std::size_t k = f.cells.front().size();
  std::vector<double> s(k, 0.0);
  if (abs_totals) abs_totals->assign(k, 0.0);
  for (const MomentVector& m : f.cells) {
    for (std::size_t j = 0; j < k; ++j) {
      s[j] += m[j] * dx;
      if (abs_totals) (*abs_totals)[j] += std::abs(m[j]) * dx;
    }
  }
  return s;
}

}  // namespace

RunResult run_riemann(const SimConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  FieldState f = initial_field(cfg);
  out.snapshots.push_back(f);
  RunDiagnostics& diag = out.diagnostics;

  const int ncell = cfg.cells;
  const std::size_t k = static_cast<std::size_t>(cfg.moment_count());
  const double dx = cfg.dx();
  const double t_eps = 1e-14 * std::max(1.0, cfg.t_end);
  double next_snapshot = cfg.snapshot_interval > 0.0 ? std::min(cfg.snapshot_interval, cfg.t_end) : cfg.t_end;

  std::vector<CellData> data(static_cast<std::size_t>(ncell));
  std::vector<MomentVector> cached(static_cast<std::size_t>(ncell));
  std::vector<MomentVector> face(static_cast<std::size_t>(ncell) + 1);

  while (cfg.t_end - f.time > t_eps) {
    double radius = 0.0;
    for (int i = 0; i < ncell; ++i) {
      if (cached[i].size() == 0 || !(cached[i] == f.cells[i])) {
        data[i] = evaluate_cell(f.cells[i], cfg, i, f.time);
        cached[i] = f.cells[i];
        if (data[i].boundary) ++diag.boundary_inversions;
      }
      radius = std::max(radius, data[i].radius);
    }
    diag.max_radius = std::max(diag.max_radius, radius);

    double dt = radius > 0.0 ? cfg.cfl * dx / radius : cfg.t_end - f.time;
    dt = std::min({dt, cfg.t_end - f.time, next_snapshot - f.time});
    if (!(dt > 0.0)) dt = cfg.t_end - f.time;
    diag.max_cfl = std::max(diag.max_cfl, dt * radius / dx);

    // Face i sits between cells i-1 and i; ghost cells copy their neighbour.
    for (int i = 0; i <= ncell; ++i) {
      const CellData& l = data[std::max(i - 1, 0)];
      const CellData& r = data[std::min(i, ncell - 1)];
      std::vector<double> g(k);
      for (std::size_t j = 0; j < k; ++j) g[j] = l.flux.plus[j] + r.flux.minus[j];
      face[i] = MomentVector(std::move(g));
    }

    std::vector<double> abs_before;
    const std::vector<double> before = totals(f, dx, &abs_before);
    const double ratio = dt / dx;
    for (int i = 0; i < ncell; ++i) {
      for (std::size_t j = 0; j < k; ++j) f.cells[i][j] -= ratio * (face[i + 1][j] - face[i][j]);
    }
    const std::vector<double> after = totals(f, dx, nullptr);
    for (std::size_t j = 0; j < k; ++j) {
      const double expected = dt * (face[0][j] - face[ncell][j]);
      const double scale = abs_before[j] + dt * (std::abs(face[0][j]) + std::abs(face[ncell][j]));
      if (scale > 0.0)
        diag.transport_defect = std::max(diag.transport_defect, std::abs(after[j] - before[j] - expected) / scale);
    }

    const double t_new = f.time + dt;
    if (cfg.kappa > 0.0) {
      std::vector<double> abs_mid;
      const std::vector<double> mid = totals(f, dx, &abs_mid);
      for (int i = 0; i < ncell; ++i) {
        try {
          const MomentVector& m = f.cells[i];
          f.cells[i] = cfg.kappa_infinite() ? project_to_equilibrium(m)
                                            : collision_step(m, cfg.kappa * m[0], dt);
        } catch (const std::exception& e) {
          abort_cell(e.what(), i, t_new, f.cells[i]);
        }
      }
      const std::vector<double> post = totals(f, dx, nullptr);
      for (std::size_t j = 0; j < 3; ++j) {
        if (abs_mid[j] > 0.0)
          diag.collision_defect = std::max(diag.collision_defect, std::abs(post[j] - mid[j]) / abs_mid[j]);
      }
    }
    f.time = t_new;
    ++diag.steps;

    for (int i = 0; i < ncell; ++i) {
      try {
        macro_from_moments(f.cells[i]);
      } catch (const std::exception& e) {
        abort_cell(e.what(), i, f.time, f.cells[i]);
      }
    }

    if (cfg.snapshot_interval > 0.0 && next_snapshot - f.time <= t_eps) {
      if (cfg.t_end - f.time > t_eps) out.snapshots.push_back(f);
      next_snapshot = std::min(next_snapshot + cfg.snapshot_interval, cfg.t_end);
    }
  }
  if (out.snapshots.size() == 1 || diag.steps > 0) out.snapshots.push_back(f);

  if (cfg.kappa == 0.0) {
    diag.has_reference = true;
    diag.l1_rho = l1_density_error(f, cfg);
    diag.delta_shock = delta_shock_metric(f, cfg);
  }
  diag.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace qbmm
