#include "qbmm/inversion.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "qbmm/errors.hpp"
#include "qbmm/gaussian.hpp"

namespace qbmm {

MomentVector MomentVector::head(std::size_t count) const {
  return MomentVector(std::vector<double>(m_.begin(), m_.begin() + static_cast<std::ptrdiff_t>(count)));
}

NodeSet::NodeSet(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  for (const Node& n : nodes_) {
    if (!(n.weight > 0.0) || !std::isfinite(n.weight) || !std::isfinite(n.abscissa))
      throw DomainError("NodeSet: weights must be positive and finite, got " + std::to_string(n.weight));
  }
  std::sort(nodes_.begin(), nodes_.end(),
            [](const Node& a, const Node& b) { return a.abscissa < b.abscissa; });
}

std::vector<double> NodeSet::weights() const {
  std::vector<double> w;
  for (const Node& n : nodes_) w.push_back(n.weight);
  return w;
}

std::vector<double> NodeSet::abscissas() const {
  std::vector<double> u;
  for (const Node& n : nodes_) u.push_back(n.abscissa);
  return u;
}

double NodeSet::total_weight() const {
  double s = 0.0;
  for (const Node& n : nodes_) s += n.weight;
  return s;
}

double NodeSet::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    gap = std::min(gap, nodes_[i].abscissa - nodes_[i - 1].abscissa);
  return gap;
}

Membership EqmomState::membership() const {
  if (!(sigma2 > 0.0) || nodes.size() == 0) return Membership::kOutside;
  if (nodes.size() == 1) return Membership::kEquilibrium;
  const double gap = nodes.min_gap();
  const double spread = nodes[nodes.size() - 1].abscissa - nodes[0].abscissa;
  if (spread == 0.0) return Membership::kEquilibrium;
  if (gap > 0.0) return Membership::kInterior;
  return Membership::kOutside;
}

MomentVector qmom_forward(const NodeSet& ns, int k_max) {
  std::vector<double> m(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (const Node& n : ns) {
    double p = n.weight;
    for (int j = 0; j <= k_max; ++j) {
      m[j] += p;
      p *= n.abscissa;
    }
  }
  return MomentVector(std::move(m));
}

namespace {

// Mixture moments accumulated in long double.
std::vector<long double> forward_extended(const EqmomState& w, std::size_t count) {
  std::vector<long double> acc(count, 0.0L);
  const long double s2 = w.sigma2;
  for (const Node& nd : w.nodes) {
    const long double wt = nd.weight;
    const long double u = nd.abscissa;
    long double d2 = 0.0L;
    long double d1 = 1.0L;
    if (count > 0) acc[0] += wt;
    for (std::size_t j = 1; j < count; ++j) {
      const long double d = u * d1 + static_cast<long double>(j - 1) * s2 * d2;
      acc[j] += wt * d;
      d2 = d1;
      d1 = d;
    }
  }
  return acc;
}

}  // namespace

MomentVector eqmom_forward(const EqmomState& w, int k_max) {
  if (w.sigma2 < 0.0) throw DomainError("eqmom_forward: negative variance");
  if (k_max < 0) throw DomainError("eqmom_forward: negative order");
  const auto acc = forward_extended(w, static_cast<std::size_t>(k_max) + 1);
  return MomentVector(std::vector<double>(acc.begin(), acc.end()));
}

MomentVector deconvolve(const MomentVector& m, double sigma2) {
  if (sigma2 < 0.0) throw DomainError("deconvolve: negative variance");
  std::vector<double> out(m.size(), 0.0);
  const double h = -0.5 * sigma2;
  for (int j = 0; j <= m.max_order(); ++j) {
    double c = 1.0;  // j!/(k!(j-2k)!) h^k
    double acc = m[j];
    for (int k = 1; 2 * k <= j; ++k) {
      c *= h * static_cast<double>((j - 2 * k + 2) * (j - 2 * k + 1)) / k;
      acc += c * m[j - 2 * k];
    }
    out[j] = acc;
  }
  return MomentVector(std::move(out));
}

std::vector<double> moment_scale(const MomentVector& m) {
  std::vector<double> s(m.size(), 1.0);
  if (m.size() == 0 || !(m[0] > 0.0)) return s;
  const double rho = m[0];
  const double u = m.size() > 1 ? m[1] / rho : 0.0;
  const double theta = m.size() > 2 ? std::max(m[2] / rho - u * u, 0.0) : 0.0;
  const double speed = std::abs(u) + std::sqrt(theta);
  double p = rho;
  for (std::size_t j = 0; j < m.size(); ++j) {
    s[j] = std::max(std::abs(m[j]), p);
    if (s[j] == 0.0) s[j] = rho;
    p *= speed;
  }
  return s;
}

QmomInversion qmom_invert(const MomentVector& m) {
  if (m.size() == 0 || m.size() % 2 != 0)
    throw DomainError("qmom_invert: need an even, nonzero number of moments, got " +
                      std::to_string(m.size()));
  const int n = static_cast<int>(m.size()) / 2;
  if (!(m[0] > 0.0) || !std::isfinite(m[0]))
    throw RealizabilityError("qmom_invert: M_0 must be positive", 1, m[0]);

  // Upper Cholesky rows 0..n-1 of the (n+1)x(n+1) Hankel matrix; entries
  // beyond M_{2n-1} are never touched.
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n + 1);
  for (int i = 0; i < n; ++i) {
    double d = m[2 * i];
    for (int k = 0; k < i; ++k) d -= r(k, i) * r(k, i);
    if (!(d > 64.0 * std::numeric_limits<double>::epsilon() * std::abs(m[2 * i])) || !std::isfinite(d))
      throw RealizabilityError("qmom_invert: Hankel minor of order " + std::to_string(i + 1) +
                                   " is not positive definite",
                               i + 1, d);
    r(i, i) = std::sqrt(d);
    for (int j = i + 1; j <= n; ++j) {
      double v = m[i + j];
      for (int k = 0; k < i; ++k) v -= r(k, i) * r(k, j);
      r(i, j) = v / r(i, i);
    }
  }

  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) {
    diag(i) = r(i, i + 1) / r(i, i);
    if (i > 0) diag(i) -= r(i - 1, i) / r(i - 1, i - 1);
  }
  for (int i = 0; i + 1 < n; ++i) sub(i) = r(i + 1, i + 1) / r(i, i);

  std::vector<Node> nodes;
  if (n == 1) {
    nodes.push_back({m[0], diag(0)});
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (eig.info() != Eigen::Success)
      throw RealizabilityError("qmom_invert: Jacobi eigensolver failed", n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double v0 = eig.eigenvectors()(0, i);
      nodes.push_back({m[0] * v0 * v0, eig.eigenvalues()(i)});
    }
  }

  QmomInversion out{NodeSet(std::move(nodes)), false};
  double max_abs = 0.0;
  for (const Node& nd : out.nodes) max_abs = std::max(max_abs, std::abs(nd.abscissa));
  out.near_degenerate = out.nodes.min_gap() < 1e-7 * (1.0 + max_abs);
  return out;
}

namespace {

std::vector<long double> scaled_defect(const EqmomState& w, const MomentVector& m,
                                       const std::vector<double>& scale) {
  std::vector<long double> acc = forward_extended(w, m.size());
  for (std::size_t j = 0; j < m.size(); ++j) acc[j] = (acc[j] - m[j]) / scale[j];
  return acc;
}

double residual_of(const EqmomState& w, const MomentVector& m, const std::vector<double>& scale) {
  double r = 0.0;
  for (long double d : scaled_defect(w, m, scale)) r = std::max(r, static_cast<double>(std::fabs(d)));
  return r;
}

struct Probe {
  bool realizable = false;
  double value = 0.0;  // J(sigma2) / scale_{2N}
  NodeSet nodes;
};

// Newton iteration on the full moment system using the analytic Jacobian.
EqmomState polish(EqmomState w, const MomentVector& m, const std::vector<double>& scale,
                  double theta, int steps) {
  double best = residual_of(w, m, scale);
  const int n = static_cast<int>(w.order());
  for (int it = 0; it < steps && best > 0.0; ++it) {
    const std::vector<long double> defect = scaled_defect(w, m, scale);
    Eigen::VectorXd rhs(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) rhs(j) = static_cast<double>(defect[j]);
    Eigen::MatrixXd jac = forward_jacobian(w);
    for (Eigen::Index j = 0; j < jac.rows(); ++j) jac.row(j) /= scale[j];
    const Eigen::VectorXd step = jac.fullPivLu().solve(rhs);
    if (!step.allFinite()) break;
    std::vector<Node> nodes;
    bool valid = true;
    for (int i = 0; i < n; ++i) {
      const Node old = w.nodes[i];
      const Node nd{old.weight - step(2 * i), old.abscissa - step(2 * i + 1)};
      if (!(nd.weight > 0.0)) valid = false;
      nodes.push_back(nd);
    }
    const double s2 = w.sigma2 - step(2 * n);
    if (!valid || s2 < 0.0 || s2 > theta) break;
    EqmomState trial{NodeSet(std::move(nodes)), s2};
    const double res = residual_of(trial, m, scale);
    if (!(res < best)) break;
    best = res;
    w = std::move(trial);
  }
  return w;
}

}  // namespace

EqmomInversion eqmom_invert(const MomentVector& m, const EqmomInvertOptions& opts) {
  if (m.size() < 3 || m.size() % 2 != 1)
    throw DomainError("eqmom_invert: need 2N+1 moments with N >= 1, got " + std::to_string(m.size()));
  const int n = static_cast<int>(m.size()) / 2;
  const double rho = m[0];
  if (!(rho > 0.0)) throw RealizabilityError("eqmom_invert: M_0 must be positive", 1, rho);
  const double u_mean = m[1] / rho;
  const double theta = m[2] / rho - u_mean * u_mean;
  if (!(theta > 0.0))
    throw RealizabilityError("eqmom_invert: temperature M_2/M_0 - (M_1/M_0)^2 must be positive", 2, theta);

  const std::vector<double> scale = moment_scale(m);
  EqmomInversion out;
  out.theta = theta;

  auto equal_weight_state = [&]() {
    std::vector<Node> nodes(static_cast<std::size_t>(n), Node{rho / n, u_mean});
    return EqmomState{NodeSet(std::move(nodes)), theta};
  };

  if (n == 1) {
    out.state = equal_weight_state();
    out.boundary = true;
    out.residual = residual_of(out.state, m, scale);
    return out;
  }

  // Equilibrium boundary: the centres collapse onto one point when the
  // moments deconvolved at sigma2 = theta are those of a single Dirac mass.
  {
    const MomentVector centres = deconvolve(m, theta);
    double dev = 0.0;
    double p = rho;
    for (std::size_t j = 0; j < m.size(); ++j) {
      dev = std::max(dev, std::abs(centres[j] - p) / scale[j]);
      p *= u_mean;
    }
    if (dev <= opts.boundary_tol) {
      out.state = equal_weight_state();
      out.boundary = true;
      out.residual = residual_of(out.state, m, scale);
      return out;
    }
  }

  const MomentVector lower = m.head(2 * static_cast<std::size_t>(n));
  auto probe = [&](double s2) {
    ++out.evaluations;
    Probe p;
    const MomentVector centres = deconvolve(m, s2);
    try {
      QmomInversion q = qmom_invert(centres.head(2 * static_cast<std::size_t>(n)));
      double closure = 0.0;
      for (const Node& nd : q.nodes) closure += nd.weight * std::pow(nd.abscissa, 2 * n);
      p.realizable = true;
      p.value = (centres[2 * n] - closure) / scale[2 * n];
      p.nodes = std::move(q.nodes);
    } catch (const RealizabilityError&) {
      p.realizable = false;
    }
    return p;
  };

  const Probe at_zero = probe(0.0);
  if (!at_zero.realizable) {
    // Propagate the realizability diagnostics of the raw moments.
    qmom_invert(lower);
  }

  std::optional<EqmomState> found;
  double lo = 0.0;
  double hi = theta;
  if (std::abs(at_zero.value) <= 1e-15) {
    found = EqmomState{at_zero.nodes, 0.0};
  } else if (at_zero.value < 0.0) {
    throw InversionError("eqmom_invert: moments lie outside the EQMOM image (J(0) < 0)",
                         at_zero.value, 0.0, 0.0);
  } else {
    // Scan for the first sign change of J. A non-realizable probe marks the
    // barrier; the interval below it is then searched geometrically.
    std::optional<std::pair<double, double>> bracket;
    double last_good = 0.0;
    double barrier = theta;
    for (int k = 1; k < opts.scan_points && !bracket; ++k) {
      const double s2 = theta * k / opts.scan_points;
      const Probe p = probe(s2);
      if (!p.realizable) {
        barrier = s2;
        break;
      }
      if (p.value <= 0.0) bracket = {last_good, s2};
      else last_good = s2;
    }
    if (!bracket) {
      double good = last_good;
      double bad = barrier;
      for (int it = 0; it < 60 && bad - good > 1e-15 * theta; ++it) {
        const double mid = 0.5 * (good + bad);
        const Probe p = probe(mid);
        if (!p.realizable) {
          bad = mid;
        } else if (p.value <= 0.0) {
          bracket = {good, mid};
          break;
        } else {
          good = mid;
        }
      }
      lo = last_good;
      hi = bad;
    }
    if (!bracket)
      throw InversionError("eqmom_invert: no sign change of the closure residual below the realizability barrier",
                           at_zero.value, lo, hi);

    auto f = [&](double s2) {
      const Probe p = probe(s2);
      return p.realizable ? p.value : -1.0;
    };
    std::uintmax_t max_iter = 200;
    const auto root = boost::math::tools::toms748_solve(
        f, bracket->first, bracket->second, boost::math::tools::eps_tolerance<double>(52), max_iter);
    lo = root.first;
    hi = root.second;
    const Probe pl = probe(lo);
    const Probe ph = probe(hi);
    if (ph.realizable && (!pl.realizable || std::abs(ph.value) < std::abs(pl.value)))
      found = EqmomState{ph.nodes, hi};
    else if (pl.realizable)
      found = EqmomState{pl.nodes, lo};
  }

  if (!found) throw InversionError("eqmom_invert: root search failed", 0.0, lo, hi);

  out.state = polish(*found, m, scale, theta, opts.newton_polish_steps);
  out.residual = residual_of(out.state, m, scale);
  if (!(out.residual <= opts.residual_tol))
    throw InversionError("eqmom_invert: residual " + std::to_string(out.residual) + " above tolerance",
                         out.residual, lo, hi);
  return out;
}

Eigen::MatrixXd forward_jacobian(const EqmomState& w) {
  const int n = static_cast<int>(w.order());
  const int k = 2 * n;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(k + 1, k + 1);
  const MomentVector moments = eqmom_forward(w, k);
  for (int i = 0; i < n; ++i) {
    const Node& nd = w.nodes[i];
    const auto d = gaussian_moments(k, nd.abscissa, w.sigma2);
    for (int j = 0; j <= k; ++j) {
      jac(j, 2 * i) = d[j];
      jac(j, 2 * i + 1) = j >= 1 ? j * nd.weight * d[j - 1] : 0.0;
    }
  }
  for (int j = 2; j <= k; ++j) jac(j, k) = 0.5 * j * (j - 1) * moments[j - 2];
  return jac;
}

double forward_jacobian_det(const EqmomState& w) {
  const std::size_t n = w.order();
  double prod_w = 1.0;
  double weighted = 0.0;
  double vandermonde4 = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    prod_w *= w.nodes[i].weight;
    double others = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = w.nodes[i].abscissa - w.nodes[j].abscissa;
      others *= d * d;
      if (j > i) vandermonde4 *= d * d * d * d;
    }
    weighted += w.nodes[i].weight * others;
  }
  return prod_w * weighted * vandermonde4;
}

}  // namespace qbmm
