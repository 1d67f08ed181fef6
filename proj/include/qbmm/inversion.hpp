#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace qbmm {

// Velocity moments M_0 .. M_K.
class MomentVector {
 public:
  MomentVector() = default;
  explicit MomentVector(std::vector<double> m) : m_(std::move(m)) {}
  MomentVector(std::initializer_list<double> m) : m_(m) {}

  std::size_t size() const { return m_.size(); }
  int max_order() const { return static_cast<int>(m_.size()) - 1; }
  double operator[](std::size_t j) const { return m_[j]; }
  double& operator[](std::size_t j) { return m_[j]; }
  const std::vector<double>& values() const { return m_; }
  std::vector<double>& values() { return m_; }
  auto begin() const { return m_.begin(); }
  auto end() const { return m_.end(); }

  // Leading moments M_0 .. M_{count-1}.
  MomentVector head(std::size_t count) const;

  bool operator==(const MomentVector&) const = default;

 private:
  std::vector<double> m_;
};

struct Node {
  double weight = 0.0;
  double abscissa = 0.0;
};

// Weighted Dirac nodes. Weights are strictly positive; nodes are kept sorted
// by abscissa.
class NodeSet {
 public:
  NodeSet() = default;
  // Throws DomainError on a nonpositive or non-finite weight.
  explicit NodeSet(std::vector<Node> nodes);
  NodeSet(std::initializer_list<Node> nodes) : NodeSet(std::vector<Node>(nodes)) {}

  std::size_t size() const { return nodes_.size(); }
  const Node& operator[](std::size_t i) const { return nodes_[i]; }
  auto begin() const { return nodes_.begin(); }
  auto end() const { return nodes_.end(); }

  std::vector<double> weights() const;
  std::vector<double> abscissas() const;
  double total_weight() const;
  // Smallest distance between consecutive abscissas; +inf for one node.
  double min_gap() const;

 private:
  std::vector<Node> nodes_;
};

enum class Membership {
  kInterior,     // distinct abscissas, sigma2 > 0
  kEquilibrium,  // all abscissas equal, sigma2 > 0 (every N = 1 state)
  kOutside,      // sigma2 <= 0 or partially coincident abscissas
};

// Gaussian-EQMOM state: N weighted Gaussians sharing one variance.
struct EqmomState {
  NodeSet nodes;
  double sigma2 = 0.0;

  std::size_t order() const { return nodes.size(); }
  Membership membership() const;
};

// M_j = sum_i w_i u_i^j for j = 0..k_max.
MomentVector qmom_forward(const NodeSet& ns, int k_max);

// M_j = sum_i w_i D_j(u_i, sigma2) for j = 0..k_max.
MomentVector eqmom_forward(const EqmomState& w, int k_max);

// Moments of the centres once the common Gaussian kernel is removed,
//   M*_j = sum_k j!/(k!(j-2k)!) (-sigma2/2)^k M_{j-2k}.
MomentVector deconvolve(const MomentVector& m, double sigma2);

// Scale used for relative moment comparisons: max(|M_j|, M_0 (|U| + sqrt(theta))^j).
std::vector<double> moment_scale(const MomentVector& m);

struct QmomInversion {
  NodeSet nodes;
  // Two abscissas closer than 1e-7 (1 + max |u|).
  bool near_degenerate = false;
};

// Recovers N nodes from M_0 .. M_{2N-1} via the Jacobi matrix built from the
// Cholesky factor of the moment Hankel matrix (Golub-Welsch). Throws
// RealizabilityError naming the first leading Hankel minor that is not
// strictly positive, and DomainError for an odd or empty moment count.
QmomInversion qmom_invert(const MomentVector& m);

struct EqmomInversion {
  EqmomState state;
  bool boundary = false;      // equilibrium-boundary representative returned
  double residual = 0.0;      // max_j |M_j(W) - m_j| / scale_j
  double theta = 0.0;         // M_2/M_0 - (M_1/M_0)^2, upper bound on sigma2
  int evaluations = 0;        // residual-function evaluations in the sigma2 search
};

struct EqmomInvertOptions {
  double residual_tol = 1e-9;
  double boundary_tol = 1e-10;
  int scan_points = 48;
  int newton_polish_steps = 3;
};

// Recovers W from M_0 .. M_{2N} by a scalar root search on sigma2 in [0, theta]
// for J(sigma2) = M*_{2N} - sum_i w_i u_i^{2N}, where the nodes come from
// qmom_invert of the deconvolved M*_0 .. M*_{2N-1}. Sigma2 values at which
// the deconvolved moments lose strict realizability act as an upper barrier.
// Inputs on the equilibrium boundary return equal weights M_0/N at M_1/M_0
// with sigma2 = theta. Throws InversionError when the reproduced moments miss
// the input by more than `residual_tol`.
EqmomInversion eqmom_invert(const MomentVector& m, const EqmomInvertOptions& opts = {});

// d M_j / d W with columns ordered (w_1, u_1, ..., w_N, u_N, sigma2), j = 0..2N.
Eigen::MatrixXd forward_jacobian(const EqmomState& w);

// Closed-form determinant of forward_jacobian:
//   (prod w_i) (sum_i w_i prod_{j!=i} (u_i-u_j)^2) prod_{i<j} (u_i-u_j)^4.
double forward_jacobian_det(const EqmomState& w);

}  // namespace qbmm
