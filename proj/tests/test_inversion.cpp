#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>

#include "qbmm/errors.hpp"
#include "qbmm/gaussian.hpp"
#include "qbmm/inversion.hpp"
#include "support.hpp"

using namespace qbmm;
using doctest::Approx;

namespace {

void check_moments(const MomentVector& got, std::initializer_list<double> want, double tol = 1e-14) {
  REQUIRE(got.size() == want.size());
  std::size_t j = 0;
  for (double w : want) {
    CHECK(std::abs(got[j] - w) <= tol * std::max(1.0, std::abs(w)));
    ++j;
  }
}

void check_nodes(const NodeSet& got, std::initializer_list<Node> want, double tol) {
  REQUIRE(got.size() == want.size());
  std::size_t i = 0;
  for (const Node& w : want) {
    CHECK(got[i].weight == Approx(w.weight).epsilon(tol));
    CHECK(std::abs(got[i].abscissa - w.abscissa) <= tol * std::max(1.0, std::abs(w.abscissa)));
    ++i;
  }
}

}  // namespace

TEST_SUITE("inversion") {
  TEST_CASE("NodeSet is canonical") {
    const NodeSet ns{{0.7, 2.0}, {0.3, -0.5}};
    CHECK(ns[0].abscissa == -0.5);
    CHECK(ns[1].weight == 0.7);
    CHECK(ns.total_weight() == Approx(1.0));
    CHECK(ns.min_gap() == Approx(2.5));
    CHECK_THROWS_AS((NodeSet{{0.0, 1.0}}), DomainError);
    CHECK_THROWS_AS((NodeSet{{-1.0, 1.0}}), DomainError);
  }

  TEST_CASE("membership") {
    CHECK((EqmomState{NodeSet{{0.5, -1.0}, {0.5, 1.0}}, 0.25}.membership()) == Membership::kInterior);
    CHECK((EqmomState{NodeSet{{0.5, 1.0}, {0.5, 1.0}}, 0.25}.membership()) == Membership::kEquilibrium);
    CHECK((EqmomState{NodeSet{{1.0, 0.3}}, 0.25}.membership()) == Membership::kEquilibrium);
    CHECK((EqmomState{NodeSet{{0.5, -1.0}, {0.5, 1.0}}, 0.0}.membership()) == Membership::kOutside);
    CHECK((EqmomState{NodeSet{{0.3, -1.0}, {0.3, -1.0}, {0.4, 1.0}}, 0.5}.membership()) == Membership::kOutside);
  }

  TEST_CASE("qmom_forward examples") {
    check_moments(qmom_forward(NodeSet{{1.0, 0.0}}, 1), {1.0, 0.0});
    check_moments(qmom_forward(NodeSet{{0.5, -1.0}, {0.5, 1.0}}, 3), {1.0, 0.0, 1.0, 0.0});
    check_moments(qmom_forward(NodeSet{{0.3, -0.5}, {0.7, 2.0}}, 3), {1.0, 1.25, 2.875, 5.5625});
  }

  TEST_CASE("qmom_invert examples") {
    check_nodes(qmom_invert(MomentVector{1.0, 0.0}).nodes, {{1.0, 0.0}}, 1e-14);
    check_nodes(qmom_invert(MomentVector{1.0, 0.0, 1.0, 0.0}).nodes, {{0.5, -1.0}, {0.5, 1.0}}, 1e-13);
    check_nodes(qmom_invert(MomentVector{1.0, 1.25, 2.875, 5.5625}).nodes, {{0.3, -0.5}, {0.7, 2.0}}, 1e-12);
  }

  TEST_CASE("qmom_invert rejects non-realizable moments") {
    try {
      qmom_invert(MomentVector{1.0, 0.0, -1.0, 0.0});
      FAIL("expected RealizabilityError");
    } catch (const RealizabilityError& e) {
      CHECK(e.minor_order() == 2);
      CHECK(e.pivot() <= 0.0);
    }
    // M_2 M_0 = M_1^2: a single atom, second minor vanishes
    CHECK_THROWS_AS(qmom_invert(MomentVector{1.0, 1.0, 1.0, 1.0}), RealizabilityError);
    CHECK_THROWS_AS(qmom_invert(MomentVector{-1.0, 0.0}), RealizabilityError);
    CHECK_THROWS_AS(qmom_invert(MomentVector{1.0, 0.0, 1.0}), DomainError);
  }

  TEST_CASE("qmom_invert flags near-degenerate nodes") {
    const NodeSet ns{{0.5, 1.0}, {0.5, 1.0 + 1e-9}, {1.0, -1.0}};
    const auto m = qmom_forward(ns, 5);
    bool flagged = false;
    try {
      flagged = qmom_invert(m).near_degenerate;
    } catch (const RealizabilityError&) {
      flagged = true;  // the collision may already break strict positivity
    }
    CHECK(flagged);
    CHECK_FALSE(qmom_invert(qmom_forward(NodeSet{{0.5, -1.0}, {0.5, 1.0}}, 3)).near_degenerate);
  }

  TEST_CASE("qmom round trip") {
    auto round_trip = [](const NodeSet& ns) {
      const NodeSet back = qmom_invert(qmom_forward(ns, 2 * static_cast<int>(ns.size()) - 1)).nodes;
      REQUIRE(back.size() == ns.size());
      std::vector<double> a, b;
      for (std::size_t i = 0; i < ns.size(); ++i) {
        a.insert(a.end(), {back[i].weight, back[i].abscissa});
        b.insert(b.end(), {ns[i].weight, ns[i].abscissa});
      }
      return test::normwise_rel(a, b);
    };
    std::mt19937_64 rng(301);
    for (int t = 0; t < 300; ++t) CHECK(round_trip(test::random_nodes(rng, 1 + t % 4, 0.5)) <= 1e-10);

    // Tight gaps: bounded by the conditioning of the forward map.
    for (int t = 0; t < 300; ++t) {
      const int n = 1 + t % 4;
      const NodeSet ns = test::random_nodes(rng, n);
      Eigen::MatrixXd jac(2 * n, 2 * n);
      for (int j = 0; j < 2 * n; ++j)
        for (int i = 0; i < n; ++i) {
          jac(j, 2 * i) = std::pow(ns[i].abscissa, j);
          jac(j, 2 * i + 1) = j == 0 ? 0.0 : ns[i].weight * j * std::pow(ns[i].abscissa, j - 1);
        }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
      const double cond = svd.singularValues()(0) / svd.singularValues()(2 * n - 1);
      CHECK(round_trip(ns) <= 4.0 * cond * std::numeric_limits<double>::epsilon());
    }
  }

  TEST_CASE("eqmom_forward examples") {
    check_moments(eqmom_forward(EqmomState{NodeSet{{1.0, 0.0}}, 1.0 / 3.0}, 2), {1.0, 0.0, 1.0 / 3.0});
    check_moments(eqmom_forward(EqmomState{NodeSet{{0.5, -1.0}, {0.5, 1.0}}, 0.25}, 4),
                  {1.0, 0.0, 1.25, 0.0, 2.6875});
    std::mt19937_64 rng(302);
    for (int t = 0; t < 20; ++t) {
      EqmomState w = test::random_interior(rng, 1 + t % 3);
      w.sigma2 = 0.0;
      const auto a = eqmom_forward(w, 7), b = qmom_forward(w.nodes, 7);
      for (int j = 0; j <= 7; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-15 * std::max(1.0, std::abs(b[j])));
    }
    CHECK_THROWS_AS(eqmom_forward(EqmomState{NodeSet{{1.0, 0.0}}, -0.1}, 2), DomainError);
  }

  TEST_CASE("deconvolve examples") {
    const MomentVector m{1.0, 0.3, 1.25, 0.7, 2.6875};
    CHECK(deconvolve(m, 0.0) == m);
    check_moments(deconvolve(MomentVector{1.0, 0.0, 1.25, 0.0, 2.6875}, 0.25), {1.0, 0.0, 1.0, 0.0, 1.0});
    // Maxwellian moments deconvolved at theta collapse to rho U^j
    const double rho = 1.7, u = -0.4, th = 0.6;
    std::vector<double> mx;
    for (int j = 0; j <= 6; ++j) mx.push_back(rho * gaussian_moment(j, u, th));
    const MomentVector d = deconvolve(MomentVector(mx), th);
    for (int j = 0; j <= 6; ++j) CHECK(d[j] == Approx(rho * std::pow(u, j)).epsilon(1e-12));
  }

  TEST_CASE("deconvolution identity") {
    std::mt19937_64 rng(303);
    for (int t = 0; t < 200; ++t) {
      const int n = 1 + t % 3;
      const EqmomState w = test::random_interior(rng, n);
      const auto lhs = deconvolve(eqmom_forward(w, 2 * n), w.sigma2);
      const auto rhs = qmom_forward(w.nodes, 2 * n);
      const auto scale = moment_scale(eqmom_forward(w, 2 * n));
      for (int j = 0; j <= 2 * n; ++j) CHECK(std::abs(lhs[j] - rhs[j]) <= 1e-10 * scale[j]);
    }
  }

  TEST_CASE("eqmom_invert examples") {
    const auto a = eqmom_invert(MomentVector{1.0, 0.0, 1.0 / 3.0});
    check_nodes(a.state.nodes, {{1.0, 0.0}}, 1e-14);
    CHECK(a.state.sigma2 == Approx(1.0 / 3.0).epsilon(1e-14));

    const auto b = eqmom_invert(MomentVector{1.0, 0.0, 1.25, 0.0, 2.6875});
    check_nodes(b.state.nodes, {{0.5, -1.0}, {0.5, 1.0}}, 1e-10);
    CHECK(b.state.sigma2 == Approx(0.25).epsilon(1e-10));
    CHECK_FALSE(b.boundary);

    const auto c = eqmom_invert(MomentVector{1.0, 0.0, 1.0, 0.0, 3.0});
    CHECK(c.boundary);
    check_nodes(c.state.nodes, {{0.5, 0.0}, {0.5, 0.0}}, 1e-14);
    CHECK(c.state.sigma2 == Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("eqmom_invert errors") {
    CHECK_THROWS_AS(eqmom_invert(MomentVector{1.0, 0.0, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(eqmom_invert(MomentVector{1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(eqmom_invert(MomentVector{0.0, 0.0, 1.0}), RealizabilityError);
    CHECK_THROWS_AS(eqmom_invert(MomentVector{1.0, 2.0, 1.0}), RealizabilityError);
    // Hankel form of (1, 0, 1, 0, 0.9) is indefinite: outside the image.
    CHECK_THROWS(eqmom_invert(MomentVector{1.0, 0.0, 1.0, 0.0, 0.9}));
  }

  TEST_CASE("eqmom round trip and sigma2 bound") {
    std::mt19937_64 rng(304);
    for (int t = 0; t < 300; ++t) {
      const int n = 1 + t % 3;
      const EqmomState w = test::random_interior(rng, n);
      const MomentVector m = eqmom_forward(w, 2 * n);
      const EqmomInversion inv = eqmom_invert(m);
      CHECK(inv.residual <= 1e-9);
      CHECK(inv.state.sigma2 >= 0.0);
      CHECK(inv.state.sigma2 <= inv.theta);
      CHECK(test::normwise_rel(test::flatten(inv.state), test::flatten(w)) <= 1e-8);
    }
  }

  TEST_CASE("eqmom_invert on the equilibrium boundary") {
    std::mt19937_64 rng(305);
    std::uniform_real_distribution<double> rr(0.2, 3.0), uu(-2.0, 2.0), tt(0.05, 3.0);
    for (int t = 0; t < 30; ++t) {
      const int n = 1 + t % 4;
      const double rho = rr(rng), u = uu(rng), th = tt(rng);
      std::vector<double> m;
      for (int j = 0; j <= 2 * n; ++j) m.push_back(rho * gaussian_moment(j, u, th));
      const auto inv = eqmom_invert(MomentVector(m));
      CHECK(inv.boundary);
      CHECK(inv.state.sigma2 == Approx(th).epsilon(1e-10));
      for (const Node& nd : inv.state.nodes) {
        CHECK(nd.weight == Approx(rho / n).epsilon(1e-12));
        CHECK(nd.abscissa == Approx(u).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("forward_jacobian") {
    const double w = 0.8, u = -0.6, s2 = 0.3;
    const Eigen::MatrixXd j1 = forward_jacobian(EqmomState{NodeSet{{w, u}}, s2});
    Eigen::Matrix3d want;
    want << 1, 0, 0, u, w, 0, u * u + s2, 2 * w * u, w;
    CHECK((j1 - want).norm() < 1e-15);

    std::mt19937_64 rng(306);
    for (int t = 0; t < 50; ++t) {
      const int n = 1 + t % 3;
      const EqmomState st = test::random_interior(rng, n, 0.05, 2.0);
      const Eigen::MatrixXd jac = forward_jacobian(st);
      auto fwd = [n](const std::vector<double>& x) {
        std::vector<Node> nodes;
        for (int i = 0; i < n; ++i) nodes.push_back({x[2 * i], x[2 * i + 1]});
        return eqmom_forward(EqmomState{NodeSet(nodes), x[2 * n]}, 2 * n).values();
      };
      const auto fd = test::central_jacobian(fwd, test::flatten(st));
      for (int c = 0; c <= 2 * n; ++c)
        for (int r = 0; r <= 2 * n; ++r)
          CHECK(std::abs(jac(r, c) - fd[c][r]) <= 1e-6 * std::max(1.0, std::abs(jac(r, c))));
    }
  }

  TEST_CASE("forward_jacobian_det") {
    CHECK(forward_jacobian_det(EqmomState{NodeSet{{0.7, 1.2}}, 0.4}) == Approx(0.49));
    for (double s2 : {0.01, 0.25, 3.0})
      CHECK(forward_jacobian_det(EqmomState{NodeSet{{0.5, -1.0}, {0.5, 1.0}}, s2}) == Approx(16.0));
    CHECK(forward_jacobian_det(EqmomState{NodeSet{{0.5, 1.0}, {0.5, 1.0}}, 0.3}) == 0.0);

    std::mt19937_64 rng(307);
    for (int t = 0; t < 100; ++t) {
      const EqmomState st = test::random_interior(rng, 2 + t % 2);
      const double numeric = forward_jacobian(st).fullPivLu().determinant();
      CHECK(std::abs(forward_jacobian_det(st) - numeric) <= 1e-8 * std::abs(numeric));
      const double exact = test::forward_jacobian_det_hp(st);
      CHECK(std::abs(forward_jacobian_det(st) - exact) <= 1e-12 * std::abs(exact));
    }
    for (int n = 1; n <= 4; ++n) {
      const EqmomState st = test::random_interior(rng, n, 1e-3, 10.0, 0.01);
      const double exact = test::forward_jacobian_det_hp(st);
      CHECK(std::abs(forward_jacobian_det(st) - exact) <= 1e-12 * std::abs(exact));
    }
  }

  TEST_CASE("moment_scale") {
    const auto s = moment_scale(MomentVector{2.0, 0.0, 2.0, 0.0, 6.0});
    CHECK(s[0] == Approx(2.0));
    CHECK(s[1] == Approx(2.0));
    CHECK(s[4] == Approx(6.0));
  }
}
