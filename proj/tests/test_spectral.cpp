#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "qbmm/closure.hpp"
#include "qbmm/errors.hpp"
#include "qbmm/roots.hpp"
#include "qbmm/spectral.hpp"
#include "support.hpp"

using namespace qbmm;
using doctest::Approx;

TEST_SUITE("spectral") {
  TEST_CASE("geometric_multiplicity examples") {
    CHECK(geometric_multiplicity(Eigen::MatrixXd::Identity(3, 3), 1.0) == 3);
    Eigen::MatrixXd jordan(2, 2);
    jordan << 0, 1, 0, 0;
    CHECK(geometric_multiplicity(jordan, 0.0) == 1);
    CHECK(geometric_multiplicity(Eigen::MatrixXd::Identity(3, 3), 2.0) == 0);
    const NodeSet ns{{0.4, -0.8}, {0.6, 1.1}};
    const Eigen::MatrixXd a = companion_matrix(closure_coeffs_qmom(ns));
    for (const Node& nd : ns) CHECK(geometric_multiplicity(a, nd.abscissa) == 1);
  }

  TEST_CASE("analyze_eqmom examples") {
    const SpectralReport r = analyze_eqmom(EqmomState{NodeSet{{1.0, 0.0}}, 1.0});
    REQUIRE(r.eigenvalues.size() == 3);
    CHECK(r.eigenvalues[0] == Approx(-std::sqrt(3.0)).epsilon(1e-14));
    CHECK(std::abs(r.eigenvalues[1]) < 1e-14);
    CHECK(r.eigenvalues[2] == Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r.min_gap == Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r.all_real);
    CHECK(r.strictly_hyperbolic);
    CHECK(r.defects.empty());

    std::mt19937_64 rng(501);
    for (int t = 0; t < 50; ++t) {
      const EqmomState w = test::random_interior(rng, 1, 1e-3, 10.0);
      const double u = w.nodes[0].abscissa, s = std::sqrt(w.sigma2);
      const SpectralReport q = analyze_eqmom(w);
      REQUIRE(q.eigenvalues.size() == 3);
      CHECK(std::abs(q.eigenvalues[0] - (u - std::sqrt(3.0) * s)) <= 1e-10 * (1.0 + std::abs(u) + s));
      CHECK(std::abs(q.eigenvalues[1] - u) <= 1e-10 * (1.0 + std::abs(u) + s));
      CHECK(std::abs(q.eigenvalues[2] - (u + std::sqrt(3.0) * s)) <= 1e-10 * (1.0 + std::abs(u) + s));
    }

    CHECK_THROWS_AS(analyze_eqmom(EqmomState{NodeSet{{1.0, 0.0}}, 0.0}), DomainError);
  }

  TEST_CASE("gaps shrink as sigma2 goes to zero") {
    EqmomState w{NodeSet{{0.5, -1.0}, {0.5, 1.0}}, 1.0};
    double last = analyze_eqmom(w).min_gap;
    for (double s2 : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
      w.sigma2 = s2;
      const SpectralReport r = analyze_eqmom(w);
      CHECK(r.strictly_hyperbolic);
      CHECK(r.min_gap < last);
      last = r.min_gap;
    }
    CHECK(last < 1e-2);
  }

  TEST_CASE("eqmom is strictly hyperbolic on random states") {
    std::mt19937_64 rng(502);
    for (int t = 0; t < 200; ++t) {
      const int n = 1 + t % 4;
      const EqmomState w = test::random_interior(rng, n, 1e-3, 10.0);
      const SpectralReport r = analyze_eqmom(w);
      CHECK(r.all_real);
      CHECK(r.eigenvalues.size() == static_cast<std::size_t>(2 * n + 1));
      CHECK(r.complex_eigenvalues.empty());
      CHECK(r.min_gap > 0.0);
      CHECK(r.strictly_hyperbolic == (r.min_gap > r.gap_tol));
    }
  }

  TEST_CASE("roots of c' interlace the roots of c") {
    std::mt19937_64 rng(503);
    for (int t = 0; t < 100; ++t) {
      const int n = 1 + t % 4;
      const EqmomState w = test::random_interior(rng, n, 1e-2, 4.0, 0.2);
      const auto lam = analyze_eqmom(w).eigenvalues;
      const auto crit = real_roots(char_poly_eqmom(w).derivative());
      REQUIRE(crit.size() == lam.size() - 1);
      for (std::size_t k = 0; k < crit.size(); ++k) {
        CHECK(crit[k].multiplicity == 1);
        CHECK(lam[k] < crit[k].value);
        CHECK(crit[k].value < lam[k + 1]);
      }
    }
  }

  TEST_CASE("analyze_qmom examples") {
    const SpectralReport r = analyze_qmom(NodeSet{{0.5, -1.0}, {0.5, 1.0}});
    CHECK_FALSE(r.strictly_hyperbolic);
    REQUIRE(r.defects.size() == 2);
    CHECK(r.defects[0].eigenvalue == Approx(-1.0));
    CHECK(r.defects[0].algebraic == 2);
    CHECK(r.defects[0].geometric == 1);
    CHECK(r.defects[1].eigenvalue == Approx(1.0));
    CHECK(r.defects[1].algebraic == 2);
    CHECK(r.defects[1].geometric == 1);

    const SpectralReport one = analyze_qmom(NodeSet{{1.0, 0.0}});
    REQUIRE(one.defects.size() == 1);
    CHECK(one.defects[0].eigenvalue == 0.0);
    CHECK(one.defects[0].algebraic == 2);
    CHECK(one.defects[0].geometric == 1);
  }

  TEST_CASE("qmom is defective at every node") {
    std::mt19937_64 rng(504);
    for (int t = 0; t < 100; ++t) {
      const int n = 1 + t % 3;
      const NodeSet ns = test::random_nodes(rng, n);
      const SpectralReport r = analyze_qmom(ns);
      CHECK_FALSE(r.strictly_hyperbolic);
      REQUIRE(r.defects.size() == ns.size());
      REQUIRE(r.eigenvalues.size() == 2 * ns.size());
      for (std::size_t i = 0; i < ns.size(); ++i) {
        CHECK(std::abs(r.defects[i].eigenvalue - ns[i].abscissa) <= 1e-9);
        CHECK(r.defects[i].algebraic == 2);
        CHECK(r.defects[i].geometric == 1);
        CHECK(r.defects[i].geometric <= r.defects[i].algebraic);
      }
    }
  }

  TEST_CASE("qmom right eigenvectors are Vandermonde columns") {
    std::mt19937_64 rng(505);
    for (int t = 0; t < 50; ++t) {
      const int n = 1 + t % 3;
      const NodeSet ns = test::random_nodes(rng, n, 0.2);
      const Eigen::MatrixXd a = companion_matrix(closure_coeffs_qmom(ns));
      for (const Node& nd : ns) {
        const double lam = nd.abscissa;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a - lam * Eigen::MatrixXd::Identity(2 * n, 2 * n), Eigen::ComputeFullV);
        Eigen::VectorXd v = svd.matrixV().col(2 * n - 1);
        v /= v[0];
        for (int k = 0; k < 2 * n; ++k)
          CHECK(std::abs(v[k] - std::pow(lam, k)) <= 1e-7 * std::max(1.0, std::pow(std::abs(lam), k)));
        Eigen::VectorXd vdm(2 * n);
        for (int k = 0; k < 2 * n; ++k) vdm[k] = std::pow(lam, k);
        CHECK((a * vdm - lam * vdm).norm() <= 1e-10 * vdm.norm() * (1.0 + a.norm()));
      }
    }
  }
}
