#pragma once

#include <vector>

#include "qbmm/polynomial.hpp"

namespace qbmm {

// Normal density with mean `u` and variance `sigma2` (velocity units).
struct GaussianKernel {
  double u = 0.0;
  double sigma2 = 0.0;
};

// j-th raw moment of a Gaussian with mean u and variance sigma2, via
//   D_0 = 1, D_1 = u, D_j = u D_{j-1} + (j-1) sigma2 D_{j-2}.
// sigma2 = 0 gives u^j. Throws DomainError for sigma2 < 0.
double gaussian_moment(int j, double u, double sigma2);

// All raw moments D_0 .. D_{j_max} at once.
std::vector<double> gaussian_moments(int j_max, double u, double sigma2);

// Gaussian smoothing operator on polynomials,
//   smooth(p, theta) = sum_k (theta/2)^k p^{(2k)} / k!.
// Maps u^j to D_j(u, theta); smooth(., -theta) inverts smooth(., theta).
Polynomial smooth(const Polynomial& p, double theta);

enum class HalfLine { kBelow, kAbove };

// Partial moment of the Gaussian over {xi < cut} or {xi > cut}. Seeded with
// erfc and the density at the cut, then advanced by
//   I_j = u I_{j-1} + (j-1) sigma2 I_{j-2} +/- sigma2 cut^{j-1} phi(cut).
// Throws DomainError for sigma2 <= 0.
double half_gaussian_moment(int j, double u, double sigma2, double cut, HalfLine side);

// Partial moments I_0 .. I_{j_max} on one side of the cut.
std::vector<double> half_gaussian_moments(int j_max, double u, double sigma2, double cut,
                                          HalfLine side);

}  // namespace qbmm
