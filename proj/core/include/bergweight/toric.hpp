#pragma once

// Rotation-invariant metrics on O(1) over P^1 through their Legendre duals.
// For h = e^{-u} h_FS the full potential in the log coordinate
// rho = log(s/(1-s)) is v(rho) = log(1 + e^rho) + u(s), and
//   v*(sigma) = sup_s [ sigma log s + (1 - sigma) log(1 - s) - u(s) ],  sigma in [0,1].
// Along the geodesic v*_t = (1-t) v*_0 + t v*_1, so the initial velocity of u_t is
//   phi(s) = (v*_0 - v*_1)(mu_0(s)),   mu_0(s) = s + s(1-s) u_0'(s).

#include <vector>

#include "bergweight/filtrations.hpp"
#include "bergweight/section_ring.hpp"

namespace bergweight {

inline constexpr int kLegendreGrid = 4096;

/// v* sampled on the uniform grid sigma_j = j/(n-1), convex hull enforced.
struct LegendreDual {
  std::vector<double> sigma;
  std::vector<double> value;

  double operator()(double sigma) const;
};

LegendreDual legendre_dual(const MetricPotential& u, int grid = kLegendreGrid);

/// Throws NotConvex when a sampled second difference of v(rho) is negative
/// beyond rounding, and NotRotationInvariant for non-radial potentials.
void require_convex_potential(const MetricPotential& u);

/// Moment map rho -> v'(rho) written in s. Uses one-sided derivatives of the
/// profile when no analytic derivative is available.
double moment_map(const MetricPotential& u, double s);

/// Symbol of the geodesic transfer operators between Hilb_k(h0) and Hilb_k(h1).
MetricPotential toric_geodesic_phi(const MetricPotential& u0, const MetricPotential& u1);

/// Concave transform of a monomial filtration: the upper concave envelope G of
/// the points (i/(K d), w_K(i)/K) at a large degree K. The symbol of the
/// filtration at a radial metric u0 is G(mu_0(s)).
struct FiltrationSymbol {
  std::vector<double> hull_sigma;  ///< envelope vertices, increasing
  std::vector<double> hull_value;
  int degree = 0;                  ///< K actually used
  double volume = 0.0;             ///< d * integral of G over [0,1]
  Symbol symbol = Symbol::constant(0.0);

  double envelope(double sigma) const;
};

inline constexpr int kSymbolDegree = 1 << 20;

FiltrationSymbol filtration_symbol(const RingFiltration& f, const MetricPotential& u0, int degree = kSymbolDegree);

}  // namespace bergweight
