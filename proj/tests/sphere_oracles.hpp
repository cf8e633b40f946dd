#pragma once

// Independent reference values used by several test suites.

#include <cmath>
#include <vector>

#include "sphlab/sphere_quadrature.hpp"

namespace sphlab::testing {

/// Integral of x^a y^b z^c over the unit sphere (mass 4pi):
/// 2 G((a+1)/2) G((b+1)/2) G((c+1)/2) / G((a+b+c+3)/2) when all exponents
/// are even, zero otherwise.
inline double monomial_integral(int a, int b, int c) {
  if (a % 2 || b % 2 || c % 2) return 0.0;
  return 2.0 * std::tgamma((a + 1) / 2.0) * std::tgamma((b + 1) / 2.0) *
         std::tgamma((c + 1) / 2.0) / std::tgamma((a + b + c + 3) / 2.0);
}

/// Integral of |grad u|^2 = u_theta^2 + u_phi^2 / sin^2 theta with central
/// differences at the grid nodes (which avoid the poles). For u of degree L
/// on a band-limit-L grid the integrand has degree 2L, so the rule is exact
/// up to the differencing error.
inline double fd_dirichlet_energy(const SHCoeffs& c, const GridPtr& g, double h = 1e-5) {
  std::vector<double> grad2(g->size());
  auto u = [&](double t, double f) { return sh_evaluate(c, UnitVec3::from_angles(t, f)); };
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double t = g->points()[i].theta(), f = g->points()[i].phi();
    const double ut = (u(t + h, f) - u(t - h, f)) / (2 * h);
    const double uf = (u(t, f + h) - u(t, f - h)) / (2 * h);
    grad2[i] = ut * ut + uf * uf / std::pow(std::sin(t), 2);
  }
  return integrate(SphGridFunction(g, grad2));
}

}  // namespace sphlab::testing
