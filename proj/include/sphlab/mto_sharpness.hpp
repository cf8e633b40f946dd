#pragma once

#include <optional>
#include <vector>

#include "sphlab/cubature.hpp"
#include "sphlab/sphere_quadrature.hpp"

namespace sphlab {

/// Radii of the logarithmic cone profile (radians) and its offset b.
struct ConeProfile {
  double eps;
  double delta;
  double b = 0.0;
};

/// phi_{eps,b}(t):
///   2 log(delta/eps) + b   for t < eps
///   2 log(delta/t) + b     for eps <= t < delta
///   b (2 - t/delta)        for delta <= t < 2 delta
///   0                      beyond.
/// Throws std::invalid_argument unless 0 < eps < delta.
double phi(double t, const ConeProfile& profile);

/// Smooth bump exp(1 - 1/(1 - s^2)), s = dist(x, center) / radius, zero for
/// s >= 1. Equals 1 at the center.
struct BumpFunction {
  UnitVec3 center;
  double radius = 0.0;

  double operator()(const UnitVec3& x) const;
  double radial(double r) const;
};

/// Default cap radius: 0.2 times the minimal pairwise node distance, capped
/// at 0.2 rad (keeps the 2delta-caps disjoint with room in between).
double default_delta(const CubatureFormula& f);

/// Bump centered at the point farthest from every node, with radius
/// 0.9 * (that distance - 2 delta). Throws std::invalid_argument when no
/// such point clears the 2delta-caps.
BumpFunction default_bump(const CubatureFormula& f, double delta);

/// The concentrating profile v(x) = sum_i phi_{eps, log(nu_i)/2}(dist(x, x_i)).
/// Zero-weight nodes are dropped on construction.
class ConeField {
public:
  /// Throws std::invalid_argument if 0 < eps < delta fails or two 2delta-caps
  /// touch; the message names the offending node pair.
  ConeField(const CubatureFormula& f, double eps, double delta);

  double eps() const { return eps_; }
  double delta() const { return delta_; }
  const std::vector<UnitVec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  double operator()(const UnitVec3& x) const;
  /// The radial profile of node i: phi_{eps, log(nu_i)/2}(r).
  double profile(std::size_t i, double r) const;

  /// 2pi int_0^{2delta} (e^{2 phi_i(r)} - 1) P_k(cos r) sin r dr: by
  /// Funk-Hecke, the integral of (e^{2v} - 1) Y against the cap of node i is
  /// Y(x_i) times this.
  double cap_excess_moment(std::size_t i, int k, double rel_tol = 1e-13) const;

  /// Integral of e^{2v} over the sphere.
  double mass(double rel_tol = 1e-13) const;

private:
  std::vector<UnitVec3> nodes_;
  std::vector<double> weights_;
  double eps_;
  double delta_;
};

/// v sampled on a grid.
SphGridFunction build_v(const CubatureFormula& f, double eps, double delta, GridPtr grid);

/// Resolution knobs for the semi-analytic integrals.
struct SharpnessQuadrature {
  int grid_degree = 64;        // band limit of the global grid
  int bump_radial_nodes = 96;  // Gauss-Legendre nodes across the bump support
  double radial_rel_tol = 1e-13;

  SharpnessQuadrature refined() const {
    return {2 * grid_degree, 2 * bump_radial_nodes, radial_rel_tol};
  }
};

/// Gram matrix [int eta^2 Y_p Y_q] over all harmonics of degree <= m (flat
/// order, including the constant), by polar quadrature on the bump support.
std::vector<double> bump_gram(const BumpFunction& eta, int m, int radial_nodes);

/// Solves sum_j beta_j int eta^2 Y_j Y_k = -int e^{2v} Y_k for the
/// m^2 + 2m harmonics of degree 1..m. Throws std::runtime_error when the Gram
/// matrix is not positive definite or its condition number exceeds 1e12.
std::vector<double> correction_coefficients(const ConeField& v, int m, const BumpFunction& eta,
                                            const SharpnessQuadrature& quad = {});

/// e^{2u} = e^{2v} + eta^2 sum_j beta_j Y_j + c1 log(1/eps), plus everything
/// needed to integrate it.
class SharpnessTestFunction {
public:
  SharpnessTestFunction(ConeField v, int m, BumpFunction eta, std::vector<double> beta,
                        double c1, SharpnessQuadrature quad);

  const ConeField& cone() const { return v_; }
  int degree() const { return m_; }
  const BumpFunction& bump() const { return eta_; }
  const std::vector<double>& beta() const { return beta_; }
  double c1() const { return c1_; }
  double eps() const { return v_.eps(); }
  double delta() const { return v_.delta(); }
  /// c1 log(1/eps).
  double floor_constant() const;
  const SharpnessQuadrature& quadrature() const { return quad_; }
  const GridPtr& grid() const { return grid_; }
  /// u sampled on the grid.
  const SphGridFunction& samples() const { return *u_; }

  /// eta^2 sum_j beta_j Y_j.
  double correction(const UnitVec3& x) const;
  double exp2u(const UnitVec3& x) const;
  double value(const UnitVec3& x) const;
  /// The part of u that is smooth on the whole sphere:
  /// log(1 + c1 log(1/eps) + correction) / 2. Equals u outside the 2delta-caps.
  double smooth_part(const UnitVec3& x) const;

private:
  ConeField v_;
  int m_;
  BumpFunction eta_;
  std::vector<double> beta_;
  double c1_;
  SharpnessQuadrature quad_;
  GridPtr grid_;
  std::optional<SphGridFunction> u_;
};

/// Picks c1 = 1 + max(0, max_grid(-correction) / log(1/eps)) and assembles u.
/// If eta is not given, default_bump is used.
SharpnessTestFunction build_u(const CubatureFormula& f, double eps, double delta, int m,
                              std::optional<BumpFunction> eta = std::nullopt,
                              const SharpnessQuadrature& quad = {});

/// sum_i 8pi int_eps^delta r^-10 sin r / (c1 log(1/eps) / (nu_i delta^4) + r^-4)^2 dr,
/// the energy of u inside the delta-caps. Throws std::runtime_error if the
/// quadrature does not converge.
double radial_energy(const CubatureFormula& f, double eps, double delta, double c1);

/// int e^{2u} Y_q over degree 1..m, recomputed at the given resolution.
std::vector<double> constraint_moments(const SharpnessTestFunction& u,
                                       const SharpnessQuadrature& quad);

struct FunctionalReport {
  double log_mass = 0.0;  // log int e^{2u}
  double energy = 0.0;    // int |grad u|^2
  double mean = 0.0;      // average of u
  double max_moment_residual = 0.0;
  double ratio = 0.0;     // log_mass / energy
};

/// Semi-analytic evaluation: radial integrals in the 2delta-caps, the global
/// grid for the smooth remainder.
FunctionalReport functional_report(const SharpnessTestFunction& u);

struct SweepRow {
  double eps = 0.0;
  double delta = 0.0;
  int num_nodes = 0;
  int degree = 0;
  FunctionalReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Least-squares fits against log(1/eps).
  double log_mass_slope = 0.0;
  double log_mass_intercept = 0.0;
  double energy_slope = 0.0;
  double energy_intercept = 0.0;
  /// log_mass_slope / energy_slope: the implied inequality constant.
  double implied_constant = 0.0;
};

/// Builds u for each eps (strictly decreasing, nonempty) and fits slopes.
/// delta <= 0 selects default_delta. Throws std::invalid_argument on a bad
/// eps list.
SweepResult sharpness_sweep(const CubatureFormula& f, const std::vector<double>& eps_list,
                            double delta, int m, std::optional<BumpFunction> eta = std::nullopt,
                            const SharpnessQuadrature& quad = {});

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  bool constraints_met = false;
};

/// log int e^{2(u - mean u)} versus a ||grad u||^2 + c for a grid-sampled u;
/// the energy comes from the harmonic expansion to the grid band limit.
/// constraints_met: every degree 1..m moment of e^{2u} is within
/// moment_tol * int e^{2u}. Pure evaluation.
InequalityCheck verify_inequality(const SphGridFunction& u, double a, double c, int m,
                                  double moment_tol = 1e-9);

/// Same comparison using the semi-analytic functional_report of u.
InequalityCheck verify_inequality(const SharpnessTestFunction& u, double a, double c,
                                  double moment_tol = 1e-9);

}  // namespace sphlab
