#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "sphlab/sphere_harmonics.hpp"

namespace sphlab {

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendreRule gauss_legendre(int n);

/// Product grid: Gauss-Legendre in cos(theta) times uniform longitude.
/// Node (ring i, column l) is stored at i * n_phi + l. Immutable once built.
class SphereGrid {
public:
  /// Grid for band limit L (1 <= L <= 256): L+1 rings, 2L+1 longitudes.
  /// Products of two degree-L functions integrate exactly, so the exactness
  /// degree is 2L. Throws std::invalid_argument if L is out of range.
  static std::shared_ptr<const SphereGrid> build(int band_limit);

  int band_limit() const { return band_limit_; }
  int exactness_degree() const { return 2 * band_limit_; }
  int n_theta() const { return static_cast<int>(cos_theta_.size()); }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return points_.size(); }

  std::span<const UnitVec3> points() const { return points_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> ring_cos_theta() const { return cos_theta_; }
  std::span<const double> ring_weights() const { return ring_weights_; }
  double phi(int l) const;

private:
  SphereGrid() = default;

  int band_limit_ = 0;
  int n_phi_ = 0;
  std::vector<double> cos_theta_;
  std::vector<double> ring_weights_;  // Gauss-Legendre weights in cos(theta)
  std::vector<UnitVec3> points_;
  std::vector<double> weights_;  // units of area; sum 4pi
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// A real field sampled at the nodes of a SphereGrid.
class SphGridFunction {
public:
  /// Throws std::invalid_argument on size mismatch or non-finite values.
  SphGridFunction(GridPtr grid, std::vector<double> values);

  static SphGridFunction sample(GridPtr grid, const std::function<double(const UnitVec3&)>& f);

  const SphereGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }

private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Real spherical-harmonic coefficients c_{k,j}, 0 <= k <= L, flat order.
class SHCoeffs {
public:
  explicit SHCoeffs(int max_degree);
  SHCoeffs(int max_degree, std::vector<double> coeffs);

  int max_degree() const { return max_degree_; }
  double& operator[](SHIndex i) { return c_[i.flat()]; }
  double operator[](SHIndex i) const { return c_[i.flat()]; }
  std::span<const double> data() const { return c_; }
  std::span<double> data() { return c_; }

private:
  int max_degree_;
  std::vector<double> c_;
};

/// Sum of w_i f_i: the integral over the unit sphere (mass 4pi).
double integrate(const SphGridFunction& f);

/// integrate(f) / 4pi.
double mean_value(const SphGridFunction& f);

/// c_{k,j} = integral of f * Y_{k,j}, evaluated by the grid rule. Throws
/// std::invalid_argument unless the grid exactness is at least 2L.
SHCoeffs sh_analyze(const SphGridFunction& f, int max_degree);

/// Finite harmonic sum of c evaluated at the grid nodes.
SphGridFunction sh_synthesize(const SHCoeffs& c, GridPtr grid);

/// Evaluate the harmonic sum at one point.
double sh_evaluate(const SHCoeffs& c, const UnitVec3& p);

/// Sum over k >= 1 of k(k+1) c_{k,j}^2, i.e. the integral of |grad u|^2.
double dirichlet_energy(const SHCoeffs& c);

/// Spectral Laplacian: analyze to degree L, scale by -k(k+1), synthesize.
SphGridFunction laplacian(const SphGridFunction& f, int max_degree);

}  // namespace sphlab
