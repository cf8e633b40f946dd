#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sphlab {

/// A point on the unit sphere. Construction always normalizes.
class UnitVec3 {
public:
  UnitVec3() = default;  // north pole

  /// Normalizes (x, y, z); throws std::domain_error for the zero vector or
  /// non-finite input.
  static UnitVec3 from_cartesian(double x, double y, double z);
  /// theta is colatitude, phi longitude.
  static UnitVec3 from_angles(double theta, double phi);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  double theta() const;
  double phi() const;

  double dot(const UnitVec3& o) const { return x_ * o.x_ + y_ * o.y_ + z_ * o.z_; }
  /// Great-circle distance in radians.
  double geodesic_distance(const UnitVec3& o) const;

  UnitVec3 operator-() const { return UnitVec3(-x_, -y_, -z_); }

private:
  UnitVec3(double x, double y, double z) : x_(x), y_(y), z_(z) {}

  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 1.0;
};

/// Degree k and order j of a real spherical harmonic, |j| <= k.
struct SHIndex {
  int degree = 0;
  int order = 0;

  bool valid() const { return degree >= 0 && order >= -degree && order <= degree; }
  /// Position in the flat (k, j) ordering k*k + k + j.
  std::size_t flat() const {
    return static_cast<std::size_t>(degree * degree + degree + order);
  }
  static SHIndex from_flat(std::size_t i);

  friend bool operator==(const SHIndex&, const SHIndex&) = default;
};

/// Number of real harmonics with degree <= L.
constexpr std::size_t sh_count(int max_degree) {
  return static_cast<std::size_t>((max_degree + 1) * (max_degree + 1));
}

/// Real orthonormal spherical harmonic Y_{k,j}(p) with respect to the
/// surface measure of total mass 4pi. Cosine harmonics for j > 0, sine
/// harmonics for j < 0, zonal for j = 0; no Condon-Shortley phase.
/// Throws std::domain_error for an invalid index.
double eval_real_sh(SHIndex idx, const UnitVec3& p);

/// All Y_{k,j}(p) with k <= max_degree, in flat order. `out` must hold
/// sh_count(max_degree) values.
void eval_real_sh_all(int max_degree, const UnitVec3& p, std::span<double> out);
std::vector<double> eval_real_sh_all(int max_degree, const UnitVec3& p);

/// Values and angular partial derivatives (d/dtheta, d/dphi) of every
/// Y_{k,j} with k <= max_degree at (theta, phi). All spans sized
/// sh_count(max_degree).
void eval_real_sh_derivs(int max_degree, double theta, double phi, std::span<double> value,
                         std::span<double> d_theta, std::span<double> d_phi);

/// Normalized associated Legendre values lambda_k^j(cos theta) for
/// 0 <= j <= k <= max_degree, stored at k*(k+1)/2 + j. Includes the
/// 1/sqrt(4pi) factor but not the sqrt(2) of the real basis.
void normalized_legendre(int max_degree, double cos_theta, double sin_theta,
                         std::span<double> out);

/// Number of constraint functionals in degree m: m^2 + 2m. Returns 0 for m <= 0.
int restricted_poly_dim(int m);

/// Eigenvalue k(k+1) of -Laplacian on the degree-k harmonics.
double laplace_eigenvalue(int k);

}  // namespace sphlab
