#include "sphlab/sphere_harmonics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphlab {

namespace {

constexpr double kInvSqrt4Pi = 0.28209479177387814347403972578038629;

std::size_t tri(int k, int j) { return static_cast<std::size_t>(k * (k + 1) / 2 + j); }

}  // namespace

UnitVec3 UnitVec3::from_cartesian(double x, double y, double z) {
  const double n2 = x * x + y * y + z * z;
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::domain_error("UnitVec3: cannot normalize a zero or non-finite vector");
  }
  // Already unit to rounding: keep the bits so stored nodes round-trip.
  if (std::abs(n2 - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    return UnitVec3(x, y, z);
  }
  const double n = std::sqrt(n2);
  return UnitVec3(x / n, y / n, z / n);
}

UnitVec3 UnitVec3::from_angles(double theta, double phi) {
  const double s = std::sin(theta);
  return from_cartesian(s * std::cos(phi), s * std::sin(phi), std::cos(theta));
}

double UnitVec3::theta() const { return std::atan2(std::hypot(x_, y_), z_); }

double UnitVec3::phi() const { return std::atan2(y_, x_); }

double UnitVec3::geodesic_distance(const UnitVec3& o) const {
  const double cx = y_ * o.z_ - z_ * o.y_;
  const double cy = z_ * o.x_ - x_ * o.z_;
  const double cz = x_ * o.y_ - y_ * o.x_;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot(o));
}

SHIndex SHIndex::from_flat(std::size_t i) {
  const int k = static_cast<int>(std::sqrt(static_cast<double>(i)));
  int deg = k;
  while (static_cast<std::size_t>(deg * deg) > i) --deg;
  while (static_cast<std::size_t>((deg + 1) * (deg + 1)) <= i) ++deg;
  return SHIndex{deg, static_cast<int>(i) - deg * deg - deg};
}

void normalized_legendre(int max_degree, double cos_theta, double sin_theta,
                         std::span<double> out) {
  out[0] = kInvSqrt4Pi;
  for (int j = 1; j <= max_degree; ++j) {
    out[tri(j, j)] = std::sqrt((2.0 * j + 1.0) / (2.0 * j)) * sin_theta * out[tri(j - 1, j - 1)];
  }
  for (int j = 0; j < max_degree; ++j) {
    out[tri(j + 1, j)] = std::sqrt(2.0 * j + 3.0) * cos_theta * out[tri(j, j)];
  }
  for (int j = 0; j <= max_degree; ++j) {
    for (int k = j + 2; k <= max_degree; ++k) {
      const double kk = k, jj = j;
      const double a = std::sqrt((4.0 * kk * kk - 1.0) / (kk * kk - jj * jj));
      const double b =
          std::sqrt(((kk - 1.0) * (kk - 1.0) - jj * jj) / (4.0 * (kk - 1.0) * (kk - 1.0) - 1.0));
      out[tri(k, j)] = a * (cos_theta * out[tri(k - 1, j)] - b * out[tri(k - 2, j)]);
    }
  }
}

void eval_real_sh_all(int max_degree, const UnitVec3& p, std::span<double> out) {
  const double s = std::hypot(p.x(), p.y());
  std::vector<double> leg(tri(max_degree + 1, 0));
  normalized_legendre(max_degree, p.z(), s, leg);

  // cos(j phi), sin(j phi) from the unit (x, y)/s direction.
  const double cp = s > 0.0 ? p.x() / s : 1.0;
  const double sp = s > 0.0 ? p.y() / s : 0.0;
  double c_prev = 1.0, s_prev = 0.0;
  for (int k = 0; k <= max_degree; ++k) out[SHIndex{k, 0}.flat()] = leg[tri(k, 0)];
  for (int j = 1; j <= max_degree; ++j) {
    const double cj = c_prev * cp - s_prev * sp;
    const double sj = s_prev * cp + c_prev * sp;
    c_prev = cj;
    s_prev = sj;
    for (int k = j; k <= max_degree; ++k) {
      const double v = std::numbers::sqrt2 * leg[tri(k, j)];
      out[SHIndex{k, j}.flat()] = v * cj;
      out[SHIndex{k, -j}.flat()] = v * sj;
    }
  }
}

std::vector<double> eval_real_sh_all(int max_degree, const UnitVec3& p) {
  std::vector<double> out(sh_count(max_degree));
  eval_real_sh_all(max_degree, p, out);
  return out;
}

double eval_real_sh(SHIndex idx, const UnitVec3& p) {
  if (!idx.valid()) {
    throw std::domain_error("eval_real_sh: invalid index (k=" + std::to_string(idx.degree) +
                            ", j=" + std::to_string(idx.order) + ")");
  }
  std::vector<double> all(sh_count(idx.degree));
  eval_real_sh_all(idx.degree, p, all);
  return all[idx.flat()];
}

void eval_real_sh_derivs(int max_degree, double theta, double phi, std::span<double> value,
                         std::span<double> d_theta, std::span<double> d_phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  // mu(k, k+1) = 0 closes the derivative recurrence at j = k.
  std::vector<double> leg(tri(max_degree + 1, 0));
  normalized_legendre(max_degree, ct, st, leg);
  auto mu = [&](int k, int j) { return (j > k) ? 0.0 : leg[tri(k, j)]; };

  for (int k = 0; k <= max_degree; ++k) {
    const double kk = k;
    for (int j = 0; j <= k; ++j) {
      const double jj = j;
      double dmu;
      if (j == 0) {
        dmu = -std::sqrt(kk * (kk + 1.0)) * mu(k, 1);
      } else {
        dmu = 0.5 * (std::sqrt((kk + jj) * (kk - jj + 1.0)) * mu(k, j - 1) -
                     std::sqrt((kk + jj + 1.0) * (kk - jj)) * mu(k, j + 1));
      }
      if (j == 0) {
        const std::size_t i = SHIndex{k, 0}.flat();
        value[i] = mu(k, 0);
        d_theta[i] = dmu;
        d_phi[i] = 0.0;
        continue;
      }
      const double cj = std::cos(jj * phi), sj = std::sin(jj * phi);
      const double v = std::numbers::sqrt2 * mu(k, j);
      const double dv = std::numbers::sqrt2 * dmu;
      const std::size_t ic = SHIndex{k, j}.flat();
      const std::size_t is = SHIndex{k, -j}.flat();
      value[ic] = v * cj;
      value[is] = v * sj;
      d_theta[ic] = dv * cj;
      d_theta[is] = dv * sj;
      d_phi[ic] = -jj * v * sj;
      d_phi[is] = jj * v * cj;
    }
  }
}

int restricted_poly_dim(int m) { return m <= 0 ? 0 : m * m + 2 * m; }

double laplace_eigenvalue(int k) { return static_cast<double>(k) * (k + 1.0); }

}  // namespace sphlab
