#include "sphlab/mto_sharpness.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "sphlab/radial_quadrature.hpp"

namespace sphlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_radii(double eps, double delta) {
  if (!(eps > 0.0) || !(delta > eps)) {
    throw std::invalid_argument("cone profile needs 0 < eps < delta (eps=" + std::to_string(eps) +
                                ", delta=" + std::to_string(delta) + ")");
  }
}

// Orthonormal tangent frame (e1, e2) at c.
void tangent_frame(const UnitVec3& c, double e1[3], double e2[3]) {
  double a[3] = {1.0, 0.0, 0.0};
  if (std::abs(c.x()) > 0.9) a[0] = 0.0, a[1] = 1.0;
  const double d = a[0] * c.x() + a[1] * c.y() + a[2] * c.z();
  double n[3] = {a[0] - d * c.x(), a[1] - d * c.y(), a[2] - d * c.z()};
  const double nn = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
  for (double& v : n) v /= nn;
  e1[0] = n[0], e1[1] = n[1], e1[2] = n[2];
  e2[0] = c.y() * n[2] - c.z() * n[1];
  e2[1] = c.z() * n[0] - c.x() * n[2];
  e2[2] = c.x() * n[1] - c.y() * n[0];
}

UnitVec3 polar_point(const UnitVec3& c, const double e1[3], const double e2[3], double r,
                     double alpha) {
  const double cr = std::cos(r), sr = std::sin(r);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  return UnitVec3::from_cartesian(cr * c.x() + sr * (ca * e1[0] + sa * e2[0]),
                                  cr * c.y() + sr * (ca * e1[1] + sa * e2[1]),
                                  cr * c.z() + sr * (ca * e1[2] + sa * e2[2]));
}

double min_distance_to(const UnitVec3& p, const std::vector<UnitVec3>& nodes) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& x : nodes) d = std::min(d, p.geodesic_distance(x));
  return d;
}

std::vector<UnitVec3> positive_nodes(const CubatureFormula& f) {
  std::vector<UnitVec3> out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.weights()[i] > 0.0) out.push_back(f.nodes()[i]);
  }
  return out;
}

std::vector<double> positive_weights(const CubatureFormula& f) {
  std::vector<double> out;
  for (double w : f.weights()) {
    if (w > 0.0) out.push_back(w);
  }
  return out;
}

// Integral of g over [0, 2delta] with breakpoints at eps and delta, using
// geometric splitting on [eps, delta] where the profile behaves like r^-4.
double cap_integral(const std::function<double(double)>& g, double eps, double delta,
                    double rel_tol) {
  return integrate_adaptive(g, 0.0, eps, rel_tol) + integrate_geometric(g, eps, delta, rel_tol) +
         integrate_adaptive(g, delta, 2.0 * delta, rel_tol);
}

double cap_energy_inner(double nu, double eps, double delta, double floor_c) {
  // r^-10 / (a + r^-4)^2 rewritten as r^-2 / (1 + a r^4)^2.
  const double a = floor_c / (nu * std::pow(delta, 4));
  auto g = [a](double r) {
    const double q = 1.0 + a * r * r * r * r;
    return std::sin(r) / (r * r * q * q);
  };
  return 8.0 * kPi * integrate_geometric(g, eps, delta, 1e-13);
}

double cap_energy_annulus(double nu, double delta, double floor_c) {
  const double ln_nu = std::log(nu);
  auto g = [=](double r) {
    const double e = std::exp((2.0 - r / delta) * ln_nu);
    const double du = -(ln_nu / delta) * e / (2.0 * (e + floor_c));
    return du * du * std::sin(r);
  };
  return kTwoPi * integrate_adaptive(g, delta, 2.0 * delta, 1e-13);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y,
                           double* intercept) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (x.size() < 2 || den == 0.0) {
    *intercept = std::nan("");
    return std::nan("");
  }
  const double slope = (n * sxy - sx * sy) / den;
  *intercept = (sy - slope * sx) / n;
  return slope;
}

}  // namespace

double phi(double t, const ConeProfile& p) {
  check_radii(p.eps, p.delta);
  if (t < p.eps) return 2.0 * std::log(p.delta / p.eps) + p.b;
  if (t < p.delta) return 2.0 * std::log(p.delta / t) + p.b;
  if (t < 2.0 * p.delta) return p.b * (2.0 - t / p.delta);
  return 0.0;
}

double BumpFunction::radial(double r) const {
  const double s = r / radius;
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double BumpFunction::operator()(const UnitVec3& x) const {
  return radial(center.geodesic_distance(x));
}

double default_delta(const CubatureFormula& f) {
  const auto nodes = positive_nodes(f);
  double dmin = kPi;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      dmin = std::min(dmin, nodes[i].geodesic_distance(nodes[j]));
    }
  }
  return std::min(0.2, 0.2 * dmin);
}

BumpFunction default_bump(const CubatureFormula& f, double delta) {
  const auto nodes = positive_nodes(f);
  // Coarse pass over a Fibonacci lattice, then a shrinking pattern search.
  const int n = 20000;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  UnitVec3 best;
  double best_d = -1.0;
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    const auto p = UnitVec3::from_cartesian(r * std::cos(golden * i), r * std::sin(golden * i), z);
    const double d = min_distance_to(p, nodes);
    if (d > best_d) best_d = d, best = p;
  }
  for (double h = 0.02; h > 1e-9; h *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      double e1[3], e2[3];
      tangent_frame(best, e1, e2);
      for (int k = 0; k < 8; ++k) {
        const auto p = polar_point(best, e1, e2, h, k * kPi / 4.0);
        const double d = min_distance_to(p, nodes);
        if (d > best_d + 1e-15) {
          best_d = d, best = p, improved = true;
          break;
        }
      }
    }
  }
  const double radius = 0.9 * (best_d - 2.0 * delta);
  if (!(radius > 0.0)) {
    throw std::invalid_argument("default_bump: no room for a bump outside the 2delta-caps");
  }
  return BumpFunction{best, radius};
}

ConeField::ConeField(const CubatureFormula& f, double eps, double delta)
    : nodes_(positive_nodes(f)), weights_(positive_weights(f)), eps_(eps), delta_(delta) {
  check_radii(eps, delta);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      if (nodes_[i].geodesic_distance(nodes_[j]) <= 4.0 * delta) {
        throw std::invalid_argument("2delta-caps around nodes " + std::to_string(i) + " and " +
                                    std::to_string(j) + " overlap (delta=" +
                                    std::to_string(delta) + ")");
      }
    }
  }
}

double ConeField::profile(std::size_t i, double r) const {
  return phi(r, ConeProfile{eps_, delta_, 0.5 * std::log(weights_[i])});
}

double ConeField::operator()(const UnitVec3& x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double d = nodes_[i].geodesic_distance(x);
    if (d < 2.0 * delta_) v += profile(i, d);
  }
  return v;
}

double ConeField::cap_excess_moment(std::size_t i, int k, double rel_tol) const {
  const double nu = weights_[i];
  const double d4 = std::pow(delta_, 4);
  const double inner = nu * d4 / std::pow(eps_, 4);
  const double ln_nu = std::log(nu);
  auto pk = [k](double r) { return std::legendre(static_cast<unsigned>(k), std::cos(r)); };
  const double a = integrate_adaptive(
      [&](double r) { return (inner - 1.0) * pk(r) * std::sin(r); }, 0.0, eps_, rel_tol);
  const double b = integrate_geometric(
      [&](double r) { return (nu * d4 / (r * r * r * r) - 1.0) * pk(r) * std::sin(r); }, eps_,
      delta_, rel_tol);
  const double c = integrate_adaptive(
      [&](double r) {
        return (std::exp((2.0 - r / delta_) * ln_nu) - 1.0) * pk(r) * std::sin(r);
      },
      delta_, 2.0 * delta_, rel_tol);
  return kTwoPi * (a + b + c);
}

double ConeField::mass(double rel_tol) const {
  double m = 4.0 * kPi;
  for (std::size_t i = 0; i < nodes_.size(); ++i) m += cap_excess_moment(i, 0, rel_tol);
  return m;
}

SphGridFunction build_v(const CubatureFormula& f, double eps, double delta, GridPtr grid) {
  const ConeField v(f, eps, delta);
  return SphGridFunction::sample(std::move(grid), [&](const UnitVec3& x) { return v(x); });
}

std::vector<double> bump_gram(const BumpFunction& eta, int m, int radial_nodes) {
  const std::size_t n = sh_count(m);
  const int n_alpha = 4 * m + 5;
  std::vector<double> gram(n * n, 0.0);
  const auto rule = gauss_legendre(radial_nodes);
  double e1[3], e2[3];
  tangent_frame(eta.center, e1, e2);
  std::vector<double> y(n);
  for (std::size_t ir = 0; ir < rule.nodes.size(); ++ir) {
    const double r = 0.5 * eta.radius * (rule.nodes[ir] + 1.0);
    const double e = eta.radial(r);
    const double w = 0.5 * eta.radius * rule.weights[ir] * std::sin(r) * e * e * kTwoPi / n_alpha;
    if (w == 0.0) continue;
    for (int ia = 0; ia < n_alpha; ++ia) {
      eval_real_sh_all(m, polar_point(eta.center, e1, e2, r, kTwoPi * ia / n_alpha), y);
      for (std::size_t p = 0; p < n; ++p) {
        const double wp = w * y[p];
        for (std::size_t q = p; q < n; ++q) gram[p * n + q] += wp * y[q];
      }
    }
  }
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < p; ++q) gram[p * n + q] = gram[q * n + p];
  }
  return gram;
}

namespace {

// int e^{2v} Y_q for q = 1 .. (m+1)^2 - 1.
Eigen::VectorXd cone_moments(const ConeField& v, int m, double rel_tol) {
  const std::size_t n = sh_count(m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n - 1));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < v.nodes().size(); ++i) {
    eval_real_sh_all(m, v.nodes()[i], y);
    for (int k = 1; k <= m; ++k) {
      const double radial = v.cap_excess_moment(i, k, rel_tol);
      for (int j = -k; j <= k; ++j) {
        const std::size_t q = SHIndex{k, j}.flat();
        rhs[static_cast<Eigen::Index>(q - 1)] += y[q] * radial;
      }
    }
  }
  return rhs;
}

Eigen::MatrixXd gram_block(const std::vector<double>& gram, int m) {
  const auto n = static_cast<Eigen::Index>(sh_count(m));
  Eigen::MatrixXd g(n - 1, n - 1);
  for (Eigen::Index p = 1; p < n; ++p) {
    for (Eigen::Index q = 1; q < n; ++q) g(p - 1, q - 1) = gram[p * n + q];
  }
  return g;
}

}  // namespace

std::vector<double> correction_coefficients(const ConeField& v, int m, const BumpFunction& eta,
                                            const SharpnessQuadrature& quad) {
  if (m < 1) throw std::invalid_argument("correction_coefficients: degree must be >= 1");
  const Eigen::MatrixXd g = gram_block(bump_gram(eta, m, quad.bump_radial_nodes), m);
  const Eigen::VectorXd rhs = cone_moments(v, m, quad.radial_rel_tol);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) {
    throw std::runtime_error("correction_coefficients: bump Gram matrix is not positive definite "
                             "to working precision; choose a wider bump or a smaller delta");
  }
  if (hi / lo > 1e12) {
    throw std::runtime_error("correction_coefficients: bump Gram matrix condition number " +
                             std::to_string(hi / lo) +
                             " exceeds 1e12; choose a wider bump or a smaller delta");
  }
  const Eigen::VectorXd beta = g.llt().solve(-rhs);
  return {beta.data(), beta.data() + beta.size()};
}

SharpnessTestFunction::SharpnessTestFunction(ConeField v, int m, BumpFunction eta,
                                             std::vector<double> beta, double c1,
                                             SharpnessQuadrature quad)
    : v_(std::move(v)),
      m_(m),
      eta_(eta),
      beta_(std::move(beta)),
      c1_(c1),
      quad_(quad),
      grid_(SphereGrid::build(quad.grid_degree)) {
  if (beta_.size() != static_cast<std::size_t>(restricted_poly_dim(m))) {
    throw std::invalid_argument("SharpnessTestFunction: expected m^2 + 2m coefficients");
  }
  u_.emplace(SphGridFunction::sample(grid_, [this](const UnitVec3& x) { return value(x); }));
}

double SharpnessTestFunction::floor_constant() const { return c1_ * std::log(1.0 / eps()); }

double SharpnessTestFunction::correction(const UnitVec3& x) const {
  const double e = eta_(x);
  if (e == 0.0) return 0.0;
  const auto y = eval_real_sh_all(m_, x);
  double s = 0.0;
  for (std::size_t q = 1; q < y.size(); ++q) s += beta_[q - 1] * y[q];
  return e * e * s;
}

double SharpnessTestFunction::exp2u(const UnitVec3& x) const {
  return std::exp(2.0 * v_(x)) + correction(x) + floor_constant();
}

double SharpnessTestFunction::value(const UnitVec3& x) const { return 0.5 * std::log(exp2u(x)); }

double SharpnessTestFunction::smooth_part(const UnitVec3& x) const {
  return 0.5 * std::log(1.0 + floor_constant() + correction(x));
}

SharpnessTestFunction build_u(const CubatureFormula& f, double eps, double delta, int m,
                              std::optional<BumpFunction> eta, const SharpnessQuadrature& quad) {
  ConeField v(f, eps, delta);
  const BumpFunction bump = eta ? *eta : default_bump(f, delta);
  auto beta = correction_coefficients(v, m, bump, quad);
  // c1 from the most negative correction value on the grid.
  SharpnessTestFunction probe(v, m, bump, beta, 1.0, quad);
  double worst = 0.0;
  for (const auto& p : probe.grid()->points()) worst = std::max(worst, -probe.correction(p));
  const double c1 = 1.0 + worst / std::log(1.0 / eps);
  if (c1 == 1.0) return probe;
  return SharpnessTestFunction(std::move(v), m, bump, std::move(beta), c1, quad);
}

double radial_energy(const CubatureFormula& f, double eps, double delta, double c1) {
  check_radii(eps, delta);
  const double floor_c = c1 * std::log(1.0 / eps);
  double e = 0.0;
  for (double nu : positive_weights(f)) e += cap_energy_inner(nu, eps, delta, floor_c);
  return e;
}

std::vector<double> constraint_moments(const SharpnessTestFunction& u,
                                       const SharpnessQuadrature& quad) {
  const int m = u.degree();
  const Eigen::MatrixXd g = gram_block(bump_gram(u.bump(), m, quad.bump_radial_nodes), m);
  const Eigen::VectorXd beta =
      Eigen::Map<const Eigen::VectorXd>(u.beta().data(), static_cast<Eigen::Index>(u.beta().size()));
  const Eigen::VectorXd mom = g * beta + cone_moments(u.cone(), m, quad.radial_rel_tol);
  return {mom.data(), mom.data() + mom.size()};
}

FunctionalReport functional_report(const SharpnessTestFunction& u) {
  const int m = u.degree();
  const ConeField& v = u.cone();
  const double eps = v.eps(), delta = v.delta();
  const double floor_c = u.floor_constant();
  const double tol = u.quadrature().radial_rel_tol;
  FunctionalReport rep;

  const auto mom = constraint_moments(u, u.quadrature());
  for (double x : mom) rep.max_moment_residual = std::max(rep.max_moment_residual, std::abs(x));

  // Mass: 4pi(1 + C) + cap excesses + the correction's mean part.
  const auto gram = bump_gram(u.bump(), m, u.quadrature().bump_radial_nodes);
  const std::size_t n = sh_count(m);
  double mass = 4.0 * kPi * (1.0 + floor_c);
  for (std::size_t i = 0; i < v.nodes().size(); ++i) mass += v.cap_excess_moment(i, 0, tol);
  const double sqrt4pi = std::sqrt(4.0 * kPi);
  for (std::size_t q = 1; q < n; ++q) mass += u.beta()[q - 1] * sqrt4pi * gram[q];
  rep.log_mass = std::log(mass);

  // Smooth remainder on the grid; it is constant on every 2delta-cap.
  const auto smooth = SphGridFunction::sample(
      u.grid(), [&](const UnitVec3& x) { return u.smooth_part(x); });
  double energy = dirichlet_energy(sh_analyze(smooth, u.grid()->band_limit()));
  double total_u = integrate(smooth);
  const double base = 0.5 * std::log(1.0 + floor_c);
  for (std::size_t i = 0; i < v.nodes().size(); ++i) {
    const double nu = v.weights()[i];
    energy += cap_energy_inner(nu, eps, delta, floor_c) + cap_energy_annulus(nu, delta, floor_c);
    total_u += kTwoPi * cap_integral(
                            [&](double r) {
                              return (0.5 * std::log(std::exp(2.0 * v.profile(i, r)) + floor_c) -
                                      base) *
                                     std::sin(r);
                            },
                            eps, delta, tol);
  }
  rep.energy = energy;
  rep.mean = total_u / (4.0 * kPi);
  rep.ratio = rep.log_mass / rep.energy;
  return rep;
}

SweepResult sharpness_sweep(const CubatureFormula& f, const std::vector<double>& eps_list,
                            double delta, int m, std::optional<BumpFunction> eta,
                            const SharpnessQuadrature& quad) {
  if (eps_list.empty()) throw std::invalid_argument("sharpness_sweep: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw std::invalid_argument("sharpness_sweep: eps must be > 0");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("sharpness_sweep: eps list must be strictly decreasing");
    }
  }
  if (delta <= 0.0) delta = default_delta(f);
  const BumpFunction bump = eta ? *eta : default_bump(f, delta);

  std::vector<std::future<SweepRow>> jobs;
  for (double eps : eps_list) {
    jobs.push_back(std::async(std::launch::async, [&, eps] {
      const auto u = build_u(f, eps, delta, m, bump, quad);
      return SweepRow{eps, delta, static_cast<int>(u.cone().nodes().size()), m,
                      functional_report(u)};
    }));
  }
  SweepResult out;
  std::vector<double> x, lm, en;
  for (auto& j : jobs) {
    out.rows.push_back(j.get());
    x.push_back(std::log(1.0 / out.rows.back().eps));
    lm.push_back(out.rows.back().report.log_mass);
    en.push_back(out.rows.back().report.energy);
  }
  out.log_mass_slope = least_squares_slope(x, lm, &out.log_mass_intercept);
  out.energy_slope = least_squares_slope(x, en, &out.energy_intercept);
  out.implied_constant = out.log_mass_slope / out.energy_slope;
  return out;
}

InequalityCheck verify_inequality(const SphGridFunction& u, double a, double c, int m,
                                  double moment_tol) {
  const SphereGrid& g = u.grid();
  const double ubar = mean_value(u);
  std::vector<double> e2(g.size()), shifted(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    e2[i] = std::exp(2.0 * u.values()[i]);
    shifted[i] = std::exp(2.0 * (u.values()[i] - ubar));
  }
  InequalityCheck out;
  out.lhs = std::log(integrate(SphGridFunction(u.grid_ptr(), shifted)));
  out.rhs = a * dirichlet_energy(sh_analyze(u, g.band_limit())) + c;
  out.satisfied = out.lhs <= out.rhs + 1e-12 * std::max(1.0, std::abs(out.rhs));

  out.constraints_met = true;
  if (m >= 1) {
    const double mass = integrate(SphGridFunction(u.grid_ptr(), e2));
    std::vector<double> mom(sh_count(m), 0.0), y(sh_count(m));
    for (std::size_t i = 0; i < g.size(); ++i) {
      eval_real_sh_all(m, g.points()[i], y);
      for (std::size_t q = 1; q < y.size(); ++q) mom[q] += g.weights()[i] * e2[i] * y[q];
    }
    for (std::size_t q = 1; q < mom.size(); ++q) {
      if (std::abs(mom[q]) > moment_tol * mass) out.constraints_met = false;
    }
  }
  return out;
}

InequalityCheck verify_inequality(const SharpnessTestFunction& u, double a, double c,
                                  double moment_tol) {
  const auto rep = functional_report(u);
  InequalityCheck out;
  out.lhs = rep.log_mass - 2.0 * rep.mean;
  out.rhs = a * rep.energy + c;
  out.satisfied = out.lhs <= out.rhs + 1e-12 * std::max(1.0, std::abs(out.rhs));
  out.constraints_met = rep.max_moment_residual <= moment_tol * std::exp(rep.log_mass);
  return out;
}

}  // namespace sphlab
