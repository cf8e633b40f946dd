#include "sphlab/sphere_quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t tri(int k, int j) { return static_cast<std::size_t>(k * (k + 1) / 2 + j); }

}  // namespace

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

std::shared_ptr<const SphereGrid> SphereGrid::build(int band_limit) {
  if (band_limit < 1 || band_limit > 256) {
    throw std::invalid_argument("SphereGrid: band limit must be in [1, 256], got " +
                                std::to_string(band_limit));
  }
  auto g = std::shared_ptr<SphereGrid>(new SphereGrid());
  g->band_limit_ = band_limit;
  g->n_phi_ = 2 * band_limit + 1;
  auto rule = gauss_legendre(band_limit + 1);
  g->cos_theta_ = rule.nodes;
  g->ring_weights_ = rule.weights;
  const double dphi = kTwoPi / g->n_phi_;
  g->points_.reserve(rule.nodes.size() * g->n_phi_);
  g->weights_.reserve(rule.nodes.size() * g->n_phi_);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double ct = rule.nodes[i];
    const double st = std::sqrt((1.0 - ct) * (1.0 + ct));
    for (int l = 0; l < g->n_phi_; ++l) {
      const double ph = l * dphi;
      g->points_.push_back(UnitVec3::from_cartesian(st * std::cos(ph), st * std::sin(ph), ct));
      g->weights_.push_back(rule.weights[i] * dphi);
    }
  }
  return g;
}

double SphereGrid::phi(int l) const { return kTwoPi * l / n_phi_; }

SphGridFunction::SphGridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("SphGridFunction: null grid");
  if (values_.size() != grid_->size()) {
    throw std::invalid_argument("SphGridFunction: value count does not match node count");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("SphGridFunction: non-finite value");
  }
}

SphGridFunction SphGridFunction::sample(GridPtr grid,
                                        const std::function<double(const UnitVec3&)>& f) {
  std::vector<double> v;
  v.reserve(grid->size());
  for (const auto& p : grid->points()) v.push_back(f(p));
  return SphGridFunction(std::move(grid), std::move(v));
}

SHCoeffs::SHCoeffs(int max_degree) : max_degree_(max_degree), c_(sh_count(max_degree), 0.0) {
  if (max_degree < 0) throw std::invalid_argument("SHCoeffs: negative degree");
}

SHCoeffs::SHCoeffs(int max_degree, std::vector<double> coeffs)
    : max_degree_(max_degree), c_(std::move(coeffs)) {
  if (max_degree < 0 || c_.size() != sh_count(max_degree)) {
    throw std::invalid_argument("SHCoeffs: coefficient count does not match degree");
  }
}

double integrate(const SphGridFunction& f) {
  const auto w = f.grid().weights();
  const auto v = f.values();
  // Neumaier summation: fine grids have tens of thousands of terms.
  double s = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double t = w[i] * v[i];
    const double u = s + t;
    comp += (std::abs(s) >= std::abs(t)) ? (s - u) + t : (t - u) + s;
    s = u;
  }
  return s + comp;
}

double mean_value(const SphGridFunction& f) { return integrate(f) / (4.0 * std::numbers::pi); }

SHCoeffs sh_analyze(const SphGridFunction& f, int max_degree) {
  const SphereGrid& g = f.grid();
  if (max_degree < 0 || g.exactness_degree() < 2 * max_degree) {
    throw std::invalid_argument("sh_analyze: grid exactness " +
                                std::to_string(g.exactness_degree()) + " is below 2L = " +
                                std::to_string(2 * max_degree));
  }
  const int L = max_degree;
  const int np = g.n_phi();
  const double dphi = kTwoPi / np;
  SHCoeffs out(L);
  std::vector<double> leg(tri(L + 1, 0));
  std::vector<double> fc(L + 1), fs(L + 1);
  const auto vals = f.values();
  for (int i = 0; i < g.n_theta(); ++i) {
    const double ct = g.ring_cos_theta()[i];
    const double st = std::sqrt((1.0 - ct) * (1.0 + ct));
    for (int j = 0; j <= L; ++j) {
      double sc = 0.0, ss = 0.0;
      for (int l = 0; l < np; ++l) {
        const double v = vals[static_cast<std::size_t>(i) * np + l];
        const double a = j * g.phi(l);
        sc += v * std::cos(a);
        ss += v * std::sin(a);
      }
      fc[j] = sc * dphi;
      fs[j] = ss * dphi;
    }
    normalized_legendre(L, ct, st, leg);
    const double w = g.ring_weights()[i];
    for (int k = 0; k <= L; ++k) {
      out[SHIndex{k, 0}] += w * leg[tri(k, 0)] * fc[0];
      for (int j = 1; j <= k; ++j) {
        const double lw = w * std::numbers::sqrt2 * leg[tri(k, j)];
        out[SHIndex{k, j}] += lw * fc[j];
        out[SHIndex{k, -j}] += lw * fs[j];
      }
    }
  }
  return out;
}

SphGridFunction sh_synthesize(const SHCoeffs& c, GridPtr grid) {
  const SphereGrid& g = *grid;
  const int L = c.max_degree();
  const int np = g.n_phi();
  std::vector<double> values(g.size());
  std::vector<double> leg(tri(L + 1, 0));
  std::vector<double> ac(L + 1), as(L + 1);
  for (int i = 0; i < g.n_theta(); ++i) {
    const double ct = g.ring_cos_theta()[i];
    const double st = std::sqrt((1.0 - ct) * (1.0 + ct));
    normalized_legendre(L, ct, st, leg);
    std::fill(ac.begin(), ac.end(), 0.0);
    std::fill(as.begin(), as.end(), 0.0);
    for (int k = 0; k <= L; ++k) {
      ac[0] += c[SHIndex{k, 0}] * leg[tri(k, 0)];
      for (int j = 1; j <= k; ++j) {
        const double lv = std::numbers::sqrt2 * leg[tri(k, j)];
        ac[j] += c[SHIndex{k, j}] * lv;
        as[j] += c[SHIndex{k, -j}] * lv;
      }
    }
    for (int l = 0; l < np; ++l) {
      double v = ac[0];
      for (int j = 1; j <= L; ++j) {
        const double a = j * g.phi(l);
        v += ac[j] * std::cos(a) + as[j] * std::sin(a);
      }
      values[static_cast<std::size_t>(i) * np + l] = v;
    }
  }
  return SphGridFunction(std::move(grid), std::move(values));
}

double sh_evaluate(const SHCoeffs& c, const UnitVec3& p) {
  const auto y = eval_real_sh_all(c.max_degree(), p);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += c.data()[i] * y[i];
  return s;
}

double dirichlet_energy(const SHCoeffs& c) {
  double e = 0.0;
  for (int k = 1; k <= c.max_degree(); ++k) {
    double s = 0.0;
    for (int j = -k; j <= k; ++j) s += c[SHIndex{k, j}] * c[SHIndex{k, j}];
    e += laplace_eigenvalue(k) * s;
  }
  return e;
}

SphGridFunction laplacian(const SphGridFunction& f, int max_degree) {
  SHCoeffs c = sh_analyze(f, max_degree);
  for (int k = 0; k <= max_degree; ++k) {
    for (int j = -k; j <= k; ++j) c[SHIndex{k, j}] *= -laplace_eigenvalue(k);
  }
  return sh_synthesize(c, f.grid_ptr());
}

}  // namespace sphlab
