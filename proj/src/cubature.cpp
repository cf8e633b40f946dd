#include "sphlab/cubature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace sphlab {

CubatureFormula::CubatureFormula(std::vector<UnitVec3> nodes, std::vector<double> weights,
                                 int target_degree)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), target_degree_(target_degree) {
  if (nodes_.empty()) throw std::invalid_argument("CubatureFormula: no nodes");
  if (nodes_.size() != weights_.size()) {
    throw std::invalid_argument("CubatureFormula: node and weight counts differ");
  }
  if (target_degree_ < 1) throw std::invalid_argument("CubatureFormula: degree must be >= 1");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("CubatureFormula: weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("CubatureFormula: weights sum to " + std::to_string(sum) +
                                ", expected 1");
  }
}

std::vector<double> moment_residuals(const CubatureFormula& f, int m) {
  if (m < 1) throw std::domain_error("moment_residuals: degree must be >= 1");
  const std::size_t count = sh_count(m);
  std::vector<double> acc(count, 0.0);
  std::vector<double> y(count);
  for (std::size_t i = 0; i < f.size(); ++i) {
    eval_real_sh_all(m, f.nodes()[i], y);
    for (std::size_t q = 1; q < count; ++q) acc[q] += f.weights()[i] * y[q];
  }
  return {acc.begin() + 1, acc.end()};
}

double residual_norm(const CubatureFormula& f, int m) {
  double s = 0.0;
  for (double r : moment_residuals(f, m)) s += r * r;
  return std::sqrt(s);
}

bool verify_degree(const CubatureFormula& f, int m, double tol) {
  double sum = 0.0;
  for (double w : f.weights()) {
    if (w < 0.0) return false;
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol) return false;
  for (double r : moment_residuals(f, m)) {
    if (!(std::abs(r) <= tol)) return false;
  }
  return true;
}

int lower_bound(int m) {
  const int h = m / 2 + 1;
  return h * h;
}

CubatureFormula known_formula(std::string_view name) {
  std::vector<UnitVec3> nodes;
  int degree = 0;
  if (name == "antipodal") {
    nodes = {UnitVec3::from_cartesian(0, 0, 1), UnitVec3::from_cartesian(0, 0, -1)};
    degree = 1;
  } else if (name == "tetrahedron") {
    const double r2 = std::numbers::sqrt2;
    const double r23 = std::sqrt(2.0 / 3.0);
    nodes = {UnitVec3::from_cartesian(0, 0, 1),
             UnitVec3::from_cartesian(0, 2.0 * r2 / 3.0, -1.0 / 3.0),
             UnitVec3::from_cartesian(r23, -r2 / 3.0, -1.0 / 3.0),
             UnitVec3::from_cartesian(-r23, -r2 / 3.0, -1.0 / 3.0)};
    degree = 2;
  } else if (name == "octahedron") {
    for (int axis = 0; axis < 3; ++axis) {
      for (double s : {1.0, -1.0}) {
        double v[3] = {0, 0, 0};
        v[axis] = s;
        nodes.push_back(UnitVec3::from_cartesian(v[0], v[1], v[2]));
      }
    }
    degree = 3;
  } else if (name == "icosahedron") {
    const double g = std::numbers::phi;
    for (double a : {1.0, -1.0}) {
      for (double b : {g, -g}) {
        nodes.push_back(UnitVec3::from_cartesian(0, a, b));
        nodes.push_back(UnitVec3::from_cartesian(a, b, 0));
        nodes.push_back(UnitVec3::from_cartesian(b, 0, a));
      }
    }
    degree = 5;
  } else {
    throw std::invalid_argument("known_formula: unknown name '" + std::string(name) + "'");
  }
  std::vector<double> w(nodes.size(), 1.0 / static_cast<double>(nodes.size()));
  return CubatureFormula(std::move(nodes), std::move(w), degree);
}

CubatureFormula rotated(const CubatureFormula& f, const Eigen::Matrix3d& rotation) {
  std::vector<UnitVec3> nodes;
  nodes.reserve(f.size());
  for (const auto& p : f.nodes()) {
    const Eigen::Vector3d q = rotation * Eigen::Vector3d(p.x(), p.y(), p.z());
    nodes.push_back(UnitVec3::from_cartesian(q.x(), q.y(), q.z()));
  }
  return CubatureFormula(std::move(nodes), f.weights(), f.target_degree());
}

CubatureFormula canonical_gauge(const CubatureFormula& f) {
  const auto& x0 = f.nodes()[0];
  Eigen::Matrix3d r =
      Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d(x0.x(), x0.y(), x0.z()),
                                         Eigen::Vector3d::UnitZ())
          .toRotationMatrix();
  if (f.size() > 1) {
    const auto& x1 = f.nodes()[1];
    const Eigen::Vector3d q = r * Eigen::Vector3d(x1.x(), x1.y(), x1.z());
    if (std::hypot(q.x(), q.y()) > 1e-12) {
      const double ang = std::atan2(q.y(), q.x());
      r = Eigen::AngleAxisd(-ang, Eigen::Vector3d::UnitZ()).toRotationMatrix() * r;
    }
  }
  CubatureFormula out = rotated(f, r);
  // Pin the first node exactly.
  std::vector<UnitVec3> nodes = out.nodes();
  nodes[0] = UnitVec3::from_cartesian(0, 0, 1);
  return CubatureFormula(std::move(nodes), out.weights(), out.target_degree());
}

int resolve_thread_count(const SearchConfig& config) {
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv("SPHLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

// Parameter layout: [theta_0..theta_{N-1}, phi_0..phi_{N-1}, t_0..t_{N-1}].
class MomentProblem {
public:
  MomentProblem(int num_nodes, int m)
      : n_(num_nodes), m_(m), count_(sh_count(m)), val_(count_), dth_(count_), dph_(count_) {}

  int residual_count() const { return static_cast<int>(count_) - 1; }
  int param_count() const { return 3 * n_; }

  void evaluate(const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const int R = residual_count();
    r.setZero(R);
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += p[2 * n_ + i] * p[2 * n_ + i];
    values_.resize(R, n_);
    for (int i = 0; i < n_; ++i) {
      eval_real_sh_derivs(m_, p[i], p[n_ + i], val_, dth_, dph_);
      const double nu = p[2 * n_ + i] * p[2 * n_ + i] / s;
      for (int q = 0; q < R; ++q) {
        values_(q, i) = val_[q + 1];
        r[q] += nu * val_[q + 1];
      }
      if (jac) {
        if (jac->rows() != R || jac->cols() != 3 * n_) jac->resize(R, 3 * n_);
        for (int q = 0; q < R; ++q) {
          (*jac)(q, i) = nu * dth_[q + 1];
          (*jac)(q, n_ + i) = nu * dph_[q + 1];
        }
      }
    }
    if (jac) {
      for (int i = 0; i < n_; ++i) {
        const double c = 2.0 * p[2 * n_ + i] / s;
        for (int q = 0; q < R; ++q) (*jac)(q, 2 * n_ + i) = c * (values_(q, i) - r[q]);
      }
    }
  }

private:
  int n_;
  int m_;
  std::size_t count_;
  std::vector<double> val_, dth_, dph_;
  Eigen::MatrixXd values_;
};

struct StartResult {
  Eigen::VectorXd params;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

void randomize_node(Eigen::VectorXd& p, int n, int i, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  p[i] = std::acos(1.0 - 2.0 * u(rng));
  p[n + i] = 2.0 * std::numbers::pi * u(rng);
}

StartResult run_start(int n, int m, const SearchConfig& cfg, std::uint64_t stream_seed) {
  std::mt19937_64 rng(stream_seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  MomentProblem prob(n, m);
  Eigen::VectorXd p(3 * n);
  for (int i = 0; i < n; ++i) randomize_node(p, n, i, rng);
  for (int i = 0; i < n; ++i) p[2 * n + i] = u(rng);

  Eigen::VectorXd r, r_new;
  Eigen::MatrixXd J;
  prob.evaluate(p, r, &J);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  const double polish = std::max(cfg.tol * 1e-3, 1e-15);
  double checkpoint_cost = cost;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    if (std::sqrt(cost) <= polish) break;
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    const double floor = 1e-10 * std::max(1e-30, A.diagonal().maxCoeff());
    bool accepted = false;
    while (lambda < 1e16) {
      Eigen::MatrixXd M = A;
      for (int d = 0; d < M.rows(); ++d) M(d, d) += lambda * std::max(A(d, d), floor);
      const Eigen::VectorXd step = M.ldlt().solve(-g);
      const Eigen::VectorXd trial = p + step;
      prob.evaluate(trial, r_new, nullptr);
      const double c = r_new.squaredNorm();
      if (std::isfinite(c) && c < cost) {
        p = trial;
        cost = c;
        lambda = std::max(lambda / 3.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) break;
    // Re-seed nodes that drifted onto a pole, where the phi column of the
    // Jacobian vanishes.
    bool reseeded = false;
    for (int i = 0; i < n; ++i) {
      if (std::abs(std::sin(p[i])) < 1e-6) {
        randomize_node(p, n, i, rng);
        reseeded = true;
      }
    }
    prob.evaluate(p, r, &J);
    if (reseeded) {
      cost = r.squaredNorm();
      lambda = 1e-3;
    }
    if ((it + 1) % 50 == 0) {
      if (cost > 0.999 * checkpoint_cost && std::sqrt(cost) > cfg.tol) break;
      checkpoint_cost = cost;
    }
  }
  StartResult out;
  out.params = p;
  out.residual = std::sqrt(cost);
  out.iterations = it;
  return out;
}

CubatureFormula formula_from_params(const Eigen::VectorXd& p, int n, int m) {
  std::vector<UnitVec3> nodes;
  std::vector<double> w(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += p[2 * n + i] * p[2 * n + i];
  for (int i = 0; i < n; ++i) {
    nodes.push_back(UnitVec3::from_angles(p[i], p[n + i]));
    w[i] = p[2 * n + i] * p[2 * n + i] / s;
  }
  return CubatureFormula(std::move(nodes), std::move(w), m);
}

}  // namespace

SearchReport search(int num_nodes, int m, const SearchConfig& config) {
  if (num_nodes < 1) throw std::invalid_argument("search: need at least one node");
  if (m < 1) throw std::invalid_argument("search: degree must be >= 1");
  if (config.multistarts < 1) throw std::invalid_argument("search: multistarts must be >= 1");

  std::vector<StartResult> results(config.multistarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int s = next++; s < config.multistarts; s = next++) {
      results[s] = run_start(num_nodes, m, config, config.seed + static_cast<std::uint64_t>(s));
    }
  };
  const int nthreads = std::min(resolve_thread_count(config), config.multistarts);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  // Reduce in start order; ties go to the lower index.
  int best = 0;
  for (int s = 1; s < config.multistarts; ++s) {
    if (results[s].residual < results[best].residual) best = s;
  }
  CubatureFormula f =
      canonical_gauge(formula_from_params(results[best].params, num_nodes, m));
  const double res = residual_norm(f, m);
  return SearchReport{std::move(f),          res,  config.multistarts, config.seed,
                      results[best].iterations, best, res <= config.tol};
}

NmEstimate estimate_Nm(int m, int n_min, int n_max, const SearchConfig& config) {
  if (m < 1) throw std::invalid_argument("estimate_Nm: degree must be >= 1");
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("estimate_Nm: empty node range");
  NmEstimate est;
  est.degree = m;
  est.lower_bound = lower_bound(m);
  est.open = m >= 3;
  for (int n = n_min; n <= n_max; ++n) {
    SearchReport rep = search(n, m, config);
    est.rows.push_back(NmRow{n, rep.residual, rep.converged});
    if (rep.converged) {
      est.estimate = n;
      est.witness = std::move(rep);
      break;
    }
  }
  return est;
}

}  // namespace sphlab
