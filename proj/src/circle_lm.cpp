#include "sphlab/circle_lm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sphlab::circle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double theta_at(int j, int M) { return kTwoPi * j / M; }

}  // namespace

FourierSeries::FourierSeries(int max_index) : K_(max_index), a_(2 * max_index + 1, 0.0) {
  if (max_index < 0) throw std::invalid_argument("FourierSeries: negative max index");
}

FourierSeries FourierSeries::from_nonnegative(const std::vector<cplx>& a) {
  if (a.empty()) throw std::invalid_argument("FourierSeries: no coefficients");
  FourierSeries f(static_cast<int>(a.size()) - 1);
  for (int k = 0; k <= f.K_; ++k) f.set(k, a[k]);
  return f;
}

cplx FourierSeries::operator[](int k) const {
  if (k < -K_ || k > K_) return 0.0;
  return a_[k + K_];
}

void FourierSeries::set(int k, cplx value) {
  if (k < -K_ || k > K_) throw std::out_of_range("FourierSeries::set: index out of range");
  if (k == 0) {
    if (value.imag() != 0.0) throw std::invalid_argument("FourierSeries: a_0 must be real");
    a_[K_] = value;
    return;
  }
  a_[k + K_] = value;
  a_[-k + K_] = std::conj(value);
}

double FourierSeries::evaluate(double theta) const {
  double s = a_[K_].real();
  for (int k = 1; k <= K_; ++k) s += 2.0 * (a_[k + K_] * std::polar(1.0, k * theta)).real();
  return s;
}

std::vector<cplx> FourierSeries::sample_complex(int M) const {
  std::vector<cplx> out(M);
  for (int j = 0; j < M; ++j) {
    cplx s = 0.0;
    for (int k = -K_; k <= K_; ++k) {
      // Reduce k j mod M so the twiddle is exact for matched +-k pairs.
      const int r = static_cast<int>(((static_cast<long long>(k) * j) % M + M) % M);
      s += a_[k + K_] * std::polar(1.0, theta_at(r, M));
    }
    out[j] = s;
  }
  return out;
}

std::vector<double> FourierSeries::sample(int M) const {
  std::vector<double> out(M);
  for (int j = 0; j < M; ++j) out[j] = evaluate(theta_at(j, M));
  return out;
}

FourierSeries fourier_analyze(const std::vector<double>& samples, int K) {
  const int M = static_cast<int>(samples.size());
  if (K < 0 || 2 * K >= M) {
    throw std::invalid_argument("fourier_analyze: need 0 <= K < M/2");
  }
  FourierSeries f(K);
  for (int k = 0; k <= K; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < M; ++j) {
      const int r = static_cast<int>((static_cast<long long>(k) * j) % M);
      s += samples[j] * std::polar(1.0, -theta_at(r, M));
    }
    s /= static_cast<double>(M);
    if (k == 0) s = s.real();
    f.set(k, s);
  }
  return f;
}

int sample_count(int K) { return 8 * (K + 1); }

double disk_energy(const FourierSeries& f) {
  double s = 0.0;
  for (int k = 1; k <= f.max_index(); ++k) s += k * std::norm(f[k]);
  return 2.0 * kTwoPi * s;
}

FourierSeries dtn(const FourierSeries& f) {
  FourierSeries out(f.max_index());
  for (int k = 1; k <= f.max_index(); ++k) out.set(k, static_cast<double>(k) * f[k]);
  return out;
}

void CircleExtremal::validate() const {
  if (!(std::abs(xi) < 1.0)) throw std::invalid_argument("CircleExtremal: need |xi| < 1");
  if (m < 0) throw std::invalid_argument("CircleExtremal: need m >= 0");
}

double CircleExtremal::boundary_value(double theta) const {
  return -2.0 * std::log(std::abs(1.0 - xi * std::polar(1.0, (m + 1) * theta)));
}

double extremal_tail_bound(const CircleExtremal& e, int K) {
  e.validate();
  const double r = std::abs(e.xi);
  if (r == 0.0) return 0.0;
  const int n = K / (e.m + 1) + 1;
  return 2.0 * std::pow(r, n) / (n * (1.0 - r));
}

int suggest_truncation(const CircleExtremal& e, double tol) {
  e.validate();
  int K = e.m + 1;
  while (extremal_tail_bound(e, K) > tol) K += e.m + 1;
  return K;
}

double extremal_dtn_tail_bound(const CircleExtremal& e, int K) {
  e.validate();
  const double r = std::abs(e.xi);
  if (r == 0.0) return 0.0;
  const int n = K / (e.m + 1) + 1;
  return 2.0 * (e.m + 1) * std::pow(r, n) / (1.0 - r);
}

int suggest_dtn_truncation(const CircleExtremal& e, double tol) {
  e.validate();
  int K = e.m + 1;
  while (extremal_dtn_tail_bound(e, K) > tol) K += e.m + 1;
  return K;
}

FourierSeries extremal_series(const CircleExtremal& e, int K, double tol) {
  e.validate();
  if (K < e.m + 1) throw std::invalid_argument("extremal_series: need K >= m + 1");
  const double bound = extremal_tail_bound(e, K);
  if (bound > tol) {
    throw std::domain_error("extremal_series: truncation at K=" + std::to_string(K) +
                            " leaves tail bound " + std::to_string(bound) + "; use K >= " +
                            std::to_string(suggest_truncation(e, tol)));
  }
  FourierSeries f(K);
  cplx p = 1.0;
  for (int n = 1; n * (e.m + 1) <= K; ++n) {
    p *= e.xi;
    f.set(n * (e.m + 1), p / static_cast<double>(n));
  }
  return f;
}

FourierSeries closed_form_v(const CircleExtremal& e, int K, double tol) {
  auto f = extremal_series(e, K, tol);
  f.set(0, std::log((e.m + 1) * (1.0 - std::norm(e.xi))));
  return f;
}

std::vector<cplx> circle_moments(const std::vector<double>& samples, int m) {
  const int M = static_cast<int>(samples.size());
  if (m < 0 || M < 8 * (m + 1)) {
    throw std::invalid_argument("circle_moments: need at least 8 (m + 1) samples");
  }
  std::vector<cplx> out(m, 0.0);
  for (int k = 1; k <= m; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < M; ++j) {
      const int r = static_cast<int>((static_cast<long long>(k) * j) % M);
      s += std::exp(samples[j]) * std::polar(1.0, theta_at(r, M));
    }
    out[k - 1] = s * (kTwoPi / M);
  }
  return out;
}

namespace {

LmReport report_from(const std::vector<double>& centered, double energy, int m) {
  LmReport r;
  double mean_exp = 0.0;
  for (double u : centered) mean_exp += std::exp(u);
  mean_exp /= static_cast<double>(centered.size());
  r.lhs = std::log(mean_exp);
  r.rhs = energy / (2.0 * kTwoPi * (m + 1));
  r.gap = r.rhs - r.lhs;
  if (m >= 1) {
    for (const auto& c : circle_moments(centered, m)) r.max_moment = std::max(r.max_moment, std::abs(c));
  }
  return r;
}

}  // namespace

LmReport lm_report(const std::vector<double>& samples, int m) {
  if (samples.empty()) throw std::invalid_argument("lm_report: no samples");
  double mean = 0.0;
  for (double u : samples) mean += u;
  mean /= static_cast<double>(samples.size());
  std::vector<double> centered(samples);
  for (double& u : centered) u -= mean;
  const int K = (static_cast<int>(samples.size()) - 1) / 2;
  return report_from(centered, disk_energy(fourier_analyze(centered, K)), m);
}

LmReport lm_report(const FourierSeries& u, int m) {
  FourierSeries centered = u;
  centered.set(0, 0.0);
  const int M = std::max(sample_count(centered.max_index()), 8 * (m + 1));
  return report_from(centered.sample(M), disk_energy(centered), m);
}

FourierSeries exp_coefficients(const FourierSeries& v, int K_out, int M) {
  if (M == 0) M = sample_count(K_out + v.max_index());
  auto s = v.sample(M);
  for (double& x : s) x = std::exp(x);
  return fourier_analyze(s, K_out);
}

RecursionCheck product_recursion_check(const FourierSeries& a, int K) {
  const int Ka = a.max_index();
  const int M = sample_count(K + Ka);
  const int Kb = M / 2 - 1;
  const auto b = exp_coefficients(a, Kb, M);
  RecursionCheck out;
  for (int k = -K; k <= K; ++k) {
    cplx conv = 0.0;
    for (int j = -Ka; j <= Ka; ++j) conv += static_cast<double>(j) * a[j] * b[k - j];
    out.defect = std::max(out.defect, std::abs(static_cast<double>(k) * b[k] - conv));
  }
  for (int k = Kb - K; k <= Kb; ++k) out.aliasing = std::max(out.aliasing, std::abs(b[k]));
  return out;
}

double neumann_residual(const FourierSeries& v, double alpha, const std::vector<cplx>& c) {
  const int K = std::max(v.max_index(), static_cast<int>(c.size()));
  const int M = sample_count(K);
  const auto dv = dtn(v).sample(M);
  const auto vs = v.sample(M);
  double worst = 0.0;
  for (int j = 0; j < M; ++j) {
    double mult = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
      mult += 2.0 * (c[k] * std::polar(1.0, (k + 1) * theta_at(j, M))).real();
    }
    worst = std::max(worst, std::abs(dv[j] + alpha - std::exp(vs[j]) * mult));
  }
  return worst;
}

cplx CircleCubature::moment(int j) const {
  const int n = static_cast<int>(nodes.size());
  cplx s = 0.0;
  for (int k = 0; k < n; ++k) {
    const int r = static_cast<int>(((static_cast<long long>(k) * j) % n + n) % n);
    s += weights[k] * (r == 0 ? cplx(1.0) : std::polar(1.0, kTwoPi * r / n));
  }
  return s;
}

CircleCubature roots_of_unity_cubature(int m) {
  if (m < 0) throw std::invalid_argument("roots_of_unity_cubature: need m >= 0");
  CircleCubature c;
  for (int k = 0; k <= m; ++k) {
    c.nodes.push_back(k == 0 ? cplx(1.0) : std::polar(1.0, kTwoPi * k / (m + 1)));
    c.weights.push_back(1.0 / (m + 1));
  }
  return c;
}

std::vector<XiSweepRow> xi_sweep(const std::vector<cplx>& xis, const std::vector<int>& ms,
                                 double tol) {
  std::vector<XiSweepRow> rows;
  for (const auto& xi : xis) {
    for (int m : ms) {
      const CircleExtremal e{xi, m};
      const auto u = extremal_series(e, suggest_truncation(e, tol), tol);
      rows.push_back({xi, m, lm_report(u, m)});
    }
  }
  return rows;
}

}  // namespace sphlab::circle
