#pragma once

#include <complex>
#include <vector>

namespace sphlab::circle {

using cplx = std::complex<double>;

/// Real trigonometric polynomial sum_{|k| <= K} a_k e^{ik theta} stored with
/// a_{-k} = conj(a_k).
class FourierSeries {
public:
  explicit FourierSeries(int max_index = 0);

  /// a_0 .. a_K; the negative half is the conjugate mirror. Throws
  /// std::invalid_argument if a_0 is not real.
  static FourierSeries from_nonnegative(const std::vector<cplx>& a);

  int max_index() const { return K_; }
  /// a_k, zero outside [-K, K].
  cplx operator[](int k) const;
  /// Sets a_k and a_{-k} = conj(a_k). a_0 must be real.
  void set(int k, cplx value);

  double evaluate(double theta) const;
  /// Values at theta_j = 2 pi j / M.
  std::vector<double> sample(int M) const;
  /// The same sums without discarding the imaginary part (realness checks).
  std::vector<cplx> sample_complex(int M) const;

private:
  int K_;
  std::vector<cplx> a_;  // index k + K
};

/// Discrete Fourier coefficients of uniform samples, |k| <= K < M/2.
FourierSeries fourier_analyze(const std::vector<double>& samples, int K);

/// Default sample count for discrete Fourier integrals: 8 (K + 1).
int sample_count(int K);

/// Dirichlet energy of the harmonic extension to the unit disk:
/// 4 pi sum_{k >= 1} k |a_k|^2 (a_0 is ignored).
double disk_energy(const FourierSeries& f);

/// The Dirichlet-to-Neumann map: multiplies a_k by |k|.
FourierSeries dtn(const FourierSeries& f);

/// u(z) = -2 log |1 - xi z^{m+1}| on the circle.
struct CircleExtremal {
  cplx xi;
  int m = 0;

  /// Throws std::invalid_argument unless |xi| < 1 and m >= 0.
  void validate() const;
  double boundary_value(double theta) const;
};

/// sup |u - u_K| <= 2 |xi|^{n+1} / ((n+1)(1 - |xi|)), n = floor(K / (m+1)).
double extremal_tail_bound(const CircleExtremal& e, int K);
/// Smallest K (a multiple of m+1) with extremal_tail_bound <= tol.
int suggest_truncation(const CircleExtremal& e, double tol = 1e-10);

/// sup |DtN(u - u_K)| <= 2 (m+1) |xi|^{n+1} / (1 - |xi|), n = floor(K / (m+1)).
double extremal_dtn_tail_bound(const CircleExtremal& e, int K);
/// Smallest K (a multiple of m+1) with extremal_dtn_tail_bound <= tol.
int suggest_dtn_truncation(const CircleExtremal& e, double tol = 1e-10);

/// a_{n(m+1)} = xi^n / n for n(m+1) <= K. Throws std::invalid_argument if
/// K < m+1, and std::domain_error naming the suggested K when the tail bound
/// exceeds tol.
FourierSeries extremal_series(const CircleExtremal& e, int K, double tol = 1e-10);

/// v(z) = log((m+1)(1 - |xi|^2) / |1 - xi z^{m+1}|^2) truncated at K.
FourierSeries closed_form_v(const CircleExtremal& e, int K, double tol = 1e-10);

/// int_0^{2pi} e^u e^{ik theta} d theta for k = 1..m from M uniform samples.
/// Throws std::invalid_argument when M < 8 (m + 1).
std::vector<cplx> circle_moments(const std::vector<double>& samples, int m);

struct LmReport {
  double lhs = 0.0;  // log((1/2pi) int e^{u - mean u})
  double rhs = 0.0;  // disk energy / (4 pi (m + 1))
  double gap = 0.0;  // rhs - lhs
  double max_moment = 0.0;  // max_k |int e^{u - mean u} e^{ik theta}|, k = 1..m
};

/// Both sides of the constrained inequality for samples (mean removed
/// first; the energy uses the discrete coefficients up to (M-1)/2).
LmReport lm_report(const std::vector<double>& samples, int m);
/// Same for a series: a_0 is dropped, the energy is exact, and e^u is
/// integrated from sample_count(K) samples.
LmReport lm_report(const FourierSeries& u, int m);

/// Coefficients b_k of e^v for |k| <= K_out from M uniform samples
/// (M = 0 picks sample_count(K_out + v.max_index())).
FourierSeries exp_coefficients(const FourierSeries& v, int K_out, int M = 0);

struct RecursionCheck {
  double defect = 0.0;  // max_{|k| <= K} |k b_k - sum_j j a_j b_{k-j}|
  double aliasing = 0.0;  // largest |b_k| among the top K computed indices
};

/// Checks k b_k = sum_j j a_j b_{k-j}, the coefficient form of
/// d(e^v)/d theta = e^v dv/d theta, with b from dense samples.
RecursionCheck product_recursion_check(const FourierSeries& a, int K);

/// max over sample_count(K) points of
/// |DtN v + alpha - e^v (1 + sum_k (c_k e^{ik theta} + conj))|, c indexed from k = 1.
double neumann_residual(const FourierSeries& v, double alpha, const std::vector<cplx>& c = {});

/// Equal weights 1/(m+1) on the (m+1)-th roots of unity.
struct CircleCubature {
  std::vector<cplx> nodes;
  std::vector<double> weights;

  /// sum_k w_k z_k^j, with the angle reduced mod 2 pi in integer arithmetic
  /// so z_k^{m+1} is exactly 1.
  cplx moment(int j) const;
};

/// Throws std::invalid_argument if m < 0.
CircleCubature roots_of_unity_cubature(int m);

struct XiSweepRow {
  cplx xi;
  int m = 0;
  LmReport report;
};

/// lm_report of the extremal series for every (xi, m) pair, K from
/// suggest_truncation(tol).
std::vector<XiSweepRow> xi_sweep(const std::vector<cplx>& xis, const std::vector<int>& ms,
                                 double tol = 1e-10);

}  // namespace sphlab::circle
