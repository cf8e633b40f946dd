#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sphlab/circle_lm.hpp"
#include "sphlab/sphere_quadrature.hpp"
#include "circle_oracles.hpp"

using namespace sphlab::circle;

namespace {

constexpr double kPi = std::numbers::pi;

FourierSeries random_series(int K, double decay, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  FourierSeries f(K);
  f.set(0, n(rng));
  for (int k = 1; k <= K; ++k) f.set(k, cplx(n(rng), n(rng)) * std::pow(decay, k));
  return f;
}

}  // namespace

TEST_CASE("Fourier series basics") {
  FourierSeries f(3);
  f.set(2, cplx(1.0, -2.0));
  CHECK(f[-2] == cplx(1.0, 2.0));
  CHECK(f[5] == cplx(0.0));
  CHECK_THROWS_AS(f.set(0, cplx(1.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(f.set(4, 1.0), std::out_of_range);
  CHECK_THROWS_AS(FourierSeries::from_nonnegative({cplx(0.0, 1.0)}), std::invalid_argument);
  CHECK(f.evaluate(0.3) == doctest::Approx(2 * (cplx(1, -2) * std::polar(1.0, 0.6)).real()));

  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto g = random_series(12, 0.8, rng);
    double imag = 0.0;
    for (const auto& z : g.sample_complex(sample_count(12))) imag = std::max(imag, std::abs(z.imag()));
    CHECK(imag < 1e-12);
    const auto back = fourier_analyze(g.sample(sample_count(12)), 12);
    for (int k = -12; k <= 12; ++k) CHECK(std::abs(back[k] - g[k]) < 1e-13);
  }
  CHECK_THROWS_AS(fourier_analyze(std::vector<double>(10, 0.0), 5), std::invalid_argument);
}

TEST_CASE("disk energy formula against a 2D quadrature oracle") {
  FourierSeries one(1);
  one.set(1, 1.0);
  CHECK(disk_energy(one) == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(sphlab::testing::disk_energy_oracle(one) == doctest::Approx(4 * kPi).epsilon(1e-6));
  CHECK(disk_energy(FourierSeries(4)) == 0.0);
  std::mt19937_64 rng(8);
  for (int t = 0; t < 4; ++t) {
    const auto f = random_series(6, 0.7, rng);
    const double e = disk_energy(f);
    CHECK(std::abs(sphlab::testing::disk_energy_oracle(f) - e) < 1e-6 * e);
  }
}

TEST_CASE("Green's identity: energy equals the boundary pairing with the DtN map") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const int K = 5 + t;
    const auto f = random_series(K, 0.9, rng);
    const int M = sample_count(K);
    const auto a = f.sample(M), b = dtn(f).sample(M);
    double pairing = 0.0;
    for (int j = 0; j < M; ++j) pairing += a[j] * b[j];
    pairing *= 2 * kPi / M;
    CHECK(std::abs(pairing - disk_energy(f)) < 1e-8 * disk_energy(f));
    CHECK(disk_energy(f) > 0.0);
  }
}

TEST_CASE("extremal series") {
  const CircleExtremal e0{0.0, 2};
  const auto z = extremal_series(e0, 6);
  for (int k = -6; k <= 6; ++k) CHECK(z[k] == cplx(0.0));

  const CircleExtremal e{0.5, 0};
  const auto f = extremal_series(e, suggest_truncation(e));
  CHECK(f[1].real() == doctest::Approx(0.5));
  CHECK(f[2].real() == doctest::Approx(0.125));
  CHECK(f[3].real() == doctest::Approx(0.0416667).epsilon(1e-6));
  // Oracle: trapezoid Fourier integrals of the boundary values.
  const int M = 4096;
  for (int k = 0; k <= 5; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < M; ++j) {
      const double t = 2 * kPi * j / M;
      s += e.boundary_value(t) * std::polar(1.0, -k * t);
    }
    CHECK(std::abs(s / double(M) - f[k]) < 1e-12);
  }

  for (const CircleExtremal& x : {CircleExtremal{0.5, 1}, CircleExtremal{cplx(0.7, 0.2), 3},
                                  CircleExtremal{cplx(-0.3, 0.6), 2}}) {
    const auto s = extremal_series(x, suggest_truncation(x));
    for (int j = 0; j < 200; ++j) {
      const double t = 0.0314159 * j;
      CHECK(std::abs(s.evaluate(t) - x.boundary_value(t)) < 1e-10);
    }
    const double expect = 4 * kPi * (x.m + 1) * std::log(1 / (1 - std::norm(x.xi)));
    CHECK(disk_energy(s) == doctest::Approx(expect).epsilon(1e-9));
  }
  CHECK(disk_energy(extremal_series({0.5, 1}, 80)) ==
        doctest::Approx(8 * kPi * std::log(4.0 / 3.0)).epsilon(1e-10));
  CHECK(8 * kPi * std::log(4.0 / 3.0) == doctest::Approx(7.230237).epsilon(1e-6));

  CHECK_THROWS_AS(extremal_series({0.5, 3}, 2), std::invalid_argument);
  CHECK_THROWS_AS(extremal_series({1.0, 0}, 10), std::invalid_argument);
  try {
    extremal_series({0.99, 0}, 20);
    FAIL("expected a truncation error");
  } catch (const std::domain_error& err) {
    const std::string msg = err.what();
    CHECK(msg.find("use K >= " + std::to_string(suggest_truncation({0.99, 0}))) != std::string::npos);
  }
}

TEST_CASE("circle moments") {
  const CircleExtremal e{0.5, 2};
  const auto u = extremal_series(e, suggest_truncation(e));
  const auto mom = circle_moments(u.sample(sample_count(u.max_index())), 2);
  REQUIRE(mom.size() == 2);
  for (const auto& c : mom) CHECK(std::abs(c) < 1e-12);
  const auto m3 = circle_moments(u.sample(sample_count(u.max_index())), 3);
  CHECK(std::abs(m3[2]) > 0.1);

  for (const auto& c : circle_moments(std::vector<double>(64, 0.0), 3)) CHECK(std::abs(c) < 1e-15);

  std::vector<double> cosine(64);
  for (int j = 0; j < 64; ++j) cosine[j] = std::cos(2 * kPi * j / 64);
  const auto c1 = circle_moments(cosine, 1)[0];
  CHECK(c1.real() == doctest::Approx(2 * kPi * std::cyl_bessel_i(1.0, 1.0)).epsilon(1e-13));
  CHECK(c1.real() == doctest::Approx(3.5509).epsilon(1e-4));
  CHECK(std::abs(c1.imag()) < 1e-14);
  CHECK_THROWS_AS(circle_moments(std::vector<double>(15, 0.0), 1), std::invalid_argument);
}

TEST_CASE("Lebedev-Milin report") {
  const CircleExtremal e{0.5, 1};
  const auto r = lm_report(extremal_series(e, suggest_truncation(e)), 1);
  CHECK(r.lhs == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-10));
  CHECK(r.lhs == doctest::Approx(0.2876821).epsilon(1e-7));
  CHECK(std::abs(r.rhs - r.lhs) < 1e-8);
  CHECK(r.max_moment < 1e-12);

  const auto zero = lm_report(FourierSeries(4), 2);
  CHECK(zero.gap == 0.0);
  CHECK(zero.lhs == 0.0);
  // Samples version removes the mean and agrees with the series version.
  auto s = extremal_series(e, suggest_truncation(e));
  s.set(0, 3.0);
  const auto rs = lm_report(s.sample(sample_count(s.max_index())), 1);
  CHECK(rs.lhs == doctest::Approx(r.lhs).epsilon(1e-12));
  CHECK(rs.rhs == doctest::Approx(r.rhs).epsilon(1e-9));

  // Leaving the extremal family while keeping the symmetry that enforces the
  // constraints opens a strictly positive gap.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  for (int t = 0; t < 20; ++t) {
    const int m = 1 + t % 3;
    const CircleExtremal x{cplx(0.4, 0.1), m};
    auto p = extremal_series(x, suggest_truncation(x));
    p.set(m + 1, p[m + 1] + cplx(u(rng), u(rng)));
    p.set(2 * (m + 1), p[2 * (m + 1)] + cplx(u(rng), u(rng)));
    const auto rp = lm_report(p, m);
    CHECK(rp.max_moment < 1e-10);
    CHECK(rp.gap > 0.0);
  }
}

TEST_CASE("equality family closure") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> rad(0.0, 0.8), ang(0.0, 2 * kPi);
  std::uniform_int_distribution<int> mm(0, 4);
  for (int t = 0; t < 50; ++t) {
    const CircleExtremal e{std::polar(rad(rng), ang(rng)), mm(rng)};
    const auto r = lm_report(extremal_series(e, suggest_truncation(e)), e.m);
    CHECK(std::abs(r.gap) < 1e-7);
    CHECK(r.max_moment < 1e-10);
  }
}

TEST_CASE("product recursion") {
  const auto z = product_recursion_check(FourierSeries(5), 5);
  CHECK(z.defect < 1e-14);

  std::mt19937_64 rng(55);
  for (int t = 0; t < 10; ++t) {
    const auto a = random_series(16, 0.5, rng);
    const auto r = product_recursion_check(a, 16);
    CHECK(r.defect < 1e-8);
  }

  const CircleExtremal e{0.5, 1};
  const auto a = extremal_series(e, suggest_truncation(e));
  CHECK(product_recursion_check(a, 20).defect < 1e-8);
  const auto b = exp_coefficients(a, 4);
  CHECK(std::abs(b[1]) < 1e-12);
  CHECK(std::abs(b[-1]) < 1e-12);
  CHECK(std::abs(b[2]) > 0.1);
}

TEST_CASE("Neumann problem for the closed form") {
  for (int m = 0; m <= 4; ++m) {
    const CircleExtremal e{cplx(0.45, -0.2), m};
    const auto v = closed_form_v(e, suggest_dtn_truncation(e));
    CHECK(neumann_residual(v, m + 1.0) < 1e-8);
    const auto b = exp_coefficients(v, 3 * (m + 1));
    CHECK(std::abs(b[0] - double(m + 1)) < 1e-10);
    // With c = 0 the recursion reduces to |k| a_k = b_k.
    for (int k = 1; k <= 3 * (m + 1); ++k) CHECK(std::abs(double(k) * v[k] - b[k]) < 1e-9);
    const double off = neumann_residual(v, m + 2.0);
    CHECK(off >= 1.0 - 1e-8);
  }
  FourierSeries zero(3);
  CHECK(neumann_residual(zero, 1.0) == 0.0);
  // A constant multiplier c_1 shifts the balance.
  CHECK(neumann_residual(zero, 1.0, {cplx(0.25, 0.0)}) == doctest::Approx(0.5));
}

TEST_CASE("roots of unity cubature") {
  const auto c1 = roots_of_unity_cubature(1);
  REQUIRE(c1.nodes.size() == 2);
  CHECK(c1.nodes[0] == cplx(1.0));
  CHECK(std::abs(c1.nodes[1] + 1.0) < 1e-15);
  CHECK(c1.weights[0] == 0.5);
  CHECK(std::abs(c1.moment(1)) < 1e-15);
  for (int m = 0; m <= 12; ++m) {
    const auto c = roots_of_unity_cubature(m);
    CHECK(c.nodes.size() == std::size_t(m + 1));
    for (int j = 1; j <= m; ++j) CHECK(std::abs(c.moment(j)) < 1e-14);
    CHECK(std::abs(c.moment(m + 1) - 1.0) < 1e-14);
    for (const auto& z : c.nodes) CHECK(std::abs(std::pow(z, m + 1) - 1.0) < 1e-13);
  }
  CHECK_THROWS_AS(roots_of_unity_cubature(-1), std::invalid_argument);
}

TEST_CASE("xi sweep") {
  const auto rows = xi_sweep({0.3, 0.5, cplx(0.7, 0.2)}, {0, 1, 2, 3});
  CHECK(rows.size() == 12);
  for (const auto& r : rows) {
    CHECK(std::abs(r.report.gap) < 1e-7);
    CHECK(r.report.lhs == doctest::Approx(std::log(1 / (1 - std::norm(r.xi)))).epsilon(1e-9));
  }
  CHECK(rows[5].xi == cplx(0.5));
  CHECK(rows[5].m == 1);
}
