#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "sphlab/cubature.hpp"
#include "sphlab/cubature_io.hpp"
#include "sphlab/sphere_quadrature.hpp"
#include "sphere_oracles.hpp"

using namespace sphlab;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

CubatureFormula random_formula(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<UnitVec3> nodes;
  std::vector<double> w;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    nodes.push_back(UnitVec3::from_cartesian(g(rng), g(rng), g(rng)));
    w.push_back(u(rng));
    s += w.back();
  }
  for (auto& x : w) x /= s;
  // Absorb the rounding of the normalization into the last weight.
  double t = 0.0;
  for (int i = 0; i + 1 < n; ++i) t += w[i];
  w.back() = 1.0 - t;
  return CubatureFormula(std::move(nodes), std::move(w), 1);
}

Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace

TEST_CASE("formula invariants are enforced") {
  using V = std::vector<UnitVec3>;
  CHECK_THROWS_AS(CubatureFormula(V{}, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(CubatureFormula(V{UnitVec3{}}, {0.5}, 1), std::invalid_argument);
  CHECK_THROWS_AS(CubatureFormula(V{UnitVec3{}, -UnitVec3{}}, {1.5, -0.5}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(CubatureFormula(V{UnitVec3{}}, {1.0}, 0), std::invalid_argument);
  CHECK_NOTHROW(CubatureFormula(V{UnitVec3{}}, {1.0}, 1));
}

TEST_CASE("antipodal pair residuals") {
  const auto f = known_formula("antipodal");
  const auto r1 = moment_residuals(f, 1);
  CHECK(r1.size() == 3);
  CHECK(max_abs(r1) < 1e-15);
  const auto r2 = moment_residuals(f, 2);
  CHECK(r2.size() == 8);
  // Oracle: Y_{2,0}(+-e3) = sqrt(5/16pi) (3 z^2 - 1) = sqrt(5/4pi).
  const double y20 = std::sqrt(5.0 / (16 * kPi)) * 2.0;
  const std::size_t at20 = SHIndex{2, 0}.flat() - 1;
  CHECK(r2[at20] == doctest::Approx(y20).epsilon(1e-14));
  CHECK(y20 == doctest::Approx(std::sqrt(5.0 / (4 * kPi))));
  for (std::size_t q = 0; q < r2.size(); ++q) {
    if (q != at20) CHECK(std::abs(r2[q]) < 1e-15);
  }
  CHECK_THROWS_AS(moment_residuals(f, 0), std::domain_error);
}

TEST_CASE("tetrahedron has degree of precision exactly 2") {
  const auto f = known_formula("tetrahedron");
  CHECK(f.size() == 4);
  CHECK(f.nodes()[1].y() == doctest::Approx(2 * std::sqrt(2.0) / 3));
  CHECK(max_abs(moment_residuals(f, 2)) < 1e-14);
  CHECK(verify_degree(f, 2, 1e-12));
  CHECK_FALSE(verify_degree(f, 3, 1e-12));
  // Oracle for the failure: the degree-3 zonal harmonic at the vertices.
  double s = 0.0;
  for (const auto& p : f.nodes()) {
    const double z = p.z();
    s += 0.25 * std::sqrt(7.0 / (16 * kPi)) * (5 * z * z * z - 3 * z);
  }
  CHECK(std::abs(s) > 1e-3);
  CHECK(moment_residuals(f, 3)[SHIndex{3, 0}.flat() - 1] == doctest::Approx(s).epsilon(1e-13));
}

TEST_CASE("single point is never degree 1") {
  CubatureFormula f({UnitVec3::from_cartesian(0.3, 0.4, 0.5)}, {1.0}, 1);
  CHECK_FALSE(verify_degree(f, 1, 1e-12));
}

TEST_CASE("lower bound") {
  CHECK(lower_bound(1) == 1);
  CHECK(lower_bound(2) == 4);
  CHECK(lower_bound(5) == 9);
  CHECK(lower_bound(6) == 16);
}

TEST_CASE("known formulas") {
  CHECK(verify_degree(known_formula("octahedron"), 3, 1e-12));
  CHECK_FALSE(verify_degree(known_formula("octahedron"), 4, 1e-12));
  CHECK(known_formula("icosahedron").size() == 12);
  CHECK(verify_degree(known_formula("icosahedron"), 5, 1e-12));
  CHECK_FALSE(verify_degree(known_formula("icosahedron"), 6, 1e-12));
  CHECK(known_formula("icosahedron").target_degree() == 5);
  CHECK_THROWS_AS(known_formula("cube"), std::invalid_argument);
}

TEST_CASE("residual norm is rotation invariant") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto f = random_formula(2 + trial % 7, rng);
    const auto r = random_rotation(rng);
    for (int m = 1; m <= 6; ++m) {
      CHECK(std::abs(residual_norm(rotated(f, r), m) - residual_norm(f, m)) < 1e-10);
    }
  }
}

TEST_CASE("harmonic residuals agree with the monomial characterization (m <= 3)") {
  // Oracle: sum_i nu_i p(x_i) - (1/4pi) int p for every monomial p of degree
  // <= m, with the integral from the closed-form moment formula. The change of
  // basis t_q(p) = int p Y_q is taken on an exact grid.
  std::mt19937_64 rng(9);
  auto grid = SphereGrid::build(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_formula(3 + trial, rng);
    for (int m = 1; m <= 3; ++m) {
      const auto r = moment_residuals(f, m);
      for (int a = 0; a <= m; ++a) {
        for (int b = 0; a + b <= m; ++b) {
          for (int c = 0; a + b + c <= m; ++c) {
            auto mono = [&](const UnitVec3& p) {
              return std::pow(p.x(), a) * std::pow(p.y(), b) * std::pow(p.z(), c);
            };
            double direct = -testing::monomial_integral(a, b, c) / (4 * kPi);
            for (std::size_t i = 0; i < f.size(); ++i) direct += f.weights()[i] * mono(f.nodes()[i]);
            const auto t = sh_analyze(SphGridFunction::sample(grid, mono), m);
            double via_sh = 0.0;
            for (std::size_t q = 1; q < t.data().size(); ++q) via_sh += t.data()[q] * r[q - 1];
            CHECK(std::abs(direct - via_sh) < 1e-12);
          }
        }
      }
    }
  }
}

TEST_CASE("canonical gauge") {
  std::mt19937_64 rng(5);
  const auto f = rotated(known_formula("tetrahedron"), random_rotation(rng));
  const auto g = canonical_gauge(f);
  CHECK(g.nodes()[0].z() == 1.0);
  CHECK(std::abs(g.nodes()[1].y()) < 1e-14);
  CHECK(g.nodes()[1].x() > 0.0);
  CHECK(std::abs(residual_norm(g, 2) - residual_norm(f, 2)) < 1e-14);
}

TEST_CASE("search recovers the antipodal pair for m = 1") {
  SearchConfig cfg;
  cfg.multistarts = 16;
  cfg.seed = 17;
  const auto rep = search(2, 1, cfg);
  CHECK(rep.converged);
  CHECK(rep.residual < 1e-12);
  const auto& f = rep.best;
  CHECK(f.nodes()[0].dot(f.nodes()[1]) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(f.weights()[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(verify_degree(f, 1, 10 * cfg.tol));
}

TEST_CASE("search recovers the regular tetrahedron for m = 2") {
  SearchConfig cfg;
  cfg.multistarts = 64;
  cfg.seed = 1;
  const auto rep = search(4, 2, cfg);
  CHECK(rep.converged);
  CHECK(verify_degree(rep.best, 2, 10 * cfg.tol));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rep.best.weights()[i] == doctest::Approx(0.25).epsilon(1e-6));
    for (std::size_t j = i + 1; j < 4; ++j) {
      CHECK(std::abs(rep.best.nodes()[i].dot(rep.best.nodes()[j]) + 1.0 / 3.0) < 1e-6);
    }
  }
  CHECK(rep.best.nodes()[0].z() == 1.0);
  CHECK(std::abs(rep.best.nodes()[1].y()) < 1e-14);
}

TEST_CASE("three nodes cannot reach degree 2") {
  SearchConfig cfg;
  cfg.multistarts = 200;
  cfg.seed = 5;
  const auto rep = search(3, 2, cfg);
  CHECK_FALSE(rep.converged);
  MESSAGE("best residual for N=3, m=2: " << rep.residual);
  CHECK(rep.residual > 1e-2);
}

TEST_CASE("search is deterministic in (seed, multistarts) regardless of threads") {
  SearchConfig a;
  a.multistarts = 12;
  a.seed = 99;
  a.threads = 1;
  SearchConfig b = a;
  b.threads = 4;
  const auto ra = search(5, 2, a);
  const auto rb = search(5, 2, b);
  CHECK(ra.best_start == rb.best_start);
  REQUIRE(ra.best.size() == rb.best.size());
  for (std::size_t i = 0; i < ra.best.size(); ++i) {
    CHECK(ra.best.nodes()[i].x() == rb.best.nodes()[i].x());
    CHECK(ra.best.nodes()[i].z() == rb.best.nodes()[i].z());
    CHECK(ra.best.weights()[i] == rb.best.weights()[i]);
  }
  CHECK(std::memcmp(&ra.residual, &rb.residual, sizeof(double)) == 0);
}

TEST_CASE("estimate_Nm on small degrees") {
  SearchConfig cfg;
  cfg.multistarts = 32;
  cfg.seed = 2;
  const auto e1 = estimate_Nm(1, 1, 4, cfg);
  REQUIRE(e1.estimate.has_value());
  CHECK(*e1.estimate == 2);
  CHECK(e1.lower_bound == 1);
  CHECK_FALSE(e1.open);
  CHECK(e1.rows.size() == 2);
  CHECK_FALSE(e1.rows[0].converged);

  const auto e2 = estimate_Nm(2, 1, 6, cfg);
  REQUIRE(e2.estimate.has_value());
  CHECK(*e2.estimate == 4);
  CHECK(*e2.estimate >= e2.lower_bound);
  REQUIRE(e2.witness.has_value());
  CHECK(verify_degree(e2.witness->best, 2, 1e-9));

  CHECK_THROWS_AS(estimate_Nm(2, 5, 4, cfg), std::invalid_argument);
}

TEST_CASE("cubature JSON round trip is bit exact") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    CubatureDocument doc{random_formula(1 + trial, rng), 1.234e-11, "search", 77u, nullptr};
    const std::string text = to_json(doc).dump();
    const auto back = parse_cubature(text);
    REQUIRE(back.formula.size() == doc.formula.size());
    for (std::size_t i = 0; i < doc.formula.size(); ++i) {
      CHECK(back.formula.nodes()[i].x() == doc.formula.nodes()[i].x());
      CHECK(back.formula.nodes()[i].y() == doc.formula.nodes()[i].y());
      CHECK(back.formula.nodes()[i].z() == doc.formula.nodes()[i].z());
      CHECK(back.formula.weights()[i] == doc.formula.weights()[i]);
    }
    CHECK(back.residual == doc.residual);
    CHECK(back.generator == "search");
    CHECK(back.seed == std::optional<std::uint64_t>(77u));
    CHECK(to_json(back).dump() == text);
  }
}

TEST_CASE("malformed cubature documents are rejected") {
  CHECK_THROWS_AS(parse_cubature("{\"degree\": 2, \"nodes\": [[0,0,1]"), CubatureFormatError);
  CHECK_THROWS_AS(parse_cubature("[]"), CubatureFormatError);
  CHECK_THROWS_AS(parse_cubature(R"({"degree": 1, "nodes": [[0,0,2]], "weights": [1]})"),
                  CubatureFormatError);
  CHECK_THROWS_AS(parse_cubature(R"({"degree": 1, "nodes": [[0,0,1]], "weights": [0.5]})"),
                  CubatureFormatError);
  CHECK_THROWS_AS(parse_cubature(R"({"nodes": [[0,0,1]], "weights": [1]})"),
                  CubatureFormatError);
  CHECK_NOTHROW(parse_cubature(R"({"degree": 1, "nodes": [[0,0,1]], "weights": [1]})"));
}
