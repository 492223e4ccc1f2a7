#include <doctest.h>

#include <numeric>
#include <random>

#include "prestrain/grid.hpp"

using namespace prestrain;

TEST_CASE("grid construction and masks") {
  ParamGrid g = build_grid({0, 1}, {0, 1}, 3, 3);
  CHECK(g.h1() == doctest::Approx(0.5));
  CHECK(g.h2() == doctest::Approx(0.5));
  int boundary = 0, interior = 0;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) (g.boundary(i, j) ? boundary : interior)++;
  CHECK(boundary == 8);
  CHECK(interior == 1);
  CHECK(g.boundary_count() == 8);

  ParamGrid g2 = build_grid({-0.5, 0.5}, {-0.5, 0.5}, 65, 65);
  CHECK(g2.h1() == doctest::Approx(1.0 / 64));
  CHECK(g2.h2() == doctest::Approx(1.0 / 64));

  ParamGrid g3 = build_grid({0, 1}, {0, 2}, 5, 9);
  CHECK(g3.h1() == doctest::Approx(0.25));
  CHECK(g3.h2() == doctest::Approx(0.25));
}

TEST_CASE("degenerate grids rejected") {
  CHECK_THROWS_AS(build_grid({0, 0}, {0, 1}, 5, 5), ConfigError);
  CHECK_THROWS_AS(build_grid({1, 0}, {0, 1}, 5, 5), ConfigError);
  CHECK_THROWS_AS(build_grid({0, 1}, {0, 1}, 2, 5), ConfigError);
}

TEST_CASE("differencing is exact on quadratics") {
  ParamGrid g = build_grid({0, 1}, {0, 2}, 9, 7);
  ScalarField f(g);
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      const double x = g.x1(i), y = g.x2(j);
      f(i, j) = 3 * x * x - 2 * x + 1 + x * y - 0.5 * y * y;
    }
  ScalarField d1 = diff(g, f, 0), d2 = diff(g, f, 1);
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      const double x = g.x1(i), y = g.x2(j);
      CHECK(d1(i, j) == doctest::Approx(6 * x - 2 + y).epsilon(1e-12));
      CHECK(d2(i, j) == doctest::Approx(x - y).epsilon(1e-12));
    }
}

TEST_CASE("diff_adjoint is the transpose of diff") {
  ParamGrid g = build_grid({0, 1}, {0, 1}, 8, 6);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int axis = 0; axis < 2; ++axis) {
    ScalarField f(g), w(g);
    for (std::size_t k = 0; k < f.size(); ++k) {
      f[k] = U(rng);
      w[k] = U(rng);
    }
    ScalarField Df = diff(g, f, axis);
    ScalarField Dtw = diff_adjoint(g, w, axis);
    double lhs = 0, rhs = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      lhs += Df[k] * w[k];
      rhs += f[k] * Dtw[k];
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("trapezoid weights sum to the area") {
  ParamGrid g = build_grid({0, 1}, {0, 2}, 17, 9);
  double s = 0;
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) s += g.quad_weight(i, j);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("pairwise sum matches accumulate") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> v(1003);
  for (auto& x : v) x = U(rng);
  const double ref = std::accumulate(v.begin(), v.end(), 0.0);
  CHECK(pairwise_sum(v) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("polynomial coefficient extraction through the origin") {
  // f(t) = t + 2 t^2 - t^3
  std::vector<double> t = {0.1, 0.2, 0.3};
  std::vector<double> f;
  for (double x : t) f.push_back(x + 2 * x * x - x * x * x);
  auto c = fit_polynomial_through_origin(t, f);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(c[1] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(c[2] == doctest::Approx(-1.0).epsilon(1e-8));
}
