#include <doctest.h>

#include <random>

#include "prestrain/admissibility.hpp"
#include "prestrain/geometry.hpp"

using namespace prestrain;

namespace {

ParamGrid unit_grid(int n = 17) { return build_grid({0, 1}, {0, 1}, n, n); }
ParamGrid cap_grid(int n = 17) { return build_grid({-0.5, 0.5}, {-0.5, 0.5}, n, n); }

PolyHeight flat_height() { return PolyHeight(Poly2{}); }
PolyHeight saddle_height() {
  Poly2 p;
  p.add(2, 0, 0.5);
  p.add(0, 2, -0.5);
  return PolyHeight(p);
}

}  // namespace

TEST_CASE("flat plate geometry") {
  ParamGrid g = unit_grid();
  ImmersionFrame fr = sample_graph_immersion(g, flat_height());
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK((fr.g[k] - Matrix2d::Identity()).norm() == doctest::Approx(0.0));
    CHECK(fr.Pi[k].norm() == doctest::Approx(0.0));
    CHECK(fr.kappa[k] == doctest::Approx(0.0));
    CHECK((fr.normal[k] - Vector3d(0, 0, 1)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("sphere cap has constant curvature 1/R^2") {
  ParamGrid g = cap_grid();
  SphereCapHeight f(2.0);
  ImmersionFrame fr = sample_graph_immersion(g, f);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(fr.kappa[k] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fr.normal[k][2] > 0.0);
    // elliptic orientation: positive definite second form, positive mean curvature
    Eigen::SelfAdjointEigenSolver<Matrix2d> es(fr.Pi[k]);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("saddle graph curvature is the closed form") {
  ParamGrid g = cap_grid();
  ImmersionFrame fr = sample_graph_immersion(g, saddle_height());
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      const double x1 = g.x1(i), x2 = g.x2(j);
      const double expect = -1.0 / std::pow(1.0 + x1 * x1 + x2 * x2, 2);
      CHECK(fr.kappa(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("first fundamental form equals the derivative Gram matrix") {
  ParamGrid g = cap_grid(9);
  SphereCapHeight f(2.0);
  ImmersionFrame fr = sample_graph_immersion(g, f);
  for (std::size_t k = 0; k < g.size(); ++k) {
    Matrix2d gram;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) gram(a, b) = fr.dy0[a][k].dot(fr.dy0[b][k]);
    CHECK((fr.g[k] - gram).norm() <= 1e-12);
  }
}

TEST_CASE("sphere height function derivatives by finite differences") {
  SphereCapHeight f(2.0);
  const double x1 = 0.21, x2 = -0.37, d = 1e-5;
  auto fd1 = (f.value(x1 + d, x2) - f.value(x1 - d, x2)) / (2 * d);
  CHECK(f.partial(1, 0, x1, x2) == doctest::Approx(fd1).epsilon(1e-8));
  auto fd2 = (f.partial(1, 0, x1, x2 + d) - f.partial(1, 0, x1, x2 - d)) / (2 * d);
  CHECK(f.partial(1, 1, x1, x2) == doctest::Approx(fd2).epsilon(1e-7));
  auto fd3 = (f.partial(2, 0, x1, x2 + d) - f.partial(2, 0, x1, x2 - d)) / (2 * d);
  CHECK(f.partial(2, 1, x1, x2) == doctest::Approx(fd3).epsilon(1e-6));
  auto fd4 = (f.partial(1, 1, x1 + d, x2) - f.partial(1, 1, x1 - d, x2)) / (2 * d);
  CHECK(f.partial(2, 1, x1, x2) == doctest::Approx(fd4).epsilon(1e-6));
}

TEST_CASE("flat plate with vertical director gives the identity metric") {
  ParamGrid g = unit_grid(5);
  ImmersionFrame fr = sample_graph_immersion(g, flat_height());
  MetricField3 M = prestrain_from_director(fr, DirectorField::constant({0, 0, 1}));
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK((M.G[k] - Matrix3d::Identity()).norm() <= 1e-14);
    CHECK((M.A[k] - Matrix3d::Identity()).norm() <= 1e-12);
  }
}

TEST_CASE("constant-director sphere prestrain") {
  ParamGrid g = cap_grid();
  SphereCapHeight f(2.0);
  ImmersionFrame fr = sample_graph_immersion(g, f);
  MetricField3 M = prestrain_from_director(fr, DirectorField::constant({0, 0, 1}));
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      const double f1 = fr.dy0[0](i, j)[2];
      CHECK(M.G(i, j)(0, 2) == doctest::Approx(f1).epsilon(1e-13));
      CHECK((M.A(i, j) * M.A(i, j) - M.G(i, j)).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((M.Ginv(i, j) * M.G(i, j) - Matrix3d::Identity()).cwiseAbs().maxCoeff() <=
            1e-12);
    }
  // the constant director makes the immersion-system residual vanish
  AdmissibilityReport rep = riemann_flags(M, fr);
  CHECK(rep.max_strain_residual <= 1e-12);
  CHECK(rep.admissible);
}

TEST_CASE("reversed director degenerates the frame") {
  ParamGrid g = cap_grid(5);
  SphereCapHeight f(2.0);
  ImmersionFrame fr = sample_graph_immersion(g, f);
  CHECK_THROWS_AS(prestrain_from_director(fr, DirectorField::constant({0, 0, -1})),
                  FrameDegeneracyError);
}

TEST_CASE("transversal director round trip") {
  ParamGrid g = cap_grid(9);
  SphereCapHeight f(2.0);

  SUBCASE("constant director") {
    ImmersionFrame fr = sample_graph_immersion(g, f);
    MetricField3 M = prestrain_from_director(fr, DirectorField::constant({0, 0, 1}));
    Vec3Field b = transversal_director(M, fr);
    for (std::size_t k = 0; k < g.size(); ++k)
      CHECK((b[k] - Vector3d(0, 0, 1)).norm() <= 1e-12);
  }
  SUBCASE("polynomial director") {
    ImmersionFrame fr = sample_graph_immersion(g, f);
    DirectorField a{Poly2{{{{1, 0}, 0.1}}}, Poly2{{{{0, 1}, -0.05}}},
                    Poly2{{{{0, 0}, 1.0}, {{1, 1}, 0.08}}}};
    MetricField3 M = prestrain_from_director(fr, a);
    Vec3Field b = transversal_director(M, fr);
    for (int j = 0; j < g.n2(); ++j)
      for (int i = 0; i < g.n1(); ++i)
        CHECK((b(i, j) - a.value(g.x1(i), g.x2(j))).norm() <= 1e-10);
  }
  SUBCASE("product metric gives the normal") {
    ImmersionFrame fr = sample_graph_immersion(g, f);
    MetricField3 M = product_metric(fr);
    Vec3Field b = transversal_director(M, fr);
    for (std::size_t k = 0; k < g.size(); ++k)
      CHECK((b[k] - fr.normal[k]).norm() <= 1e-12);
  }
}

TEST_CASE("moment fields") {
  SUBCASE("constant director: everything vanishes") {
    ParamGrid g = cap_grid(9);
    SphereCapHeight f(2.0);
    ImmersionFrame fr = sample_graph_immersion(g, f);
    prestrain_from_director(fr, DirectorField::constant({0, 0, 1}));
    MomentFields mf = moment_fields(fr);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(mf.B0[k].norm() <= 1e-13);
      CHECK(mf.d0[k].norm() <= 1e-13);
    }
  }
  SUBCASE("normal director on the sphere has d0 = 0") {
    ParamGrid g = cap_grid(9);
    SphereCapHeight f(2.0);
    ImmersionFrame fr = sample_graph_immersion(g, f);
    product_metric(fr);
    MomentFields mf = moment_fields(fr);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(mf.d0[k].norm() <= 1e-10);
  }
  SUBCASE("stretched flat plate: d0 from the pointwise solve") {
    ParamGrid g = unit_grid(9);
    ImmersionFrame fr = sample_graph_immersion(g, flat_height());
    DirectorField a{Poly2{}, Poly2{}, Poly2{{{{0, 0}, 1.0}, {{1, 0}, 1.0}}}};
    prestrain_from_director(fr, a);
    MomentFields mf = moment_fields(fr);
    for (int j = 0; j < g.n2(); ++j)
      for (int i = 0; i < g.n1(); ++i) {
        const double s = 1.0 + g.x1(i);
        // <d1 b0, b0> = s, and Q0^T d0 = (-s, 0, 0) gives d0 = -s e1
        CHECK((mf.d0(i, j) - Vector3d(-s, 0, 0)).norm() <= 1e-10);
        CHECK((mf.B0(i, j).col(0) - Vector3d(0, 0, 1)).norm() <= 1e-11);
      }
  }
}

TEST_CASE("spd sqrt rejects indefinite input") {
  Matrix3d M = Matrix3d::Identity();
  M(2, 2) = -1.0;
  CHECK_THROWS_AS(spd_sqrt(M), MetricError);
}

TEST_CASE("riemann flags") {
  SUBCASE("identity metric is exactly flat") {
    ParamGrid g = unit_grid(7);
    ImmersionFrame fr = sample_graph_immersion(g, flat_height());
    MetricField3 M = prestrain_from_director(fr, DirectorField::constant({0, 0, 1}));
    AdmissibilityReport rep = riemann_flags(M, fr);
    CHECK(rep.max_abs_R == 0.0);
    CHECK(rep.admissible);
  }
  SUBCASE("product sphere metric is obstructed with R1212 = kappa det g") {
    ParamGrid g = cap_grid(9);
    SphereCapHeight f(2.0);
    ImmersionFrame fr = sample_graph_immersion(g, f);
    MetricField3 M = product_metric(fr);
    AdmissibilityReport rep = riemann_flags(M, fr);
    CHECK_FALSE(rep.admissible);
    for (int j = 0; j < g.n2(); ++j)
      for (int i = 0; i < g.n1(); ++i) {
        const double expect = fr.kappa(i, j) * fr.g(i, j).determinant();
        CHECK(rep.R1212(i, j) == doctest::Approx(expect).epsilon(1e-9));
        CHECK(std::abs(rep.R1213(i, j)) <= 1e-11);
        CHECK(std::abs(rep.R1223(i, j)) <= 1e-11);
      }
  }
  SUBCASE("brute-force curvature oracle at one node") {
    // independent finite-difference Christoffel/Riemann computation on the
    // product sphere metric, compared against the analytic-derivative path
    ParamGrid g = cap_grid(9);
    SphereCapHeight fh(2.0);
    ImmersionFrame fr = sample_graph_immersion(g, fh);
    MetricField3 M = product_metric(fr);
    AdmissibilityReport rep = riemann_flags(M, fr);

    auto G_at = [&](double x1, double x2) {
      const double f1 = fh.partial(1, 0, x1, x2), f2 = fh.partial(0, 1, x1, x2);
      Matrix3d G = Matrix3d::Identity();
      G(0, 0) = 1 + f1 * f1;
      G(0, 1) = G(1, 0) = f1 * f2;
      G(1, 1) = 1 + f2 * f2;
      return G;
    };
    const int ii = 4, jj = 4;
    const double x1 = g.x1(ii), x2 = g.x2(jj), d = 1e-4;
    auto christ = [&](double a, double b) {
      Matrix3d dG[2];
      dG[0] = (G_at(a + d, b) - G_at(a - d, b)) / (2 * d);
      dG[1] = (G_at(a, b + d) - G_at(a, b - d)) / (2 * d);
      const Matrix3d Gi = G_at(a, b).inverse();
      std::array<Matrix3d, 3> Gam;  // Gam[m](j,k)
      for (int m = 0; m < 3; ++m)
        for (int j2 = 0; j2 < 3; ++j2)
          for (int k = 0; k < 3; ++k) {
            double s = 0;
            for (int p = 0; p < 3; ++p) {
              const double dj = j2 < 2 ? dG[j2](k, p) : 0.0;
              const double dk = k < 2 ? dG[k](j2, p) : 0.0;
              const double dp = p < 2 ? dG[p](j2, k) : 0.0;
              s += Gi(m, p) * (dj + dk - dp);
            }
            Gam[m](j2, k) = 0.5 * s;
          }
      return Gam;
    };
    auto Gam0 = christ(x1, x2);
    auto GamP = christ(x1 + d, x2);
    auto GamM = christ(x1 - d, x2);
    auto GamP2 = christ(x1, x2 + d);
    auto GamM2 = christ(x1, x2 - d);
    // <R(d1,d2)d2, d1>
    Vector3d curv;
    for (int m = 0; m < 3; ++m) {
      double c = (GamP[m](1, 1) - GamM[m](1, 1)) / (2 * d) -
                 (GamP2[m](0, 1) - GamM2[m](0, 1)) / (2 * d);
      for (int p = 0; p < 3; ++p)
        c += Gam0[m](0, p) * Gam0[p](1, 1) - Gam0[m](1, p) * Gam0[p](0, 1);
      curv[m] = c;
    }
    const double R1212_fd = (G_at(x1, x2) * curv)(0);
    CHECK(rep.R1212(ii, jj) == doctest::Approx(R1212_fd).epsilon(1e-5));
  }
  SUBCASE("non-SPD metric rejected") {
    ParamGrid g = unit_grid(5);
    ImmersionFrame fr = sample_graph_immersion(g, flat_height());
    MetricField3 M = prestrain_from_director(fr, DirectorField::constant({0, 0, 1}));
    for (std::size_t k = 0; k < g.size(); ++k) M.G[k](2, 2) = -1.0;
    CHECK_THROWS_AS(riemann_flags(M, fr), MetricError);
  }
}
