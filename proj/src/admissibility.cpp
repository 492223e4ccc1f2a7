#include "prestrain/admissibility.hpp"

#include <cmath>

namespace prestrain {

namespace {

struct Node3Metric {
  Matrix3d G, Gi;
  Matrix3d dG[2];    // x3-derivative is zero
  Matrix3d ddG[3];   // (11), (12), (22)

  // Christoffel of the 3d metric; derivative directions limited to x' since
  // nothing depends on x3.
  double christoffel(int m, int j, int k) const {
    double s = 0.0;
    for (int p = 0; p < 3; ++p)
      s += Gi(m, p) * (dpart(j, k, p) + dpart(k, j, p) - dpart(p, j, k));
    return 0.5 * s;
  }
  // d_j G_{kp}, zero for j == 2 (x3)
  double dpart(int j, int k, int p) const { return j < 2 ? dG[j](k, p) : 0.0; }
  double ddpart(int i, int j, int k, int p) const {
    if (i == 2 || j == 2) return 0.0;
    return ddG[i + j](k, p);
  }

  // d_i Gamma^m_{jk}, i in {0,1}
  double dchristoffel(int i, int m, int j, int k) const {
    Matrix3d dGi = -Gi * dG[i] * Gi;
    double s = 0.0;
    for (int p = 0; p < 3; ++p) {
      s += dGi(m, p) * (dpart(j, k, p) + dpart(k, j, p) - dpart(p, j, k));
      s += Gi(m, p) * (ddpart(i, j, k, p) + ddpart(i, k, j, p) - ddpart(i, p, j, k));
    }
    return 0.5 * s;
  }

  // <R(d_i, d_j) d_k, d_l> with i,j in the plate plane
  double riemann(int i, int j, int k, int l) const {
    Vector3d curv = Vector3d::Zero();
    for (int m = 0; m < 3; ++m) {
      double c = dchristoffel(i, m, j, k) - dchristoffel(j, m, i, k);
      for (int p = 0; p < 3; ++p)
        c += christoffel(m, i, p) * christoffel(p, j, k) -
             christoffel(m, j, p) * christoffel(p, i, k);
      curv[m] = c;
    }
    double s = 0.0;
    for (int m = 0; m < 3; ++m) s += G(l, m) * curv[m];
    return s;
  }
};

}  // namespace

AdmissibilityReport riemann_flags(const MetricField3& metric, const ImmersionFrame& frame,
                                  const AdmissibilityTolerances& tol) {
  const ParamGrid& grid = metric.grid;
  AdmissibilityReport rep;
  rep.R1212 = ScalarField(grid);
  rep.R1213 = ScalarField(grid);
  rep.R1223 = ScalarField(grid);
  rep.strain_residual = ScalarField(grid);

  double metric_scale = 0.0;
  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      Node3Metric nm;
      nm.G = metric.G(i, j);
      Eigen::SelfAdjointEigenSolver<Matrix3d> es(nm.G);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw MetricError("prestrain metric is not positive definite");
      nm.Gi = metric.Ginv(i, j);
      nm.dG[0] = metric.dG[0](i, j);
      nm.dG[1] = metric.dG[1](i, j);
      for (int q = 0; q < 3; ++q) nm.ddG[q] = metric.ddG[q](i, j);

      rep.R1212(i, j) = nm.riemann(0, 1, 1, 0);
      rep.R1213(i, j) = nm.riemann(0, 1, 2, 0);
      rep.R1223(i, j) = nm.riemann(0, 1, 2, 1);

      Matrix2d st;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          st(a, b) = frame.dy0[a](i, j).dot(frame.db0[b](i, j));
      rep.strain_residual(i, j) = (0.5 * (st + st.transpose())).norm();

      double s = nm.G.norm();
      for (int q = 0; q < 2; ++q) s = std::max(s, nm.dG[q].norm());
      for (int q = 0; q < 3; ++q) s = std::max(s, nm.ddG[q].norm());
      metric_scale = std::max(metric_scale, s);
    }
  }

  rep.max_abs_R = std::max({max_abs(rep.R1212), max_abs(rep.R1213), max_abs(rep.R1223)});
  rep.max_strain_residual = max_abs(rep.strain_residual);
  rep.curvature_tolerance = tol.curvature_rel * (1.0 + metric_scale);
  rep.strain_tolerance = tol.strain;
  rep.admissible = rep.max_abs_R <= rep.curvature_tolerance &&
                   rep.max_strain_residual <= rep.strain_tolerance;
  return rep;
}

}  // namespace prestrain
