#include "prestrain/geometry.hpp"

#include <cmath>

namespace prestrain {

PolyHeight::PolyHeight(Poly2 p) {
  d_[0][0] = std::move(p);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) {
      if (a + b == 0 || a + b > 3) continue;
      if (a > 0)
        d_[a][b] = d_[a - 1][b].derivative(0);
      else
        d_[a][b] = d_[a][b - 1].derivative(1);
    }
}

double PolyHeight::value(double x1, double x2) const { return d_[0][0](x1, x2); }

double PolyHeight::partial(int a, int b, double x1, double x2) const {
  return d_[a][b](x1, x2);
}

double SphereCapHeight::value(double x1, double x2) const {
  return std::sqrt(R_ * R_ - x1 * x1 - x2 * x2);
}

double SphereCapHeight::partial(int a, int b, double x1, double x2) const {
  // f_i = -x_i/f, f_ij = (-d_ij - f_i f_j)/f, third order by one more quotient rule
  const double f = value(x1, x2);
  const double x[2] = {x1, x2};
  auto fi = [&](int i) { return -x[i] / f; };
  auto fij = [&](int i, int j) { return (-(i == j ? 1.0 : 0.0) - fi(i) * fi(j)) / f; };
  auto fijk = [&](int i, int j, int k) {
    const double num = -(fij(i, k) * fi(j) + fi(i) * fij(j, k)) * f -
                       (-(i == j ? 1.0 : 0.0) - fi(i) * fi(j)) * fi(k);
    return num / (f * f);
  };
  const int order = a + b;
  if (order == 0) return f;
  if (order == 1) return fi(a == 1 ? 0 : 1);
  if (order == 2) {
    if (a == 2) return fij(0, 0);
    if (b == 2) return fij(1, 1);
    return fij(0, 1);
  }
  // order 3
  if (a == 3) return fijk(0, 0, 0);
  if (a == 2) return fijk(0, 0, 1);
  if (a == 1) return fijk(0, 1, 1);
  return fijk(1, 1, 1);
}

namespace {

int dd_index(int i, int j) { return i + j; }  // (0,0)->0, (0,1)/(1,0)->1, (1,1)->2

int ddd_index(int i, int j, int k) { return i + j + k; }  // count of 2-direction

}  // namespace

ImmersionFrame sample_graph_immersion(const ParamGrid& grid, const HeightFunction& f) {
  ImmersionFrame F{grid,
                   Vec3Field(grid),
                   {Vec3Field(grid), Vec3Field(grid)},
                   {Vec3Field(grid), Vec3Field(grid), Vec3Field(grid)},
                   {Vec3Field(grid), Vec3Field(grid), Vec3Field(grid), Vec3Field(grid)},
                   Vec3Field(grid),
                   {Vec3Field(grid), Vec3Field(grid)},
                   Mat2Field(grid),
                   Mat2Field(grid),
                   Mat2Field(grid),
                   ScalarField(grid),
                   {ScalarField(grid), ScalarField(grid)},
                   Vec3Field(grid),
                   {Vec3Field(grid), Vec3Field(grid)},
                   Mat3Field(grid)};

  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const double x1 = grid.x1(i), x2 = grid.x2(j);
      const double fv = f.value(x1, x2);
      const double f1 = f.partial(1, 0, x1, x2), f2 = f.partial(0, 1, x1, x2);
      const double f11 = f.partial(2, 0, x1, x2), f12 = f.partial(1, 1, x1, x2),
                   f22 = f.partial(0, 2, x1, x2);
      const double f111 = f.partial(3, 0, x1, x2), f112 = f.partial(2, 1, x1, x2),
                   f122 = f.partial(1, 2, x1, x2), f222 = f.partial(0, 3, x1, x2);

      F.y0(i, j) = Vector3d(x1, x2, fv);
      F.dy0[0](i, j) = Vector3d(1, 0, f1);
      F.dy0[1](i, j) = Vector3d(0, 1, f2);
      F.ddy0[0](i, j) = Vector3d(0, 0, f11);
      F.ddy0[1](i, j) = Vector3d(0, 0, f12);
      F.ddy0[2](i, j) = Vector3d(0, 0, f22);
      F.dddy0[0](i, j) = Vector3d(0, 0, f111);
      F.dddy0[1](i, j) = Vector3d(0, 0, f112);
      F.dddy0[2](i, j) = Vector3d(0, 0, f122);
      F.dddy0[3](i, j) = Vector3d(0, 0, f222);

      const Vector3d v(-f1, -f2, 1.0);
      const double w2 = 1.0 + f1 * f1 + f2 * f2;
      const double w = std::sqrt(w2);
      F.normal(i, j) = v / w;
      const Vector3d dv1(-f11, -f12, 0.0), dv2(-f12, -f22, 0.0);
      F.dnormal[0](i, j) = dv1 / w - v * (v.dot(dv1)) / (w2 * w);
      F.dnormal[1](i, j) = dv2 / w - v * (v.dot(dv2)) / (w2 * w);

      Matrix2d g;
      g << 1 + f1 * f1, f1 * f2, f1 * f2, 1 + f2 * f2;
      F.g(i, j) = g;
      F.ginv(i, j) = g.inverse();

      Matrix2d Pi;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          Pi(a, b) = F.dnormal[a](i, j).dot(F.dy0[b](i, j));
      F.Pi(i, j) = 0.5 * (Pi + Pi.transpose());  // symmetric up to rounding

      const double num = f11 * f22 - f12 * f12;
      F.kappa(i, j) = num / (w2 * w2);
      const double dnum1 = f111 * f22 + f11 * f122 - 2 * f12 * f112;
      const double dnum2 = f112 * f22 + f11 * f222 - 2 * f12 * f122;
      const double dw2_1 = 2 * (f1 * f11 + f2 * f12);
      const double dw2_2 = 2 * (f1 * f12 + f2 * f22);
      F.dkappa[0](i, j) = (dnum1 * w2 - 2 * num * dw2_1) / (w2 * w2 * w2);
      F.dkappa[1](i, j) = (dnum2 * w2 - 2 * num * dw2_2) / (w2 * w2 * w2);
    }
  }
  return F;
}

Matrix3d spd_sqrt(const Matrix3d& M, double floor) {
  Eigen::SelfAdjointEigenSolver<Matrix3d> es(M);
  Vector3d ev = es.eigenvalues();
  for (int k = 0; k < 3; ++k) {
    if (ev[k] < -1e-10) throw MetricError("matrix square root of a non-SPD matrix");
    ev[k] = std::sqrt(std::max(ev[k], floor));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

namespace {

MetricField3 metric_from_frame(ImmersionFrame& frame,
                               const std::array<Vec3Field, 2>& da,
                               const std::array<Vec3Field, 3>& dda) {
  const ParamGrid& grid = frame.grid;
  MetricField3 M{grid, Mat3Field(grid), Mat3Field(grid), Mat3Field(grid),
                 {Mat3Field(grid), Mat3Field(grid)},
                 {Mat3Field(grid), Mat3Field(grid), Mat3Field(grid)}};

  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      Matrix3d Q0;
      Q0.col(0) = frame.dy0[0](i, j);
      Q0.col(1) = frame.dy0[1](i, j);
      Q0.col(2) = frame.b0(i, j);
      frame.Q0(i, j) = Q0;
      if (Q0.determinant() <= 0.0)
        throw FrameDegeneracyError("director field degenerates the frame (det Q0 <= 0)");

      Matrix3d G = Q0.transpose() * Q0;
      G = symmetrize(G);
      M.G(i, j) = G;
      M.A(i, j) = spd_sqrt(G);
      M.Ginv(i, j) = G.inverse();

      // dQ[k] and ddQ[(kl)] from analytic immersion/director derivatives
      Matrix3d dQ[2];
      for (int k = 0; k < 2; ++k) {
        dQ[k].col(0) = frame.ddy0[dd_index(0, k)](i, j);
        dQ[k].col(1) = frame.ddy0[dd_index(1, k)](i, j);
        dQ[k].col(2) = da[k](i, j);
        Matrix3d dG = dQ[k].transpose() * Q0 + Q0.transpose() * dQ[k];
        M.dG[k](i, j) = 0.5 * (dG + dG.transpose());
      }
      for (int k = 0; k < 2; ++k)
        for (int l = k; l < 2; ++l) {
          Matrix3d ddQ;
          ddQ.col(0) = frame.dddy0[ddd_index(0, k, l)](i, j);
          ddQ.col(1) = frame.dddy0[ddd_index(1, k, l)](i, j);
          ddQ.col(2) = dda[k + l](i, j);
          Matrix3d ddG = ddQ.transpose() * Q0 + dQ[k].transpose() * dQ[l] +
                         dQ[l].transpose() * dQ[k] + Q0.transpose() * ddQ;
          M.ddG[k + l](i, j) = 0.5 * (ddG + ddG.transpose());
        }
    }
  }
  return M;
}

}  // namespace

MetricField3 prestrain_from_director(ImmersionFrame& frame, const DirectorField& a) {
  const ParamGrid& grid = frame.grid;
  frame.b0 = Vec3Field(grid);
  frame.db0[0] = Vec3Field(grid);
  frame.db0[1] = Vec3Field(grid);
  frame.Q0 = Mat3Field(grid);

  std::array<Vec3Field, 2> da{Vec3Field(grid), Vec3Field(grid)};
  std::array<Vec3Field, 3> dda{Vec3Field(grid), Vec3Field(grid), Vec3Field(grid)};
  const DirectorField da1{a.c1.derivative(0), a.c2.derivative(0), a.c3.derivative(0)};
  const DirectorField da2{a.c1.derivative(1), a.c2.derivative(1), a.c3.derivative(1)};

  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const double x1 = grid.x1(i), x2 = grid.x2(j);
      const Vector3d av = a.value(x1, x2);
      if (av.dot(frame.normal(i, j)) <= 0.0)
        throw FrameDegeneracyError("director is tangent or reversed (<a,n> <= 0)");
      frame.b0(i, j) = av;
      frame.db0[0](i, j) = a.partial(0, x1, x2);
      frame.db0[1](i, j) = a.partial(1, x1, x2);
      da[0](i, j) = frame.db0[0](i, j);
      da[1](i, j) = frame.db0[1](i, j);
      dda[0](i, j) = da1.partial(0, x1, x2);
      dda[1](i, j) = da1.partial(1, x1, x2);
      dda[2](i, j) = da2.partial(1, x1, x2);
    }
  }
  return metric_from_frame(frame, da, dda);
}

MetricField3 product_metric(ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  frame.b0 = frame.normal;
  frame.db0 = frame.dnormal;
  frame.Q0 = Mat3Field(grid);

  // dd(normal) analytically: n = v/w with v = (-f1,-f2,1)
  std::array<Vec3Field, 3> ddn{Vec3Field(grid), Vec3Field(grid), Vec3Field(grid)};
  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const Vector3d d1 = frame.dy0[0](i, j), d2 = frame.dy0[1](i, j);
      const double f1 = d1[2], f2 = d2[2];
      const Vector3d v(-f1, -f2, 1.0);
      const double w2 = 1.0 + f1 * f1 + f2 * f2;
      const double w = std::sqrt(w2);
      auto fdd = [&](int a, int b) { return frame.ddy0[dd_index(a, b)](i, j)[2]; };
      auto fddd = [&](int a, int b, int c) {
        return frame.dddy0[ddd_index(a, b, c)](i, j)[2];
      };
      for (int k = 0; k < 2; ++k)
        for (int l = k; l < 2; ++l) {
          const Vector3d dvk(-fdd(0, k), -fdd(1, k), 0.0);
          const Vector3d dvl(-fdd(0, l), -fdd(1, l), 0.0);
          const Vector3d ddv(-fddd(0, k, l), -fddd(1, k, l), 0.0);
          const double dwk = v.dot(dvk) / w;  // d_k w
          const double dwl = v.dot(dvl) / w;
          const double ddw = (dvl.dot(dvk) + v.dot(ddv) - dwk * dwl) / w;
          ddn[k + l](i, j) = ddv / w - dvk * dwl / w2 - dvl * dwk / w2 -
                             v * ddw / w2 + 2.0 * v * dwk * dwl / (w2 * w);
        }
    }
  }
  return metric_from_frame(frame, frame.dnormal, ddn);
}

Vector3d completion_director(const Matrix3d& Ginv, const Vector3d& t1,
                             const Vector3d& t2) {
  const double G33 = Ginv(2, 2);
  if (G33 <= 0.0) throw MetricError("G^33 <= 0: metric not positive definite");
  Vector3d cr = t1.cross(t2);
  const double nrm = cr.norm();
  if (!(nrm > 1e-14)) throw FrameDegeneracyError("degenerate tangent plane");
  cr /= nrm;
  return -(Ginv(0, 2) * t1 + Ginv(1, 2) * t2) / G33 + cr / std::sqrt(G33);
}

Vec3Field transversal_director(const MetricField3& metric, const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  Vec3Field b(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i)
      b(i, j) = completion_director(metric.Ginv(i, j), frame.dy0[0](i, j),
                                    frame.dy0[1](i, j));
  return b;
}

MomentFields moment_fields(const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  MomentFields out{Mat3Field(grid), Vec3Field(grid)};

  // director derivatives: analytic when the frame carries them, otherwise
  // central differences of the component fields
  std::array<Vec3Field, 2> db;
  if (!frame.db0[0].empty()) {
    db = frame.db0;
  } else {
    db = {Vec3Field(grid), Vec3Field(grid)};
    for (int c = 0; c < 3; ++c) {
      ScalarField comp(grid);
      for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = frame.b0[k][c];
      for (int axis = 0; axis < 2; ++axis) {
        ScalarField d = diff(grid, comp, axis);
        for (std::size_t k = 0; k < d.size(); ++k) db[axis][k][c] = d[k];
      }
    }
  }

  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix3d& Q0 = frame.Q0(i, j);
      if (std::abs(Q0.determinant()) < 1e-14)
        throw FrameDegeneracyError("singular Q0 in moment fields");
      const Vector3d b = frame.b0(i, j);
      Vector3d rhs(-db[0](i, j).dot(b), -db[1](i, j).dot(b), 0.0);
      const Vector3d d0 = Q0.transpose().fullPivLu().solve(rhs);
      out.d0(i, j) = d0;
      Matrix3d B0;
      B0.col(0) = db[0](i, j);
      B0.col(1) = db[1](i, j);
      B0.col(2) = d0;
      out.B0(i, j) = B0;
    }
  }
  return out;
}

}  // namespace prestrain
