#include "prestrain/recovery.hpp"

#include <cmath>
#include <cstdio>

namespace prestrain {

namespace {

Matrix3d rotation_exp(const Vector3d& w, double eps) {
  const double th = eps * w.norm();
  if (th < 1e-300) return Matrix3d::Identity();
  const Vector3d axis = w / w.norm();
  return Eigen::AngleAxisd(th, axis).toRotationMatrix();
}

VectorFieldWithGrad with_differenced_grad(const ParamGrid& grid, Vec3Field values) {
  return VectorFieldWithGrad::from_values(grid, std::move(values));
}

}  // namespace

double metric_defect(const VectorFieldWithGrad& u, const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  double worst = 0.0;
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Matrix2d m;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) m(a, b) = u.grad[a](i, j).dot(u.grad[b](i, j));
      worst = std::max(worst, (m - frame.g(i, j)).cwiseAbs().maxCoeff());
    }
  return worst;
}

namespace {

void verify_matching(MatchedIsometry& mi, const ImmersionFrame& frame) {
  mi.eps_list = {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5)};
  mi.defects.clear();
  for (double e : mi.eps_list)
    mi.defects.push_back(std::max(metric_defect(mi.evaluate(e), frame), 1e-300));
  if (mi.exact) {
    // closed-form isometries sit at rounding level; the slope is meaningless
    mi.slope = std::numeric_limits<double>::infinity();
    mi.matching_failure = false;
    for (double d : mi.defects) mi.matching_failure |= d > 1e-12;
    return;
  }
  mi.slope = loglog_slope(mi.eps_list, mi.defects);
  mi.matching_failure = mi.slope < mi.order + 0.8;
}

}  // namespace

MatchedIsometry match_isometry(const VectorFieldWithGrad& V, const ImmersionFrame& frame,
                               int m, const StrainSolver* solver) {
  if (m < 1) throw ConfigError("matching order must be >= 1");
  MatchedIsometry mi;
  mi.order = m;

  // the closure owns the correction list so the family stays valid after return
  auto corrections = std::make_shared<std::vector<VectorFieldWithGrad>>();
  const ImmersionFrame* fr = &frame;
  auto evaluate = [fr, V, corrections](double eps) {
    const ParamGrid& grid = fr->grid;
    VectorFieldWithGrad u{Vec3Field(grid), {Vec3Field(grid), Vec3Field(grid)}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      u.value[k] = fr->y0[k] + eps * V.value[k];
      for (int ax = 0; ax < 2; ++ax)
        u.grad[ax][k] = fr->dy0[ax][k] + eps * V.grad[ax][k];
      double ej = eps;
      for (const auto& w : *corrections) {
        ej *= eps;
        u.value[k] += ej * w.value[k];
        for (int ax = 0; ax < 2; ++ax) u.grad[ax][k] += ej * w.grad[ax][k];
      }
    }
    return u;
  };
  mi.evaluate = evaluate;

  const ParamGrid& grid = frame.grid;
  for (int stage = 2; stage <= m; ++stage) {
    if (!solver)
      throw ConfigError("matching beyond first order needs the strain solver");
    // extract the order-`stage` defect coefficient from defect samples
    const int degree = 2 * stage;
    std::vector<double> nodes;
    for (int r = 1; r <= degree; ++r) nodes.push_back(0.35 * r / degree);
    std::vector<NodeField<Matrix2d>> samples;
    for (double e : nodes) {
      VectorFieldWithGrad u = evaluate(e);
      NodeField<Matrix2d> d(grid);
      for (int j = 0; j < grid.n2(); ++j)
        for (int i = 0; i < grid.n1(); ++i) {
          Matrix2d mm;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) mm(a, b) = u.grad[a](i, j).dot(u.grad[b](i, j));
          d(i, j) = mm - frame.g(i, j);
        }
      samples.push_back(std::move(d));
    }
    SurfaceTensorField U(grid, 2);
    U.symmetric_declared = true;
    for (int j = 0; j < grid.n2(); ++j)
      for (int i = 0; i < grid.n1(); ++i) {
        Matrix2d Dstage;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            std::vector<double> f(nodes.size());
            for (std::size_t r = 0; r < nodes.size(); ++r) f[r] = samples[r](i, j)(a, b);
            const std::vector<double> coef = fit_polynomial_through_origin(nodes, f);
            Dstage(a, b) = coef[stage - 1];
          }
        Dstage = symmetrize(Dstage);
        U.comp(0)(i, j) = -0.5 * Dstage(0, 0);
        U.comp(1)(i, j) = -0.5 * Dstage(0, 1);
        U.comp(2)(i, j) = -0.5 * Dstage(1, 0);
        U.comp(3)(i, j) = -0.5 * Dstage(1, 1);
      }
    ScalarField bc(grid, 0.0);
    StrainSolution w = solver->solve(StrainRHS(U), bc);
    corrections->push_back(VectorFieldWithGrad{w.y, w.dy});
  }
  mi.corrections = *corrections;

  verify_matching(mi, frame);
  return mi;
}

MatchedIsometry rigid_isometry_family(const ImmersionFrame& frame, const Vector3d& W,
                                      const Vector3d& shift) {
  MatchedIsometry mi;
  mi.order = 99;
  mi.exact = true;
  const ImmersionFrame* fr = &frame;
  mi.evaluate = [fr, W, shift](double eps) {
    const ParamGrid& grid = fr->grid;
    const Matrix3d R = rotation_exp(W, eps);
    VectorFieldWithGrad u{Vec3Field(grid), {Vec3Field(grid), Vec3Field(grid)}};
    for (std::size_t k = 0; k < grid.size(); ++k) {
      u.value[k] = R * fr->y0[k] + eps * shift;
      for (int ax = 0; ax < 2; ++ax) u.grad[ax][k] = R * fr->dy0[ax][k];
    }
    return u;
  };
  verify_matching(mi, frame);
  return mi;
}

MatchedIsometry cylinder_roll_family(const ImmersionFrame& frame, double amplitude,
                                     int axis) {
  for (std::size_t k = 0; k < frame.grid.size(); ++k)
    if (frame.ddy0[0][k].norm() + frame.ddy0[1][k].norm() + frame.ddy0[2][k].norm() > 1e-12)
      throw ConfigError("cylindrical rolling needs a flat plate");
  MatchedIsometry mi;
  mi.order = 99;
  mi.exact = true;
  const ImmersionFrame* fr = &frame;
  mi.evaluate = [fr, amplitude, axis](double eps) {
    const ParamGrid& grid = fr->grid;
    VectorFieldWithGrad u{Vec3Field(grid), {Vec3Field(grid), Vec3Field(grid)}};
    const double ae = amplitude * eps;
    for (int j = 0; j < grid.n2(); ++j)
      for (int i = 0; i < grid.n1(); ++i) {
        const double s = axis == 0 ? grid.x1(i) : grid.x2(j);
        const double t = axis == 0 ? grid.x2(j) : grid.x1(i);
        Vector3d val, dts, dtt;
        if (ae == 0.0) {
          val = Vector3d(s, t, 0.0);
          dts = Vector3d(1, 0, 0);
        } else {
          val = Vector3d(std::sin(ae * s) / ae, t, (1.0 - std::cos(ae * s)) / ae);
          dts = Vector3d(std::cos(ae * s), 0.0, std::sin(ae * s));
        }
        dtt = Vector3d(0, 1, 0);
        if (axis == 1) {
          std::swap(val[0], val[1]);
          std::swap(dts[0], dts[1]);
          std::swap(dtt[0], dtt[1]);
        }
        u.value(i, j) = val;
        u.grad[axis](i, j) = dts;
        u.grad[1 - axis](i, j) = dtt;
      }
    return u;
  };
  verify_matching(mi, frame);
  return mi;
}

VectorFieldWithGrad director_eps(const VectorFieldWithGrad& u_eps,
                                 const MetricField3& metric, const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  Vec3Field b(grid);
  for (std::size_t k = 0; k < grid.size(); ++k)
    b[k] = completion_director(metric.Ginv[k], u_eps.grad[0][k], u_eps.grad[1][k]);
  return with_differenced_grad(grid, std::move(b));
}

VectorFieldWithGrad d_eps_field(const VectorFieldWithGrad& u_eps,
                                const VectorFieldWithGrad& b_eps,
                                const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  Vec3Field d(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Matrix3d Qe;
    Qe.col(0) = u_eps.grad[0][k];
    Qe.col(1) = u_eps.grad[1][k];
    Qe.col(2) = b_eps.value[k];
    if (std::abs(Qe.determinant()) < 1e-14)
      throw FrameDegeneracyError("singular deformed frame in d_eps");
    const Vector3d rhs(-b_eps.grad[0][k].dot(b_eps.value[k]),
                       -b_eps.grad[1][k].dot(b_eps.value[k]), 0.0);
    d[k] = Qe.transpose().partialPivLu().solve(rhs);
  }
  return with_differenced_grad(grid, std::move(d));
}

VectorFieldWithGrad d_h_field(const VectorFieldWithGrad& V, const ImmersionFrame& frame,
                              const MetricField3& metric, const EnergyDensitySpec& material) {
  const ParamGrid& grid = frame.grid;
  Mat2Field M = bending_tensor(V, frame);
  Vec3Field d(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const RelaxedFormResult rel = q2A(M(i, j), metric.A(i, j), material);
      d(i, j) = frame.Q0(i, j).transpose().partialPivLu().solve(rel.c);
    }
  return with_differenced_grad(grid, std::move(d));
}

Vector3d RecoveryDeformation::value(int i, int j, double x3) const {
  const double hx = h * x3;
  return u_eps.value(i, j) + hx * b_eps.value(i, j) +
         0.5 * hx * hx * (d_eps.value(i, j) + eps * d_h.value(i, j));
}

Matrix3d RecoveryDeformation::grad_h(int i, int j, double x3) const {
  const double hx = h * x3;
  Matrix3d G;
  for (int a = 0; a < 2; ++a)
    G.col(a) = u_eps.grad[a](i, j) + hx * b_eps.grad[a](i, j) +
               0.5 * hx * hx * (d_eps.grad[a](i, j) + eps * d_h.grad[a](i, j));
  G.col(2) = b_eps.value(i, j) + hx * (d_eps.value(i, j) + eps * d_h.value(i, j));
  return G;
}

RecoveryDeformation build_uh(double h, double beta, const MatchedIsometry& matched,
                             const VectorFieldWithGrad& b_eps,
                             const VectorFieldWithGrad& d_eps,
                             const VectorFieldWithGrad& d_h, const ImmersionFrame& frame) {
  RecoveryDeformation def;
  def.frame = &frame;
  def.h = h;
  def.beta = beta;
  def.eh = std::pow(h, beta);
  def.eps = std::sqrt(def.eh) / h;
  if (def.eps > 0.2) {
    def.eps_guard_exceeded = true;
    std::fprintf(stderr, "[prestrain] warning: eps = %.3f exceeds the expansion guard\n",
                 def.eps);
  }
  def.u_eps = matched.evaluate(def.eps);
  def.b_eps = b_eps;
  def.d_eps = d_eps;
  def.d_h = d_h;
  return def;
}

RecoveryDeformation assemble_recovery(double h, double beta, const MatchedIsometry& matched,
                                      const VectorFieldWithGrad& V,
                                      const ImmersionFrame& frame,
                                      const MetricField3& metric,
                                      const EnergyDensitySpec& material) {
  RecoveryDeformation def;
  def.frame = &frame;
  def.h = h;
  def.beta = beta;
  def.eh = std::pow(h, beta);
  def.eps = std::sqrt(def.eh) / h;
  if (def.eps > 0.2) {
    def.eps_guard_exceeded = true;
    std::fprintf(stderr, "[prestrain] warning: eps = %.3f exceeds the expansion guard\n",
                 def.eps);
  }
  def.u_eps = matched.evaluate(def.eps);
  def.b_eps = director_eps(def.u_eps, metric, frame);
  def.d_eps = d_eps_field(def.u_eps, def.b_eps, frame);
  def.d_h = d_h_field(V, frame, metric, material);
  return def;
}

Vec3Field vh_diagnostic(const RecoveryDeformation& def, const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  // 4-point Gauss on (-1/2, 1/2); the integrand is quadratic in x3
  static const double gp[4] = {-0.4305681557970263, -0.1699905217924281,
                               0.1699905217924281, 0.4305681557970263};
  static const double gw[4] = {0.1739274225687269, 0.3260725774312731,
                               0.3260725774312731, 0.1739274225687269};
  Vec3Field vh(grid);
  const double scale = def.h / std::sqrt(def.eh);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Vector3d acc = Vector3d::Zero();
      for (int q = 0; q < 4; ++q) {
        const Vector3d yh = def.value(i, j, gp[q]);
        const Vector3d base = frame.y0(i, j) + def.h * gp[q] * frame.b0(i, j);
        acc += gw[q] * (yh - base);
      }
      vh(i, j) = scale * acc;
    }
  return vh;
}

GammaDiagnostics gamma_diagnostics(const RecoveryDeformation& def,
                                   const VectorFieldWithGrad& V,
                                   const ImmersionFrame& frame, const MetricField3& metric,
                                   const EnergyDensitySpec& material) {
  const ParamGrid& grid = frame.grid;
  GammaDiagnostics out;

  // predicted limit tensor L with x3 factored out
  Mat2Field M = bending_tensor(V, frame);
  Mat3Field L(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const RelaxedFormResult rel = q2A(M(i, j), metric.A(i, j), material);
      Matrix3d Lm = Matrix3d::Zero();
      Lm.topLeftCorner<2, 2>() = M(i, j);
      Lm(0, 2) = Lm(2, 0) = 0.5 * rel.c[0];
      Lm(1, 2) = Lm(2, 1) = 0.5 * rel.c[1];
      Lm(2, 2) = rel.c[2];
      L(i, j) = Lm;
    }

  static const double gp[4] = {-0.4305681557970263, -0.1699905217924281,
                               0.1699905217924281, 0.4305681557970263};
  const double s = 2.0 * std::sqrt(def.eh);
  double dev = 0.0;
  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i)
      for (int q = 0; q < 4; ++q) {
        const Matrix3d F = def.grad_h(i, j, gp[q]);
        const Matrix3d Kh = F.transpose() * F - metric.G(i, j);
        dev = std::max(dev, (Kh / s - gp[q] * L(i, j)).cwiseAbs().maxCoeff());
      }
  out.kh_deviation = dev;

  // dual route to the limit's 2x2 block: first eps-coefficient of b_eps built
  // from the deformation side (cross products), never through p.
  Vec3Field b1(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Vector3d t1 = frame.dy0[0](i, j), t2 = frame.dy0[1](i, j);
      const Vector3d cr = t1.cross(t2);
      const double nrm = cr.norm();
      const Vector3d n0 = cr / nrm;
      const Vector3d raw = V.grad[0](i, j).cross(t2) + t1.cross(V.grad[1](i, j));
      const Vector3d ndot = (raw - n0 * n0.dot(raw)) / nrm;
      const Matrix3d& Gi = metric.Ginv(i, j);
      b1(i, j) = -(Gi(0, 2) * V.grad[0](i, j) + Gi(1, 2) * V.grad[1](i, j)) / Gi(2, 2) +
                 ndot / std::sqrt(Gi(2, 2));
    }
  std::array<Vec3Field, 2> db1;
  {
    VectorFieldWithGrad tmp = VectorFieldWithGrad::from_values(grid, b1);
    db1 = tmp.grad;
  }
  double mdev = 0.0;
  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i) {
      Matrix2d K;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          K(a, b) = frame.dy0[a](i, j).dot(db1[b](i, j)) +
                    V.grad[a](i, j).dot(frame.db0[b](i, j));
      const Matrix2d Mrec = 0.5 * (K + K.transpose());
      mdev = std::max(mdev, (Mrec - M(i, j)).cwiseAbs().maxCoeff());
    }
  out.m_dual_route_error = mdev;

  Vec3Field vh = vh_diagnostic(def, frame);
  double vdev = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    vdev = std::max(vdev, (vh[k] - V.value[k]).norm());
  out.vh_deviation = vdev;
  return out;
}

}  // namespace prestrain
