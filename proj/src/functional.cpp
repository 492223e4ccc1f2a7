#include "prestrain/functional.hpp"

#include <cmath>
#include <cstdio>

namespace prestrain {

namespace {

Matrix3d q3_gradient(const Matrix3d& F, const EnergyDensitySpec& spec) {
  // gradient in the Frobenius pairing: dQ3[d] = <grad, d>
  const Matrix3d S = 0.5 * (F + F.transpose());
  return 4.0 * spec.mu * S + 2.0 * spec.lambda * F.trace() * Matrix3d::Identity();
}

/// 2x2 gradient of Q_{2,A} at M (envelope of the completion minimum).
Matrix2d q2A_gradient(const Matrix2d& M, const Matrix3d& A, const EnergyDensitySpec& spec,
                      const RelaxedFormResult& rel) {
  const Matrix3d Ai = A.inverse();
  Matrix3d comp = Matrix3d::Zero();
  comp.topLeftCorner<2, 2>() = 0.5 * (M + M.transpose());
  comp(0, 2) = comp(2, 0) = 0.5 * rel.c[0];
  comp(1, 2) = comp(2, 1) = 0.5 * rel.c[1];
  comp(2, 2) = rel.c[2];
  const Matrix3d R = Ai * comp * Ai;
  const Matrix3d G = Ai * q3_gradient(R, spec) * Ai;
  return G.topLeftCorner<2, 2>();
}

std::array<Vec3Field, 2> gradient_fields(const ParamGrid& grid, const Vec3Field& v) {
  std::array<Vec3Field, 2> out{Vec3Field(grid), Vec3Field(grid)};
  for (int c = 0; c < 3; ++c) {
    ScalarField comp(grid);
    for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = v[k][c];
    for (int ax = 0; ax < 2; ++ax) {
      ScalarField d = diff(grid, comp, ax);
      for (std::size_t k = 0; k < d.size(); ++k) out[ax][k][c] = d[k];
    }
  }
  return out;
}

Vec3Field adjoint_of_gradient(const ParamGrid& grid, const std::array<Vec3Field, 2>& G) {
  Vec3Field out(grid, Vector3d::Zero());
  for (int c = 0; c < 3; ++c)
    for (int ax = 0; ax < 2; ++ax) {
      ScalarField comp(grid);
      for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = G[ax][k][c];
      ScalarField a = diff_adjoint(grid, comp, ax);
      for (std::size_t k = 0; k < a.size(); ++k) out[k][c] += a[k];
    }
  return out;
}

}  // namespace

Vec3Field p_from_V(const VectorFieldWithGrad& V, const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  Vec3Field p(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix3d& Q0 = frame.Q0(i, j);
      if (std::abs(Q0.determinant()) < 1e-14)
        throw FrameDegeneracyError("singular Q0 in p_from_V");
      const Vector3d rhs(-V.grad[0](i, j).dot(frame.b0(i, j)),
                         -V.grad[1](i, j).dot(frame.b0(i, j)), 0.0);
      p(i, j) = Q0.transpose().partialPivLu().solve(rhs);
    }
  return p;
}

double constraint_residual(const VectorFieldWithGrad& V, const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  double r = 0.0;
  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i) {
      Matrix2d c;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c(a, b) = frame.dy0[a](i, j).dot(V.grad[b](i, j));
      r = std::max(r, (0.5 * (c + c.transpose())).norm());
    }
  return r;
}

Mat2Field bending_tensor(const VectorFieldWithGrad& V, const ImmersionFrame& frame) {
  const ParamGrid& grid = frame.grid;
  Vec3Field p = p_from_V(V, frame);
  std::array<Vec3Field, 2> dp = gradient_fields(grid, p);

  Mat2Field M(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Matrix2d K;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          K(a, b) = frame.dy0[a](i, j).dot(dp[b](i, j)) +
                    V.grad[a](i, j).dot(frame.db0[b](i, j));
      M(i, j) = 0.5 * (K + K.transpose());
    }
  return M;
}

double evaluate_I_beta(const VectorFieldWithGrad& V, const ImmersionFrame& frame,
                       const MetricField3& metric, const EnergyDensitySpec& material,
                       double* constraint_out) {
  const ParamGrid& grid = frame.grid;
  const double cres = constraint_residual(V, frame);
  if (constraint_out) *constraint_out = cres;
  if (cres > 1e-4)
    std::fprintf(stderr,
                 "[prestrain] warning: evaluate_I_beta on a field with constraint "
                 "residual %.3e\n",
                 cres);

  Mat2Field M = bending_tensor(V, frame);
  std::vector<double> vals;
  vals.reserve(grid.size());
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const RelaxedFormResult rel = q2A(M(i, j), metric.A(i, j), material);
      vals.push_back(grid.quad_weight(i, j) * rel.value);
    }
  return pairwise_sum(vals) / 24.0;
}

double penalized_objective(const Vec3Field& V, const ImmersionFrame& frame,
                           const MetricField3& metric, const EnergyDensitySpec& material,
                           double penalty_weight) {
  const ParamGrid& grid = frame.grid;
  VectorFieldWithGrad vg{V, gradient_fields(grid, V)};
  Mat2Field M = bending_tensor(vg, frame);
  std::vector<double> vals;
  vals.reserve(2 * grid.size());
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const double w = grid.quad_weight(i, j);
      vals.push_back(w * q2A(M(i, j), metric.A(i, j), material).value / 24.0);
      Matrix2d c;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c(a, b) = frame.dy0[a](i, j).dot(vg.grad[b](i, j));
      c = symmetrize(c);
      vals.push_back(w * penalty_weight * c.squaredNorm());
    }
  return pairwise_sum(vals);
}

Vec3Field penalized_gradient(const Vec3Field& V, const ImmersionFrame& frame,
                             const MetricField3& metric, const EnergyDensitySpec& material,
                             double penalty_weight) {
  const ParamGrid& grid = frame.grid;
  VectorFieldWithGrad vg{V, gradient_fields(grid, V)};

  Vec3Field p = p_from_V(vg, frame);
  std::array<Vec3Field, 2> dp = gradient_fields(grid, p);

  std::array<Vec3Field, 2> GV{Vec3Field(grid, Vector3d::Zero()),
                              Vec3Field(grid, Vector3d::Zero())};
  std::array<Vec3Field, 2> Gp{Vec3Field(grid, Vector3d::Zero()),
                              Vec3Field(grid, Vector3d::Zero())};

  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const double w = grid.quad_weight(i, j);
      Matrix2d K;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          K(a, b) = frame.dy0[a](i, j).dot(dp[b](i, j)) +
                    vg.grad[a](i, j).dot(frame.db0[b](i, j));
      const Matrix2d M = 0.5 * (K + K.transpose());
      const RelaxedFormResult rel = q2A(M, metric.A(i, j), material);
      const Matrix2d gM = (w / 24.0) * q2A_gradient(M, metric.A(i, j), material, rel);

      for (int b = 0; b < 2; ++b) {
        Vector3d acc = Vector3d::Zero();
        for (int a = 0; a < 2; ++a) acc += gM(a, b) * frame.dy0[a](i, j);
        Gp[b](i, j) += acc;
      }
      for (int a = 0; a < 2; ++a) {
        Vector3d acc = Vector3d::Zero();
        for (int b = 0; b < 2; ++b) acc += gM(a, b) * frame.db0[b](i, j);
        GV[a](i, j) += acc;
      }

      // penalty part
      Matrix2d c;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c(a, b) = frame.dy0[a](i, j).dot(vg.grad[b](i, j));
      c = symmetrize(c);
      for (int b = 0; b < 2; ++b) {
        Vector3d acc = Vector3d::Zero();
        for (int a = 0; a < 2; ++a) acc += 2.0 * w * penalty_weight * c(a, b) * frame.dy0[a](i, j);
        GV[b](i, j) += acc;
      }
    }

  // back through grad(p), then through the pointwise solve, then grad(V)
  Vec3Field gp = adjoint_of_gradient(grid, Gp);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix3d& Q0 = frame.Q0(i, j);
      const Vector3d gr = -Q0.partialPivLu().solve(gp(i, j));  // (-(Q0^T)^{-1})^T = -Q0^{-1}
      for (int a = 0; a < 2; ++a) GV[a](i, j) += gr[a] * frame.b0(i, j);
    }
  return adjoint_of_gradient(grid, GV);
}

MinimizeResult minimize_I_beta(const Vec3Field& V_init, const ImmersionFrame& frame,
                               const MetricField3& metric,
                               const EnergyDensitySpec& material,
                               const MinimizeOptions& opts) {
  const ParamGrid& grid = frame.grid;
  MinimizeResult res;
  res.V = V_init;

  auto ibeta_and_penalty = [&](const Vec3Field& V, double* pen) {
    VectorFieldWithGrad vg{V, gradient_fields(grid, V)};
    double cres = 0.0;
    Mat2Field M = bending_tensor(vg, frame);
    std::vector<double> iv, pv;
    for (int j = 0; j < grid.n2(); ++j)
      for (int i = 0; i < grid.n1(); ++i) {
        const double w = grid.quad_weight(i, j);
        iv.push_back(w * q2A(M(i, j), metric.A(i, j), material).value / 24.0);
        Matrix2d c;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) c(a, b) = frame.dy0[a](i, j).dot(vg.grad[b](i, j));
        c = symmetrize(c);
        pv.push_back(w * c.squaredNorm());
        (void)cres;
      }
    const double pen_l2 = pairwise_sum(pv);
    if (pen) *pen = pen_l2;
    return pairwise_sum(iv) + opts.penalty_weight * pen_l2;
  };

  double step = opts.step_init;
  double pen = 0.0;
  double obj = ibeta_and_penalty(res.V, &pen);
  res.trace.push_back({0, obj - opts.penalty_weight * pen, pen, 0.0});

  for (int it = 1; it <= opts.max_iters; ++it) {
    Vec3Field g = penalized_gradient(res.V, frame, metric, material, opts.penalty_weight);
    double gnorm2 = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) gnorm2 += g[k].squaredNorm();
    if (std::sqrt(gnorm2) <= opts.tol_grad) break;

    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      Vec3Field cand(grid);
      for (std::size_t k = 0; k < cand.size(); ++k) cand[k] = res.V[k] - step * g[k];
      double cpen = 0.0;
      const double cobj = ibeta_and_penalty(cand, &cpen);
      if (cobj <= obj - 1e-4 * step * gnorm2) {
        res.V = cand;
        obj = cobj;
        pen = cpen;
        res.trace.push_back({it, obj - opts.penalty_weight * pen, pen, step});
        step = std::min(step * 1.5, 1e6);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.stagnated = true;  // line search floor; report, not a failure
      break;
    }
  }
  res.final_objective = obj;
  return res;
}

ShellCompareReport shell_compare(const VectorFieldWithGrad& V, const ImmersionFrame& frame,
                                 double skew_tol) {
  const ParamGrid& grid = frame.grid;
  Vec3Field p = p_from_V(V, frame);

  Mat3Field Afield(grid);
  double skew = 0.0, scale = 0.0;
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Matrix3d B;
      B.col(0) = V.grad[0](i, j);
      B.col(1) = V.grad[1](i, j);
      B.col(2) = p(i, j);
      const Matrix3d A = B * frame.Q0(i, j).inverse();
      Afield(i, j) = A;
      skew = std::max(skew, (A + A.transpose()).norm());
      scale = std::max(scale, A.norm());
    }

  ShellCompareReport rep;
  rep.skew_residual = skew;
  if (skew > skew_tol * (1.0 + scale))
    throw InconsistencyError("rotation field is not skew: V violates the constraint");

  // d_e A by differencing the entries
  std::array<Mat3Field, 2> dA{Mat3Field(grid), Mat3Field(grid)};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      ScalarField comp(grid);
      for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = Afield[k](r, c);
      for (int ax = 0; ax < 2; ++ax) {
        ScalarField d = diff(grid, comp, ax);
        for (std::size_t k = 0; k < d.size(); ++k) dA[ax][k](r, c) = d[k];
      }
    }

  Mat2Field M = bending_tensor(V, frame);
  rep.discrepancy_field = ScalarField(grid, 0.0);
  double dn = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    dn = std::max(dn, (frame.b0[k] - frame.normal[k]).norm());
  rep.director_is_normal = dn <= 1e-10;

  // shell-side bending argument <(d_e A) n, d_e y0> against the plate tensor
  // M(e,e); the two coincide exactly when the director is the normal
  double worst = 0.0;
  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i) {
      double nodeworst = 0.0;
      for (int e = 0; e < 2; ++e) {
        const double lhs = (dA[e](i, j) * frame.normal(i, j)).dot(frame.dy0[e](i, j));
        const double rhs = M(i, j)(e, e);
        nodeworst = std::max(nodeworst, std::abs(lhs - rhs));
      }
      rep.discrepancy_field(i, j) = nodeworst;
      worst = std::max(worst, nodeworst);
    }
  if (rep.director_is_normal)
    rep.identity_residual = worst;
  else
    rep.discrepancy = worst;
  return rep;
}

}  // namespace prestrain
