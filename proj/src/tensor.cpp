#include "prestrain/tensor.hpp"

#include <cmath>

namespace prestrain {

MetricView metric_view_from_immersion(const ImmersionFrame& frame) {
  MetricView mv;
  mv.grid = &frame.grid;
  mv.value = frame.g;
  std::array<Mat2Field, 2> dg{Mat2Field(frame.grid), Mat2Field(frame.grid)};
  for (int j = 0; j < frame.grid.n2(); ++j)
    for (int i = 0; i < frame.grid.n1(); ++i)
      for (int k = 0; k < 2; ++k) {
        Matrix2d d;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            d(a, b) = frame.ddy0[a + k](i, j).dot(frame.dy0[b](i, j)) +
                      frame.dy0[a](i, j).dot(frame.ddy0[b + k](i, j));
        dg[k](i, j) = d;
      }
  mv.dvalue = std::move(dg);
  return mv;
}

MetricView second_form_view(const ImmersionFrame& frame) {
  MetricView mv;
  mv.grid = &frame.grid;
  mv.value = frame.Pi;
  return mv;
}

ChristoffelField christoffel(const MetricView& metric) {
  const ParamGrid& grid = *metric.grid;
  ChristoffelField out;
  out.data = NodeField<std::array<Matrix2d, 2>>(grid);

  // derivatives of the metric components, analytic if provided
  std::array<Mat2Field, 2> dg;
  if (metric.dvalue) {
    dg = *metric.dvalue;
  } else {
    dg = {Mat2Field(grid), Mat2Field(grid)};
    for (int a = 0; a < 2; ++a)
      for (int b = a; b < 2; ++b) {
        ScalarField comp(grid);
        for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = metric.value[k](a, b);
        for (int axis = 0; axis < 2; ++axis) {
          ScalarField d = diff(grid, comp, axis);
          for (std::size_t k = 0; k < d.size(); ++k) {
            dg[axis][k](a, b) = d[k];
            dg[axis][k](b, a) = d[k];
          }
        }
      }
  }

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix2d& g = metric.value[k];
    const double det = g.determinant();
    if (!(det > 0.0) || !(g(0, 0) > 0.0))
      throw MetricError("christoffel: metric not positive definite");
    const Matrix2d gi = g.inverse();
    for (int m = 0; m < 2; ++m) {
      Matrix2d G;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double s = 0.0;
          for (int l = 0; l < 2; ++l)
            s += gi(m, l) *
                 (dg[i][k](j, l) + dg[j][k](i, l) - dg[l][k](i, j));
          G(i, j) = 0.5 * s;
        }
      out.data[k][m] = G;
    }
  }
  return out;
}

SurfaceTensorField::SurfaceTensorField(const ParamGrid& grid, int order)
    : order_(order) {
  if (order < 0 || order > 3) throw ConfigError("tensor order must be 0..3");
  c_.assign(1 << order, ScalarField(grid, 0.0));
}

int SurfaceTensorField::pack(std::initializer_list<int> idx) {
  int p = 0;
  for (int v : idx) p = (p << 1) | v;
  return p;
}

void SurfaceTensorField::check_symmetry(double tol) const {
  if (order_ != 2) return;
  for (std::size_t k = 0; k < c_[0].size(); ++k)
    if (std::abs(c_[1][k] - c_[2][k]) > tol)
      throw InconsistencyError("tensor declared symmetric is not");
}

SurfaceTensorField covariant_derivative(const SurfaceTensorField& T,
                                        const MetricView& metric,
                                        const ChristoffelField& gamma) {
  if (T.order() > 2) throw ConfigError("covariant derivative: unsupported order > 2");
  const ParamGrid& grid = *metric.grid;
  const int k = T.order();
  SurfaceTensorField out(grid, k + 1);

  // coordinate partials of every component, analytic when attached
  std::vector<std::array<ScalarField, 2>> dT(T.comps());
  for (int c = 0; c < T.comps(); ++c) {
    if (T.partials) {
      dT[c] = {(*T.partials)[0][c], (*T.partials)[1][c]};
    } else {
      dT[c] = {diff(grid, T.comp(c), 0), diff(grid, T.comp(c), 1)};
    }
  }

  for (int c = 0; c < T.comps(); ++c) {
    // unpack the k slot indices of component c
    std::array<int, 3> idx{};
    for (int s = 0; s < k; ++s) idx[s] = (c >> (k - 1 - s)) & 1;
    for (int l = 0; l < 2; ++l) {
      ScalarField& dst = out.comp((c << 1) | l);
      for (std::size_t node = 0; node < dst.size(); ++node) {
        double v = dT[c][l][node];
        for (int s = 0; s < k; ++s) {
          for (int m = 0; m < 2; ++m) {
            std::array<int, 3> jdx = idx;
            jdx[s] = m;
            int cc = 0;
            for (int t = 0; t < k; ++t) cc = (cc << 1) | jdx[t];
            v -= gamma.gamma(idx[s], l, node, m) * T.comp(cc)[node];
          }
        }
        dst[node] = v;
      }
    }
  }
  return out;
}

SurfaceFrame::SurfaceFrame(const ImmersionFrame& frame)
    : frame_(&frame),
      gview_(metric_view_from_immersion(frame)),
      gamma_(christoffel(gview_)),
      Ec_{Vec2Field(frame.grid), Vec2Field(frame.grid)},
      Qc_(frame.grid) {
  const ParamGrid& grid = frame.grid;
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) dEc_[a][x] = Vec2Field(grid);

  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix2d& g = frame_->g(i, j);
      const double g11 = g(0, 0), g12 = g(0, 1), g22 = g(1, 1);
      const double det = g11 * g22 - g12 * g12;
      const double p = 1.0 / std::sqrt(g11);
      const double s = std::sqrt(g11 / det);
      Ec_[0](i, j) = Vector2d(p, 0.0);
      Ec_[1](i, j) = Vector2d(-g12 / g11 * s, s);

      for (int x = 0; x < 2; ++x) {
        const Matrix2d& dgm = (*gview_.dvalue)[x](i, j);
        const double dg11 = dgm(0, 0), dg12 = dgm(0, 1), dg22 = dgm(1, 1);
        const double ddet = dg11 * g22 + g11 * dg22 - 2.0 * g12 * dg12;
        const double dp = -0.5 * std::pow(g11, -1.5) * dg11;
        const double ds = 0.5 * s * (dg11 / g11 - ddet / det);
        dEc_[0][x](i, j) = Vector2d(dp, 0.0);
        const double u1 = -g12 / g11;
        const double du1 = -(dg12 * g11 - g12 * dg11) / (g11 * g11);
        dEc_[1][x](i, j) = Vector2d(du1 * s + u1 * ds, ds);
      }

      const Vector2d ge1 = g * Ec_[0](i, j);
      const Vector2d ge2 = g * Ec_[1](i, j);
      Matrix2d Qc;
      for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a)
          Qc(b, a) = Ec_[0](i, j)[b] * ge2[a] - Ec_[1](i, j)[b] * ge1[a];
      Qc_(i, j) = Qc;
    }
  }

  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      DEE_[k][j] = Vec2Field(grid);
      for (int jj = 0; jj < grid.n2(); ++jj)
        for (int ii = 0; ii < grid.n1(); ++ii) {
          const std::size_t node = grid.index(ii, jj);
          Vector2d v = Vector2d::Zero();
          for (int m = 0; m < 2; ++m) {
            double acc = 0.0;
            for (int i = 0; i < 2; ++i) {
              double term = dEc_[j][i](ii, jj)[m];
              for (int l = 0; l < 2; ++l)
                term += Ec_[j](ii, jj)[l] * gamma_.gamma(i, l, node, m);
              acc += Ec_[k](ii, jj)[i] * term;
            }
            v[m] = acc;
          }
          DEE_[k][j](ii, jj) = v;
        }
    }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      brk_[i][j] = Vec2Field(grid);
      for (std::size_t k = 0; k < grid.size(); ++k)
        brk_[i][j][k] = DEE_[i][j][k] - DEE_[j][i][k];
    }
}

double SurfaceFrame::Pi_frame(int i, int j, int a, int b) const {
  const Matrix2d& Pi = frame_->Pi(i, j);
  const Vector2d& ea = Ec_[a](i, j);
  const Vector2d& eb = Ec_[b](i, j);
  return ea.transpose() * Pi * eb;
}

Vec2Field rotate_Q(const SurfaceFrame& sf, const Vec2Field& X) {
  Vec2Field out(sf.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sf.rotation()[k] * X[k];
  return out;
}

Vec2Field lambda_field(const SurfaceTensorField& U, const SurfaceFrame& sf) {
  if (U.order() != 2) throw ConfigError("lambda_field expects a 2-tensor");
  U.check_symmetry(1e-10);
  const ParamGrid& grid = sf.grid();
  SurfaceTensorField DU = covariant_derivative(U, sf.metric(), sf.christoffels());
  Vec2Field out(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix2d gi = sf.immersion().ginv(i, j);
      Vector2d lam_form = Vector2d::Zero();
      for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            s += gi(k, l) * DU.comp((((b << 1) | k) << 1) | l)(i, j);
        lam_form[b] = s;
      }
      out(i, j) = gi * lam_form;
    }
  return out;
}

ScalarField laplace_beltrami(const ParamGrid& grid, const ScalarField& v,
                             const Mat2Field& m) {
  ScalarField out(grid, 0.0);
  const int n1 = grid.n1(), n2 = grid.n2();
  const double h1 = grid.h1(), h2 = grid.h2();

  // coefficient fields J*m^{ab} with J = sqrt(det m)
  ScalarField a11(grid), a12(grid), a22(grid), J(grid);
  for (std::size_t k = 0; k < J.size(); ++k) {
    const Matrix2d& mm = m[k];
    const double det = mm.determinant();
    if (!(det > 0.0) || !(mm(0, 0) > 0.0))
      throw NotEllipticError("laplace_beltrami: metric is not positive definite");
    const double j = std::sqrt(det);
    const Matrix2d mi = mm.inverse();
    J[k] = j;
    a11[k] = j * mi(0, 0);
    a12[k] = j * mi(0, 1);
    a22[k] = j * mi(1, 1);
  }

  auto d2v_at = [&](int i, int j) { return (v(i, j + 1) - v(i, j - 1)) / (2 * h2); };
  auto d1v_at = [&](int i, int j) { return (v(i + 1, j) - v(i - 1, j)) / (2 * h1); };

  for (int j = 1; j < n2 - 1; ++j) {
    for (int i = 1; i < n1 - 1; ++i) {
      // pure fluxes at half points plus centered cross terms
      const double F1p = 0.5 * (a11(i + 1, j) + a11(i, j)) * (v(i + 1, j) - v(i, j)) / h1 +
                         0.5 * (a12(i + 1, j) * d2v_at(i + 1, j) + a12(i, j) * d2v_at(i, j));
      const double F1m = 0.5 * (a11(i, j) + a11(i - 1, j)) * (v(i, j) - v(i - 1, j)) / h1 +
                         0.5 * (a12(i - 1, j) * d2v_at(i - 1, j) + a12(i, j) * d2v_at(i, j));
      const double F2p = 0.5 * (a22(i, j + 1) + a22(i, j)) * (v(i, j + 1) - v(i, j)) / h2 +
                         0.5 * (a12(i, j + 1) * d1v_at(i, j + 1) + a12(i, j) * d1v_at(i, j));
      const double F2m = 0.5 * (a22(i, j) + a22(i, j - 1)) * (v(i, j) - v(i, j - 1)) / h2 +
                         0.5 * (a12(i, j - 1) * d1v_at(i, j - 1) + a12(i, j) * d1v_at(i, j));
      out(i, j) = ((F1p - F1m) / h1 + (F2p - F2m) / h2) / J(i, j);
    }
  }
  return out;
}

VectorFieldWithGrad VectorFieldWithGrad::from_values(const ParamGrid& grid,
                                                     const Vec3Field& v) {
  VectorFieldWithGrad out{v, {Vec3Field(grid), Vec3Field(grid)}};
  for (int c = 0; c < 3; ++c) {
    ScalarField comp(grid);
    for (std::size_t k = 0; k < comp.size(); ++k) comp[k] = v[k][c];
    for (int axis = 0; axis < 2; ++axis) {
      ScalarField d = diff(grid, comp, axis);
      for (std::size_t k = 0; k < d.size(); ++k) out.grad[axis][k][c] = d[k];
    }
  }
  return out;
}

PullbackStrain pullback_strain(const VectorFieldWithGrad& V, const SurfaceFrame& sf) {
  const ImmersionFrame& fr = sf.immersion();
  const ParamGrid& grid = fr.grid;
  PullbackStrain out{SurfaceTensorField(grid, 2), SurfaceTensorField(grid, 2), 0.0};
  out.chart.symmetric_declared = true;
  out.surface.symmetric_declared = true;

  // chart side
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Matrix2d c;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c(a, b) = fr.dy0[a](i, j).dot(V.grad[b](i, j));
      c = symmetrize(c);
      out.chart.comp(0)(i, j) = c(0, 0);
      out.chart.comp(1)(i, j) = c(0, 1);
      out.chart.comp(2)(i, j) = c(1, 0);
      out.chart.comp(3)(i, j) = c(1, 1);
    }

  // surface side: sym D (V^T) + <V,n> Pi with the tangential 1-form of V
  std::array<ScalarField, 2> t{ScalarField(grid), ScalarField(grid)};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    t[0][k] = V.value[k].dot(fr.dy0[0][k]);
    t[1][k] = V.value[k].dot(fr.dy0[1][k]);
  }
  std::array<std::array<ScalarField, 2>, 2> dt;
  for (int a = 0; a < 2; ++a)
    for (int x = 0; x < 2; ++x) dt[a][x] = diff(grid, t[a], x);

  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const std::size_t node = grid.index(i, j);
      Matrix2d s;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          double v = 0.5 * (dt[a][b](i, j) + dt[b][a](i, j));
          for (int c = 0; c < 2; ++c)
            v -= sf.christoffels().gamma(a, b, node, c) * t[c](i, j);
          s(a, b) = v;
        }
      s += V.value(i, j).dot(fr.normal(i, j)) * fr.Pi(i, j);
      out.surface.comp(0)(i, j) = s(0, 0);
      out.surface.comp(1)(i, j) = s(0, 1);
      out.surface.comp(2)(i, j) = s(1, 0);
      out.surface.comp(3)(i, j) = s(1, 1);
    }

  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i)
      for (int c = 0; c < 4; ++c)
        out.max_mismatch_interior =
            std::max(out.max_mismatch_interior,
                     std::abs(out.chart.comp(c)(i, j) - out.surface.comp(c)(i, j)));
  return out;
}

double identity_314_residual(const VectorFieldWithGrad& f, const SurfaceFrame& sf) {
  const ImmersionFrame& fr = sf.immersion();
  const ParamGrid& grid = fr.grid;

  // T(a_frame, b_frame) = <grad_{E_b} f, E_a-lifted>; W(a_coord, b_frame);
  // Tn(b_frame) = <grad_{E_b} f, n>
  std::array<std::array<ScalarField, 2>, 2> T;   // T[a][b]
  std::array<std::array<ScalarField, 2>, 2> W;   // W[coord a][frame b]
  std::array<ScalarField, 2> Tn;
  for (auto& row : T)
    for (auto& s : row) s = ScalarField(grid);
  for (auto& row : W)
    for (auto& s : row) s = ScalarField(grid);
  for (auto& s : Tn) s = ScalarField(grid);

  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      for (int b = 0; b < 2; ++b) {
        const Vector2d eb = sf.frame_comp(b)(i, j);
        const Vector3d gradb = eb[0] * f.grad[0](i, j) + eb[1] * f.grad[1](i, j);
        Tn[b](i, j) = gradb.dot(fr.normal(i, j));
        for (int a = 0; a < 2; ++a) {
          const Vector3d Ea = sf.to_r3(i, j, sf.frame_comp(a)(i, j));
          T[a][b](i, j) = gradb.dot(Ea);
        }
        for (int a = 0; a < 2; ++a) W[a][b](i, j) = gradb.dot(fr.dy0[a](i, j));
      }
    }

  // S = sym((dy0)^T dV) in coordinate components and its intrinsic covariant
  // derivative; the right side differentiates only S and first-order data.
  SurfaceTensorField S(grid, 2);
  S.symmetric_declared = true;
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Matrix2d c;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c(a, b) = fr.dy0[a](i, j).dot(f.grad[b](i, j));
      c = symmetrize(c);
      S.comp(0)(i, j) = c(0, 0);
      S.comp(1)(i, j) = c(0, 1);
      S.comp(2)(i, j) = c(1, 0);
      S.comp(3)(i, j) = c(1, 1);
    }
  SurfaceTensorField DS = covariant_derivative(S, sf.metric(), sf.christoffels());

  // directional derivatives of the T-fields for the left side
  std::array<std::array<std::array<ScalarField, 2>, 2>, 2> dT;  // dT[a][b][axis]
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x) dT[a][b][x] = diff(grid, T[a][b], x);

  auto DS_frame = [&](int i, int j, const Vector2d& a, const Vector2d& b,
                      const Vector2d& c) {
    double s = 0.0;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int l = 0; l < 2; ++l)
          s += a[p] * b[q] * c[l] * DS.comp((((p << 1) | q) << 1) | l)(i, j);
    return s;
  };

  double worst = 0.0;
  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i) {
      for (int ii = 0; ii < 2; ++ii)
        for (int jj = 0; jj < 2; ++jj)
          for (int kk = 0; kk < 2; ++kk) {
            // LHS: E_k(T(i,j)) - T(D_{E_k}E_i, E_j) + Pi(E_k,E_i) Tn(E_j)
            //      - T(E_i, D_{E_k}E_j)   [normal derivative convention]
            const Vector2d ek = sf.frame_comp(kk)(i, j);
            double lhs = ek[0] * dT[ii][jj][0](i, j) + ek[1] * dT[ii][jj][1](i, j);
            const Vector2d dki = sf.covariant_frame_derivative(kk, ii)(i, j);
            lhs -= dki[0] * W[0][jj](i, j) + dki[1] * W[1][jj](i, j);
            lhs += sf.Pi_frame(i, j, kk, ii) * Tn[jj](i, j);
            const Vector2d dkj = sf.covariant_frame_derivative(kk, jj)(i, j);
            // T(E_i, tangent-direction c) via frame decomposition of c
            {
              const Matrix2d& g = fr.g(i, j);
              const Vector2d gc = g * dkj;
              const double c1 = sf.frame_comp(0)(i, j).dot(gc);
              const double c2 = sf.frame_comp(1)(i, j).dot(gc);
              lhs -= c1 * T[ii][0](i, j) + c2 * T[ii][1](i, j);
            }

            // RHS: DS(Ei,Ej;Ek) + DS(Ek,Ei;Ej) - DS(Ej,Ek;Ei) + Pi(Ej,Ek) Tn(Ei)
            const Vector2d ei = sf.frame_comp(ii)(i, j);
            const Vector2d ej = sf.frame_comp(jj)(i, j);
            double rhs = DS_frame(i, j, ei, ej, ek) + DS_frame(i, j, ek, ei, ej) -
                         DS_frame(i, j, ej, ek, ei) +
                         sf.Pi_frame(i, j, jj, kk) * Tn[ii](i, j);
            worst = std::max(worst, std::abs(lhs - rhs));
          }
    }
  return worst;
}

}  // namespace prestrain
