#include "prestrain/strain.hpp"

#include <cmath>

#include <Eigen/SparseLU>

namespace prestrain {

namespace {

Matrix2d shape_operator(const ImmersionFrame& fr, int i, int j) {
  // S^k_i = g^{kl} Pi_{li}; columns are derivative directions
  return fr.ginv(i, j) * fr.Pi(i, j);
}

}  // namespace

StrainSolver::StrainSolver(const SurfaceFrame& sf) : sf_(&sf) {
  const ImmersionFrame& fr = sf.immersion();
  const ParamGrid& grid = fr.grid;
  a11_ = ScalarField(grid);
  a12_ = ScalarField(grid);
  a22_ = ScalarField(grid);
  J_ = ScalarField(grid);
  trgPi_ = ScalarField(grid);
  kappa_ = fr.kappa;
  xcoef_ = Vec2Field(grid);

  for (int j = 0; j < grid.n2(); ++j) {
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix2d& Pi = fr.Pi(i, j);
      Eigen::SelfAdjointEigenSolver<Matrix2d> es(Pi);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw NotEllipticError(
            "surface is not elliptic: second fundamental form is not positive "
            "definite (flip orientation for elliptic-negative patches)");
      const double det = Pi.determinant();
      const double Jv = std::sqrt(det);
      const Matrix2d Piinv = Pi.inverse();
      J_(i, j) = Jv;
      a11_(i, j) = Jv * Piinv(0, 0);
      a12_(i, j) = Jv * Piinv(0, 1);
      a22_(i, j) = Jv * Piinv(1, 1);

      const Matrix2d gi = fr.ginv(i, j);
      trgPi_(i, j) = (gi * Pi).trace();
      if (trgPi_(i, j) <= 0.0)
        throw NotEllipticError("reaction term tr_g Pi is not positive");

      const double kap = kappa_(i, j);
      if (!(kap > 1e-12))
        throw NotEllipticError("Gauss curvature vanishes on an elliptic patch");

      const Matrix2d S = shape_operator(fr, i, j);
      const Matrix2d Sinv = S.inverse();
      const Vector2d dk(fr.dkappa[0](i, j), fr.dkappa[1](i, j));
      const Vector2d Dk = gi * dk;  // raised curvature gradient
      const Vector2d SinvDk = Sinv * Dk;
      const Matrix2d& Qc = sf.rotation()(i, j);
      const Vector2d QDk = Qc * Dk;
      const Vector2d z = (Qc * gi).transpose() * (Pi * QDk);
      xcoef_(i, j) = -SinvDk / kap + z / (2.0 * kap * kap);
    }
  }
}

Vec2Field StrainSolver::compute_QPhi(const SurfaceTensorField& U) const {
  const ImmersionFrame& fr = sf_->immersion();
  const ParamGrid& grid = fr.grid;
  Vec2Field lam = lambda_field(U, *sf_);

  // tr_g U and its gradient (analytic when U carries partials)
  ScalarField tr(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix2d gi = fr.ginv(i, j);
      tr(i, j) = gi(0, 0) * U.comp(0)(i, j) + gi(0, 1) * U.comp(1)(i, j) +
                 gi(1, 0) * U.comp(2)(i, j) + gi(1, 1) * U.comp(3)(i, j);
    }
  std::array<ScalarField, 2> dtr;
  if (U.partials) {
    for (int ax = 0; ax < 2; ++ax) dtr[ax] = ScalarField(grid);
    const auto& gview = sf_->metric();
    for (int j = 0; j < grid.n2(); ++j)
      for (int i = 0; i < grid.n1(); ++i) {
        const Matrix2d gi = fr.ginv(i, j);
        for (int ax = 0; ax < 2; ++ax) {
          const Matrix2d dgi = -gi * (*gview.dvalue)[ax](i, j) * gi;
          double s = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              s += dgi(a, b) * U.comp((a << 1) | b)(i, j);
              s += gi(a, b) * (*U.partials)[ax][(a << 1) | b](i, j);
            }
          dtr[ax](i, j) = s;
        }
      }
  } else {
    dtr = {diff(grid, tr, 0), diff(grid, tr, 1)};
  }

  Vec2Field out(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix2d gi = fr.ginv(i, j);
      const Vector2d gradtr = gi * Vector2d(dtr[0](i, j), dtr[1](i, j));
      out(i, j) = sf_->rotation()(i, j) * (lam(i, j) - gradtr);
    }
  return out;
}

ScalarField StrainSolver::assemble_P(const SurfaceTensorField& U) const {
  const ImmersionFrame& fr = sf_->immersion();
  const ParamGrid& grid = fr.grid;
  Vec2Field qphi = compute_QPhi(U);

  // lower QPhi and take its intrinsic covariant derivative
  SurfaceTensorField qphi_form(grid, 1);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Vector2d w = fr.g(i, j) * qphi(i, j);
      qphi_form.comp(0)(i, j) = w[0];
      qphi_form.comp(1)(i, j) = w[1];
    }
  SurfaceTensorField Dqphi =
      covariant_derivative(qphi_form, sf_->metric(), sf_->christoffels());

  ScalarField P(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix2d gi = fr.ginv(i, j);
      const Matrix2d& Pi = fr.Pi(i, j);
      const Matrix2d& Qc = sf_->rotation()(i, j);

      Matrix2d T;  // T_{cl} = (QPhi_form)_{c;l}
      T << Dqphi.comp(0)(i, j), Dqphi.comp(1)(i, j), Dqphi.comp(2)(i, j),
          Dqphi.comp(3)(i, j);
      const Matrix2d QstarPi = Qc.transpose() * Pi * Qc;  // (Q*Pi)_{ij} = Pi(Q di, Q dj)
      const double first = (gi * T * gi.transpose() * QstarPi.transpose()).trace();

      const Matrix2d S = shape_operator(fr, i, j);
      const Vector2d dk(fr.dkappa[0](i, j), fr.dkappa[1](i, j));
      const Vector2d SinvDk = S.inverse() * (gi * dk);
      const double second = qphi(i, j).transpose() * fr.g(i, j) * SinvDk;

      const Matrix2d QS = Qc * S;
      double third = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int m = 0; m < 2; ++m)
            third += gi(a, b) * QS(m, a) * U.comp((m << 1) | b)(i, j);
      third *= kappa_(i, j);

      P(i, j) = first - second - third;
    }
  return P;
}

namespace {

// Flux-form stencil of the ghat-Laplacian at an interior node. Emits
// (di, dj, weight) through `add`.
template <class F>
void emit_laplacian_row(const ScalarField& a11, const ScalarField& a12,
                        const ScalarField& a22, const ScalarField& J, double h1,
                        double h2, int i, int j, F&& add) {
  const double inv_h1h1 = 1.0 / (h1 * h1);
  const double inv_h2h2 = 1.0 / (h2 * h2);
  const double inv_cross = 1.0 / (4.0 * h1 * h2);
  const double Ap = 0.5 * (a11(i + 1, j) + a11(i, j));
  const double Am = 0.5 * (a11(i, j) + a11(i - 1, j));
  const double Bp = 0.5 * (a22(i, j + 1) + a22(i, j));
  const double Bm = 0.5 * (a22(i, j) + a22(i, j - 1));
  const double invJ = 1.0 / J(i, j);

  add(1, 0, Ap * inv_h1h1 * invJ);
  add(-1, 0, Am * inv_h1h1 * invJ);
  add(0, 1, Bp * inv_h2h2 * invJ);
  add(0, -1, Bm * inv_h2h2 * invJ);
  add(0, 0, -(Ap + Am) * inv_h1h1 * invJ - (Bp + Bm) * inv_h2h2 * invJ);

  // cross terms: d1(a12 d2 v) + d2(a12 d1 v), centered
  add(1, 1, (a12(i + 1, j) + a12(i, j + 1)) * inv_cross * invJ);
  add(1, -1, -(a12(i + 1, j) + a12(i, j - 1)) * inv_cross * invJ);
  add(-1, 1, -(a12(i - 1, j) + a12(i, j + 1)) * inv_cross * invJ);
  add(-1, -1, (a12(i - 1, j) + a12(i, j - 1)) * inv_cross * invJ);
}

}  // namespace

ScalarField StrainSolver::solve_v(const ScalarField& P, const ScalarField& bc) const {
  const ParamGrid& grid = sf_->grid();
  const int n1 = grid.n1(), n2 = grid.n2();
  const std::size_t N = grid.size();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(10 * N);
  Eigen::VectorXd rhs(N);

  for (int j = 0; j < n2; ++j) {
    for (int i = 0; i < n1; ++i) {
      const std::size_t row = grid.index(i, j);
      if (grid.boundary(i, j)) {
        trip.emplace_back(row, row, 1.0);
        rhs(row) = bc(i, j);
        continue;
      }
      emit_laplacian_row(a11_, a12_, a22_, J_, grid.h1(), grid.h2(), i, j,
                         [&](int di, int dj, double w) {
                           trip.emplace_back(row, grid.index(i + di, j + dj), w);
                         });
      trip.emplace_back(row, row, trgPi_(i, j));
      // first-order curvature-gradient terms, centered
      const Vector2d c = xcoef_(i, j);
      trip.emplace_back(row, grid.index(i + 1, j), c[0] / (2 * grid.h1()));
      trip.emplace_back(row, grid.index(i - 1, j), -c[0] / (2 * grid.h1()));
      trip.emplace_back(row, grid.index(i, j + 1), c[1] / (2 * grid.h2()));
      trip.emplace_back(row, grid.index(i, j - 1), -c[1] / (2 * grid.h2()));
      rhs(row) = P(i, j) / kappa_(i, j);
    }
  }

  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw SolveError("v-equation factorization failed");
  Eigen::VectorXd sol = lu.solve(rhs);
  const double res = (A * sol - rhs).norm();
  if (!(res <= 1e-8 * (rhs.norm() + 1.0)))
    throw SolveError("v-equation solve residual too large");

  ScalarField v(grid);
  for (std::size_t k = 0; k < N; ++k) v[k] = sol(k);
  return v;
}

Vec2Field StrainSolver::recover_u(const ScalarField& v, const SurfaceTensorField& U) const {
  const ImmersionFrame& fr = sf_->immersion();
  const ParamGrid& grid = fr.grid;
  Vec2Field qphi = compute_QPhi(U);
  std::array<ScalarField, 2> dv{diff(grid, v, 0), diff(grid, v, 1)};

  Vec2Field u(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Matrix2d Sinv = shape_operator(fr, i, j).inverse();
      const Matrix2d& Qc = sf_->rotation()(i, j);
      const Vector2d Dv = fr.ginv(i, j) * Vector2d(dv[0](i, j), dv[1](i, j));
      u(i, j) = Qc * (Sinv * qphi(i, j)) - Qc * (Sinv * Dv);
    }
  return u;
}

StrainSolution StrainSolver::reconstruct_y(const ScalarField& v, const Vec2Field& u_comp,
                                           const SurfaceTensorField& U) const {
  const ImmersionFrame& fr = sf_->immersion();
  const ParamGrid& grid = fr.grid;
  const std::size_t N = grid.size();

  StrainSolution out;
  out.v = v;
  out.u_comp = u_comp;
  out.u = Vec3Field(grid);
  out.dy = {Vec3Field(grid), Vec3Field(grid)};

  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      out.u(i, j) = sf_->to_r3(i, j, u_comp(i, j));
      const Matrix2d gi = fr.ginv(i, j);
      const Matrix2d& Qc = sf_->rotation()(i, j);
      for (int a = 0; a < 2; ++a) {
        const Vector2d Ua(U.comp((a << 1) | 0)(i, j), U.comp((a << 1) | 1)(i, j));
        const Vector2d raised = gi * Ua;
        const Vector2d Qa = Qc.col(a);
        Vector3d F = raised[0] * fr.dy0[0](i, j) + raised[1] * fr.dy0[1](i, j);
        F -= v(i, j) * sf_->to_r3(i, j, Qa);
        F += out.u(i, j).dot(fr.dy0[a](i, j)) * fr.normal(i, j);
        out.dy[a](i, j) = F;
      }
    }

  // one Neumann least-squares integration per component, gauge y(0,0) = 0
  std::vector<Eigen::Triplet<double>> dtrip[2];
  for (int axis = 0; axis < 2; ++axis) {
    const double h = axis == 0 ? grid.h1() : grid.h2();
    for (int j = 0; j < grid.n2(); ++j)
      for (int i = 0; i < grid.n1(); ++i) {
        const std::size_t row = grid.index(i, j);
        const int q = axis == 0 ? i : j;
        const int qmax = axis == 0 ? grid.n1() - 1 : grid.n2() - 1;
        auto col = [&](int dq) {
          return axis == 0 ? grid.index(i + dq, j) : grid.index(i, j + dq);
        };
        if (q == 0) {
          dtrip[axis].emplace_back(row, col(0), -3.0 / (2 * h));
          dtrip[axis].emplace_back(row, col(1), 4.0 / (2 * h));
          dtrip[axis].emplace_back(row, col(2), -1.0 / (2 * h));
        } else if (q == qmax) {
          dtrip[axis].emplace_back(row, col(0), 3.0 / (2 * h));
          dtrip[axis].emplace_back(row, col(-1), -4.0 / (2 * h));
          dtrip[axis].emplace_back(row, col(-2), 1.0 / (2 * h));
        } else {
          dtrip[axis].emplace_back(row, col(1), 1.0 / (2 * h));
          dtrip[axis].emplace_back(row, col(-1), -1.0 / (2 * h));
        }
      }
  }
  Eigen::SparseMatrix<double> D1(N, N), D2(N, N);
  D1.setFromTriplets(dtrip[0].begin(), dtrip[0].end());
  D2.setFromTriplets(dtrip[1].begin(), dtrip[1].end());
  Eigen::SparseMatrix<double> A = Eigen::SparseMatrix<double>(D1.transpose()) * D1 +
                                  Eigen::SparseMatrix<double>(D2.transpose()) * D2;
  // pin the gauge node
  A.prune([](int r, int, double) { return r != 0; });
  A.coeffRef(0, 0) = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw SolveError("integration factorization failed");

  out.y = Vec3Field(grid);
  double int_res = 0.0;
  for (int c = 0; c < 3; ++c) {
    Eigen::VectorXd F1(N), F2(N);
    for (std::size_t k = 0; k < N; ++k) {
      F1(k) = out.dy[0][k][c];
      F2(k) = out.dy[1][k][c];
    }
    Eigen::VectorXd rhs = D1.transpose() * F1 + D2.transpose() * F2;
    rhs(0) = 0.0;
    Eigen::VectorXd yc = lu.solve(rhs);
    for (std::size_t k = 0; k < N; ++k) out.y[k][c] = yc(k);
    int_res = std::max(int_res, (D1 * yc - F1).cwiseAbs().maxCoeff());
    int_res = std::max(int_res, (D2 * yc - F2).cwiseAbs().maxCoeff());
  }
  out.integration_residual = int_res;
  double fscale = 0.0;
  for (int ax = 0; ax < 2; ++ax)
    for (std::size_t k = 0; k < N; ++k) fscale = std::max(fscale, out.dy[ax][k].norm());
  if (int_res > integration_guard * (1.0 + fscale))
    throw InconsistencyError("prescribed gradient is far from integrable");
  return out;
}

StrainSolution StrainSolver::solve(const StrainRHS& rhs, const ScalarField& bc) const {
  const ParamGrid& grid = sf_->grid();
  ScalarField P = assemble_P(rhs.U);
  ScalarField v = solve_v(P, bc);
  Vec2Field u = recover_u(v, rhs.U);
  StrainSolution sol = reconstruct_y(v, u, rhs.U);

  // honest residual: differenced gradient of the reconstructed field
  VectorFieldWithGrad yg = VectorFieldWithGrad::from_values(grid, sol.y);
  SurfaceTensorField meas = strain_of_field(yg, *sf_);
  double res = 0.0;
  for (int j = 1; j < grid.n2() - 1; ++j)
    for (int i = 1; i < grid.n1() - 1; ++i)
      for (int c = 0; c < 4; ++c)
        res = std::max(res, std::abs(meas.comp(c)(i, j) - rhs.U.comp(c)(i, j)));
  sol.residual = res;

  double vn = 0.0, un = 0.0, Un = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    vn = std::max(vn, std::abs(sol.v[k]));
    un = std::max(un, sol.u[k].norm());
    for (int c = 0; c < 4; ++c) Un = std::max(Un, std::abs(rhs.U.comp(c)[k]));
  }
  sol.v_norm = vn;
  sol.u_norm = un;
  sol.rhs_norm = Un;
  return sol;
}

StrainSolution StrainSolver::solve_kernel(const ScalarField& bc) const {
  SurfaceTensorField U(sf_->grid(), 2);
  U.symmetric_declared = true;
  return solve(StrainRHS(U), bc);
}

ScalarField p_functional(const VectorFieldWithGrad& y, const SurfaceFrame& sf) {
  const ParamGrid& grid = sf.grid();
  ScalarField v(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const Vector2d e1 = sf.frame_comp(0)(i, j);
      const Vector2d e2 = sf.frame_comp(1)(i, j);
      const Vector3d g1 = e1[0] * y.grad[0](i, j) + e1[1] * y.grad[1](i, j);
      const Vector3d g2 = e2[0] * y.grad[0](i, j) + e2[1] * y.grad[1](i, j);
      const Vector3d E1 = sf.to_r3(i, j, e1);
      const Vector3d E2 = sf.to_r3(i, j, e2);
      v(i, j) = 0.5 * (g1.dot(E2) - g2.dot(E1));
    }
  return v;
}

Vec3Field u_functional(const VectorFieldWithGrad& y, const SurfaceFrame& sf) {
  const ParamGrid& grid = sf.grid();
  const ImmersionFrame& fr = sf.immersion();
  Vec3Field u(grid);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Vector3d acc = Vector3d::Zero();
      for (int a = 0; a < 2; ++a) {
        const Vector2d ea = sf.frame_comp(a)(i, j);
        const Vector3d ga = ea[0] * y.grad[0](i, j) + ea[1] * y.grad[1](i, j);
        acc += ga.dot(fr.normal(i, j)) * sf.to_r3(i, j, ea);
      }
      u(i, j) = acc;
    }
  return u;
}

SurfaceTensorField strain_of_field(const VectorFieldWithGrad& V, const SurfaceFrame& sf,
                                   const std::array<Vec3Field, 3>* hessian) {
  const ImmersionFrame& fr = sf.immersion();
  const ParamGrid& grid = fr.grid;
  SurfaceTensorField U(grid, 2);
  U.symmetric_declared = true;
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      Matrix2d c;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) c(a, b) = fr.dy0[a](i, j).dot(V.grad[b](i, j));
      c = symmetrize(c);
      U.comp(0)(i, j) = c(0, 0);
      U.comp(1)(i, j) = c(0, 1);
      U.comp(2)(i, j) = c(1, 0);
      U.comp(3)(i, j) = c(1, 1);
    }
  if (hessian) {
    std::array<std::vector<ScalarField>, 2> parts;
    for (int ax = 0; ax < 2; ++ax) parts[ax].assign(4, ScalarField(grid));
    for (int j = 0; j < grid.n2(); ++j)
      for (int i = 0; i < grid.n1(); ++i)
        for (int ax = 0; ax < 2; ++ax) {
          Matrix2d dc;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              dc(a, b) = fr.ddy0[a + ax](i, j).dot(V.grad[b](i, j)) +
                         fr.dy0[a](i, j).dot((*hessian)[b + ax](i, j));
          dc = symmetrize(dc);
          parts[ax][0](i, j) = dc(0, 0);
          parts[ax][1](i, j) = dc(0, 1);
          parts[ax][2](i, j) = dc(1, 0);
          parts[ax][3](i, j) = dc(1, 1);
        }
    U.partials = std::move(parts);
  }
  return U;
}

}  // namespace prestrain
