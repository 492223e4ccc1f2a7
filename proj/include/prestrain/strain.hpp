#pragma once

#include <Eigen/SparseCore>

#include "prestrain/tensor.hpp"

namespace prestrain {

/// Right-hand side of the linear strain equations sym(grad y) = U on the
/// surface, given in coordinate components on Omega.
struct StrainRHS {
  SurfaceTensorField U;
  explicit StrainRHS(SurfaceTensorField u) : U(std::move(u)) {
    U.check_symmetry(1e-9);
  }
};

struct StrainSolution {
  ScalarField v;                   // rotation scalar
  Vec2Field u_comp;                // tangent field, coordinate components
  Vec3Field u;                     // same field in R^3
  Vec3Field y;                     // reconstructed displacement
  std::array<Vec3Field, 2> dy;     // prescribed gradient (exact in fields)
  double residual = 0.0;           // max interior |sym((dy0)^T grad y) - U|, differenced
  double integration_residual = 0.0;
  double v_norm = 0.0, u_norm = 0.0, rhs_norm = 0.0;  // stability bookkeeping
};

/// Elliptic strain solver on a single-chart surface patch. Construction
/// validates ellipticity: Pi must be positive definite up to the boundary
/// (the standard normalization; flip the orientation for Pi < 0) and kappa
/// bounded away from zero.
class StrainSolver {
 public:
  explicit StrainSolver(const SurfaceFrame& sf);

  /// Scalar source of the v-equation, including the inverse-shape-operator
  /// and curvature-gradient terms.
  ScalarField assemble_P(const SurfaceTensorField& U) const;

  /// Q [Lambda(U) - D(tr_g U)] in coordinate components; shared between the
  /// P-assembly and the u-recovery.
  Vec2Field compute_QPhi(const SurfaceTensorField& U) const;

  /// Solves Lap_ghat v + (tr_g Pi) v - Xtilde(v)/(2 kappa) = P/kappa with
  /// Dirichlet data on the grid boundary.
  ScalarField solve_v(const ScalarField& P, const ScalarField& bc) const;

  Vec2Field recover_u(const ScalarField& v, const SurfaceTensorField& U) const;

  /// Integrates the prescribed gradient relation
  ///   grad_a y = (i_a U)^sharp - v Q a + <u, a> n
  /// by one Neumann least-squares solve per component, gauge y(0,0) = 0.
  StrainSolution reconstruct_y(const ScalarField& v, const Vec2Field& u_comp,
                               const SurfaceTensorField& U) const;

  StrainSolution solve(const StrainRHS& rhs, const ScalarField& bc) const;
  StrainSolution solve_kernel(const ScalarField& bc) const;  // U = 0 path

  const SurfaceFrame& surface() const { return *sf_; }

  double integration_guard = 0.05;  // reconstruct ceiling, relative to field scale

 private:
  const SurfaceFrame* sf_;
  // Laplace-Beltrami coefficients of ghat = Pi
  ScalarField a11_, a12_, a22_, J_;
  ScalarField trgPi_, kappa_;
  Vec2Field xcoef_;  // first-order coefficient c with c . grad v added to the row
};

/// The scalar invariant v = p(y) of a displacement field (rotation part).
ScalarField p_functional(const VectorFieldWithGrad& y, const SurfaceFrame& sf);

/// Normal-derivative tangent part u of a displacement field, in R^3.
Vec3Field u_functional(const VectorFieldWithGrad& y, const SurfaceFrame& sf);

/// Builds the strain tensor sym((dy0)^T grad V) with analytic partials when
/// the second derivatives of V are available.
SurfaceTensorField strain_of_field(const VectorFieldWithGrad& V, const SurfaceFrame& sf,
                                   const std::array<Vec3Field, 3>* hessian = nullptr);

}  // namespace prestrain
