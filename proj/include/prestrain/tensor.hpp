#pragma once

#include <array>
#include <optional>

#include "prestrain/geometry.hpp"

namespace prestrain {

/// View of a 2x2 SPD metric field, with analytic first derivatives when the
/// producer has them (immersion metrics do; synthetic test metrics may not).
struct MetricView {
  const ParamGrid* grid = nullptr;
  Mat2Field value;
  std::optional<std::array<Mat2Field, 2>> dvalue;
};

MetricView metric_view_from_immersion(const ImmersionFrame& frame);
MetricView second_form_view(const ImmersionFrame& frame);

struct ChristoffelField {
  // gamma(i,j)[k] = Gamma^k_{ij}, symmetric in (i,j)
  NodeField<std::array<Matrix2d, 2>> data;  // data[k] as 2x2 in (i,j)
  double gamma(int i, int j, std::size_t node, int k) const {
    return data[node][k](i, j);
  }
};

ChristoffelField christoffel(const MetricView& metric);

/// Surface tensor of order 0..3 in coordinate components, 2^k scalars per
/// node. Index packing is big-endian in the slots.
class SurfaceTensorField {
 public:
  SurfaceTensorField(const ParamGrid& grid, int order);

  int order() const { return order_; }
  int comps() const { return 1 << order_; }
  ScalarField& comp(int packed) { return c_[packed]; }
  const ScalarField& comp(int packed) const { return c_[packed]; }

  static int pack(std::initializer_list<int> idx);

  double at(int i, int j, std::initializer_list<int> idx) const {
    return c_[pack(idx)](i, j);
  }

  /// Optional analytic partial derivatives d_axis (component packed like comp).
  std::optional<std::array<std::vector<ScalarField>, 2>> partials;

  bool symmetric_declared = false;
  void check_symmetry(double tol = 1e-12) const;

 private:
  int order_;
  std::vector<ScalarField> c_;
};

/// Intrinsic covariant derivative, derivative index appended last:
/// (DT)_{i1..ik;l}. Supports input orders 0..2.
SurfaceTensorField covariant_derivative(const SurfaceTensorField& T,
                                        const MetricView& metric,
                                        const ChristoffelField& gamma);

/// Orthonormal-frame machinery on the parametrized surface. E1, E2 come from
/// Gram-Schmidt on (d1y0, d2y0), oriented so that E1 x E2 is the unit normal.
class SurfaceFrame {
 public:
  explicit SurfaceFrame(const ImmersionFrame& frame);

  const ImmersionFrame& immersion() const { return *frame_; }
  const ParamGrid& grid() const { return frame_->grid; }

  /// Coordinate components of E_alpha (alpha in {0,1}).
  const Vec2Field& frame_comp(int alpha) const { return Ec_[alpha]; }
  /// Analytic partial of the frame components: d_axis E_alpha.
  const Vec2Field& frame_comp_partial(int alpha, int axis) const {
    return dEc_[alpha][axis];
  }

  /// Q in coordinate components: (QX)^b = Qc(b,a) X^a.
  const Mat2Field& rotation() const { return Qc_; }

  /// D_{E_k} E_j in coordinate components (intrinsic covariant derivative).
  const Vec2Field& covariant_frame_derivative(int k, int j) const { return DEE_[k][j]; }
  /// Lie bracket [E_i, E_j] in coordinate components.
  const Vec2Field& bracket(int i, int j) const { return brk_[i][j]; }

  /// Pi evaluated on frame vectors, Pi(E_a, E_b).
  double Pi_frame(int i, int j, int a, int b) const;

  Vector3d to_r3(int i, int j, const Vector2d& comp) const {
    return comp[0] * frame_->dy0[0](i, j) + comp[1] * frame_->dy0[1](i, j);
  }

  const ChristoffelField& christoffels() const { return gamma_; }
  const MetricView& metric() const { return gview_; }

 private:
  const ImmersionFrame* frame_;
  MetricView gview_;
  ChristoffelField gamma_;
  std::array<Vec2Field, 2> Ec_;
  std::array<std::array<Vec2Field, 2>, 2> dEc_;  // dEc_[alpha][axis]
  Mat2Field Qc_;
  Vec2Field DEE_[2][2];
  Vec2Field brk_[2][2];
};

/// Q applied to a tangent field given in coordinate components.
Vec2Field rotate_Q(const SurfaceFrame& sf, const Vec2Field& X);

/// Lambda(U): the vector field with <Lambda(U), alpha> = tr_g i_alpha D U.
/// Input must be a symmetric 2-tensor; output is in coordinate components.
Vec2Field lambda_field(const SurfaceTensorField& U, const SurfaceFrame& sf);

/// Divergence-form Laplace-Beltrami of the metric m, second-order stencil.
/// Interior nodes only; boundary entries are zero. Throws NotEllipticError
/// if m is not positive definite somewhere.
ScalarField laplace_beltrami(const ParamGrid& grid, const ScalarField& v,
                             const Mat2Field& m);

/// A vector field on Omega with first derivatives, analytic when available.
struct VectorFieldWithGrad {
  Vec3Field value;
  std::array<Vec3Field, 2> grad;  // grad[axis]
  static VectorFieldWithGrad from_values(const ParamGrid& grid, const Vec3Field& v);
};

struct PullbackStrain {
  SurfaceTensorField chart;    // sym((dy0)^T dV)
  SurfaceTensorField surface;  // sym D V^T + <V,n> Pi
  double max_mismatch_interior = 0.0;
};

PullbackStrain pullback_strain(const VectorFieldWithGrad& V, const SurfaceFrame& sf);

/// Residual of the covariant second-derivative identity: both sides are
/// discretized independently and the max interior mismatch over all frame
/// index triples is returned.
double identity_314_residual(const VectorFieldWithGrad& f, const SurfaceFrame& sf);

}  // namespace prestrain
