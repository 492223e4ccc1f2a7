#pragma once

#include <array>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "prestrain/grid.hpp"
#include "prestrain/poly2.hpp"

namespace prestrain {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

using Vec3Field = NodeField<Vector3d>;
using Vec2Field = NodeField<Vector2d>;
using Mat2Field = NodeField<Matrix2d>;
using Mat3Field = NodeField<Matrix3d>;

/// Alias-safe symmetric part (Eigen in-place A = A + A^T would corrupt A).
template <class M>
M symmetrize(const M& A) {
  M At = A.transpose();
  return 0.5 * (A + At);
}

/// Height function of a graph surface y0 = (x1, x2, f), with partial
/// derivatives up to third order available in closed form.
class HeightFunction {
 public:
  virtual ~HeightFunction() = default;
  virtual double value(double x1, double x2) const = 0;
  /// d^(a+b) f / dx1^a dx2^b for a+b <= 3.
  virtual double partial(int a, int b, double x1, double x2) const = 0;
};

class PolyHeight final : public HeightFunction {
 public:
  explicit PolyHeight(Poly2 p);
  double value(double x1, double x2) const override;
  double partial(int a, int b, double x1, double x2) const override;

 private:
  std::array<std::array<Poly2, 4>, 4> d_;  // d_[a][b] = partial derivative
};

/// Upper hemisphere graph f = sqrt(R^2 - x1^2 - x2^2).
class SphereCapHeight final : public HeightFunction {
 public:
  explicit SphereCapHeight(double radius) : R_(radius) {}
  double value(double x1, double x2) const override;
  double partial(int a, int b, double x1, double x2) const override;

 private:
  double R_;
};

/// Transversal director a(x') given componentwise as polynomials.
struct DirectorField {
  Poly2 c1, c2, c3;
  Vector3d value(double x1, double x2) const {
    return Vector3d(c1(x1, x2), c2(x1, x2), c3(x1, x2));
  }
  Vector3d partial(int axis, double x1, double x2) const {
    return Vector3d(c1.derivative(axis)(x1, x2), c2.derivative(axis)(x1, x2),
                    c3.derivative(axis)(x1, x2));
  }
  static DirectorField constant(const Vector3d& a) {
    return DirectorField{Poly2::constant(a[0]), Poly2::constant(a[1]),
                         Poly2::constant(a[2])};
  }
};

/// Geometry of the immersed mid-surface plus the frame/moment fields of the
/// prestrained theory. First and second derivatives of y0 are analytic;
/// third derivatives are kept for metric curvature diagnostics.
struct ImmersionFrame {
  ParamGrid grid;

  Vec3Field y0;
  std::array<Vec3Field, 2> dy0;        // dy0[i] = d_i y0
  std::array<Vec3Field, 3> ddy0;       // (11), (12), (22)
  std::array<Vec3Field, 4> dddy0;      // (111), (112), (122), (222)
  Vec3Field normal;                    // unit, positive e3 component
  std::array<Vec3Field, 2> dnormal;    // analytic derivative of the normal
  Mat2Field g;                         // first fundamental form
  Mat2Field ginv;
  Mat2Field Pi;                        // Pi(X,Y) = <grad_X n, Y>
  ScalarField kappa;                   // Gauss curvature
  std::array<ScalarField, 2> dkappa;   // analytic kappa derivatives

  // Frame of the prestrain metric (filled by attach_director)
  Vec3Field b0;
  std::array<Vec3Field, 2> db0;        // analytic when the director is analytic
  Mat3Field Q0;                        // columns d1y0 | d2y0 | b0

  const Vector3d& second(int i, int j, int ii, int jj) const {
    return ddy0[i + j](ii, jj);  // i+j indexes (11)=0,(12)=1,(22)=2
  }

  std::size_t index(int i, int j) const { return grid.index(i, j); }
};

/// 3x3 prestrain metric G with A = sqrt(G) and G^{-1}.
struct MetricField3 {
  ParamGrid grid;
  Mat3Field G;
  Mat3Field A;
  Mat3Field Ginv;
  std::array<Mat3Field, 2> dG;    // analytic first derivatives
  std::array<Mat3Field, 3> ddG;   // analytic second derivatives (11),(12),(22)
};

/// Samples a graph immersion on the grid: y0, derivatives, normal, fundamental
/// forms and Gauss curvature, all from the closed-form height function.
ImmersionFrame sample_graph_immersion(const ParamGrid& grid, const HeightFunction& f);

/// Completes the frame with a transversal director and builds G = Q0^T Q0.
/// Throws FrameDegeneracyError if <a, n> <= 0 anywhere (det Q0 would vanish).
MetricField3 prestrain_from_director(ImmersionFrame& frame, const DirectorField& a);

/// Product metric G = diag(g, 1); the corresponding director is the normal.
MetricField3 product_metric(ImmersionFrame& frame);

/// Completion direction of a tangent pair under the metric:
///   b = -(G^13 t1 + G^23 t2)/G^33 + normalize(t1 x t2)/sqrt(G^33).
/// Shared by the rest frame and the deformed configurations so that the two
/// agree bit for bit at eps = 0.
Vector3d completion_director(const Matrix3d& Ginv, const Vector3d& t1, const Vector3d& t2);

/// Recovers the director from G and the surface frame. Throws MetricError
/// when G^33 <= 0.
Vec3Field transversal_director(const MetricField3& metric, const ImmersionFrame& frame);

/// Moment fields of the limiting theory: B0 columns are the derivatives of b0
/// (central differences) and d0 solves Q0^T d0 = (-<d1b0,b0>, -<d2b0,b0>, 0).
struct MomentFields {
  Mat3Field B0;
  Vec3Field d0;
};
MomentFields moment_fields(const ImmersionFrame& frame);

/// Matrix square root of an SPD matrix by symmetric eigendecomposition with
/// an eigenvalue floor.
Matrix3d spd_sqrt(const Matrix3d& M, double floor = 1e-14);

}  // namespace prestrain
