#pragma once

#include <functional>

#include "prestrain/functional.hpp"
#include "prestrain/strain.hpp"

namespace prestrain {

/// One-parameter family of matched isometries u_eps together with the sweep
/// that verifies its matching order.
struct MatchedIsometry {
  int order = 1;
  bool exact = false;  // closed-form exact isometry family
  std::function<VectorFieldWithGrad(double)> evaluate;
  std::vector<VectorFieldWithGrad> corrections;  // w_2, ..., w_m

  std::vector<double> eps_list;
  std::vector<double> defects;
  double slope = 0.0;
  bool matching_failure = false;
};

/// Max-norm metric defect |(grad u)^T grad u - g| of a deformation of the
/// mid-surface, measured with the family's own gradient fields.
double metric_defect(const VectorFieldWithGrad& u, const ImmersionFrame& frame);

/// Polynomial matching: u_eps = y0 + eps V + sum_{i=2..m} eps^i w_i where each
/// w_i cancels the order-i defect coefficient, extracted numerically from
/// defect samples and solved through the elliptic strain solver.
MatchedIsometry match_isometry(const VectorFieldWithGrad& V, const ImmersionFrame& frame,
                               int m, const StrainSolver* solver);

/// Exact rotation family u_eps = exp(eps W^) y0 + eps c for V = W x y0 + c.
MatchedIsometry rigid_isometry_family(const ImmersionFrame& frame, const Vector3d& W,
                                      const Vector3d& shift);

/// Exact rolling family on a flat plate for cylindrical bending
/// V = (0,0,a x_axis^2/2).
MatchedIsometry cylinder_roll_family(const ImmersionFrame& frame, double amplitude,
                                     int axis);

/// Director of the deformed configuration: same completion formula as the
/// rest configuration, driven by the deformed tangents and normal.
VectorFieldWithGrad director_eps(const VectorFieldWithGrad& u_eps,
                                 const MetricField3& metric, const ImmersionFrame& frame);

/// Second-order coefficient field: (Q_eps^T) d_eps = -((grad b)^T b, 0) with
/// <b_eps, d_eps> = 0 built in.
VectorFieldWithGrad d_eps_field(const VectorFieldWithGrad& u_eps,
                                const VectorFieldWithGrad& b_eps,
                                const ImmersionFrame& frame);

/// h-independent completion drift d^h = (Q0^T)^{-1} c(x', M).
VectorFieldWithGrad d_h_field(const VectorFieldWithGrad& V, const ImmersionFrame& frame,
                              const MetricField3& metric, const EnergyDensitySpec& material);

/// The recovery deformation u^h(x', x3) = u_eps + x3 b_eps + x3^2/2 d_eps
/// + x3^2/2 eps d^h with its exact-in-x3 scaled gradient.
struct RecoveryDeformation {
  const ImmersionFrame* frame = nullptr;
  double h = 0.0, beta = 0.0, eps = 0.0, eh = 0.0;
  bool eps_guard_exceeded = false;  // expansion regime eps <= 0.2
  VectorFieldWithGrad u_eps, b_eps, d_eps, d_h;

  /// y^h(x', x3) with x3 in (-1/2, 1/2) (already scaled onto the unit plate).
  Vector3d value(int i, int j, double x3) const;
  /// Scaled gradient: columns d_1 y^h | d_2 y^h | (1/h) d_3 y^h.
  Matrix3d grad_h(int i, int j, double x3) const;
};

RecoveryDeformation build_uh(double h, double beta, const MatchedIsometry& matched,
                             const VectorFieldWithGrad& b_eps,
                             const VectorFieldWithGrad& d_eps,
                             const VectorFieldWithGrad& d_h, const ImmersionFrame& frame);

/// Convenience: evaluates the family at eps(h), builds the director fields
/// and the full deformation in one step.
RecoveryDeformation assemble_recovery(double h, double beta, const MatchedIsometry& matched,
                                      const VectorFieldWithGrad& V,
                                      const ImmersionFrame& frame,
                                      const MetricField3& metric,
                                      const EnergyDensitySpec& material);

struct GammaDiagnostics {
  double kh_deviation = 0.0;       // max |K^h/(2 sqrt(e^h)) - x3 L| at quadrature pts
  double m_dual_route_error = 0.0; // limit 2x2 block vs functional bending tensor
  double vh_deviation = 0.0;       // max |V^h - V|
};

/// K^h and V^h compactness diagnostics against their predicted limits.
GammaDiagnostics gamma_diagnostics(const RecoveryDeformation& def,
                                   const VectorFieldWithGrad& V,
                                   const ImmersionFrame& frame, const MetricField3& metric,
                                   const EnergyDensitySpec& material);

/// Scaled average displacement V^h by Gauss quadrature across the thickness.
Vec3Field vh_diagnostic(const RecoveryDeformation& def, const ImmersionFrame& frame);

}  // namespace prestrain
