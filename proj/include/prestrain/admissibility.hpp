#pragma once

#include "prestrain/geometry.hpp"

namespace prestrain {

/// Curvature obstruction flags for a prestrain metric G(x') extended
/// x3-independently into the plate. The three Riemann components below are
/// exactly the ones whose vanishing characterizes admissibility; the strain
/// residual is |sym((dy0)^T db0)| from the immersion system.
struct AdmissibilityReport {
  ScalarField R1212;
  ScalarField R1213;
  ScalarField R1223;
  ScalarField strain_residual;
  double max_abs_R = 0.0;
  double max_strain_residual = 0.0;
  double curvature_tolerance = 0.0;
  double strain_tolerance = 0.0;
  bool admissible = false;
};

struct AdmissibilityTolerances {
  double curvature_rel = 1e-6;  // scaled by (1 + metric C^2 magnitude)
  double strain = 1e-8;
};

/// Components (in coordinates): R1212 = <R(d1,d2)d2, d1>, R1213 = <R(d1,d2)d3, d1>,
/// R1223 = <R(d1,d2)d3, d2>, with all x3-derivatives of G equal to zero.
/// The sign convention makes R1212 = (Gauss curvature of g) * det g on the
/// product metric diag(g, 1).
AdmissibilityReport riemann_flags(const MetricField3& metric, const ImmersionFrame& frame,
                                  const AdmissibilityTolerances& tol = {});

}  // namespace prestrain
