#pragma once

#include <functional>

#include "prestrain/recovery.hpp"

namespace prestrain {

struct EnergyResult {
  double h = 0.0;
  double beta = 0.0;
  double eh = 0.0;
  double energy = 0.0;  // (1/e^h) * scaled elastic energy of the deformation
  int x3_points = 0;
};

struct QuadratureSpec {
  int x3_points = 4;  // Gauss-Legendre across the thickness
  bool quadratic_surrogate = false;  // replace W by its Hessian form of K^h
};

/// Scaled thin-plate energy of a recovery deformation:
///   (1/e^h) * integral over Omega x (-1/2,1/2) of W(grad_h y^h A^{-1}),
/// trapezoidal in-plane, Gauss in x3, deterministic reduction.
EnergyResult elastic_energy(const RecoveryDeformation& def, const MetricField3& metric,
                            const EnergyDensitySpec& material,
                            const QuadratureSpec& quad = {});

struct GammaStudyRow {
  double h, eh, energy, I_beta, rel_error;
};

struct GammaStudyResult {
  std::vector<GammaStudyRow> rows;
  double fitted_order = 0.0;
  bool pass = false;
  bool absolute_criterion = false;  // used when I_beta is numerically zero
};

/// Runs the h-sweep for one scenario: builds the recovery deformation per h,
/// integrates the energy, and checks convergence towards I_beta. PASS means
/// the final relative error is within `rel_tol` and the errors decrease
/// monotonically over the last three entries (or sit below the noise floor).
GammaStudyResult gamma_convergence_study(
    const std::function<RecoveryDeformation(double)>& build, double I_beta,
    const std::vector<double>& h_list, const MetricField3& metric,
    const EnergyDensitySpec& material, double rel_tol = 0.05, double abs_tol = 1e-8,
    const QuadratureSpec& quad = {});

}  // namespace prestrain
