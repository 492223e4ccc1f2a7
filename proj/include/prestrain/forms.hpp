#pragma once

#include <Eigen/Dense>

#include "prestrain/core.hpp"

namespace prestrain {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector3d;

/// Stored-energy density family.
///
/// squared_distance:    W(F) = mu * dist^2(F, SO(3))                (lambda = 0)
/// isotropic_quadratic: W(F) = (mu/4)|F^T F - id|^2
///                             + (lambda/8) (tr(F^T F - id))^2
///
/// Both are frame indifferent, vanish on SO(3), dominate c*dist^2 near SO(3),
/// and share the Hessian quadratic form Q3(F) = 2 mu |sym F|^2 + lambda tr(F)^2.
struct EnergyDensitySpec {
  enum class Model { kSquaredDistance, kIsotropicQuadratic };
  Model model = Model::kSquaredDistance;
  double mu = 1.0;
  double lambda = 0.0;

  static EnergyDensitySpec make(double mu, double lambda) {
    EnergyDensitySpec s;
    s.mu = mu;
    s.lambda = lambda;
    s.model = (lambda == 0.0) ? Model::kSquaredDistance : Model::kIsotropicQuadratic;
    if (mu <= 0.0 || lambda < 0.0) throw ConfigError("material needs mu > 0, lambda >= 0");
    return s;
  }
};

double density_W(const Matrix3d& F, const EnergyDensitySpec& spec);

/// Hessian form of W at the identity.
double q3(const Matrix3d& F, const EnergyDensitySpec& spec);

struct RelaxedFormResult {
  double value = 0.0;
  Vector3d c = Vector3d::Zero();  // sym(c ⊗ e3) is the minimizing completion
};

/// Relaxed planar form: minimizes Q3(A^{-1} F~ A^{-1}) over all 3x3 matrices
/// whose 2x2 block is F2. The reduction to the symmetric completion is exact
/// since Q3 sees only symmetric parts.
RelaxedFormResult q2A(const Matrix2d& F2, const Matrix3d& A, const EnergyDensitySpec& spec);

/// Dense completion scan used as the test oracle for q2A. Evaluates Q3 on a
/// grid of symmetric completions centered at `center` and returns the minimum
/// found; the minimizing grid point is reported through `argmin` when given.
double q2A_bruteforce(const Matrix2d& F2, const Matrix3d& A, const EnergyDensitySpec& spec,
                      double box_halfwidth, int samples_per_axis,
                      const Vector3d& center = Vector3d::Zero(),
                      Vector3d* argmin = nullptr);

}  // namespace prestrain
