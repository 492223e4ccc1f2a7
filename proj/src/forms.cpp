#include "prestrain/forms.hpp"

#include <cmath>

namespace prestrain {

namespace {

double dist2_SO3(const Matrix3d& F) {
  Eigen::JacobiSVD<Matrix3d> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector3d s = svd.singularValues();
  // det F < 0: the nearest rotation flips the smallest singular direction
  const double sign = (svd.matrixU() * svd.matrixV().transpose()).determinant();
  const double s3 = (sign < 0.0) ? -s[2] : s[2];
  return (s[0] - 1.0) * (s[0] - 1.0) + (s[1] - 1.0) * (s[1] - 1.0) + (s3 - 1.0) * (s3 - 1.0);
}

}  // namespace

double density_W(const Matrix3d& F, const EnergyDensitySpec& spec) {
  if (!F.allFinite()) throw InconsistencyError("density_W: non-finite deformation gradient");
  switch (spec.model) {
    case EnergyDensitySpec::Model::kSquaredDistance:
      return spec.mu * dist2_SO3(F);
    case EnergyDensitySpec::Model::kIsotropicQuadratic: {
      const Matrix3d E = F.transpose() * F - Matrix3d::Identity();
      return 0.25 * spec.mu * E.squaredNorm() + 0.125 * spec.lambda * E.trace() * E.trace();
    }
  }
  return 0.0;
}

double q3(const Matrix3d& F, const EnergyDensitySpec& spec) {
  const Matrix3d S = 0.5 * (F + F.transpose());
  const double tr = F.trace();
  return 2.0 * spec.mu * S.squaredNorm() + spec.lambda * tr * tr;
}

namespace {

double q3_bilinear(const Matrix3d& P, const Matrix3d& Q, const EnergyDensitySpec& spec) {
  const Matrix3d Ps = 0.5 * (P + P.transpose());
  const Matrix3d Qs = 0.5 * (Q + Q.transpose());
  return 2.0 * spec.mu * (Ps.cwiseProduct(Qs)).sum() + spec.lambda * P.trace() * Q.trace();
}

Matrix3d embed2(const Matrix2d& F2) {
  Matrix3d F = Matrix3d::Zero();
  F.topLeftCorner<2, 2>() = F2;
  return F;
}

Matrix3d sym_outer_e3(const Vector3d& c) {
  Matrix3d M = Matrix3d::Zero();
  M(0, 2) = M(2, 0) = 0.5 * c[0];
  M(1, 2) = M(2, 1) = 0.5 * c[1];
  M(2, 2) = c[2];
  return M;
}

}  // namespace

RelaxedFormResult q2A(const Matrix2d& F2, const Matrix3d& A, const EnergyDensitySpec& spec) {
  const Matrix3d Ai = A.inverse();
  const Matrix3d B = Ai * embed2(0.5 * (F2 + F2.transpose())) * Ai;
  Matrix3d X[3];
  for (int k = 0; k < 3; ++k)
    X[k] = Ai * sym_outer_e3(Vector3d::Unit(k)) * Ai;

  Matrix3d N;
  Vector3d rhs;
  for (int k = 0; k < 3; ++k) {
    rhs[k] = -q3_bilinear(X[k], B, spec);
    for (int l = 0; l < 3; ++l) N(k, l) = q3_bilinear(X[k], X[l], spec);
  }
  Eigen::LLT<Matrix3d> llt(N);
  if (llt.info() != Eigen::Success)
    throw SolveError("q2A: completion normal system is not SPD (mu must be > 0)");
  RelaxedFormResult out;
  out.c = llt.solve(rhs);
  const Matrix3d M = B + out.c[0] * X[0] + out.c[1] * X[1] + out.c[2] * X[2];
  out.value = q3(M, spec);
  return out;
}

double q2A_bruteforce(const Matrix2d& F2, const Matrix3d& A, const EnergyDensitySpec& spec,
                      double box_halfwidth, int samples_per_axis,
                      const Vector3d& center, Vector3d* argmin) {
  const Matrix3d Ai = A.inverse();
  const Matrix3d B = Ai * embed2(0.5 * (F2 + F2.transpose())) * Ai;
  Matrix3d X[3];
  for (int k = 0; k < 3; ++k)
    X[k] = Ai * sym_outer_e3(Vector3d::Unit(k)) * Ai;

  const int n = samples_per_axis;
  const double step = 2.0 * box_halfwidth / (n - 1);
  double best = std::numeric_limits<double>::infinity();
  Vector3d best_c = center;
  for (int i = 0; i < n; ++i) {
    const double c1 = center[0] - box_halfwidth + i * step;
    const Matrix3d M1 = B + c1 * X[0];
    for (int j = 0; j < n; ++j) {
      const double c2 = center[1] - box_halfwidth + j * step;
      const Matrix3d M2 = M1 + c2 * X[1];
      for (int k = 0; k < n; ++k) {
        const double c3 = center[2] - box_halfwidth + k * step;
        const double v = q3(M2 + c3 * X[2], spec);
        if (v < best) {
          best = v;
          best_c = Vector3d(c1, c2, c3);
        }
      }
    }
  }
  if (argmin) *argmin = best_c;
  return best;
}

}  // namespace prestrain
