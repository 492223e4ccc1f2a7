#pragma once

#include <memory>
#include <string>

#include "prestrain/admissibility.hpp"
#include "prestrain/energy.hpp"

namespace prestrain {

struct VSpec {
  enum class Kind { kRigid, kCylBend, kVerticalPoly, kPoly, kSolverKernel };
  Kind kind = Kind::kCylBend;
  Vector3d omega = Vector3d(0.3, -0.2, 0.5);  // rigid
  Vector3d shift = Vector3d::Zero();
  double amplitude = 1.0;  // cyl-bend
  int axis = 0;
  Poly2 vpoly;             // vertical-poly / solver-kernel boundary data
  Poly2 comp[3];           // poly
};

struct ScenarioConfig {
  std::string scenario = "flat";
  Interval x1{0.0, 1.0}, x2{0.0, 1.0};
  int n1 = 65, n2 = 65;
  double mu = 1.0, lambda = 0.0;
  double beta = 3.0;
  std::vector<double> h_list = {1.0 / 16, 1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  std::vector<double> beta_list;  // optional cross-beta sweep
  VSpec v;
  int matching_order = 0;  // 0 = automatic
  std::string metric_type = "director";  // director | product
  // custom-graph pieces
  std::string height_type;  // poly | sphere
  double sphere_radius = 2.0;
  Poly2 height_poly;
  Poly2 director_poly[3];
  bool has_director_poly = false;
  std::string out_dir = ".";
  unsigned seed = 0;
  std::string config_json;  // canonical dump for hashing
};

/// Parses and validates a JSON configuration. Unknown keys are rejected;
/// beta must sit strictly inside (2, 4).
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config_file(const std::string& path);

/// Fully built scenario: geometry, prestrain metric, material, V and its
/// matched-isometry family.
struct Scenario {
  ScenarioConfig cfg;
  ParamGrid grid;
  std::shared_ptr<HeightFunction> height;
  ImmersionFrame frame;
  MetricField3 metric;
  std::shared_ptr<SurfaceFrame> sframe;
  EnergyDensitySpec material;
  bool elliptic = false;

  Scenario(ScenarioConfig c, int refine_levels = 0);

  /// Displacement field of the configured V spec. Solver-kernel V needs an
  /// elliptic patch and throws NotEllipticError otherwise.
  VectorFieldWithGrad build_V() const;

  /// Matched isometry family for the configured V.
  MatchedIsometry build_family(const VectorFieldWithGrad& V) const;

  const StrainSolver* solver() const { return solver_.get(); }

 private:
  std::shared_ptr<StrainSolver> solver_;  // present only on elliptic patches
};

std::uint64_t config_hash(const ScenarioConfig& cfg);

}  // namespace prestrain
