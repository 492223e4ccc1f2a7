#include "prestrain/scenario.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace prestrain {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

Poly2 parse_poly(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": polynomial must be [[i,j,c],...]");
  Poly2 p;
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 3)
      throw ConfigError(where + ": polynomial term must be [i,j,c]");
    p.add(t[0].get<int>(), t[1].get<int>(), t[2].get<double>());
  }
  return p;
}

VSpec parse_vspec(const json& j) {
  VSpec v;
  check_keys(j, {"type", "omega", "shift", "amplitude", "axis", "v", "v_bc", "comp1",
                 "comp2", "comp3"},
             "V");
  const std::string type = j.at("type").get<std::string>();
  if (type == "rigid") {
    v.kind = VSpec::Kind::kRigid;
    if (j.contains("omega")) {
      auto o = j["omega"];
      v.omega = Vector3d(o[0].get<double>(), o[1].get<double>(), o[2].get<double>());
    }
    if (j.contains("shift")) {
      auto s = j["shift"];
      v.shift = Vector3d(s[0].get<double>(), s[1].get<double>(), s[2].get<double>());
    }
  } else if (type == "cyl-bend") {
    v.kind = VSpec::Kind::kCylBend;
    if (j.contains("amplitude")) v.amplitude = j["amplitude"].get<double>();
    if (j.contains("axis")) v.axis = j["axis"].get<int>() - 1;
    if (v.axis != 0 && v.axis != 1) throw ConfigError("V.axis must be 1 or 2");
  } else if (type == "vertical-poly") {
    v.kind = VSpec::Kind::kVerticalPoly;
    v.vpoly = parse_poly(j.at("v"), "V.v");
  } else if (type == "poly") {
    v.kind = VSpec::Kind::kPoly;
    v.comp[0] = parse_poly(j.at("comp1"), "V.comp1");
    v.comp[1] = parse_poly(j.at("comp2"), "V.comp2");
    v.comp[2] = parse_poly(j.at("comp3"), "V.comp3");
  } else if (type == "solver-kernel") {
    v.kind = VSpec::Kind::kSolverKernel;
    v.vpoly = parse_poly(j.at("v_bc"), "V.v_bc");
  } else {
    throw ConfigError("unknown V type '" + type + "'");
  }
  return v;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j,
             {"scenario", "domain", "resolution", "material", "beta", "beta_list",
              "h_list", "V", "matching_order", "metric", "height", "director", "out",
              "seed"},
             "config");

  ScenarioConfig cfg;
  cfg.scenario = j.value("scenario", std::string("flat"));
  const std::set<std::string> known = {"flat", "sphere-cap-constant-director",
                                       "saddle-constant-director", "custom-graph"};
  if (!known.count(cfg.scenario))
    throw ConfigError("unregistered scenario '" + cfg.scenario + "'");

  // per-scenario defaults
  if (cfg.scenario == "flat") {
    cfg.x1 = {0.0, 1.0};
    cfg.x2 = {0.0, 1.0};
  } else {
    cfg.x1 = {-0.5, 0.5};
    cfg.x2 = {-0.5, 0.5};
    cfg.v.kind = VSpec::Kind::kSolverKernel;
    cfg.v.vpoly = Poly2{{{{2, 0}, 1.0}, {{0, 2}, -1.0}}};
  }

  if (j.contains("domain")) {
    check_keys(j["domain"], {"x1", "x2"}, "domain");
    auto rd = [&](const json& a) -> Interval {
      if (!a.is_array() || a.size() != 2) throw ConfigError("domain range must be [lo,hi]");
      return Interval{a[0].get<double>(), a[1].get<double>()};
    };
    if (j["domain"].contains("x1")) cfg.x1 = rd(j["domain"]["x1"]);
    if (j["domain"].contains("x2")) cfg.x2 = rd(j["domain"]["x2"]);
  }
  if (j.contains("resolution")) {
    auto r = j["resolution"];
    if (!r.is_array() || r.size() != 2) throw ConfigError("resolution must be [n1,n2]");
    cfg.n1 = r[0].get<int>();
    cfg.n2 = r[1].get<int>();
  }
  if (j.contains("material")) {
    check_keys(j["material"], {"mu", "lambda"}, "material");
    cfg.mu = j["material"].value("mu", 1.0);
    cfg.lambda = j["material"].value("lambda", 0.0);
  }
  cfg.beta = j.value("beta", 3.0);
  if (!(cfg.beta > 2.0 && cfg.beta < 4.0))
    throw ConfigError("beta must lie strictly between 2 and 4");
  if (j.contains("beta_list")) {
    for (const auto& b : j["beta_list"]) {
      const double bb = b.get<double>();
      if (!(bb > 2.0 && bb < 4.0))
        throw ConfigError("beta_list entries must lie strictly between 2 and 4");
      cfg.beta_list.push_back(bb);
    }
  }
  if (j.contains("h_list")) {
    cfg.h_list.clear();
    for (const auto& h : j["h_list"]) cfg.h_list.push_back(h.get<double>());
  }
  if (j.contains("V")) cfg.v = parse_vspec(j["V"]);
  cfg.matching_order = j.value("matching_order", 0);
  if (j.contains("metric")) {
    check_keys(j["metric"], {"type"}, "metric");
    cfg.metric_type = j["metric"].value("type", std::string("director"));
    if (cfg.metric_type != "director" && cfg.metric_type != "product")
      throw ConfigError("metric.type must be 'director' or 'product'");
  }
  if (j.contains("height")) {
    if (cfg.scenario != "custom-graph")
      throw ConfigError("height is only configurable for custom-graph");
    check_keys(j["height"], {"type", "radius", "poly"}, "height");
    cfg.height_type = j["height"].at("type").get<std::string>();
    if (cfg.height_type == "sphere")
      cfg.sphere_radius = j["height"].value("radius", 2.0);
    else if (cfg.height_type == "poly")
      cfg.height_poly = parse_poly(j["height"].at("poly"), "height.poly");
    else
      throw ConfigError("height.type must be 'poly' or 'sphere'");
  } else if (cfg.scenario == "custom-graph") {
    throw ConfigError("custom-graph needs a height block");
  }
  if (j.contains("director")) {
    if (cfg.scenario != "custom-graph")
      throw ConfigError("director is only configurable for custom-graph");
    check_keys(j["director"], {"comp1", "comp2", "comp3"}, "director");
    cfg.director_poly[0] = parse_poly(j["director"].at("comp1"), "director.comp1");
    cfg.director_poly[1] = parse_poly(j["director"].at("comp2"), "director.comp2");
    cfg.director_poly[2] = parse_poly(j["director"].at("comp3"), "director.comp3");
    cfg.has_director_poly = true;
  }
  cfg.out_dir = j.value("out", std::string("."));
  cfg.seed = j.value("seed", 0u);
  cfg.config_json = j.dump();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config(text);
}

std::uint64_t config_hash(const ScenarioConfig& cfg) { return fnv1a(cfg.config_json); }

namespace {

std::shared_ptr<HeightFunction> make_height(const ScenarioConfig& cfg) {
  if (cfg.scenario == "flat") return std::make_shared<PolyHeight>(Poly2{});
  if (cfg.scenario == "sphere-cap-constant-director")
    return std::make_shared<SphereCapHeight>(2.0);
  if (cfg.scenario == "saddle-constant-director") {
    Poly2 p;
    p.add(2, 0, 0.5);
    p.add(0, 2, -0.5);
    return std::make_shared<PolyHeight>(p);
  }
  // custom-graph
  if (cfg.height_type == "sphere")
    return std::make_shared<SphereCapHeight>(cfg.sphere_radius);
  return std::make_shared<PolyHeight>(cfg.height_poly);
}

}  // namespace

Scenario::Scenario(ScenarioConfig c, int refine_levels)
    : cfg(std::move(c)),
      grid(ParamGrid(cfg.x1, cfg.x2, cfg.n1, cfg.n2).refined(refine_levels)),
      height(make_height(cfg)),
      frame(sample_graph_immersion(grid, *height)),
      metric(cfg.metric_type == "product"
                 ? product_metric(frame)
                 : prestrain_from_director(
                       frame, cfg.has_director_poly
                                  ? DirectorField{cfg.director_poly[0],
                                                  cfg.director_poly[1],
                                                  cfg.director_poly[2]}
                                  : DirectorField::constant(Vector3d(0, 0, 1)))),
      material(EnergyDensitySpec::make(cfg.mu, cfg.lambda)) {
  sframe = std::make_shared<SurfaceFrame>(frame);
  elliptic = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix2d> es(frame.Pi[k]);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      elliptic = false;
      break;
    }
  }
  if (elliptic) solver_ = std::make_shared<StrainSolver>(*sframe);
}

VectorFieldWithGrad Scenario::build_V() const {
  VectorFieldWithGrad V{Vec3Field(grid), {Vec3Field(grid), Vec3Field(grid)}};
  switch (cfg.v.kind) {
    case VSpec::Kind::kRigid: {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        V.value[k] = cfg.v.omega.cross(frame.y0[k]) + cfg.v.shift;
        for (int ax = 0; ax < 2; ++ax) V.grad[ax][k] = cfg.v.omega.cross(frame.dy0[ax][k]);
      }
      return V;
    }
    case VSpec::Kind::kCylBend: {
      for (int j = 0; j < grid.n2(); ++j)
        for (int i = 0; i < grid.n1(); ++i) {
          const double s = cfg.v.axis == 0 ? grid.x1(i) : grid.x2(j);
          V.value(i, j) = Vector3d(0, 0, 0.5 * cfg.v.amplitude * s * s);
          V.grad[cfg.v.axis](i, j) = Vector3d(0, 0, cfg.v.amplitude * s);
          V.grad[1 - cfg.v.axis](i, j) = Vector3d::Zero();
        }
      return V;
    }
    case VSpec::Kind::kVerticalPoly: {
      const Poly2 d1 = cfg.v.vpoly.derivative(0), d2 = cfg.v.vpoly.derivative(1);
      for (int j = 0; j < grid.n2(); ++j)
        for (int i = 0; i < grid.n1(); ++i) {
          const double x1 = grid.x1(i), x2 = grid.x2(j);
          V.value(i, j) = Vector3d(0, 0, cfg.v.vpoly(x1, x2));
          V.grad[0](i, j) = Vector3d(0, 0, d1(x1, x2));
          V.grad[1](i, j) = Vector3d(0, 0, d2(x1, x2));
        }
      return V;
    }
    case VSpec::Kind::kPoly: {
      Poly2 d[3][2];
      for (int c = 0; c < 3; ++c)
        for (int ax = 0; ax < 2; ++ax) d[c][ax] = cfg.v.comp[c].derivative(ax);
      for (int j = 0; j < grid.n2(); ++j)
        for (int i = 0; i < grid.n1(); ++i) {
          const double x1 = grid.x1(i), x2 = grid.x2(j);
          for (int c = 0; c < 3; ++c) {
            V.value(i, j)[c] = cfg.v.comp[c](x1, x2);
            V.grad[0](i, j)[c] = d[c][0](x1, x2);
            V.grad[1](i, j)[c] = d[c][1](x1, x2);
          }
        }
      return V;
    }
    case VSpec::Kind::kSolverKernel: {
      if (!solver_) throw NotEllipticError("solver-kernel V needs an elliptic scenario");
      ScalarField bc(grid, 0.0);
      for (int j = 0; j < grid.n2(); ++j)
        for (int i = 0; i < grid.n1(); ++i)
          if (grid.boundary(i, j)) bc(i, j) = cfg.v.vpoly(grid.x1(i), grid.x2(j));
      StrainSolution sol = solver_->solve_kernel(bc);
      return VectorFieldWithGrad{sol.y, sol.dy};
    }
  }
  throw ConfigError("unhandled V spec");
}

MatchedIsometry Scenario::build_family(const VectorFieldWithGrad& V) const {
  if (cfg.v.kind == VSpec::Kind::kRigid)
    return rigid_isometry_family(frame, cfg.v.omega, cfg.v.shift);
  if (cfg.v.kind == VSpec::Kind::kCylBend)
    return cylinder_roll_family(frame, cfg.v.amplitude, cfg.v.axis);
  const int m = cfg.matching_order > 0 ? cfg.matching_order : (elliptic ? 2 : 1);
  return match_isometry(V, frame, m, solver_.get());
}

}  // namespace prestrain
