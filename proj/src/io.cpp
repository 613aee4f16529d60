#include "maght/io.hpp"

#include <fstream>
#include <sstream>

#include "maght/errors.hpp"

namespace maght {

using nlohmann::json;

namespace {

constexpr const char* kMapSchema = "maght.map/1";
constexpr const char* kTrajSchema = "maght.traj/1";
constexpr const char* kResultSchema = "maght.result/1";
constexpr const char* kScenarioSchema = "maght.scenario/1";

void require_schema(const json& j, const char* expected) {
  if (!j.is_object() || j.value("schema", "") != expected) {
    throw SchemaError(std::string("expected schema '") + expected + "'");
  }
}

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw SchemaError("expected a 3-element array");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json pose_to_json(const GravityPose& p) {
  return json{{"x", p.x}, {"y", p.y}, {"z", p.z}, {"psi", p.psi}};
}

GravityPose pose_from_json(const json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(),
          j.at("z").get<double>(), j.at("psi").get<double>()};
}

json bounds_to_json(const Bounds& b) {
  return json{{"min", vec_to_json(b.min)}, {"max", vec_to_json(b.max)}};
}

Bounds bounds_from_json(const json& j) {
  return {vec_from_json(j.at("min")), vec_from_json(j.at("max"))};
}

const char* mode_name(LatticeMode mode) {
  return mode == LatticeMode::planar ? "planar" : "volumetric";
}

LatticeMode mode_from_name(const std::string& name) {
  if (name == "planar") return LatticeMode::planar;
  if (name == "volumetric") return LatticeMode::volumetric;
  throw SchemaError("unknown lattice mode '" + name + "'");
}

}  // namespace

json map_to_json(const MagneticMap& map) {
  json nodes = json::array();
  for (const MapNode& n : map.nodes) {
    nodes.push_back(json{{"p", vec_to_json(n.position)},
                         {"m", vec_to_json(n.m)}});
  }
  return json{{"schema", kMapSchema},
              {"lambda", map.lattice_step},
              {"mode", mode_name(map.mode)},
              {"bounds", bounds_to_json(map.bounds)},
              {"nodes", std::move(nodes)}};
}

MagneticMap map_from_json(const json& j) {
  require_schema(j, kMapSchema);
  MagneticMap map;
  map.lattice_step = j.at("lambda").get<double>();
  map.mode = mode_from_name(j.at("mode").get<std::string>());
  map.bounds = bounds_from_json(j.at("bounds"));
  if (!(map.lattice_step > 0.0)) throw SchemaError("map: lambda must be > 0");

  const json& nodes = j.at("nodes");
  if (!nodes.is_array() || nodes.empty()) {
    throw SchemaError("map: empty node list");
  }
  map.nodes.reserve(nodes.size());
  for (const json& jn : nodes) {
    MapNode n;
    n.position = vec_from_json(jn.at("p"));
    n.m = vec_from_json(jn.at("m"));
    if (!n.position.finite() || !n.m.finite()) {
      throw SchemaError("map: non-finite node");
    }
    n.feature = extract_feature(n.m);
    n.frame = magnetic_frame(n.position, n.m, 0.05);
    map.nodes.push_back(n);
  }
  build_feature_index(map);

  // Planar maps whose nodes fill the implied regular grid get the grid
  // reconstituted so continuous (interpolated) queries keep working.
  if (map.mode == LatticeMode::planar) {
    const double lambda = map.lattice_step;
    const Vec3 ext = map.bounds.extent();
    const int nx = static_cast<int>(std::floor(ext.x / lambda + 1e-9)) + 1;
    const int ny = static_cast<int>(std::floor(ext.y / lambda + 1e-9)) + 1;
    if (static_cast<size_t>(nx) * ny == map.nodes.size()) {
      GriddedField grid;
      grid.origin = {map.bounds.min.x, map.bounds.min.y,
                     map.bounds.center().z};
      grid.step = {lambda, lambda, lambda};
      grid.nx = nx;
      grid.ny = ny;
      grid.nz = 1;
      grid.values.assign(static_cast<size_t>(nx) * ny, Vec3{});
      std::vector<bool> filled(grid.values.size(), false);
      bool ok = true;
      for (const MapNode& n : map.nodes) {
        const long i = std::lround((n.position.x - grid.origin.x) / lambda);
        const long jj = std::lround((n.position.y - grid.origin.y) / lambda);
        if (i < 0 || i >= nx || jj < 0 || jj >= ny || filled[jj * nx + i]) {
          ok = false;
          break;
        }
        grid.values[jj * nx + i] = n.m;
        filled[jj * nx + i] = true;
      }
      if (ok) map.grid = std::move(grid);
    }
  }
  return map;
}

json trajectory_to_json(const InputTrajectory& traj) {
  json samples = json::array();
  for (const MagneticSample& s : traj.samples) {
    samples.push_back(json{{"t", s.t},
                           {"p", vec_to_json(s.position)},
                           {"m", vec_to_json(s.m)}});
  }
  return json{{"schema", kTrajSchema},
              {"frame", traj.frame},
              {"samples", std::move(samples)}};
}

InputTrajectory trajectory_from_json(const json& j) {
  require_schema(j, kTrajSchema);
  InputTrajectory traj;
  traj.frame = j.value("frame", "a");
  const json& samples = j.at("samples");
  if (!samples.is_array()) throw SchemaError("trajectory: samples missing");
  traj.samples.reserve(samples.size());
  for (const json& js : samples) {
    MagneticSample s;
    s.t = js.at("t").get<double>();
    s.position = vec_from_json(js.at("p"));
    s.m = vec_from_json(js.at("m"));
    if (!std::isfinite(s.t) || !s.position.finite() || !s.m.finite()) {
      throw SchemaError("trajectory: non-finite sample");
    }
    traj.samples.push_back(s);
  }
  return traj;
}

json result_to_json(const RelocResult& result, double wall_ms) {
  json out{{"schema", kResultSchema},
           {"outcome", result.converged ? "converged" : "no-consensus"},
           {"total_votes", result.total_votes},
           {"cluster_sizes", result.cluster_sizes},
           {"wall_ms", wall_ms}};
  if (result.converged) {
    out["pose"] = pose_to_json(result.pose);
    out["pose_original_frame"] = pose_to_json(result.pose_in_original_frame());
    out["barycenter"] = vec_to_json(result.barycenter);
  }
  return out;
}

namespace {

json drift_to_json(const DriftModel& d) {
  return json{{"sigma_trans", d.sigma_trans},
              {"sigma_yaw", d.sigma_yaw},
              {"bias_walk", d.bias_walk}};
}

DriftModel drift_from_json(const json& j) {
  DriftModel d;
  d.sigma_trans = j.at("sigma_trans");
  d.sigma_yaw = j.at("sigma_yaw");
  d.bias_walk = j.at("bias_walk");
  return d;
}

const char* kind_name(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::open: return "open";
    case ScenarioKind::corridor: return "corridor";
    case ScenarioKind::unmapped: return "unmapped";
    case ScenarioKind::staircase: return "staircase";
  }
  return "open";
}

ScenarioKind kind_from_name(const std::string& name) {
  if (name == "open") return ScenarioKind::open;
  if (name == "corridor") return ScenarioKind::corridor;
  if (name == "unmapped") return ScenarioKind::unmapped;
  if (name == "staircase") return ScenarioKind::staircase;
  throw SchemaError("unknown scenario kind '" + name + "'");
}

json spec_to_json(const ScenarioSpec& s) {
  return json{{"seed", s.seed},
              {"kind", kind_name(s.kind)},
              {"world_bounds", bounds_to_json(s.world_bounds)},
              {"n_dipoles", s.n_dipoles},
              {"moment_scale", s.moment_scale},
              {"lambda", s.lambda},
              {"lengths", s.lengths},
              {"cases_per_length", s.cases_per_length},
              {"raw_step", s.raw_step},
              {"mag_noise", s.mag_noise},
              {"drift", drift_to_json(s.drift)},
              {"walk_z", s.walk_z},
              {"corridor_width", s.corridor_width},
              {"crossing_min_angle_deg", s.crossing_min_angle_deg},
              {"corridor_crossing", s.corridor_crossing}};
}

ScenarioSpec spec_from_json(const json& j) {
  ScenarioSpec s;
  s.seed = j.at("seed");
  s.kind = kind_from_name(j.at("kind"));
  s.world_bounds = bounds_from_json(j.at("world_bounds"));
  s.n_dipoles = j.at("n_dipoles");
  s.moment_scale = j.at("moment_scale");
  s.lambda = j.at("lambda");
  s.lengths = j.at("lengths").get<std::vector<double>>();
  s.cases_per_length = j.at("cases_per_length");
  s.raw_step = j.at("raw_step");
  s.mag_noise = j.at("mag_noise");
  s.drift = drift_from_json(j.at("drift"));
  s.walk_z = j.at("walk_z");
  s.corridor_width = j.at("corridor_width");
  s.crossing_min_angle_deg = j.at("crossing_min_angle_deg");
  s.corridor_crossing = j.at("corridor_crossing");
  return s;
}

json world_to_json(const DipoleWorld& w) {
  json dipoles = json::array();
  for (const Dipole& d : w.dipoles) {
    dipoles.push_back(json{{"p", vec_to_json(d.position)},
                           {"m", vec_to_json(d.moment)}});
  }
  return json{{"earth_field", vec_to_json(w.earth_field)},
              {"bounds", bounds_to_json(w.bounds)},
              {"exclusion_radius", w.exclusion_radius},
              {"dipoles", std::move(dipoles)}};
}

DipoleWorld world_from_json(const json& j) {
  DipoleWorld w;
  w.earth_field = vec_from_json(j.at("earth_field"));
  w.bounds = bounds_from_json(j.at("bounds"));
  w.exclusion_radius = j.at("exclusion_radius");
  for (const json& jd : j.at("dipoles")) {
    w.dipoles.push_back(Dipole{vec_from_json(jd.at("p")),
                               vec_from_json(jd.at("m"))});
  }
  return w;
}

json map_spec_to_json(const MapSpec& s) {
  json mask = json::array();
  for (const Bounds& b : s.mask) mask.push_back(bounds_to_json(b));
  return json{{"bounds", bounds_to_json(s.bounds)},
              {"lambda", s.lambda},
              {"mode", mode_name(s.mode)},
              {"mask", std::move(mask)}};
}

MapSpec map_spec_from_json(const json& j) {
  MapSpec s;
  s.bounds = bounds_from_json(j.at("bounds"));
  s.lambda = j.at("lambda");
  s.mode = mode_from_name(j.at("mode"));
  for (const json& jb : j.at("mask")) s.mask.push_back(bounds_from_json(jb));
  return s;
}

}  // namespace

json scenario_to_json(const Scenario& scenario) {
  json cases = json::array();
  for (const Case& c : scenario.cases) {
    json samples = json::array();
    for (const MagneticSample& s : c.input.samples) {
      samples.push_back(json{{"t", s.t},
                             {"p", vec_to_json(s.position)},
                             {"m", vec_to_json(s.m)}});
    }
    cases.push_back(json{{"seed", c.seed},
                         {"truth", pose_to_json(c.truth)},
                         {"in_map", c.in_map},
                         {"traj_len", c.traj_len},
                         {"last_world_position",
                          vec_to_json(c.last_world_position)},
                         {"tag", c.tag},
                         {"frame", c.input.frame},
                         {"samples", std::move(samples)}});
  }
  return json{{"schema", kScenarioSchema},
              {"spec", spec_to_json(scenario.spec)},
              {"world", world_to_json(scenario.world)},
              {"map_spec", map_spec_to_json(scenario.map_spec)},
              {"cases", std::move(cases)}};
}

Scenario scenario_from_json(const json& j) {
  require_schema(j, kScenarioSchema);
  Scenario scenario;
  try {
    scenario.spec = spec_from_json(j.at("spec"));
    scenario.world = world_from_json(j.at("world"));
    scenario.map_spec = map_spec_from_json(j.at("map_spec"));
    for (const json& jc : j.at("cases")) {
      Case c;
      c.seed = jc.at("seed");
      c.truth = pose_from_json(jc.at("truth"));
      c.in_map = jc.at("in_map");
      c.traj_len = jc.at("traj_len");
      c.last_world_position = vec_from_json(jc.at("last_world_position"));
      c.tag = jc.at("tag");
      c.input.frame = jc.at("frame");
      for (const json& js : jc.at("samples")) {
        MagneticSample s;
        s.t = js.at("t").get<double>();
        s.position = vec_from_json(js.at("p"));
        s.m = vec_from_json(js.at("m"));
        c.input.samples.push_back(s);
      }
      scenario.cases.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("scenario: ") + e.what());
  }
  scenario.map = build_map(scenario.world, scenario.map_spec);
  return scenario;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << content;
  if (!os) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(path + ": not valid json: " + e.what());
  }
}

}  // namespace maght
