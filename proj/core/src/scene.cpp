#include "mmwsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace mmwsim {

namespace {

using nlohmann::json;

bool boxes_overlap_xy(const Aabb& a, const Aabb& b) {
  return a.min.x < b.max.x && b.min.x < a.max.x && a.min.y < b.max.y && b.min.y < a.max.y;
}

void validate_config(const ScenarioConfig& c) {
  if (!(c.world_min.x < c.world_max.x && c.world_min.y < c.world_max.y &&
        c.world_min.z < c.world_max.z))
    throw std::invalid_argument("scenario: degenerate world bounds");
  if (c.corridor.min.x < c.world_min.x || c.corridor.max.x > c.world_max.x ||
      c.corridor.min.y < c.world_min.y || c.corridor.max.y > c.world_max.y)
    throw std::invalid_argument("scenario: corridor exceeds world bounds");
  if (c.corridor.axis != 0 && c.corridor.axis != 1)
    throw std::invalid_argument("scenario: corridor axis must be 0 or 1");
  if (c.corridor.length() <= 0.0 || c.corridor.width() <= 0.0)
    throw std::invalid_argument("scenario: degenerate corridor");
  if (c.building_count < 0) throw std::invalid_argument("scenario: negative building count");
  if (c.building_min_side <= 0.0 || c.building_max_side < c.building_min_side)
    throw std::invalid_argument("scenario: bad building side range");
  if (c.bs_count < 1) throw std::invalid_argument("scenario: need at least one BS");
  if (c.traj_slots < 1) throw std::invalid_argument("scenario: need at least one slot");
  if (c.speed_mps <= 0.0 || c.interval_s <= 0.0)
    throw std::invalid_argument("scenario: non-positive speed or interval");
  if (c.obstacle_heights.empty() || c.obstacle_widths.empty())
    throw std::invalid_argument("scenario: empty obstacle attribute sets");
}

Aabb corridor_box(const Corridor& c, double zmax) {
  return Aabb{{c.min.x, c.min.y, 0.0}, {c.max.x, c.max.y, zmax}};
}

}  // namespace

Scene generate_scene(const ScenarioConfig& config, std::uint64_t seed) {
  validate_config(config);

  Scene scene;
  scene.world_min = config.world_min;
  scene.world_max = config.world_max;
  scene.corridor = config.corridor;
  scene.reflection_loss_db = config.reflection_loss_db;

  rng::Stream rng(rng::substream_seed(seed, "scene"));
  // Clearance band beyond the corridor keeps the BS sites (mounted setback_m
  // outside the street edge) out of building interiors.
  const double clear = config.bs_setback_m + 0.5;
  Aabb corridor = corridor_box(config.corridor, config.world_max.z);
  corridor.min.x -= clear;
  corridor.min.y -= clear;
  corridor.max.x += clear;
  corridor.max.y += clear;

  const int max_attempts = 1000 * std::max(1, config.building_count);
  int attempts = 0;
  while (static_cast<int>(scene.buildings.size()) < config.building_count) {
    if (++attempts > max_attempts)
      throw std::invalid_argument("scenario: cannot place buildings outside corridor");
    const double sx = rng.uniform(config.building_min_side, config.building_max_side);
    const double sy = rng.uniform(config.building_min_side, config.building_max_side);
    const double h = rng.uniform(config.building_min_height, config.building_max_height);
    const double x0 = rng.uniform(config.world_min.x, config.world_max.x - sx);
    const double y0 = rng.uniform(config.world_min.y, config.world_max.y - sy);
    Aabb box{{x0, y0, 0.0}, {x0 + sx, y0 + sy, h}};
    if (boxes_overlap_xy(box, corridor)) continue;
    bool clash = false;
    for (const Building& b : scene.buildings) {
      if (boxes_overlap_xy(box, b.box)) {
        clash = true;
        break;
      }
    }
    if (clash) continue;
    scene.buildings.push_back({box, config.building_penetration_db});
  }
  return scene;
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  Scenario sc;
  sc.scene = generate_scene(config, seed);
  sc.config = config;
  sc.config.seed = seed;

  const Corridor& cor = config.corridor;
  const double along0 = (cor.axis == 0) ? cor.min.x : cor.min.y;
  const double length = cor.length();
  const double mid = (cor.axis == 0) ? 0.5 * (cor.min.y + cor.max.y) : 0.5 * (cor.min.x + cor.max.x);

  // BSs evenly spaced along the street, alternating sides, facing the street.
  for (int i = 0; i < config.bs_count; ++i) {
    const double along = along0 + (i + 0.5) * length / config.bs_count;
    const bool left = (i % 2 == 0);
    BsSite bs;
    bs.id = i + 1;
    if (cor.axis == 0) {
      bs.position = {along, left ? cor.min.y - config.bs_setback_m : cor.max.y + config.bs_setback_m,
                     config.bs_height_m};
      bs.broadside_az_deg = left ? 90.0 : -90.0;
    } else {
      bs.position = {left ? cor.min.x - config.bs_setback_m : cor.max.x + config.bs_setback_m, along,
                     config.bs_height_m};
      bs.broadside_az_deg = left ? 0.0 : 180.0;
    }
    sc.base_stations.push_back(bs);
  }

  const double step = config.speed_mps * config.interval_s;
  sc.trajectory.speed_mps = config.speed_mps;
  sc.trajectory.interval_s = config.interval_s;
  for (int i = 0; i < config.traj_slots; ++i) {
    const double along = along0 + 1.0 + i * step;
    if (cor.axis == 0)
      sc.trajectory.waypoints.push_back({along, mid});
    else
      sc.trajectory.waypoints.push_back({mid, along});
  }
  return sc;
}

ObstacleSet sample_obstacles(const Scene& scene, const ScenarioConfig& config,
                             double density_per_m2, rng::Stream& rng) {
  if (density_per_m2 < 0.0) throw std::invalid_argument("sample_obstacles: negative density");

  ObstacleSet set;
  set.street_axis = scene.corridor.axis;
  const double area = scene.corridor.area();
  const int count = rng.poisson(density_per_m2 * area);
  set.obstacles.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Obstacle ob;
    ob.cx = rng.uniform(scene.corridor.min.x, scene.corridor.max.x);
    ob.cy = rng.uniform(scene.corridor.min.y, scene.corridor.max.y);
    ob.height_m = config.obstacle_heights[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(config.obstacle_heights.size()) - 1))];
    ob.width_m = config.obstacle_widths[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(config.obstacle_widths.size()) - 1))];
    ob.penetration_db = config.obstacle_penetration_db;
    set.obstacles.push_back(ob);
  }
  return set;
}

namespace {

template <typename T>
T require(const json& j, const char* field) {
  if (!j.contains(field)) throw ConfigError(std::string("missing field: ") + field);
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("malformed field: ") + field);
  }
}

template <typename T>
T optional_field(const json& j, const char* field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("malformed field: ") + field);
  }
}

Vec3 vec3_from(const json& j, const char* field) {
  auto v = require<std::vector<double>>(j, field);
  if (v.size() != 3) throw ConfigError(std::string("malformed field: ") + field);
  return {v[0], v[1], v[2]};
}

json vec3_to(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

ScenarioConfig parse_scenario_config(const nlohmann::json& j) {
  ScenarioConfig c;
  c.world_min = vec3_from(j, "world_min");
  c.world_max = vec3_from(j, "world_max");
  if (!j.contains("corridor")) throw ConfigError("missing field: corridor");
  const json& cor = j.at("corridor");
  c.corridor.axis = require<int>(cor, "axis");
  c.corridor.min = vec3_from(cor, "min");
  c.corridor.max = vec3_from(cor, "max");

  c.building_count = require<int>(j, "building_count");
  c.building_min_side = optional_field(j, "building_min_side", c.building_min_side);
  c.building_max_side = optional_field(j, "building_max_side", c.building_max_side);
  c.building_min_height = optional_field(j, "building_min_height", c.building_min_height);
  c.building_max_height = optional_field(j, "building_max_height", c.building_max_height);
  c.building_penetration_db = optional_field(j, "building_penetration_db", c.building_penetration_db);
  c.reflection_loss_db = optional_field(j, "reflection_loss_db", c.reflection_loss_db);

  c.bs_count = require<int>(j, "bs_count");
  c.bs_height_m = optional_field(j, "bs_height_m", c.bs_height_m);
  c.bs_setback_m = optional_field(j, "bs_setback_m", c.bs_setback_m);

  c.traj_slots = require<int>(j, "traj_slots");
  c.speed_mps = optional_field(j, "speed_mps", c.speed_mps);
  c.interval_s = optional_field(j, "interval_s", c.interval_s);

  c.obstacle_density_per_m2 = optional_field(j, "obstacle_density_per_m2", c.obstacle_density_per_m2);
  c.obstacle_penetration_db = optional_field(j, "obstacle_penetration_db", c.obstacle_penetration_db);
  c.obstacle_heights = optional_field(j, "obstacle_heights", c.obstacle_heights);
  c.obstacle_widths = optional_field(j, "obstacle_widths", c.obstacle_widths);

  c.carrier_hz = optional_field(j, "carrier_hz", c.carrier_hz);
  c.ue_height_m = optional_field(j, "ue_height_m", c.ue_height_m);
  c.tx_power_dbm = optional_field(j, "tx_power_dbm", c.tx_power_dbm);
  c.seed = optional_field(j, "seed", c.seed);
  return c;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  return parse_scenario_config(j);
}

namespace {

json config_to_json(const ScenarioConfig& c) {
  json j;
  j["world_min"] = vec3_to(c.world_min);
  j["world_max"] = vec3_to(c.world_max);
  j["corridor"] = {{"axis", c.corridor.axis}, {"min", vec3_to(c.corridor.min)},
                   {"max", vec3_to(c.corridor.max)}};
  j["building_count"] = c.building_count;
  j["building_min_side"] = c.building_min_side;
  j["building_max_side"] = c.building_max_side;
  j["building_min_height"] = c.building_min_height;
  j["building_max_height"] = c.building_max_height;
  j["building_penetration_db"] = c.building_penetration_db;
  j["reflection_loss_db"] = c.reflection_loss_db;
  j["bs_count"] = c.bs_count;
  j["bs_height_m"] = c.bs_height_m;
  j["bs_setback_m"] = c.bs_setback_m;
  j["traj_slots"] = c.traj_slots;
  j["speed_mps"] = c.speed_mps;
  j["interval_s"] = c.interval_s;
  j["obstacle_density_per_m2"] = c.obstacle_density_per_m2;
  j["obstacle_penetration_db"] = c.obstacle_penetration_db;
  j["obstacle_heights"] = c.obstacle_heights;
  j["obstacle_widths"] = c.obstacle_widths;
  j["carrier_hz"] = c.carrier_hz;
  j["ue_height_m"] = c.ue_height_m;
  j["tx_power_dbm"] = c.tx_power_dbm;
  j["seed"] = c.seed;
  return j;
}

}  // namespace

void save_scenario(const Scenario& sc, const std::string& path) {
  json j;
  j["config"] = config_to_json(sc.config);
  json buildings = json::array();
  for (const Building& b : sc.scene.buildings) {
    buildings.push_back({{"min", vec3_to(b.box.min)},
                         {"max", vec3_to(b.box.max)},
                         {"penetration_db", b.penetration_db}});
  }
  j["scene"] = {{"world_min", vec3_to(sc.scene.world_min)},
                {"world_max", vec3_to(sc.scene.world_max)},
                {"reflection_loss_db", sc.scene.reflection_loss_db},
                {"buildings", buildings}};
  json bss = json::array();
  for (const BsSite& bs : sc.base_stations) {
    bss.push_back({{"id", bs.id},
                   {"position", vec3_to(bs.position)},
                   {"broadside_az_deg", bs.broadside_az_deg}});
  }
  j["base_stations"] = bss;
  json wps = json::array();
  for (const auto& w : sc.trajectory.waypoints) wps.push_back(json::array({w[0], w[1]}));
  j["trajectory"] = {{"speed_mps", sc.trajectory.speed_mps},
                     {"interval_s", sc.trajectory.interval_s},
                     {"waypoints", wps}};

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario: " + path);
  out << j.dump(2) << "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  if (!j.contains("config")) throw ConfigError("missing field: config");

  // Geometry is regenerated deterministically from the embedded config and
  // seed; the stored scene/BS/trajectory blocks are the inspectable export.
  const ScenarioConfig cfg = parse_scenario_config(j.at("config"));
  return build_scenario(cfg, cfg.seed);
}

}  // namespace mmwsim
