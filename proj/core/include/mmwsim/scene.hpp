#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmwsim/geometry.hpp"
#include "mmwsim/rng.hpp"

namespace mmwsim {

struct Building {
  Aabb box;
  double penetration_db = 40.0;
};

// Axis-aligned street strip kept free of buildings; the trajectory runs along
// its center line. axis 0 means the street runs along x.
struct Corridor {
  int axis = 0;
  Vec3 min, max;

  double length() const { return axis == 0 ? max.x - min.x : max.y - min.y; }
  double width() const { return axis == 0 ? max.y - min.y : max.x - min.x; }
  double area() const { return length() * width(); }
};

struct Scene {
  Vec3 world_min, world_max;
  Corridor corridor;
  std::vector<Building> buildings;
  double reflection_loss_db = 10.0;  // per specular bounce off a building face
};

struct Obstacle {
  double cx = 0.0, cy = 0.0;  // base center
  double width_m = 2.0;       // across the street axis
  double height_m = 1.0;
  double penetration_db = 20.0;
};

struct ObstacleSet {
  std::vector<Obstacle> obstacles;
  int street_axis = 0;
  std::uint64_t seed = 0;
};

struct BsSite {
  int id = 1;  // 1-based
  Vec3 position;
  double broadside_az_deg = 0.0;
};

struct Trajectory {
  std::vector<std::array<double, 2>> waypoints;
  double speed_mps = 1.0;
  double interval_s = 1.0;

  int slots() const { return static_cast<int>(waypoints.size()); }
};

// Scenario descriptor, loadable from JSON (see load_scenario_config).
struct ScenarioConfig {
  Vec3 world_min{0, 0, 0}, world_max{200, 100, 30};
  Corridor corridor{0, {0, 40, 0}, {200, 60, 0}};

  int building_count = 12;
  double building_min_side = 8.0, building_max_side = 25.0;
  double building_min_height = 8.0, building_max_height = 20.0;
  double building_penetration_db = 40.0;
  double reflection_loss_db = 10.0;

  int bs_count = 10;
  double bs_height_m = 6.0;
  double bs_setback_m = 2.0;  // distance from corridor edge

  int traj_slots = 100;
  double speed_mps = 1.0;
  double interval_s = 1.0;

  double obstacle_density_per_m2 = 1e-2;
  double obstacle_penetration_db = 20.0;
  std::vector<double> obstacle_heights{1.0, 3.0};
  std::vector<double> obstacle_widths{2.0, 4.0};

  double carrier_hz = 28e9;
  double ue_height_m = 1.5;
  double tx_power_dbm = 10.0;
  std::uint64_t seed = 1;
};

struct Scenario {
  Scene scene;
  std::vector<BsSite> base_stations;
  Trajectory trajectory;
  ScenarioConfig config;  // retained for obstacle/propagation parameters
};

// Deterministic for fixed (config, seed). Buildings are rejection-sampled
// outside the corridor. Throws std::invalid_argument on inconsistent configs
// (corridor outside world bounds, bad ranges).
Scene generate_scene(const ScenarioConfig& config, std::uint64_t seed);

// Scene + BS placement along the corridor (alternating sides) + straight
// constant-speed trajectory along the corridor center line.
Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

// Poisson(density * street area) obstacles, uniformly placed in the corridor;
// heights/widths drawn uniformly from the configured sets.
ObstacleSet sample_obstacles(const Scene& scene, const ScenarioConfig& config, double density_per_m2,
                             rng::Stream& rng);

// JSON round trip. load_scenario_config throws ConfigError naming the bad
// field on malformed input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ScenarioConfig load_scenario_config(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace mmwsim
