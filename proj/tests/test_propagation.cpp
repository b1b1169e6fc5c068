#include <doctest.h>
#include <mmwsim/propagation.hpp>

#include <cmath>

using namespace mmwsim;

namespace {

Scene open_scene() {
  Scene scene;
  scene.world_min = {0, 0, 0};
  scene.world_max = {200, 100, 30};
  scene.corridor = Corridor{0, {0, 40, 0}, {200, 60, 0}};
  return scene;
}

}  // namespace

TEST_CASE("free-space path loss matches the textbook constant") {
  // 32.44778 + 20 log10(f_MHz) + 20 log10(d_km)
  const double expected = 32.44778 + 20.0 * std::log10(28000.0) + 20.0 * std::log10(0.1);
  CHECK(free_space_path_loss_db(100.0, 28e9) == doctest::Approx(expected).epsilon(1e-5));
  CHECK_THROWS_AS(free_space_path_loss_db(0.0, 28e9), std::invalid_argument);
}

TEST_CASE("empty scene produces only the direct path") {
  const Scene scene = open_scene();
  const BsSite bs{1, {0, 50, 6}, 0.0};
  const Vec3 ue{30, 50, 1.5};
  PropagationParams params;
  const auto paths = trace_static_paths(scene, bs, ue, params);
  REQUIRE(paths.size() == 1);
  CHECK_FALSE(paths[0].reflected);
  const double dist = (ue - bs.position).norm();
  CHECK(paths[0].length_m == doctest::Approx(dist));
  CHECK(paths[0].loss_db == doctest::Approx(free_space_path_loss_db(dist, params.carrier_hz)));
  CHECK(paths[0].az_deg == doctest::Approx(0.0));
  CHECK(paths[0].el_deg < 0.0);  // BS looks down at the UE
}

TEST_CASE("a wall in the way adds its penetration loss to the direct path") {
  Scene scene = open_scene();
  scene.buildings.push_back({Aabb{{10, 45, 0}, {12, 55, 10}}, 40.0});
  const BsSite bs{1, {0, 50, 6}, 0.0};
  const Vec3 ue{30, 50, 1.5};
  PropagationParams params;
  const auto paths = trace_static_paths(scene, bs, ue, params);
  const double fspl = free_space_path_loss_db((ue - bs.position).norm(), params.carrier_hz);
  CHECK(paths[0].loss_db == doctest::Approx(fspl + 40.0));
}

TEST_CASE("image-source reflection carries the mirrored bearing and length") {
  Scene scene = open_scene();
  // Face y = 60 of a building north of the street; BS and UE both south of it.
  scene.buildings.push_back({Aabb{{5, 60, 0}, {45, 70, 12}}, 40.0});
  const BsSite bs{1, {0, 50, 6}, 0.0};
  const Vec3 ue{30, 50, 1.5};
  PropagationParams params;
  const auto paths = trace_static_paths(scene, bs, ue, params);
  REQUIRE(paths.size() == 2);
  const TracedPath& refl = paths[1];
  REQUIRE(refl.reflected);

  const Vec3 ue_image = mirror_across_plane(ue, 1, 60.0);
  const Vec3 d = ue_image - bs.position;
  CHECK(refl.length_m == doctest::Approx(d.norm()).epsilon(1e-12));
  const double az = std::atan2(d.y, d.x) * 180.0 / 3.14159265358979323846;
  const double el = std::atan2(d.z, std::hypot(d.x, d.y)) * 180.0 / 3.14159265358979323846;
  CHECK(refl.az_deg == doctest::Approx(az).epsilon(1e-9));
  CHECK(refl.el_deg == doctest::Approx(el).epsilon(1e-9));
  CHECK(refl.loss_db ==
        doctest::Approx(free_space_path_loss_db(d.norm(), params.carrier_hz) +
                        scene.reflection_loss_db));
  // Bounce point sits on the reflecting face.
  CHECK(refl.bounce.y == doctest::Approx(60.0));
}

TEST_CASE("blocked reflections accumulate penetration too") {
  Scene scene = open_scene();
  scene.buildings.push_back({Aabb{{5, 60, 0}, {45, 70, 12}}, 40.0});
  // Short blocker crossing the incoming leg only.
  scene.buildings.push_back({Aabb{{7, 52, 0}, {8, 58, 12}}, 17.0});
  const BsSite bs{1, {0, 50, 6}, 0.0};
  const Vec3 ue{30, 50, 1.5};
  PropagationParams params;
  const auto paths = trace_static_paths(scene, bs, ue, params);
  bool found = false;
  for (const auto& p : paths) {
    if (!p.reflected) continue;
    if (p.bounce.y != doctest::Approx(60.0)) continue;
    found = true;
    const Vec3 ue_image = mirror_across_plane(ue, 1, 60.0);
    const double base = free_space_path_loss_db((ue_image - bs.position).norm(), params.carrier_hz) +
                        scene.reflection_loss_db;
    CHECK(p.loss_db == doctest::Approx(base + 17.0));
  }
  CHECK(found);
}

TEST_CASE("obstacles never decrease any path's loss") {
  Scene scene = open_scene();
  scene.buildings.push_back({Aabb{{5, 60, 0}, {45, 70, 12}}, 40.0});
  const BsSite bs{1, {0, 50, 6}, 0.0};
  const Vec3 ue{30, 50, 1.5};
  PropagationParams params;

  ObstacleSet empty;
  const auto before = trace_paths(scene, empty, bs, ue, params);

  ObstacleSet set;
  set.street_axis = 0;
  set.obstacles.push_back({15.0, 50.0, 4.0, 3.0, 20.0});
  const auto after = trace_paths(scene, set, bs, ue, params);

  REQUIRE_FALSE(before.empty());
  for (const auto& pb : before) {
    for (const auto& pa : after) {
      if (pa.reflected == pb.reflected && pa.az_deg == doctest::Approx(pb.az_deg))
        CHECK(pa.loss_db >= pb.loss_db - 1e-12);
    }
  }
}

TEST_CASE("blockage loss is reciprocal") {
  Scene scene = open_scene();
  scene.buildings.push_back({Aabb{{10, 45, 0}, {12, 55, 10}}, 40.0});
  scene.buildings.push_back({Aabb{{20, 48, 0}, {22, 52, 10}}, 25.0});
  const Vec3 a{0, 50, 6}, b{30, 50, 1.5};
  PropagationParams params;
  const auto fwd = trace_static_paths(scene, BsSite{1, a, 0.0}, b, params);
  const auto rev = trace_static_paths(scene, BsSite{1, b, 0.0}, a, params);
  CHECK(fwd[0].loss_db == doctest::Approx(rev[0].loss_db).epsilon(1e-12));
}

TEST_CASE("path list is sorted, pruned and capped") {
  Scene scene = open_scene();
  // A fence of reflectors generates many candidate paths.
  for (int i = 0; i < 8; ++i) {
    const double x = 5.0 + 22.0 * i;
    scene.buildings.push_back({Aabb{{x, 60, 0}, {x + 12, 70, 12}}, 40.0});
    scene.buildings.push_back({Aabb{{x, 30, 0}, {x + 12, 40, 12}}, 40.0});
  }
  const BsSite bs{1, {0, 50, 6}, 0.0};
  const Vec3 ue{100, 50, 1.5};
  PropagationParams params;
  ObstacleSet empty;
  const auto paths = trace_paths(scene, empty, bs, ue, params);
  REQUIRE_FALSE(paths.empty());
  CHECK(static_cast<int>(paths.size()) <= params.l_max);
  for (std::size_t i = 1; i < paths.size(); ++i) CHECK(paths[i].loss_db >= paths[i - 1].loss_db);
  for (const auto& p : paths)
    CHECK(p.loss_db <= paths[0].loss_db + params.drop_threshold_db);
}

TEST_CASE("path gains map loss to magnitude") {
  std::vector<TracedPath> paths(1);
  paths[0].loss_db = 80.0;
  paths[0].az_deg = 12.0;
  paths[0].el_deg = -4.0;
  const auto gains = to_path_gains(paths);
  REQUIRE(gains.size() == 1);
  CHECK(std::abs(gains[0].gain) == doctest::Approx(1e-4));
  CHECK(gains[0].az_deg == 12.0);
  CHECK(gains[0].el_deg == -4.0);
}
