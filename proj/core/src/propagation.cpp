#include "mmwsim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mmwsim {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

double penetration_between(const Scene& scene, const Vec3& a, const Vec3& b,
                           const Building* skip = nullptr) {
  double loss = 0.0;
  for (const Building& building : scene.buildings) {
    if (&building == skip) continue;
    if (segment_crosses_box(a, b, building.box)) loss += building.penetration_db;
  }
  return loss;
}

void set_aod(TracedPath& path, const BsSite& bs, const Vec3& toward) {
  const Vec3 d = toward - bs.position;
  const double az_global = std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
  path.az_deg = wrap_deg(az_global - bs.broadside_az_deg);
  path.el_deg = std::atan2(d.z, std::hypot(d.x, d.y)) * 180.0 / std::numbers::pi;
}

VerticalRect obstacle_rect(const Obstacle& ob, int street_axis) {
  // Obstacles stand across the street: base segment perpendicular to the
  // street axis.
  VerticalRect rect;
  if (street_axis == 0) {
    rect.p0 = {ob.cx, ob.cy - ob.width_m / 2.0, 0.0};
    rect.p1 = {ob.cx, ob.cy + ob.width_m / 2.0, 0.0};
  } else {
    rect.p0 = {ob.cx - ob.width_m / 2.0, ob.cy, 0.0};
    rect.p1 = {ob.cx + ob.width_m / 2.0, ob.cy, 0.0};
  }
  rect.height = ob.height_m;
  return rect;
}

}  // namespace

double free_space_path_loss_db(double distance_m, double carrier_hz) {
  if (distance_m <= 0.0) throw std::invalid_argument("free_space_path_loss_db: bad distance");
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * carrier_hz / kSpeedOfLight);
}

std::vector<TracedPath> trace_static_paths(const Scene& scene, const BsSite& bs, const Vec3& ue,
                                           const PropagationParams& params) {
  std::vector<TracedPath> paths;

  // Direct path, kept even when blocked (the penetration loss accumulates).
  {
    TracedPath los;
    los.length_m = (ue - bs.position).norm();
    los.loss_db = free_space_path_loss_db(los.length_m, params.carrier_hz) +
                  penetration_between(scene, bs.position, ue);
    set_aod(los, bs, ue);
    paths.push_back(los);
  }

  // First-order specular reflections off vertical building faces.
  for (const Building& building : scene.buildings) {
    const Aabb& box = building.box;
    struct Face {
      int axis;
      double plane;
      int sign;  // outward normal direction
    };
    const Face faces[4] = {{0, box.min.x, -1}, {0, box.max.x, +1},
                           {1, box.min.y, -1}, {1, box.max.y, +1}};
    for (const Face& face : faces) {
      const double bs_c = (face.axis == 0) ? bs.position.x : bs.position.y;
      const double ue_c = (face.axis == 0) ? ue.x : ue.y;
      // Both endpoints strictly on the outward side of the face.
      if (face.sign * (bs_c - face.plane) <= 0.0 || face.sign * (ue_c - face.plane) <= 0.0)
        continue;

      const Vec3 image = mirror_across_plane(bs.position, face.axis, face.plane);
      const Vec3 d = ue - image;
      const double dc = (face.axis == 0) ? d.x : d.y;
      if (std::abs(dc) < 1e-12) continue;
      const double ic = (face.axis == 0) ? image.x : image.y;
      const double t = (face.plane - ic) / dc;
      if (t <= 0.0 || t >= 1.0) continue;
      const Vec3 p = image + d * t;

      // The reflection point must land on the face rectangle.
      if (face.axis == 0) {
        if (p.y < box.min.y || p.y > box.max.y) continue;
      } else {
        if (p.x < box.min.x || p.x > box.max.x) continue;
      }
      if (p.z < box.min.z || p.z > box.max.z) continue;

      TracedPath path;
      path.reflected = true;
      path.bounce = p;
      path.length_m = d.norm();  // unfolded length |image - ue|
      path.loss_db = free_space_path_loss_db(path.length_m, params.carrier_hz) +
                     scene.reflection_loss_db +
                     penetration_between(scene, bs.position, p, &building) +
                     penetration_between(scene, p, ue, &building);
      set_aod(path, bs, p);
      paths.push_back(path);
    }
  }
  return paths;
}

double obstacle_extra_loss_db(const TracedPath& path, const BsSite& bs, const Vec3& ue,
                              const ObstacleSet& obstacles) {
  double loss = 0.0;
  for (const Obstacle& ob : obstacles.obstacles) {
    const VerticalRect rect = obstacle_rect(ob, obstacles.street_axis);
    bool hit;
    if (path.reflected) {
      hit = segment_crosses_vrect(bs.position, path.bounce, rect) ||
            segment_crosses_vrect(path.bounce, ue, rect);
    } else {
      hit = segment_crosses_vrect(bs.position, ue, rect);
    }
    if (hit) loss += ob.penetration_db;
  }
  return loss;
}

std::vector<TracedPath> trace_paths(const Scene& scene, const ObstacleSet& obstacles,
                                    const BsSite& bs, const Vec3& ue,
                                    const PropagationParams& params) {
  std::vector<TracedPath> paths = trace_static_paths(scene, bs, ue, params);
  for (TracedPath& p : paths) p.loss_db += obstacle_extra_loss_db(p, bs, ue, obstacles);

  std::stable_sort(paths.begin(), paths.end(),
                   [](const TracedPath& a, const TracedPath& b) { return a.loss_db < b.loss_db; });
  const double best = paths.front().loss_db;
  std::erase_if(paths, [&](const TracedPath& p) {
    return p.loss_db > best + params.drop_threshold_db;
  });
  if (static_cast<int>(paths.size()) > params.l_max) paths.resize(static_cast<std::size_t>(params.l_max));
  return paths;
}

std::vector<PathGain> to_path_gains(const std::vector<TracedPath>& paths) {
  std::vector<PathGain> gains;
  gains.reserve(paths.size());
  for (const TracedPath& p : paths) {
    gains.push_back({Cx{std::pow(10.0, -p.loss_db / 20.0), 0.0}, p.az_deg, p.el_deg});
  }
  return gains;
}

}  // namespace mmwsim
