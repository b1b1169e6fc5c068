#pragma once

#include <cmath>
#include <optional>

namespace mmwsim {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct Aabb {
  Vec3 min, max;

  bool valid() const {
    return min.x < max.x && min.y < max.y && min.z < max.z;
  }
  bool contains_xy(double px, double py) const {
    return px >= min.x && px <= max.x && py >= min.y && py <= max.y;
  }
};

// True if the open segment a->b passes through the interior of the box
// (grazing touches of faces/edges do not count).
bool segment_crosses_box(const Vec3& a, const Vec3& b, const Aabb& box);

// Vertical rectangle: base segment (p0,p1) at ground level extruded up to
// height. Used for street obstacles.
struct VerticalRect {
  Vec3 p0, p1;     // z components ignored, base at z = 0
  double height = 0.0;
};

bool segment_crosses_vrect(const Vec3& a, const Vec3& b, const VerticalRect& rect);

// Mirror a point across the axis-aligned plane {axis coordinate == plane}.
// axis: 0 = x, 1 = y.
Vec3 mirror_across_plane(const Vec3& p, int axis, double plane);

// Wrap an angle in degrees to [-180, 180).
double wrap_deg(double a);

}  // namespace mmwsim
