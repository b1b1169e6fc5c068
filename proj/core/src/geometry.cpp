#include "mmwsim/geometry.hpp"

#include <algorithm>

namespace mmwsim {

namespace {
constexpr double kEps = 1e-9;
}

bool segment_crosses_box(const Vec3& a, const Vec3& b, const Aabb& box) {
  // Slab method over the segment parameter t in [0,1].
  const double d[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
  const double o[3] = {a.x, a.y, a.z};
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};

  double tmin = 0.0, tmax = 1.0;
  for (int i = 0; i < 3; ++i) {
    if (std::abs(d[i]) < kEps) {
      // Degenerate axis: sliding exactly along a face is grazing, not a
      // crossing, so the strict interior is required.
      if (o[i] <= lo[i] + kEps || o[i] >= hi[i] - kEps) return false;
      continue;
    }
    double t0 = (lo[i] - o[i]) / d[i];
    double t1 = (hi[i] - o[i]) / d[i];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
    if (tmin > tmax) return false;
  }
  return (tmax - tmin) > kEps;
}

bool segment_crosses_vrect(const Vec3& a, const Vec3& b, const VerticalRect& rect) {
  // Plane through the vertical rectangle: normal is the in-plane perpendicular
  // of the base segment direction.
  const double ex = rect.p1.x - rect.p0.x;
  const double ey = rect.p1.y - rect.p0.y;
  const double len = std::hypot(ex, ey);
  if (len < kEps || rect.height <= 0.0) return false;
  const double nx = -ey / len, ny = ex / len;

  const double da = nx * (a.x - rect.p0.x) + ny * (a.y - rect.p0.y);
  const double db = nx * (b.x - rect.p0.x) + ny * (b.y - rect.p0.y);
  if (da * db > -kEps * kEps) return false;  // same side or grazing

  const double t = da / (da - db);
  if (t <= kEps || t >= 1.0 - kEps) return false;
  const Vec3 p = a + (b - a) * t;
  if (p.z < 0.0 || p.z > rect.height) return false;
  const double s = ((p.x - rect.p0.x) * ex + (p.y - rect.p0.y) * ey) / (len * len);
  return s > 0.0 && s < 1.0;
}

Vec3 mirror_across_plane(const Vec3& p, int axis, double plane) {
  Vec3 m = p;
  if (axis == 0)
    m.x = 2.0 * plane - p.x;
  else
    m.y = 2.0 * plane - p.y;
  return m;
}

double wrap_deg(double a) {
  a = std::fmod(a + 180.0, 360.0);
  if (a < 0.0) a += 360.0;
  return a - 180.0;
}

}  // namespace mmwsim
