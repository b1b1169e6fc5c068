#pragma once

#include <vector>

#include "mmwsim/channel.hpp"
#include "mmwsim/scene.hpp"

namespace mmwsim {

struct PropagationParams {
  double carrier_hz = 28e9;
  int l_max = 5;                    // paths kept per link
  double drop_threshold_db = 60.0;  // relative to the strongest path
  double ue_height_m = 1.5;
};

// One geometric path BS -> (optional reflection point) -> UE.
struct TracedPath {
  double loss_db = 0.0;     // free-space + penetrations + reflection loss
  double az_deg = 0.0;      // AoD relative to the BS broadside
  double el_deg = 0.0;
  double length_m = 0.0;    // unfolded propagation length
  bool reflected = false;
  Vec3 bounce;              // reflection point, valid when reflected
};

double free_space_path_loss_db(double distance_m, double carrier_hz);

// LOS + first-order specular reflections off vertical building faces, without
// dynamic obstacles. Penetration of intersected buildings is accumulated into
// loss_db; nothing is dropped here.
std::vector<TracedPath> trace_static_paths(const Scene& scene, const BsSite& bs, const Vec3& ue,
                                           const PropagationParams& params);

// Additional penetration loss a path picks up from the dynamic obstacle set.
double obstacle_extra_loss_db(const TracedPath& path, const BsSite& bs, const Vec3& ue,
                              const ObstacleSet& obstacles);

// Full per-link path set: static paths + obstacle losses, sorted by ascending
// loss, pruned to params.l_max and to within drop_threshold_db of the best.
// The direct path is never dropped by blockage alone, only by the threshold.
std::vector<TracedPath> trace_paths(const Scene& scene, const ObstacleSet& obstacles,
                                    const BsSite& bs, const Vec3& ue,
                                    const PropagationParams& params);

// Paths -> per-path complex gains (magnitude from loss, zero phase; fading
// phases are applied at channel assembly).
std::vector<PathGain> to_path_gains(const std::vector<TracedPath>& paths);

}  // namespace mmwsim
