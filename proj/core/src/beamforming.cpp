#include "mmwsim/beamforming.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mmwsim {

Codebook build_codebook(const ArrayGeometry& geom, const CodebookGrid& grid) {
  if (grid.az_step_deg <= 0.0 || grid.el_step_deg <= 0.0)
    throw std::invalid_argument("build_codebook: non-positive resolution");
  if (grid.az_max_deg < grid.az_min_deg || grid.el_max_deg < grid.el_min_deg)
    throw std::invalid_argument("build_codebook: empty angle range");

  Codebook cb;
  const double eps = 1e-9;
  for (double az = grid.az_min_deg; az <= grid.az_max_deg + eps; az += grid.az_step_deg) {
    for (double el = grid.el_min_deg; el <= grid.el_max_deg + eps; el += grid.el_step_deg) {
      cb.directions.push_back({az, el});
      cb.beams.push_back(beam_vector(az, el, geom));
    }
  }
  return cb;
}

TrainingOutcome initial_beam_training(const MeasureFn& measure, const Codebook& codebook,
                                      double slot_s) {
  if (codebook.directions.empty())
    throw std::invalid_argument("initial_beam_training: empty codebook");

  TrainingOutcome out;
  out.tau_b_s = slot_s / 3.0;
  out.beam_index = 0;
  out.direction = codebook.directions[0];
  out.snr_db = measure(codebook.directions[0]);
  for (std::size_t n = 1; n < codebook.directions.size(); ++n) {
    const double s = measure(codebook.directions[n]);
    if (s > out.snr_db) {
      out.snr_db = s;
      out.beam_index = static_cast<int>(n);
      out.direction = codebook.directions[n];
    }
  }
  return out;
}

std::vector<Direction> neighborhood_offsets(const NeighborhoodSpec& spec) {
  if (spec.az_step_deg <= 0.0 || spec.el_step_deg <= 0.0)
    throw std::invalid_argument("neighborhood_offsets: non-positive resolution");
  const int ka = static_cast<int>(std::floor(spec.max_az_deg / spec.az_step_deg));
  const int ke = static_cast<int>(std::floor(spec.max_el_deg / spec.el_step_deg));

  std::vector<Direction> offsets;
  offsets.reserve(static_cast<std::size_t>((2 * ka + 1) * (2 * ke + 1)));
  for (int i = -ka; i <= ka; ++i) {
    for (int j = -ke; j <= ke; ++j) {
      offsets.push_back({i * spec.az_step_deg, j * spec.el_step_deg});
    }
  }
  return offsets;
}

std::vector<Direction> sorted_neighborhood(const Direction& main, const NeighborhoodSpec& spec) {
  std::vector<Direction> dirs = neighborhood_offsets(spec);
  for (Direction& d : dirs) {
    d.az_deg += main.az_deg;
    d.el_deg += main.el_deg;
  }
  std::stable_sort(dirs.begin(), dirs.end(), [&](const Direction& a, const Direction& b) {
    const double da = std::hypot(a.az_deg - main.az_deg, a.el_deg - main.el_deg);
    const double db = std::hypot(b.az_deg - main.az_deg, b.el_deg - main.el_deg);
    if (da != db) return da < db;
    if (a.az_deg != b.az_deg) return a.az_deg < b.az_deg;
    return a.el_deg < b.el_deg;
  });
  return dirs;
}

TrackingResult track_beam(const MeasureFn& measure, std::span<const Direction> sorted_dirs,
                          double snr_thr_db, double beta_s) {
  if (sorted_dirs.empty()) throw std::invalid_argument("track_beam: empty direction list");
  if (beta_s <= 0.0) throw std::invalid_argument("track_beam: non-positive beta");

  TrackingResult best;
  int cnt = 0;
  for (const Direction& d : sorted_dirs) {
    const double s = measure(d);
    ++cnt;
    if (cnt == 1 || s > best.snr_db) {
      best.direction = d;
      best.snr_db = s;
    }
    if (s >= snr_thr_db) {
      best.direction = d;
      best.snr_db = s;
      best.cnt = cnt;
      best.tau_b_s = beta_s * cnt;
      best.met_threshold = true;
      return best;
    }
  }
  best.cnt = cnt;
  best.tau_b_s = beta_s * cnt;
  best.met_threshold = false;
  return best;
}

}  // namespace mmwsim
