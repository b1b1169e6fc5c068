#pragma once

#include <functional>
#include <span>
#include <vector>

#include "mmwsim/channel.hpp"

namespace mmwsim {

struct Direction {
  double az_deg = 0.0;
  double el_deg = 0.0;

  bool operator==(const Direction&) const = default;
};

// Angle grid covered by the initial-training codebook.
struct CodebookGrid {
  double az_min_deg = -60.0, az_max_deg = 60.0;
  double el_min_deg = -20.0, el_max_deg = 20.0;
  double az_step_deg = 5.0, el_step_deg = 5.0;
};

struct Codebook {
  std::vector<Direction> directions;       // row-major: azimuth outer, elevation inner
  std::vector<std::vector<Cx>> beams;      // unit-norm steering vectors
};

Codebook build_codebook(const ArrayGeometry& geom, const CodebookGrid& grid);

// Measurement oracle: SNR in dB when transmitting toward a direction with the
// (unit-norm) steered beam. Consumes the current slot's channel state.
using MeasureFn = std::function<double(const Direction&)>;

struct TrainingOutcome {
  int beam_index = 0;
  Direction direction;
  double snr_db = kSnrFloorDb;
  double tau_b_s = 0.0;  // fixed at slot_s / 3 for the exhaustive sweep
};

// Exhaustive sweep over the whole codebook; ties broken by lowest index.
TrainingOutcome initial_beam_training(const MeasureFn& measure, const Codebook& codebook,
                                      double slot_s);

struct NeighborhoodSpec {
  double max_az_deg = 10.0;  // maximum absolute deviation from the main direction
  double max_el_deg = 10.0;
  double az_step_deg = 5.0;  // measurement resolution
  double el_step_deg = 5.0;
};

// Offset grid {(i*step_az, j*step_el)} for i in [-floor(max/step), +floor],
// j likewise; Cartesian product, azimuth-major order.
std::vector<Direction> neighborhood_offsets(const NeighborhoodSpec& spec);

// main + offsets, sorted by ascending Euclidean distance in degrees from main;
// ties by azimuth then elevation. First element is the main direction itself.
std::vector<Direction> sorted_neighborhood(const Direction& main, const NeighborhoodSpec& spec);

struct TrackingResult {
  Direction direction;
  double snr_db = kSnrFloorDb;
  int cnt = 0;           // beams measured, 1-based count
  double tau_b_s = 0.0;  // beta * cnt
  bool met_threshold = false;
};

// Measures directions in order and stops at the first one meeting snr_thr_db.
// If none qualifies, all directions are measured and the best one is returned
// with met_threshold = false.
TrackingResult track_beam(const MeasureFn& measure, std::span<const Direction> sorted_dirs,
                          double snr_thr_db, double beta_s);

}  // namespace mmwsim
