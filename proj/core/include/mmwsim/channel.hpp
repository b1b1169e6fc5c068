#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "mmwsim/rng.hpp"

namespace mmwsim {

using Cx = std::complex<double>;

// SNR reported when the received signal vanishes entirely (deep outage /
// orthogonal beam). Kept finite so CSV output and rate math stay well-behaved:
// log2(1 + 10^(kSnrFloorDb/10)) underflows to exactly 0.
constexpr double kSnrFloorDb = -1.0e9;

struct ArrayGeometry {
  int rows = 8;
  int cols = 8;
  double spacing_wavelengths = 0.5;

  int size() const { return rows * cols; }
};

// One resolvable propagation path as seen from the BS array.
struct PathGain {
  Cx gain;            // linear, includes path loss
  double az_deg = 0;  // azimuth AoD in [-180, 180)
  double el_deg = 0;  // elevation AoD in [-90, 90]
};

struct ChannelVector {
  std::vector<Cx> h;
};

struct LinkBudget {
  double tx_power_dbm = 10.0;
  double noise_density_dbm_hz = -174.0;
  double bandwidth_hz = 100e6;

  double noise_power_dbm() const {
    return noise_density_dbm_hz + 10.0 * std::log10(bandwidth_hz);
  }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Uniform planar array response: entry (m, n) has phase
// 2*pi*d*(m*sin(el) + n*cos(el)*sin(az)), unit magnitude.
std::vector<Cx> array_response(double az_deg, double el_deg, const ArrayGeometry& geom);

// Unit-norm beamforming vector steered at (az, el): array response / sqrt(N).
std::vector<Cx> beam_vector(double az_deg, double el_deg, const ArrayGeometry& geom);

// h = sum_l g_l * a(az_l, el_l), so |h^H f| peaks when f is steered at the
// dominant path's AoD. Throws std::invalid_argument on an empty path list;
// callers treat that case as deep outage upstream.
ChannelVector assemble_channel(std::span<const PathGain> paths, const ArrayGeometry& geom);

// Same, with a fresh unit-magnitude random phase applied to every path gain
// (per-realization channel fading).
ChannelVector assemble_channel(std::span<const PathGain> paths, const ArrayGeometry& geom,
                               rng::Stream& fading);

// SNR in dB: p * |h^H f|^2 / sigma^2, with p and sigma^2 from the budget.
// Requires ||f|| == 1 within 1e-9. Returns kSnrFloorDb when |h^H f| == 0.
double snr_db(const ChannelVector& h, std::span<const Cx> f, const LinkBudget& budget);

}  // namespace mmwsim
