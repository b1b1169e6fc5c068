#include "mmwsim/channel.hpp"

#include <numbers>
#include <stdexcept>

namespace mmwsim {

std::vector<Cx> array_response(double az_deg, double el_deg, const ArrayGeometry& geom) {
  const double az = az_deg * std::numbers::pi / 180.0;
  const double el = el_deg * std::numbers::pi / 180.0;
  const double k = 2.0 * std::numbers::pi * geom.spacing_wavelengths;
  const double pm = k * std::sin(el);                 // row phase increment
  const double pn = k * std::cos(el) * std::sin(az);  // column phase increment

  std::vector<Cx> a(static_cast<std::size_t>(geom.size()));
  std::size_t idx = 0;
  for (int m = 0; m < geom.rows; ++m) {
    for (int n = 0; n < geom.cols; ++n) {
      a[idx++] = std::polar(1.0, m * pm + n * pn);
    }
  }
  return a;
}

std::vector<Cx> beam_vector(double az_deg, double el_deg, const ArrayGeometry& geom) {
  std::vector<Cx> f = array_response(az_deg, el_deg, geom);
  const double scale = 1.0 / std::sqrt(static_cast<double>(geom.size()));
  for (Cx& v : f) v *= scale;
  return f;
}

ChannelVector assemble_channel(std::span<const PathGain> paths, const ArrayGeometry& geom) {
  if (paths.empty()) throw std::invalid_argument("assemble_channel: empty path list");
  ChannelVector ch;
  ch.h.assign(static_cast<std::size_t>(geom.size()), Cx{0.0, 0.0});
  for (const PathGain& p : paths) {
    const std::vector<Cx> a = array_response(p.az_deg, p.el_deg, geom);
    for (std::size_t i = 0; i < ch.h.size(); ++i) {
      ch.h[i] += p.gain * a[i];
    }
  }
  return ch;
}

ChannelVector assemble_channel(std::span<const PathGain> paths, const ArrayGeometry& geom,
                               rng::Stream& fading) {
  std::vector<PathGain> faded(paths.begin(), paths.end());
  for (PathGain& p : faded) {
    p.gain *= std::polar(1.0, fading.uniform(0.0, 2.0 * std::numbers::pi));
  }
  return assemble_channel(faded, geom);
}

double snr_db(const ChannelVector& h, std::span<const Cx> f, const LinkBudget& budget) {
  if (h.h.size() != f.size()) throw std::invalid_argument("snr_db: dimension mismatch");
  double norm2 = 0.0;
  for (const Cx& v : f) norm2 += std::norm(v);
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-9)
    throw std::invalid_argument("snr_db: beam vector must be unit norm");

  Cx acc{0.0, 0.0};
  for (std::size_t i = 0; i < f.size(); ++i) acc += std::conj(h.h[i]) * f[i];
  const double gain2 = std::norm(acc);
  if (gain2 <= 0.0) return kSnrFloorDb;

  const double p_mw = db_to_linear(budget.tx_power_dbm);
  const double noise_mw = db_to_linear(budget.noise_power_dbm());
  return linear_to_db(p_mw * gain2 / noise_mw);
}

}  // namespace mmwsim
