#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mmwsim::rng {

// SplitMix64 finalizer; used to derive well-mixed seeds from structured input.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Named substream derivation: all randomness in a run flows from one master
// seed through (master, name, index) triples, so paired comparisons can reuse
// identical scene/obstacle/fading streams while exploration differs.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::string_view name,
                                       std::uint64_t index = 0) {
  return splitmix64(splitmix64(master ^ fnv1a(name)) ^ index);
}

// Counter-based mix for order-independent draws (e.g. fading phases addressed
// by (realization, slot, bs, path)).
constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                            std::uint64_t d) {
  return splitmix64(splitmix64(splitmix64(splitmix64(a) ^ b) ^ c) ^ d);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(gen_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  // Inclusive bounds.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
  }
  int poisson(double rate) {
    if (rate <= 0.0) return 0;
    return std::poisson_distribution<int>(rate)(gen_);
  }

  std::mt19937_64& gen() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mmwsim::rng
