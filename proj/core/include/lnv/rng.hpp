#pragma once

// Seeded random streams. Every random draw in the library derives from one
// master seed; independent substreams are keyed by hashing (seed, stream id)
// so results do not depend on evaluation order or thread schedule.

#include <cstdint>
#include <random>

#include "lnv/linalg.hpp"

namespace lnv {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Standard complex Gaussian (independent real and imaginary parts).
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re, im};
  }
  /// Uniform on the unit circle.
  Complex unit_complex() { return std::polar(1.0, 2.0 * 3.14159265358979323846 * uniform()); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace lnv
