#pragma once

#include "wqr/geometry.hpp"

#include <cstdint>
#include <random>

namespace wqr {

/// splitmix64 finalizer; used to derive independent per-task streams from
/// (seed, stream id) so that results never depend on execution order.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(mix_seed(seed, stream)) {}

  /// Uniform on [0, 1) with 53 random bits; portable across standard libraries.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  Point in_box(const BoxDomain& box);
  /// Uniform in a ball by rejection from the bounding cube.
  Point in_ball(const Ball& ball);
  Point in_region(const Region& r);
  /// Uniform direction on S^{n-1}.
  Point on_sphere(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace wqr
