#pragma once

#include "wqr/geometry.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace wqr {

/// Request for m balls of radius exactly rho, laid out on the cubic lattice
/// of pitch 2*rho centered at the region center.
struct ForcedBalls {
  std::uint64_t count = 0;
  double radius = 0.0;
};

struct PackOptions {
  std::size_t max_balls = 200000;
  /// Refinement stops once the level radius drops below this fraction of the inradius.
  double min_radius_fraction = 1e-4;
  /// Monte Carlo samples used to certify the result; 0 skips certification.
  std::size_t certify_samples = 100000;
};

/// A finite, pairwise-disjoint family of balls inside a parent region.
struct Packing {
  Region region;
  std::vector<Ball> balls;
  /// Number of leading entries of `balls` that came from the forced lattice.
  std::size_t forced_count = 0;
  /// 1 - sum(|B_i|)/|region|; exact because the balls are disjoint and contained.
  double uncovered_exact = 1.0;
  double uncovered_fraction_estimate = 1.0;
  double uncovered_fraction_stderr = 0.0;
  std::uint64_t certify_seed = 0;
  std::size_t certify_samples = 0;
  double delta_max = 0.0;
  double eta = 0.0;
  /// Set when eta could not be reached within the ball cap or radius floor.
  bool budget_exceeded = false;

  double covered_volume() const;
};

/// Lattice points c + 2*rho*m whose balls of radius rho fit in the region.
std::uint64_t forced_grid_capacity(const Region& region, double rho);
/// The first `count` lattice points ordered by distance to the region center
/// (ties broken lexicographically on the lattice coordinates).
std::vector<Point> forced_grid_points(const Region& region, double rho, std::uint64_t count);

/// Greedy grid-refinement packing. Throws InfeasibleForcedCount when the
/// lattice cannot host the forced balls, InvalidArgument on bad parameters.
/// When eta is unreachable the partial packing is returned with
/// `budget_exceeded` set.
Packing pack(const Region& region, double delta_max, double eta,
             const std::optional<ForcedBalls>& forced, std::uint64_t seed,
             const PackOptions& options = {});

struct CoverageEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Unbiased Monte Carlo estimate of |region \ U balls| / |region|.
CoverageEstimate uncovered_fraction(const Region& region, const std::vector<Ball>& balls,
                                    std::size_t samples, std::uint64_t seed);

}  // namespace wqr
