#pragma once

#include "wqr/map_tree.hpp"

#include <cstdint>
#include <vector>

namespace wqr {

struct BlowupProbe {
  Point point;
  /// Node ids from generation 1 down to the deepest node of the path.
  std::vector<std::uint32_t> path;
  /// radii[0] = diam(domain); radii[k] = radius of the generation-k path node.
  std::vector<double> radii;
  /// Mean of |F| over B(point, radii[i]) intersected with the domain.
  std::vector<double> averages;
  std::vector<double> stderrs;
  /// Slope and intercept of ln(average) against k over k >= 1 (0 if fewer than two).
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  /// ln(1 + delta) for CANTOR trees, 0 otherwise.
  double predicted_slope = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Descends from the root containing the domain center (or root 0) through the
/// first child at every level. On forced-branching trees this is the central spine.
std::vector<std::uint32_t> default_path(const MapTree& tree);

/// Monte Carlo averages of |F_depth| on shrinking balls around the deepest
/// center of `path` (default_path when empty). radii_count counts the global
/// radius, so it must lie in [1, path length + 1]. Throws PathNotSpine when a
/// CANTOR tree's path leaves the spine.
BlowupProbe blowup_probe(const MapTree& tree, std::vector<std::uint32_t> path,
                         std::size_t radii_count, std::size_t samples, std::uint64_t seed);

}  // namespace wqr
