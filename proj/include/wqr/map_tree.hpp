#pragma once

#include "wqr/ball_index.hpp"
#include "wqr/geometry.hpp"
#include "wqr/radial.hpp"
#include "wqr/schedule.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace wqr {

inline constexpr std::uint32_t kNoNode = std::numeric_limits<std::uint32_t>::max();

/// One ball B_{k,j} of the iterated construction. Children pack aB_{k,j}.
struct MapNode {
  std::uint32_t parent = kNoNode;
  std::uint32_t first_child = 0;
  std::uint32_t child_count = 0;
  int generation = 1;
  double radius = 0.0;
  /// ln a^{-(k-1) alpha}: the scale of this node's radial stretch.
  double log_accum_scale = 0.0;
  bool spine = false;
};

/// Flat, serializable description of a node (used for reload and fixtures).
struct NodeRecord {
  std::uint32_t parent = kNoNode;
  int generation = 1;
  Point center;
  double radius = 0.0;
  Point image_center;
  double log_accum_scale = 0.0;
  bool spine = false;
};

struct GenerationStats {
  int generation = 0;
  std::size_t nodes = 0;
  std::size_t spine_nodes = 0;
  /// |U_k|: the box for k = 1, otherwise the union of the parents' aB.
  double region_volume = 0.0;
  double covered_volume = 0.0;
  double uncovered_fraction() const {
    return region_volume > 0.0 ? 1.0 - covered_volume / region_volume : 0.0;
  }
};

/// Finite-depth packing tree encoding F_k. Immutable after construction;
/// every query is const and safe to call concurrently.
class MapTree {
 public:
  /// Nodes must be ordered by generation with each parent's children contiguous.
  MapTree(BoxDomain domain, ScheduleParams params, std::vector<NodeRecord> nodes);

  const BoxDomain& domain() const { return domain_; }
  const ScheduleParams& params() const { return params_; }
  std::size_t dim() const { return domain_.dim(); }
  std::size_t size() const { return nodes_.size(); }
  /// Deepest generation present (0 for an empty tree).
  int depth() const { return static_cast<int>(generation_begin_.size()) - 1; }

  const MapNode& node(std::uint32_t id) const { return nodes_[id]; }
  Eigen::Map<const Point> center(std::uint32_t id) const;
  Eigen::Map<const Point> image_center(std::uint32_t id) const;
  Ball ball(std::uint32_t id) const;
  RadialStretch stretch(std::uint32_t id) const;
  std::span<const std::uint32_t> roots() const { return roots_; }
  std::vector<std::uint32_t> children(std::uint32_t id) const;
  /// Node ids of generation k occupy [begin, end).
  std::pair<std::uint32_t, std::uint32_t> generation_range(int k) const;
  const std::vector<GenerationStats>& generation_stats() const { return stats_; }
  NodeRecord record(std::uint32_t id) const;

  /// Node of generation k whose closed ball contains x.
  std::uint32_t find_in_generation(int k, const Point& x) const;

  /// Measure of the set where F_depth is affine with positive Jacobian
  /// (leaf inner balls plus uncovered slack inside every aB).
  double inner_affine_measure() const;
  /// |Omega \ union of generation-1 balls|.
  double outside_measure() const;

 private:
  BoxDomain domain_;
  ScheduleParams params_;
  std::vector<MapNode> nodes_;
  std::vector<double> centers_;
  std::vector<double> images_;
  std::vector<std::uint32_t> roots_;
  std::vector<std::uint32_t> generation_begin_;  // size depth + 1, sentinel last
  std::vector<BallIndex> index_;                 // one per generation
  std::vector<GenerationStats> stats_;
};

/// Builds F_{depth}: generation-1 packing of the box, then a packing of every
/// aB_{k-1,j} with radius <= min(delta_k, a r_{k-1,j}). Cantor schedules with
/// forced branching place the full lattice of radius-delta_k balls inside each
/// spine ball first.
MapTree build(const BoxDomain& domain, const ScheduleParams& params);

enum class RegionTag { Annulus, InnerAffine, OutsideAll };

struct Location {
  RegionTag tag = RegionTag::OutsideAll;
  std::uint32_t node = kNoNode;
  int depth = 0;
};

/// Classification of x against F_{max_generation} (default: full depth).
Location locate(const MapTree& tree, const Point& x, int max_generation = -1);
Point evaluate(const MapTree& tree, const Point& x, int max_generation = -1);
/// Throws OnInterface within relative 1e-12 of any sphere of the construction.
Matrix evaluate_gradient(const MapTree& tree, const Point& x, int max_generation = -1);

TailBound uniform_tail_bound(const MapTree& tree);

}  // namespace wqr
