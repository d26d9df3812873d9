#pragma once

#include "wqr/geometry.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace wqr {

/// Spatial hash over a growing set of pairwise-disjoint balls with widely
/// varying radii. Balls are bucketed by dyadic radius class; each class keeps
/// a uniform grid whose cell is at least the class diameter, and every ball is
/// registered in each cell its bounding box touches (at most 2^n cells).
class BallIndex {
 public:
  explicit BallIndex(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return radii_.size(); }

  /// Returns the new ball's index (insertion order).
  std::uint32_t insert(const Point& center, double radius);

  Eigen::Map<const Point> center(std::uint32_t id) const {
    return {centers_.data() + static_cast<std::size_t>(id) * dim_,
            static_cast<Eigen::Index>(dim_)};
  }
  double radius(std::uint32_t id) const { return radii_[id]; }

  /// Index of a ball whose closed hull contains x, if any.
  std::optional<std::uint32_t> find_containing(const Point& x) const;

  /// min(cap, min_i |x - c_i| - r_i) over balls that can come within cap of x.
  double clearance(const Point& x, double cap) const;

 private:
  struct Level {
    int exponent = 0;  // cell side is 2^exponent
    double cell = 0.0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells;
  };

  Level& level_for(double radius);
  std::uint64_t key(const std::int64_t* coords) const;
  template <class F>
  void visit_cells(const Level& lvl, const Point& lo, const Point& hi, F&& f) const;

  std::size_t dim_;
  std::vector<double> centers_;
  std::vector<double> radii_;
  std::vector<Level> levels_;  // sorted by exponent, descending
};

}  // namespace wqr
