#pragma once

#include "wqr/map_tree.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace wqr {

using PointMap = std::function<Point(const Point&)>;

/// Degree of x -> b + A x on any sphere around a preimage of the reference: sign det A.
/// Throws DegenerateImage when A is singular to relative 1e-12.
int affine_boundary_degree(const Matrix& A);

struct SphereMesh {
  std::vector<Point> vertices;                // on the unit sphere
  std::vector<std::array<int, 3>> triangles;  // outward orientation
};

/// Icosahedron with `level` rounds of 4-way subdivision (20 * 4^level faces).
SphereMesh icosphere(int level);

/// Winding number of the image of the sphere `domain` under `map` around
/// `reference`, from signed solid angles of the image triangles. n = 3 only.
int numeric_degree(const PointMap& map, const Ball& domain, int level, const Point& reference);

struct NodeDegree {
  std::uint32_t node = 0;
  int generation = 0;
  int boundary_degree = 0;
  /// 0 when the numeric check was skipped.
  int numeric_degree = 0;
  std::size_t det_negative = 0;
  std::size_t det_positive = 0;
  std::size_t on_interface = 0;
  std::size_t annulus_samples = 0;
  std::size_t annulus_det_negative = 0;
};

struct DegreeReport {
  std::uint64_t seed = 0;
  std::size_t interior_samples = 0;
  int triangulation_level = 0;
  std::vector<NodeDegree> nodes;

  std::size_t annulus_samples() const;
  std::size_t annulus_det_negative() const;
  double annulus_det_negative_fraction() const;
  /// Every audited node has boundary degree +1 (and matching numeric degree
  /// when computed) while every annulus sample has det < 0.
  bool paradox_confirmed() const;
};

/// Samples `node_samples` distinct nodes (all of them if fewer exist) and
/// `interior_samples` uniform points in each node ball. triangulation_level < 0
/// skips the numeric degree.
DegreeReport degree_audit(const MapTree& tree, std::size_t node_samples,
                          std::size_t interior_samples, std::uint64_t seed,
                          int triangulation_level = 4);

}  // namespace wqr
