#pragma once

#include "wqr/map_tree.hpp"

#include <cstdint>
#include <functional>

namespace wqr {

/// phi(x) = prod_i psi((x_i - c_i) / w), psi(s) = exp(-1 / (1 - s^2)) on |s| < 1.
struct Bump {
  Point center;
  double width = 1.0;

  Bump() = default;
  Bump(Point c, double w);

  std::size_t dim() const { return static_cast<std::size_t>(center.size()); }
  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  /// Support box [c - w, c + w].
  BoxDomain support() const;
};

/// A piecewise smooth map: value and derivative at a point. The derivative
/// callback may throw OnInterface or SingularPoint; such samples are redrawn.
struct SampledMap {
  std::function<Point(const Point&)> value;
  std::function<Matrix(const Point&)> gradient;
};

SampledMap affine_map(const Matrix& A, const Point& b);
/// The stretch on the annulus aB' <= |x - y| <= r, glued to z + t a^{-alpha} (x - y)
/// inside and to z + t (x - y) outside. Continuous, with jumps in Df on both spheres.
SampledMap stretch_map(const RadialStretch& map, double a);
SampledMap tree_map(const MapTree& tree);

struct PairingResult {
  /// -(1/n) int (adj Df f) . grad phi
  double pairing = 0.0;
  /// int det(Df) phi
  double ac_part = 0.0;
  double gap = 0.0;
  double pairing_stderr = 0.0;
  double ac_stderr = 0.0;
  /// From the per-sample differences, so correlation is accounted for.
  double gap_stderr = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo over the bump support with `samples` uniform points.
PairingResult distributional_pairing(const SampledMap& f, const Bump& phi, std::size_t samples,
                                     std::uint64_t seed);

/// Surface term of the pairing gap for a radial stretch glued to its boundary
/// data z + t (x - y) outside the ball and to z + t a^{-alpha} (x - y) inside aB:
///   -(1/n) sum over both spheres of int phi [(adj Df_in - adj Df_out) f] . nu
/// evaluated by 64-point Gauss-Legendre in cos(theta) times an azimuthal
/// trapezoid rule (n = 3).
double stretch_interface_flux(const RadialStretch& map, double a, const Bump& phi,
                              int azimuth_nodes = 128);

}  // namespace wqr
