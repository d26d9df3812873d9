#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <variant>

namespace wqr {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative tolerance used by every geometric predicate.
inline constexpr double kGeomTol = 1e-12;

/// Open ball B(center, radius). Radius is always positive.
struct Ball {
  Point center;
  double radius = 0.0;

  Ball() = default;
  Ball(Point c, double r);

  std::size_t dim() const { return static_cast<std::size_t>(center.size()); }
  /// The concentric ball aB, 0 < a < 1.
  Ball scaled(double a) const;
  double volume() const;
  bool contains(const Point& x) const;  // closed, |x - c| <= r
};

/// Axis-aligned box [lower, upper].
struct BoxDomain {
  Point lower;
  Point upper;

  BoxDomain() = default;
  BoxDomain(Point lo, Point hi);
  static BoxDomain cube(std::size_t n, double lo, double hi);

  std::size_t dim() const { return static_cast<std::size_t>(lower.size()); }
  double volume() const;
  double inradius() const;
  double diameter() const;
  Point center() const;
  bool contains(const Point& x) const;
};

using Region = std::variant<Ball, BoxDomain>;

std::size_t region_dim(const Region& r);
double region_volume(const Region& r);
double region_inradius(const Region& r);
Point region_center(const Region& r);
/// Signed clearance: distance from x to the region boundary, negative outside.
double region_clearance(const Region& r, const Point& x);
/// Lower/upper corner of the axis-aligned bounding box.
BoxDomain region_bounds(const Region& r);

/// Volume of the unit ball in R^n.
double unit_ball_volume(std::size_t n);
/// Surface measure of the unit sphere S^{n-1}.
double unit_sphere_area(std::size_t n);
double ball_volume(std::size_t n, double r);

/// Disjoint to relative tolerance: |c1 - c2| >= (r1 + r2)(1 - tol).
bool disjoint(const Ball& b1, const Ball& b2);
/// Ball contained in region, allowing relative tolerance kGeomTol.
bool contained(const Ball& b, const Region& r);

void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace wqr
