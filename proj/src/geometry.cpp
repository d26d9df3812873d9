#include "wqr/geometry.hpp"

#include "wqr/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace wqr {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) +
                            " vs " + std::to_string(b));
  }
}

Ball::Ball(Point c, double r) : center(std::move(c)), radius(r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("ball radius must be positive and finite");
  }
}

Ball Ball::scaled(double a) const {
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("ball scale must lie in (0,1)");
  return Ball(center, a * radius);
}

double Ball::volume() const { return ball_volume(dim(), radius); }

bool Ball::contains(const Point& x) const {
  require_same_dim(dim(), static_cast<std::size_t>(x.size()), "Ball::contains");
  return (x - center).norm() <= radius;
}

BoxDomain::BoxDomain(Point lo, Point hi) : lower(std::move(lo)), upper(std::move(hi)) {
  require_same_dim(static_cast<std::size_t>(lower.size()),
                   static_cast<std::size_t>(upper.size()), "BoxDomain");
  if (lower.size() == 0) throw InvalidArgument("box must have positive dimension");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(upper[i] > lower[i])) throw InvalidArgument("box upper corner must exceed lower");
  }
}

BoxDomain BoxDomain::cube(std::size_t n, double lo, double hi) {
  const auto dim = static_cast<Eigen::Index>(n);
  return BoxDomain(Point::Constant(dim, lo), Point::Constant(dim, hi));
}

double BoxDomain::volume() const { return (upper - lower).prod(); }
double BoxDomain::inradius() const { return 0.5 * (upper - lower).minCoeff(); }
double BoxDomain::diameter() const { return (upper - lower).norm(); }
Point BoxDomain::center() const { return 0.5 * (lower + upper); }

bool BoxDomain::contains(const Point& x) const {
  require_same_dim(dim(), static_cast<std::size_t>(x.size()), "BoxDomain::contains");
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

std::size_t region_dim(const Region& r) {
  return std::visit([](const auto& g) { return g.dim(); }, r);
}

double region_volume(const Region& r) {
  return std::visit([](const auto& g) { return g.volume(); }, r);
}

double region_inradius(const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) return b->radius;
  return std::get<BoxDomain>(r).inradius();
}

Point region_center(const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) return b->center;
  return std::get<BoxDomain>(r).center();
}

double region_clearance(const Region& r, const Point& x) {
  if (const auto* b = std::get_if<Ball>(&r)) return b->radius - (x - b->center).norm();
  const auto& box = std::get<BoxDomain>(r);
  return std::min((x - box.lower).minCoeff(), (box.upper - x).minCoeff());
}

BoxDomain region_bounds(const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) {
    const Point ext = Point::Constant(b->center.size(), b->radius);
    return BoxDomain(b->center - ext, b->center + ext);
  }
  return std::get<BoxDomain>(r);
}

double unit_ball_volume(std::size_t n) {
  const double d = static_cast<double>(n);
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

double unit_sphere_area(std::size_t n) {
  return static_cast<double>(n) * unit_ball_volume(n);
}

double ball_volume(std::size_t n, double r) {
  return unit_ball_volume(n) * std::pow(r, static_cast<double>(n));
}

bool disjoint(const Ball& b1, const Ball& b2) {
  require_same_dim(b1.dim(), b2.dim(), "disjoint");
  const double sum = b1.radius + b2.radius;
  return (b1.center - b2.center).norm() >= sum * (1.0 - kGeomTol);
}

bool contained(const Ball& b, const Region& r) {
  require_same_dim(b.dim(), region_dim(r), "contained");
  const double scale = std::max(b.radius, region_inradius(r));
  return region_clearance(r, b.center) >= b.radius - kGeomTol * scale;
}

}  // namespace wqr
