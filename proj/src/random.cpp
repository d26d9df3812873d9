#include "wqr/random.hpp"

namespace wqr {

Point Rng::in_box(const BoxDomain& box) {
  Point x(box.lower.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = uniform(box.lower[i], box.upper[i]);
  return x;
}

Point Rng::in_ball(const Ball& ball) {
  const auto n = ball.center.size();
  Point u(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) u[i] = uniform(-1.0, 1.0);
    if (u.squaredNorm() <= 1.0) return ball.center + ball.radius * u;
  }
}

Point Rng::in_region(const Region& r) {
  if (const auto* b = std::get_if<Ball>(&r)) return in_ball(*b);
  return in_box(std::get<BoxDomain>(r));
}

Point Rng::on_sphere(std::size_t n) {
  Point u(static_cast<Eigen::Index>(n));
  for (;;) {
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = uniform(-1.0, 1.0);
    const double s = u.squaredNorm();
    if (s <= 1.0 && s > 1e-12) return u / std::sqrt(s);
  }
}

}  // namespace wqr
