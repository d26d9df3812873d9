#include "wqr/packing.hpp"

#include "wqr/ball_index.hpp"
#include "wqr/errors.hpp"
#include "wqr/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wqr {

namespace {

// Largest integer m >= 0 with m*m <= s (s >= 0).
std::int64_t isqrt_floor(double s) {
  if (s < 0.0) return -1;
  auto m = static_cast<std::int64_t>(std::floor(std::sqrt(s)));
  while (static_cast<double>(m + 1) * static_cast<double>(m + 1) <= s) ++m;
  while (m > 0 && static_cast<double>(m) * static_cast<double>(m) > s) --m;
  return m;
}

// Number of integer vectors in Z^dims with squared norm <= s.
std::uint64_t lattice_count_in_ball(std::size_t dims, double s) {
  if (s < 0.0) return 0;
  const std::int64_t lim = isqrt_floor(s);
  if (dims == 1) return static_cast<std::uint64_t>(2 * lim + 1);
  std::uint64_t total = 0;
  for (std::int64_t m = -lim; m <= lim; ++m) {
    total += lattice_count_in_ball(dims - 1, s - static_cast<double>(m) * static_cast<double>(m));
  }
  return total;
}

// Per-axis half-width (in lattice units) for a box region, or the lattice
// radius for a ball region, after shrinking by rho with tolerance.
double ball_lattice_radius(const Ball& b, double rho) {
  const double scale = std::max(b.radius, rho);
  return (b.radius - rho + kGeomTol * scale) / (2.0 * rho);
}

std::vector<std::int64_t> box_lattice_halfwidths(const BoxDomain& box, double rho) {
  std::vector<std::int64_t> w(box.dim());
  const double scale = std::max(box.inradius(), rho);
  for (std::size_t i = 0; i < box.dim(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double half = 0.5 * (box.upper[idx] - box.lower[idx]);
    const double l = (half - rho + kGeomTol * scale) / (2.0 * rho);
    w[i] = l < 0.0 ? -1 : static_cast<std::int64_t>(std::floor(l));
  }
  return w;
}

}  // namespace

double Packing::covered_volume() const {
  double v = 0.0;
  for (const Ball& b : balls) v += b.volume();
  return v;
}

std::uint64_t forced_grid_capacity(const Region& region, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("forced radius must be positive");
  if (const auto* b = std::get_if<Ball>(&region)) {
    const double l = ball_lattice_radius(*b, rho);
    if (l < 0.0) return 0;
    // The count walks lim^(n-1) columns.
    constexpr double kCountBudget = 1e9;
    if (std::pow(std::floor(l) * 2.0 + 1.0, static_cast<double>(b->dim()) - 1.0) > kCountBudget) {
      throw BudgetExceeded("forced lattice of radius " + std::to_string(l) +
                           " pitches is too large to count");
    }
    return lattice_count_in_ball(b->dim(), l * l);
  }
  std::uint64_t total = 1;
  for (std::int64_t w : box_lattice_halfwidths(std::get<BoxDomain>(region), rho)) {
    if (w < 0) return 0;
    total *= static_cast<std::uint64_t>(2 * w + 1);
  }
  return total;
}

std::vector<Point> forced_grid_points(const Region& region, double rho, std::uint64_t count) {
  const std::uint64_t capacity = forced_grid_capacity(region, rho);
  if (count > capacity) {
    throw InfeasibleForcedCount("lattice of pitch " + std::to_string(2.0 * rho) + " hosts " +
                                std::to_string(capacity) + " balls, " + std::to_string(count) +
                                " requested");
  }
  if (count == 0) return {};
  constexpr std::uint64_t kEnumerationCap = 20000000;
  if (capacity > kEnumerationCap) {
    throw InvalidArgument("forced lattice too large to enumerate: " + std::to_string(capacity));
  }
  const std::size_t n = region_dim(region);
  std::vector<std::int64_t> half(n);
  double ball_l2 = -1.0;
  if (const auto* b = std::get_if<Ball>(&region)) {
    const double l = ball_lattice_radius(*b, rho);
    ball_l2 = l * l;
    std::fill(half.begin(), half.end(), isqrt_floor(ball_l2));
  } else {
    half = box_lattice_halfwidths(std::get<BoxDomain>(region), rho);
  }

  std::vector<std::vector<std::int64_t>> pts;
  pts.reserve(capacity);
  std::vector<std::int64_t> cur(n);
  for (std::size_t i = 0; i < n; ++i) cur[i] = -half[i];
  for (;;) {
    double s = 0.0;
    for (std::int64_t v : cur) s += static_cast<double>(v) * static_cast<double>(v);
    if (ball_l2 < 0.0 || s <= ball_l2) pts.push_back(cur);
    std::size_t i = 0;
    while (i < n) {
      if (cur[i] < half[i]) {
        ++cur[i];
        break;
      }
      cur[i] = -half[i];
      ++i;
    }
    if (i == n) break;
  }
  auto norm2 = [](const std::vector<std::int64_t>& m) {
    std::int64_t s = 0;
    for (std::int64_t v : m) s += v * v;
    return s;
  };
  std::stable_sort(pts.begin(), pts.end(), [&](const auto& x, const auto& y) {
    const auto nx = norm2(x), ny = norm2(y);
    return nx != ny ? nx < ny : x < y;
  });

  const Point c = region_center(region);
  std::vector<Point> out;
  out.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Point p = c;
    for (std::size_t i = 0; i < n; ++i) {
      p[static_cast<Eigen::Index>(i)] += 2.0 * rho * static_cast<double>(pts[k][i]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

CoverageEstimate uncovered_fraction(const Region& region, const std::vector<Ball>& balls,
                                    std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("uncovered_fraction needs at least one sample");
  const std::size_t n = region_dim(region);
  BallIndex index(n);
  for (const Ball& b : balls) {
    require_same_dim(n, b.dim(), "uncovered_fraction");
    index.insert(b.center, b.radius);
  }
  Rng rng(seed, 0x5eed);
  std::size_t misses = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    if (!index.find_containing(rng.in_region(region))) ++misses;
  }
  const double p = static_cast<double>(misses) / static_cast<double>(samples);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

Packing pack(const Region& region, double delta_max, double eta,
             const std::optional<ForcedBalls>& forced, std::uint64_t seed,
             const PackOptions& options) {
  const std::size_t n = region_dim(region);
  const double inradius = region_inradius(region);
  if (!(delta_max > 0.0)) throw InvalidArgument("delta_max must be positive");
  if (delta_max > inradius * (1.0 + kGeomTol)) {
    throw InvalidArgument("delta_max " + std::to_string(delta_max) + " exceeds inradius " +
                          std::to_string(inradius));
  }
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0,1)");

  Packing out{region, {}, 0, 1.0, 1.0, 0.0, seed, options.certify_samples, delta_max, eta, false};
  const double volume = region_volume(region);
  double covered = 0.0;
  BallIndex index(n);

  auto place = [&](Point c, double r) {
    index.insert(c, r);
    covered += ball_volume(n, r);
    out.balls.emplace_back(std::move(c), r);
  };

  if (forced && forced->count > 0) {
    if (forced->radius > delta_max * (1.0 + kGeomTol)) {
      throw InvalidArgument("forced radius exceeds delta_max");
    }
    for (Point& p : forced_grid_points(region, forced->radius, forced->count)) {
      place(std::move(p), forced->radius);
    }
    out.forced_count = out.balls.size();
  }

  // Stop a little below eta so that the Monte Carlo certificate lands under it.
  double target = eta;
  if (options.certify_samples > 0) {
    target -= 3.0 * std::sqrt(eta * (1.0 - eta) / static_cast<double>(options.certify_samples));
    target = std::max(target, 0.5 * eta);
  }
  auto reached = [&] { return 1.0 - covered / volume <= target; };

  // Level-0 cells: lattice of pitch h anchored at the region center.
  double h = 2.0 * delta_max;
  const BoxDomain bounds = region_bounds(region);
  const Point center = region_center(region);
  std::vector<double> cells;
  {
    std::vector<std::int64_t> half(n), cur(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      half[i] = static_cast<std::int64_t>(std::ceil(0.5 * (bounds.upper[idx] - bounds.lower[idx]) / h));
      cur[i] = -half[i];
    }
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) {
        cells.push_back(center[static_cast<Eigen::Index>(i)] + h * static_cast<double>(cur[i]));
      }
      std::size_t i = 0;
      while (i < n) {
        if (cur[i] < half[i]) {
          ++cur[i];
          break;
        }
        cur[i] = -half[i];
        ++i;
      }
      if (i == n) break;
    }
    // Visit level-0 cells from the region center outwards.
    std::vector<std::size_t> order(cells.size() / n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto dist2 = [&](std::size_t c) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = cells[c * n + i] - center[static_cast<Eigen::Index>(i)];
        s += d * d;
      }
      return s;
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return dist2(x) < dist2(y); });
    std::vector<double> sorted;
    sorted.reserve(cells.size());
    for (std::size_t c : order) sorted.insert(sorted.end(), cells.begin() + c * n, cells.begin() + (c + 1) * n);
    cells = std::move(sorted);
  }

  const double floor_radius = options.min_radius_fraction * inradius;
  const double half_diag = 0.5 * std::sqrt(static_cast<double>(n));
  Point g(static_cast<Eigen::Index>(n));
  bool stop = reached();
  while (!stop) {
    const double cap = 0.5 * h;
    if (cap < floor_radius) {
      out.budget_exceeded = true;
      break;
    }
    const std::size_t count = cells.size() / n;
    for (std::size_t c = 0; c < count && !stop; ++c) {
      std::copy_n(cells.data() + c * n, n, g.data());
      auto clearance_at = [&](const Point& q) {
        const double c0 = std::min(cap, region_clearance(region, q));
        return c0 <= 0.0 ? c0 : index.clearance(q, c0);
      };
      double clear = clearance_at(g);
      if (clear < 0.5 * cap && clear > -0.5 * h) {
        // Pattern search towards the centre of the local gap.
        Point best = g;
        double step = 0.25 * h;
        for (int it = 0; it < 8; ++it) {
          bool moved = false;
          for (std::size_t i = 0; i < n; ++i) {
            for (double sgn : {-1.0, 1.0}) {
              Point q = best;
              q[static_cast<Eigen::Index>(i)] += sgn * step;
              const double cq = clearance_at(q);
              if (cq > clear) {
                clear = cq;
                best = std::move(q);
                moved = true;
              }
            }
          }
          if (!moved) step *= 0.5;
        }
        g = best;
      }
      if (clear >= 0.5 * cap) {
        place(g, clear);
        if (reached()) stop = true;
        if (out.balls.size() >= options.max_balls && !stop) {
          out.budget_exceeded = true;
          stop = true;
        }
      }
    }
    if (stop) break;

    // Refine: drop cells outside the region or inside a single ball.
    std::vector<double> next;
    const double reach = half_diag * h;
    for (std::size_t c = 0; c < count; ++c) {
      std::copy_n(cells.data() + c * n, n, g.data());
      if (region_clearance(region, g) <= -reach) continue;
      if (auto id = index.find_containing(g)) {
        if ((g - index.center(*id)).norm() + reach <= index.radius(*id)) continue;
      }
      for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
        for (std::size_t i = 0; i < n; ++i) {
          const double off = ((corner >> i) & 1u) ? 0.25 * h : -0.25 * h;
          next.push_back(g[static_cast<Eigen::Index>(i)] + off);
        }
      }
    }
    cells = std::move(next);
    h *= 0.5;
    if (cells.empty()) {
      out.budget_exceeded = !reached();
      break;
    }
  }

  out.uncovered_exact = std::max(0.0, 1.0 - covered / volume);
  if (out.uncovered_exact > eta) out.budget_exceeded = true;
  if (options.certify_samples > 0) {
    const auto est = uncovered_fraction(region, out.balls, options.certify_samples, seed);
    out.uncovered_fraction_estimate = est.estimate;
    out.uncovered_fraction_stderr = est.stderr_;
  } else {
    out.uncovered_fraction_estimate = out.uncovered_exact;
    out.uncovered_fraction_stderr = 0.0;
  }
  return out;
}

}  // namespace wqr
