#include "wqr/dimension.hpp"

#include "wqr/errors.hpp"
#include "wqr/packing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wqr {

double similarity_dimension(double N, double ratio) {
  if (!(N >= 1.0)) throw InvalidArgument("branching count must be >= 1");
  if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidArgument("contraction ratio must lie in (0,1)");
  return std::log(N) / -std::log(ratio);
}

SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("line fit needs two or more paired values");
  }
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("line fit needs distinct abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

std::size_t count_boxes(const std::vector<Point>& points, const Point& anchor, double scale,
                        int shifts) {
  if (!(scale > 0.0)) throw InvalidArgument("box scale must be positive");
  if (shifts < 1) throw InvalidArgument("at least one grid offset is needed");
  if (points.empty()) return 0;
  const auto n = anchor.size();
  std::size_t best = points.size();
  std::vector<std::int64_t> keys(points.size() * static_cast<std::size_t>(n));
  std::vector<std::size_t> order(points.size());
  for (int s = 0; s < shifts; ++s) {
    const double offset = scale * static_cast<double>(s) / static_cast<double>(shifts);
    for (std::size_t i = 0; i < points.size(); ++i) {
      for (Eigen::Index d = 0; d < n; ++d) {
        keys[i * n + d] =
            static_cast<std::int64_t>(std::floor((points[i][d] - anchor[d] + offset) / scale));
      }
      order[i] = i;
    }
    auto row_less = [&](std::size_t l, std::size_t r) {
      return std::lexicographical_compare(keys.begin() + l * n, keys.begin() + (l + 1) * n,
                                          keys.begin() + r * n, keys.begin() + (r + 1) * n);
    };
    std::sort(order.begin(), order.end(), row_less);
    std::size_t count = 1;
    for (std::size_t i = 1; i < order.size(); ++i) {
      if (row_less(order[i - 1], order[i])) ++count;
    }
    best = std::min(best, count);
  }
  return best;
}

double idealized_dimension(int n, StretchKind kind, double K) {
  const double nn = static_cast<double>(n);
  return kind == StretchKind::Phi ? nn / (K + 1.0) : nn * K / (K + 1.0);
}

DimensionReport cantor_dimension(const ScheduleParams& params, const MapTree* tree) {
  if (!params.is_cantor() || !params.forced_branching) {
    throw ScheduleMismatch("dimension needs a CANTOR schedule with forced branching");
  }
  params.validate();
  DimensionReport rep;
  rep.kind = params.kind;
  rep.K = params.K;
  rep.contraction = params.delta(2) / params.delta(1);
  // The ratio a delta_{k-1} / delta_k is the same at every level.
  const Point origin = Point::Zero(params.n);
  const double slack = params.a * params.delta(1) / params.delta(2);
  rep.branching = forced_grid_capacity(Region{Ball(origin, slack)}, 1.0);
  if (rep.branching == 0) {
    throw ScheduleInfeasible("a spine ball cannot host a child of the next radius");
  }
  // One child per parent nests down to a single point.
  if (rep.branching < 2) {
    throw InfeasibleForcedCount("each spine ball hosts only one child of the next radius; "
                                "the limit set is a point (decrease a or delta)");
  }
  rep.analytic = similarity_dimension(static_cast<double>(rep.branching), rep.contraction);
  rep.idealized_target = idealized_dimension(params.n, params.kind, params.K);
  rep.target_gap = rep.idealized_target - rep.analytic;
  rep.packing_constant =
      static_cast<double>(rep.branching) / std::pow(slack, static_cast<double>(params.n));

  if (tree == nullptr) return rep;
  if (!tree->params().is_cantor() || !tree->params().forced_branching) {
    throw ScheduleMismatch("tree was not built with forced branching");
  }
  rep.depth = tree->depth();
  for (int k = 1; k < tree->depth(); ++k) {
    const auto [b, e] = tree->generation_range(k);
    for (std::uint32_t id = b; id < e; ++id) {
      if (!tree->node(id).spine) continue;
      std::uint64_t spine_children = 0;
      for (std::uint32_t c : tree->children(id)) spine_children += tree->node(c).spine ? 1 : 0;
      if (spine_children != rep.branching) {
        throw InvalidArgument("spine node " + std::to_string(id) + " carries " +
                              std::to_string(spine_children) + " spine children, expected " +
                              std::to_string(rep.branching));
      }
    }
  }
  std::vector<Point> deepest;
  const auto [b, e] = tree->generation_range(tree->depth());
  for (std::uint32_t id = b; id < e; ++id) {
    if (tree->node(id).spine) deepest.emplace_back(tree->center(id));
  }
  if (deepest.empty() || tree->depth() < 2) return rep;
  std::vector<double> xs, ys;
  for (int k = 1; k <= tree->depth(); ++k) {
    const double s = tree->params().delta(k);
    const std::size_t c = count_boxes(deepest, tree->domain().lower, s);
    rep.box_counts.push_back({s, c});
    xs.push_back(-std::log(s));
    ys.push_back(std::log(static_cast<double>(c)));
  }
  rep.empirical = fit_line(xs, ys);
  return rep;
}

KpChoice kp_selector(int n, double p, double theta) {
  const double nn = static_cast<double>(n);
  if (!(p > 1.0 && p < nn)) throw InvalidArgument("p must lie in (1, n)");
  if (!(theta > 0.0)) throw InvalidArgument("closeness parameter must be positive");
  KpChoice c;
  if (p >= nn / 2.0) {
    c.kind = StretchKind::Phi;
    c.K = p / (nn - p) * (1.0 + theta);
  } else {
    c.kind = StretchKind::Psi;
    c.K = (nn / p - 1.0) / (1.0 + theta);
  }
  c.K = std::max(c.K, 1.0);
  c.target_dimension = idealized_dimension(n, c.kind, c.K);
  return c;
}

}  // namespace wqr
