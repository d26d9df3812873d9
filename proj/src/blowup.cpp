#include "wqr/blowup.hpp"

#include "wqr/dimension.hpp"
#include "wqr/errors.hpp"
#include "wqr/random.hpp"

#include <cmath>
#include <string>

namespace wqr {

std::vector<std::uint32_t> default_path(const MapTree& tree) {
  std::vector<std::uint32_t> path;
  if (tree.size() == 0) return path;
  std::uint32_t id = tree.find_in_generation(1, tree.domain().center());
  if (id == kNoNode) id = tree.roots().front();
  path.push_back(id);
  while (tree.node(id).child_count > 0) {
    id = tree.node(id).first_child;
    path.push_back(id);
  }
  return path;
}

BlowupProbe blowup_probe(const MapTree& tree, std::vector<std::uint32_t> path,
                         std::size_t radii_count, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw InvalidArgument("blow-up probe needs at least one sample per radius");
  if (path.empty()) path = default_path(tree);
  if (path.empty()) throw InvalidArgument("blow-up probe on an empty tree");
  if (radii_count < 1 || radii_count > path.size() + 1) {
    throw InvalidArgument("radii count must lie in [1, " + std::to_string(path.size() + 1) + "]");
  }
  const bool spine_tree = tree.params().is_cantor();
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= tree.size()) throw InvalidArgument("path node out of range");
    const MapNode& nd = tree.node(path[i]);
    if (nd.generation != static_cast<int>(i) + 1 || (i > 0 && nd.parent != path[i - 1])) {
      throw InvalidArgument("path must descend one generation at a time from a root");
    }
    if (spine_tree && !nd.spine) {
      throw PathNotSpine("node " + std::to_string(path[i]) + " is not a spine ball");
    }
  }

  BlowupProbe probe;
  probe.path = path;
  probe.point = tree.center(path.back());
  probe.samples = samples;
  probe.seed = seed;
  if (spine_tree) {
    probe.predicted_slope = std::log1p(std::get<CantorSchedule>(tree.params().schedule).delta);
  }
  probe.radii.push_back(tree.domain().diameter());
  for (std::size_t k = 1; k < radii_count; ++k) probe.radii.push_back(tree.node(path[k - 1]).radius);

  const BoxDomain& dom = tree.domain();
  for (std::size_t i = 0; i < probe.radii.size(); ++i) {
    const double r = probe.radii[i];
    const Point lo = dom.lower.cwiseMax((probe.point.array() - r).matrix());
    const Point hi = dom.upper.cwiseMin((probe.point.array() + r).matrix());
    const BoxDomain box(lo, hi);
    Rng rng(seed, i);
    double mean = 0.0, m2 = 0.0;
    std::size_t drawn = 0;
    while (drawn < samples) {
      const Point x = rng.in_box(box);
      if ((x - probe.point).norm() > r) continue;
      const double v = evaluate(tree, x).norm();
      ++drawn;
      const double d = v - mean;
      mean += d / static_cast<double>(drawn);
      m2 += d * (v - mean);
    }
    probe.averages.push_back(mean);
    probe.stderrs.push_back(drawn > 1 ? std::sqrt(m2 / static_cast<double>(drawn - 1) /
                                                  static_cast<double>(drawn))
                                      : 0.0);
  }
  if (probe.averages.size() >= 3) {
    std::vector<double> ks, ys;
    for (std::size_t k = 1; k < probe.averages.size(); ++k) {
      ks.push_back(static_cast<double>(k));
      ys.push_back(std::log(probe.averages[k]));
    }
    const SlopeFit f = fit_line(ks, ys);
    probe.fitted_slope = f.slope;
    probe.fitted_intercept = f.intercept;
  }
  return probe;
}

}  // namespace wqr
