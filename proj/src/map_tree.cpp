#include "wqr/map_tree.hpp"

#include "wqr/errors.hpp"
#include "wqr/packing.hpp"
#include "wqr/random.hpp"

#include <cmath>
#include <string>

namespace wqr {

namespace {

constexpr double kInterfaceTol = 1e-12;

// ln a^{-k alpha}
double log_generation_scale(const ScheduleParams& p, int k) {
  return static_cast<double>(k) * p.alpha() * -std::log(p.a);
}

}  // namespace

MapTree::MapTree(BoxDomain domain, ScheduleParams params, std::vector<NodeRecord> records)
    : domain_(std::move(domain)), params_(std::move(params)) {
  const std::size_t n = domain_.dim();
  if (static_cast<std::size_t>(params_.n) != n) {
    throw DimensionMismatch("schedule dimension " + std::to_string(params_.n) +
                            " does not match domain dimension " + std::to_string(n));
  }
  nodes_.reserve(records.size());
  centers_.reserve(records.size() * n);
  images_.reserve(records.size() * n);
  generation_begin_.push_back(0);
  int current = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const NodeRecord& r = records[i];
    const auto id = static_cast<std::uint32_t>(i);
    require_same_dim(n, static_cast<std::size_t>(r.center.size()), "node center");
    require_same_dim(n, static_cast<std::size_t>(r.image_center.size()), "node image center");
    if (!(r.radius > 0.0)) throw InvalidArgument("node radius must be positive");
    if (r.generation < current || r.generation > current + 1 || r.generation < 1) {
      throw InvalidArgument("nodes must be ordered by generation starting at 1");
    }
    if (r.generation == current + 1) {
      if (current > 0) generation_begin_.push_back(id);
      current = r.generation;
      index_.emplace_back(n);
      stats_.push_back({current, 0, 0, 0.0, 0.0});
    }
    MapNode node;
    node.parent = r.parent;
    node.generation = r.generation;
    node.radius = r.radius;
    node.log_accum_scale = r.log_accum_scale;
    node.spine = r.spine;
    if (r.generation == 1) {
      if (r.parent != kNoNode) throw InvalidArgument("generation-1 nodes have no parent");
      roots_.push_back(id);
    } else {
      if (r.parent >= id || nodes_[r.parent].generation != r.generation - 1) {
        throw InvalidArgument("node parent must belong to the previous generation");
      }
      MapNode& parent = nodes_[r.parent];
      if (parent.child_count == 0) {
        parent.first_child = id;
      } else if (parent.first_child + parent.child_count != id) {
        throw InvalidArgument("children of a node must be contiguous");
      }
      ++parent.child_count;
    }
    nodes_.push_back(node);
    centers_.insert(centers_.end(), r.center.data(), r.center.data() + n);
    images_.insert(images_.end(), r.image_center.data(), r.image_center.data() + n);
    index_.back().insert(r.center, r.radius);
    GenerationStats& st = stats_.back();
    ++st.nodes;
    if (r.spine) ++st.spine_nodes;
    st.covered_volume += ball_volume(n, r.radius);
  }
  if (current > 0) generation_begin_.push_back(static_cast<std::uint32_t>(nodes_.size()));

  for (GenerationStats& st : stats_) {
    if (st.generation == 1) {
      st.region_volume = domain_.volume();
      continue;
    }
    const auto [b, e] = generation_range(st.generation - 1);
    for (std::uint32_t id = b; id < e; ++id) {
      st.region_volume += ball_volume(n, params_.a * nodes_[id].radius);
    }
  }
}

Eigen::Map<const Point> MapTree::center(std::uint32_t id) const {
  return {centers_.data() + static_cast<std::size_t>(id) * dim(), static_cast<Eigen::Index>(dim())};
}

Eigen::Map<const Point> MapTree::image_center(std::uint32_t id) const {
  return {images_.data() + static_cast<std::size_t>(id) * dim(), static_cast<Eigen::Index>(dim())};
}

Ball MapTree::ball(std::uint32_t id) const { return Ball(center(id), nodes_[id].radius); }

RadialStretch MapTree::stretch(std::uint32_t id) const {
  return RadialStretch(ball(id), image_center(id), nodes_[id].log_accum_scale, params_.variant());
}

std::vector<std::uint32_t> MapTree::children(std::uint32_t id) const {
  const MapNode& nd = nodes_[id];
  std::vector<std::uint32_t> out(nd.child_count);
  for (std::uint32_t i = 0; i < nd.child_count; ++i) out[i] = nd.first_child + i;
  return out;
}

std::pair<std::uint32_t, std::uint32_t> MapTree::generation_range(int k) const {
  if (k < 1 || k > depth()) return {0, 0};
  return {generation_begin_[static_cast<std::size_t>(k - 1)],
          generation_begin_[static_cast<std::size_t>(k)]};
}

NodeRecord MapTree::record(std::uint32_t id) const {
  const MapNode& nd = nodes_[id];
  return {nd.parent, nd.generation, center(id), nd.radius, image_center(id), nd.log_accum_scale,
          nd.spine};
}

std::uint32_t MapTree::find_in_generation(int k, const Point& x) const {
  if (k < 1 || k > depth()) return kNoNode;
  const auto hit = index_[static_cast<std::size_t>(k - 1)].find_containing(x);
  return hit ? generation_begin_[static_cast<std::size_t>(k - 1)] + *hit : kNoNode;
}

double MapTree::inner_affine_measure() const {
  const std::size_t n = dim();
  double total = 0.0;
  for (std::uint32_t id = 0; id < nodes_.size(); ++id) {
    double inner = ball_volume(n, params_.a * nodes_[id].radius);
    for (std::uint32_t c : children(id)) inner -= ball_volume(n, nodes_[c].radius);
    total += inner;
  }
  return total;
}

double MapTree::outside_measure() const {
  return stats_.empty() ? domain_.volume() : domain_.volume() - stats_.front().covered_volume;
}

MapTree build(const BoxDomain& domain, const ScheduleParams& params) {
  params.validate();
  const std::size_t n = domain.dim();
  require_same_dim(static_cast<std::size_t>(params.n), n, "build");
  const bool spine = params.is_cantor() && params.forced_branching;

  std::vector<NodeRecord> records;
  PackOptions opts;
  opts.max_balls = params.max_balls;

  auto check = [](const Packing& p, const std::string& where) {
    if (p.budget_exceeded) {
      throw BudgetExceeded(where + ": uncovered fraction " + std::to_string(p.uncovered_exact) +
                           " above eta " + std::to_string(p.eta) + " after " +
                           std::to_string(p.balls.size()) + " balls");
    }
  };

  {
    const double delta1 = params.delta(1);
    std::optional<ForcedBalls> forced;
    if (spine) {
      if (delta1 > domain.inradius() * (1.0 + kGeomTol)) {
        throw ScheduleInfeasible("delta_1 = " + std::to_string(delta1) + " exceeds the inradius " +
                                 std::to_string(domain.inradius()));
      }
      const auto cap = forced_grid_capacity(Region{domain}, delta1);
      if (cap < params.root_spine_count) {
        throw ScheduleInfeasible("box hosts " + std::to_string(cap) + " spine roots, " +
                                 std::to_string(params.root_spine_count) + " requested");
      }
      forced = ForcedBalls{params.root_spine_count, delta1};
    }
    opts.certify_samples = 0;
    const Packing p = pack(Region{domain}, std::min(delta1, domain.inradius()),
                           params.effective_root_eta(), forced, params.seed, opts);
    check(p, "generation 1");
    for (std::size_t i = 0; i < p.balls.size(); ++i) {
      records.push_back({kNoNode, 1, p.balls[i].center, p.balls[i].radius, p.balls[i].center, 0.0,
                         i < p.forced_count});
    }
  }

  std::size_t parents_begin = 0;
  for (int k = 2; k <= params.depth; ++k) {
    const std::size_t parents_end = records.size();
    const double delta_k = params.delta(k);
    const double log_scale = log_generation_scale(params, k - 1);
    const double scale = std::exp(log_scale);
    for (std::size_t pid = parents_begin; pid < parents_end; ++pid) {
      const Ball inner(records[pid].center, params.a * records[pid].radius);
      std::optional<ForcedBalls> forced;
      if (spine && records[pid].spine) {
        const auto cap = forced_grid_capacity(Region{inner}, delta_k);
        if (cap == 0) {
          throw ScheduleInfeasible("spine ball of radius " + std::to_string(inner.radius) +
                                   " cannot host a child of radius delta_" + std::to_string(k) +
                                   " = " + std::to_string(delta_k));
        }
        forced = ForcedBalls{cap, delta_k};
      }
      const Packing p = pack(Region{inner}, std::min(delta_k, inner.radius), params.eta, forced,
                             mix_seed(params.seed, pid), opts);
      check(p, "generation " + std::to_string(k));
      const Point parent_center = records[pid].center;
      const Point parent_image = records[pid].image_center;
      for (std::size_t i = 0; i < p.balls.size(); ++i) {
        // F_{k-1} at the child center: the parent's inner affine branch.
        Point image = parent_image + scale * (p.balls[i].center - parent_center);
        records.push_back({static_cast<std::uint32_t>(pid), k, p.balls[i].center,
                           p.balls[i].radius, std::move(image), log_scale, i < p.forced_count});
      }
    }
    parents_begin = parents_end;
    if (records.size() > std::numeric_limits<std::uint32_t>::max() / 2) {
      throw BudgetExceeded("tree exceeds the node index range");
    }
  }
  return MapTree(domain, params, std::move(records));
}

Location locate(const MapTree& tree, const Point& x, int max_generation) {
  require_same_dim(tree.dim(), static_cast<std::size_t>(x.size()), "locate");
  if (!tree.domain().contains(x)) throw OutsideDomain("point lies outside the domain");
  const int limit = max_generation < 0 ? tree.depth() : std::min(max_generation, tree.depth());
  if (limit < 1) return {};
  std::uint32_t id = tree.find_in_generation(1, x);
  if (id == kNoNode) return {};
  const double a = tree.params().a;
  for (;;) {
    const MapNode& nd = tree.node(id);
    const double rho = (x - tree.center(id)).norm();
    if (rho >= a * nd.radius) return {RegionTag::Annulus, id, nd.generation};
    if (nd.generation >= limit || nd.child_count == 0) {
      return {RegionTag::InnerAffine, id, nd.generation};
    }
    const std::uint32_t child = tree.find_in_generation(nd.generation + 1, x);
    if (child == kNoNode || tree.node(child).parent != id) {
      return {RegionTag::InnerAffine, id, nd.generation};
    }
    id = child;
  }
}

Point evaluate(const MapTree& tree, const Point& x, int max_generation) {
  const Location loc = locate(tree, x, max_generation);
  switch (loc.tag) {
    case RegionTag::OutsideAll:
      return x;
    case RegionTag::Annulus:
      return eval(tree.stretch(loc.node), x);
    case RegionTag::InnerAffine: {
      const double s = std::exp(log_generation_scale(tree.params(), loc.depth));
      return tree.image_center(loc.node) + s * (x - tree.center(loc.node));
    }
  }
  return x;
}

Matrix evaluate_gradient(const MapTree& tree, const Point& x, int max_generation) {
  const Location loc = locate(tree, x, max_generation);
  const auto n = static_cast<Eigen::Index>(tree.dim());
  switch (loc.tag) {
    case RegionTag::OutsideAll:
      return Matrix::Identity(n, n);
    case RegionTag::Annulus: {
      const double r = tree.node(loc.node).radius;
      const double rho = (x - tree.center(loc.node)).norm();
      if (std::abs(rho - r) <= kInterfaceTol * r ||
          std::abs(rho - tree.params().a * r) <= kInterfaceTol * r) {
        throw OnInterface("gradient requested on an interface sphere");
      }
      return jacobian(tree.stretch(loc.node), x);
    }
    case RegionTag::InnerAffine:
      return std::exp(log_generation_scale(tree.params(), loc.depth)) * Matrix::Identity(n, n);
  }
  return Matrix::Identity(n, n);
}

TailBound uniform_tail_bound(const MapTree& tree) { return uniform_tail_bound(tree.params()); }

}  // namespace wqr
