#include "wqr/degree.hpp"

#include "wqr/errors.hpp"
#include "wqr/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

namespace wqr {

int affine_boundary_degree(const Matrix& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("affine boundary data needs a square matrix");
  const double det = A.determinant();
  const double scale = std::pow(A.norm() / std::sqrt(static_cast<double>(A.rows())),
                                static_cast<double>(A.rows()));
  if (!(std::abs(det) > 1e-12 * scale)) throw DegenerateImage("affine boundary data is singular");
  return det > 0.0 ? 1 : -1;
}

SphereMesh icosphere(int level) {
  if (level < 0 || level > 8) throw InvalidArgument("triangulation level must lie in [0, 8]");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  SphereMesh mesh;
  const double raw[12][3] = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
                             {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
                             {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& v : raw) mesh.vertices.push_back(Eigen::Vector3d(v[0], v[1], v[2]).normalized());
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int i, int j) {
      const auto key = std::minmax(i, j);
      const auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      mesh.vertices.push_back((mesh.vertices[i] + mesh.vertices[j]).normalized());
      const int id = static_cast<int>(mesh.vertices.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& f : mesh.triangles) {
      const int ab = midpoint(f[0], f[1]);
      const int bc = midpoint(f[1], f[2]);
      const int ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }
  // Outward orientation: positive triple product with the centroid direction.
  for (auto& f : mesh.triangles) {
    const Eigen::Vector3d a = mesh.vertices[f[0]], b = mesh.vertices[f[1]], c = mesh.vertices[f[2]];
    if (a.dot((b - a).cross(c - a)) < 0.0) std::swap(f[1], f[2]);
  }
  return mesh;
}

int numeric_degree(const PointMap& map, const Ball& domain, int level, const Point& reference) {
  if (domain.dim() != 3 || reference.size() != 3) {
    throw DimensionMismatch("numeric degree is implemented for n = 3");
  }
  const SphereMesh mesh = icosphere(level);
  std::vector<Eigen::Vector3d> image(mesh.vertices.size());
  double extent = 0.0;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Point x = domain.center + domain.radius * mesh.vertices[i];
    const Point y = map(x);
    if (y.size() != 3) throw DimensionMismatch("boundary map must return points of R^3");
    image[i] = y - reference;
    extent = std::max(extent, image[i].norm());
  }
  if (!(extent > 0.0)) throw DegenerateImage("image of the sphere is the reference point");

  // Van Oosterom and Strackee: tan(omega / 2) = num / den.
  double total = 0.0;
  for (const auto& f : mesh.triangles) {
    const Eigen::Vector3d& r1 = image[f[0]];
    const Eigen::Vector3d& r2 = image[f[1]];
    const Eigen::Vector3d& r3 = image[f[2]];
    const double l1 = r1.norm(), l2 = r2.norm(), l3 = r3.norm();
    if (std::min({l1, l2, l3}) <= 1e-12 * extent) {
      throw DegenerateImage("image vertex coincides with the reference point");
    }
    const double num = r1.dot(r2.cross(r3));
    const double den = l1 * l2 * l3 + r1.dot(r2) * l3 + r1.dot(r3) * l2 + r2.dot(r3) * l1;
    const double omega = 2.0 * std::atan2(num, den);
    if (std::abs(omega) < 1e-12) {
      throw DegenerateImage("image triangle subtends a vanishing solid angle");
    }
    total += omega;
  }
  return static_cast<int>(std::lround(total / (4.0 * std::numbers::pi)));
}

std::size_t DegreeReport::annulus_samples() const {
  std::size_t s = 0;
  for (const NodeDegree& d : nodes) s += d.annulus_samples;
  return s;
}

std::size_t DegreeReport::annulus_det_negative() const {
  std::size_t s = 0;
  for (const NodeDegree& d : nodes) s += d.annulus_det_negative;
  return s;
}

double DegreeReport::annulus_det_negative_fraction() const {
  const std::size_t s = annulus_samples();
  return s == 0 ? 0.0 : static_cast<double>(annulus_det_negative()) / static_cast<double>(s);
}

bool DegreeReport::paradox_confirmed() const {
  if (nodes.empty() || annulus_samples() == 0) return false;
  for (const NodeDegree& d : nodes) {
    if (d.boundary_degree != 1) return false;
    if (triangulation_level >= 0 && d.numeric_degree != d.boundary_degree) return false;
    if (d.annulus_det_negative != d.annulus_samples) return false;
  }
  return true;
}

DegreeReport degree_audit(const MapTree& tree, std::size_t node_samples,
                          std::size_t interior_samples, std::uint64_t seed,
                          int triangulation_level) {
  if (node_samples == 0 || interior_samples == 0) {
    throw InvalidArgument("degree audit needs at least one node and one interior sample");
  }
  if (tree.size() == 0) throw InvalidArgument("degree audit on an empty tree");
  DegreeReport rep;
  rep.seed = seed;
  rep.interior_samples = interior_samples;
  rep.triangulation_level = tree.dim() == 3 ? triangulation_level : -1;

  // Partial Fisher-Yates: the first m entries are a uniform sample without replacement.
  std::vector<std::uint32_t> ids(tree.size());
  std::iota(ids.begin(), ids.end(), 0u);
  const std::size_t m = std::min(node_samples, ids.size());
  Rng pick(seed, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<std::size_t>(pick.uniform() * static_cast<double>(ids.size() - i));
    std::swap(ids[i], ids[std::min(j, ids.size() - 1)]);
  }
  ids.resize(m);
  std::sort(ids.begin(), ids.end());

  const auto n = static_cast<Eigen::Index>(tree.dim());
  for (std::uint32_t id : ids) {
    NodeDegree d;
    d.node = id;
    d.generation = tree.node(id).generation;
    const RadialStretch map = tree.stretch(id);
    // F on the sphere is x -> image + t (x - center), t = exp(log_accum_scale).
    d.boundary_degree = affine_boundary_degree(map.scale() * Matrix::Identity(n, n));
    if (rep.triangulation_level >= 0) {
      d.numeric_degree = numeric_degree([&](const Point& x) { return eval(map, x); }, map.ball,
                                        rep.triangulation_level, map.target);
    }
    Rng rng(seed, static_cast<std::uint64_t>(id) + 1);
    const Ball b = tree.ball(id);
    for (std::size_t s = 0; s < interior_samples; ++s) {
      const Point x = rng.in_ball(b);
      Location loc;
      Matrix J;
      try {
        loc = locate(tree, x);
        J = evaluate_gradient(tree, x);
      } catch (const OnInterface&) {
        ++d.on_interface;
        continue;
      }
      const double det = J.determinant();
      if (det < 0.0) ++d.det_negative;
      if (det > 0.0) ++d.det_positive;
      if (loc.tag == RegionTag::Annulus) {
        ++d.annulus_samples;
        if (det < 0.0) ++d.annulus_det_negative;
      }
    }
    rep.nodes.push_back(d);
  }
  return rep;
}

}  // namespace wqr
