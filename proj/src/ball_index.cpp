#include "wqr/ball_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wqr {

namespace {
constexpr std::uint64_t kPrime = 0x100000001B3ULL;
}

std::uint64_t BallIndex::key(const std::int64_t* coords) const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t i = 0; i < dim_; ++i) {
    auto v = static_cast<std::uint64_t>(coords[i]);
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= kPrime;
    }
  }
  return h;
}

BallIndex::Level& BallIndex::level_for(double radius) {
  // Cell side 2^e with 2^e >= 2r, so a ball overlaps at most two cells per axis.
  const int e = static_cast<int>(std::ceil(std::log2(2.0 * radius)));
  auto it = std::find_if(levels_.begin(), levels_.end(),
                         [e](const Level& l) { return l.exponent <= e; });
  if (it != levels_.end() && it->exponent == e) return *it;
  Level lvl;
  lvl.exponent = e;
  lvl.cell = std::ldexp(1.0, e);
  return *levels_.insert(it, std::move(lvl));
}

template <class F>
void BallIndex::visit_cells(const Level& lvl, const Point& lo, const Point& hi, F&& f) const {
  std::vector<std::int64_t> first(dim_), last(dim_), cur(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    first[i] = static_cast<std::int64_t>(std::floor(lo[static_cast<Eigen::Index>(i)] / lvl.cell));
    last[i] = static_cast<std::int64_t>(std::floor(hi[static_cast<Eigen::Index>(i)] / lvl.cell));
  }
  cur = first;
  for (;;) {
    f(key(cur.data()));
    std::size_t i = 0;
    while (i < dim_) {
      if (cur[i] < last[i]) {
        ++cur[i];
        break;
      }
      cur[i] = first[i];
      ++i;
    }
    if (i == dim_) return;
  }
}

std::uint32_t BallIndex::insert(const Point& center, double radius) {
  require_same_dim(dim_, static_cast<std::size_t>(center.size()), "BallIndex::insert");
  const auto id = static_cast<std::uint32_t>(radii_.size());
  centers_.insert(centers_.end(), center.data(), center.data() + center.size());
  radii_.push_back(radius);
  Level& lvl = level_for(radius);
  const Point ext = Point::Constant(center.size(), radius);
  visit_cells(lvl, center - ext, center + ext,
              [&](std::uint64_t k) {
                auto& bucket = lvl.cells[k];
                if (bucket.empty() || bucket.back() != id) bucket.push_back(id);
              });
  return id;
}

std::optional<std::uint32_t> BallIndex::find_containing(const Point& x) const {
  std::vector<std::int64_t> cell(dim_);
  for (const Level& lvl : levels_) {
    for (std::size_t i = 0; i < dim_; ++i) {
      cell[i] = static_cast<std::int64_t>(std::floor(x[static_cast<Eigen::Index>(i)] / lvl.cell));
    }
    const auto it = lvl.cells.find(key(cell.data()));
    if (it == lvl.cells.end()) continue;
    for (std::uint32_t id : it->second) {
      if ((x - center(id)).squaredNorm() <= radii_[id] * radii_[id]) return id;
    }
  }
  return std::nullopt;
}

double BallIndex::clearance(const Point& x, double cap) const {
  double best = cap;
  const Point ext = Point::Constant(x.size(), cap);
  const Point lo = x - ext;
  const Point hi = x + ext;
  for (const Level& lvl : levels_) {
    visit_cells(lvl, lo, hi, [&](std::uint64_t k) {
      const auto it = lvl.cells.find(k);
      if (it == lvl.cells.end()) return;
      for (std::uint32_t id : it->second) {
        const double d = (x - center(id)).norm() - radii_[id];
        best = std::min(best, d);
      }
    });
  }
  return best;
}

}  // namespace wqr
