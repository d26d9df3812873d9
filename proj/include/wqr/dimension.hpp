#pragma once

#include "wqr/map_tree.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace wqr {

/// ln N / ln(1 / ratio) for N similar pieces scaled by ratio in (0,1).
double similarity_dimension(double N, double ratio);

struct BoxCount {
  double scale = 0.0;
  std::size_t count = 0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of y against x.
SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Occupied cells of side `scale` on a grid anchored at `anchor`, minimised
/// over `shifts` deterministic grid offsets (fractions k/shifts of a cell on
/// every axis).
std::size_t count_boxes(const std::vector<Point>& points, const Point& anchor, double scale,
                        int shifts = 4);

struct DimensionReport {
  StretchKind kind = StretchKind::Phi;
  double K = 1.0;
  /// Spine children per spine parent.
  std::uint64_t branching = 0;
  /// delta_k / delta_{k-1} = (1 + delta) a^alpha.
  double contraction = 0.0;
  double analytic = 0.0;
  /// n / (K + 1) for PHI, n K / (K + 1) for PSI.
  double idealized_target = 0.0;
  double target_gap = 0.0;  // idealized_target - analytic
  /// N / (a delta_{k-1} / delta_k)^n: the packing constant realised by the lattice.
  double packing_constant = 0.0;
  /// Filled only when a tree is supplied.
  int depth = 0;
  std::vector<BoxCount> box_counts;
  std::optional<SlopeFit> empirical;
};

/// Analytic dimension from the lattice count inside a spine ball. With a tree,
/// checks that every spine parent carries that count and box-counts the
/// deepest spine centers at scales delta_1 .. delta_depth.
DimensionReport cantor_dimension(const ScheduleParams& params,
                                 const MapTree* tree = nullptr);

struct KpChoice {
  StretchKind kind = StretchKind::Phi;
  double K = 1.0;
  /// Idealized dimension of the singular set for this (variant, K).
  double target_dimension = 0.0;
};

/// Picks the variant and distortion whose singular set targets dimension n - p.
KpChoice kp_selector(int n, double p, double theta = 0.01);

double idealized_dimension(int n, StretchKind kind, double K);

}  // namespace wqr
