#pragma once

#include "wqr/geometry.hpp"
#include "wqr/radial.hpp"

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

namespace wqr {

/// delta_k = delta0 * q^k; requires q < a^alpha so that sum a^{-k alpha} delta_k < inf.
struct SummableSchedule {
  double delta0 = 0.0;
  double q = 0.0;
};

/// delta_k = (1 + delta)^k a^{alpha k}; requires (1 + delta) a^alpha < 1.
struct CantorSchedule {
  double delta = 0.0;
};

using DeltaSchedule = std::variant<SummableSchedule, CantorSchedule>;

struct ScheduleParams {
  int n = 3;
  double K = 2.0;
  double a = 0.5;
  StretchKind kind = StretchKind::Phi;
  int depth = 6;
  DeltaSchedule schedule = SummableSchedule{};
  /// Fill tolerance for the packings of U_k, k >= 2.
  double eta = 0.05;
  /// Fill tolerance for the generation-1 packing of the box; defaults to eta.
  std::optional<double> root_eta;
  /// Cantor spine: forced lattice balls of radius exactly delta_k.
  bool forced_branching = false;
  std::uint64_t root_spine_count = 1;
  std::size_t max_balls = 200000;
  std::uint64_t seed = 0;

  StretchVariant variant() const { return {kind, K}; }
  double alpha() const { return variant().alpha(); }
  bool is_cantor() const { return std::holds_alternative<CantorSchedule>(schedule); }
  double delta(int k) const;
  double effective_root_eta() const { return root_eta.value_or(eta); }

  /// Throws InvalidArgument for malformed fields and ScheduleInfeasible when
  /// the summability or contraction condition fails.
  void validate() const;
};

/// SUMMABLE(delta0, q) with q = 0.9 a^alpha and delta0 chosen so that every
/// generation-1 ball of radius <= inradius nests concentrically through `depth`.
SummableSchedule default_summable(const ScheduleParams& params, const BoxDomain& domain);

struct TailBound {
  std::vector<double> terms;         // a^{-k alpha} delta_k, k = 1..depth
  std::vector<double> partial_sums;  // running sums of terms
  bool summable = true;
  double ratio = 0.0;                // terms[k+1] / terms[k]
};

TailBound uniform_tail_bound(const ScheduleParams& params);

}  // namespace wqr
