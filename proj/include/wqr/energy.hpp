#pragma once

#include "wqr/map_tree.hpp"

#include <string_view>
#include <vector>

namespace wqr {

struct GenerationEnergy {
  int generation = 0;
  /// Sum of the closed-form annulus integrals of |DF|^p over this generation.
  double annulus = 0.0;
  /// (a^{-k alpha})^p times the part of each aB not covered by children.
  double affine = 0.0;
};

struct EnergyReport {
  double p = 1.0;
  std::vector<GenerationEnergy> per_generation;
  /// Running sums of the annulus energies.
  std::vector<double> partial_sums;
  /// annulus(k+1) / annulus(k) for k = 1..depth-1.
  std::vector<double> ratios;
  /// Geometric mean of `ratios`; 0 when fewer than two generations exist.
  double growth_ratio = 0.0;
  double predicted_ratio = 0.0;  // a^{n - p alpha}
  double critical_p = 0.0;       // n / alpha
  /// Identity part outside the generation-1 balls.
  double outside = 0.0;
  double total = 0.0;
};

/// Exact per-generation energy of F_depth (no sampling). p >= 1.
EnergyReport total_energy(const MapTree& tree, double p);

enum class Verdict { Bounded, Divergent, Inconclusive };
std::string_view to_string(Verdict v);

struct SweepRow {
  double p = 0.0;
  double growth_ratio = 0.0;
  double predicted_ratio = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

/// Bounded iff ratio < 1 - margin, divergent iff ratio > 1 + margin.
Verdict classify_growth(double ratio, double margin = 0.02);
/// Throws InconclusiveNearCritical inside the margin band.
Verdict criticality_verdict(const MapTree& tree, double p, double margin = 0.02);
/// Inconclusive rows are recorded, not thrown.
std::vector<SweepRow> criticality_sweep(const MapTree& tree, const std::vector<double>& ps,
                                        double margin = 0.02);
/// True when some bounded p lies below every divergent p and both exist.
bool sweep_brackets(const std::vector<SweepRow>& rows);

}  // namespace wqr
