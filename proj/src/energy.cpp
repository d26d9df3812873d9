#include "wqr/energy.hpp"

#include "wqr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wqr {

EnergyReport total_energy(const MapTree& tree, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("energy exponent must be >= 1");
  const ScheduleParams& prm = tree.params();
  const std::size_t n = tree.dim();
  const double alpha = prm.alpha();

  EnergyReport rep;
  rep.p = p;
  rep.predicted_ratio = std::pow(prm.a, static_cast<double>(n) - p * alpha);
  rep.critical_p = static_cast<double>(n) / alpha;
  rep.outside = tree.outside_measure();

  double running = 0.0;
  for (int k = 1; k <= tree.depth(); ++k) {
    GenerationEnergy g;
    g.generation = k;
    // |DF|^p on the inner affine part: (a^{-k alpha})^p.
    const double affine_weight = std::exp(p * k * alpha * -std::log(prm.a));
    const auto [b, e] = tree.generation_range(k);
    for (std::uint32_t id = b; id < e; ++id) {
      g.annulus += annulus_energy(tree.stretch(id), p, prm.a);
      double slack = ball_volume(n, prm.a * tree.node(id).radius);
      for (std::uint32_t c : tree.children(id)) slack -= ball_volume(n, tree.node(c).radius);
      g.affine += affine_weight * std::max(slack, 0.0);
    }
    running += g.annulus;
    rep.partial_sums.push_back(running);
    rep.per_generation.push_back(g);
  }
  for (std::size_t i = 1; i < rep.per_generation.size(); ++i) {
    rep.ratios.push_back(rep.per_generation[i].annulus / rep.per_generation[i - 1].annulus);
  }
  if (!rep.ratios.empty()) {
    double log_sum = 0.0;
    for (double r : rep.ratios) log_sum += std::log(r);
    rep.growth_ratio = std::exp(log_sum / static_cast<double>(rep.ratios.size()));
  }
  rep.total = running + rep.outside;
  for (const GenerationEnergy& g : rep.per_generation) rep.total += g.affine;
  return rep;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::Divergent: return "divergent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict classify_growth(double ratio, double margin) {
  if (ratio < 1.0 - margin) return Verdict::Bounded;
  if (ratio > 1.0 + margin) return Verdict::Divergent;
  return Verdict::Inconclusive;
}

Verdict criticality_verdict(const MapTree& tree, double p, double margin) {
  const EnergyReport rep = total_energy(tree, p);
  if (rep.ratios.empty()) {
    throw InconclusiveNearCritical("a single generation has no growth ratio");
  }
  const Verdict v = classify_growth(rep.growth_ratio, margin);
  if (v == Verdict::Inconclusive) {
    throw InconclusiveNearCritical("growth ratio " + std::to_string(rep.growth_ratio) +
                                   " within " + std::to_string(margin) + " of 1 at p = " +
                                   std::to_string(p));
  }
  return v;
}

std::vector<SweepRow> criticality_sweep(const MapTree& tree, const std::vector<double>& ps,
                                        double margin) {
  if (ps.empty()) throw InvalidArgument("empty p grid");
  std::vector<SweepRow> rows;
  for (double p : ps) {
    if (!(p >= 1.0 && p < static_cast<double>(tree.dim()))) {
      throw InvalidArgument("p = " + std::to_string(p) + " outside [1, n)");
    }
    const EnergyReport rep = total_energy(tree, p);
    SweepRow row{p, rep.growth_ratio, rep.predicted_ratio, Verdict::Inconclusive};
    if (!rep.ratios.empty()) row.verdict = classify_growth(rep.growth_ratio, margin);
    rows.push_back(row);
  }
  return rows;
}

bool sweep_brackets(const std::vector<SweepRow>& rows) {
  double max_bounded = -1.0;
  double min_divergent = 1e300;
  for (const SweepRow& r : rows) {
    if (r.verdict == Verdict::Bounded) max_bounded = std::max(max_bounded, r.p);
    if (r.verdict == Verdict::Divergent) min_divergent = std::min(min_divergent, r.p);
  }
  if (max_bounded < 0.0 || min_divergent > 1e299) return false;
  return max_bounded < min_divergent;
}

}  // namespace wqr
