#include "wqr/schedule.hpp"

#include "wqr/errors.hpp"

#include <cmath>
#include <string>

namespace wqr {

double ScheduleParams::delta(int k) const {
  const double kk = static_cast<double>(k);
  if (const auto* s = std::get_if<SummableSchedule>(&schedule)) {
    return s->delta0 * std::pow(s->q, kk);
  }
  const auto& c = std::get<CantorSchedule>(schedule);
  return std::exp(kk * (std::log1p(c.delta) + alpha() * std::log(a)));
}

void ScheduleParams::validate() const {
  if (n < 2) throw InvalidArgument("dimension n must be >= 2");
  if (!(K >= 1.0) || !std::isfinite(K)) throw InvalidArgument("K must be >= 1");
  if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("a must lie in (0,1)");
  if (depth < 1) throw InvalidArgument("depth must be >= 1");
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0,1)");
  if (root_eta && !(*root_eta > 0.0 && *root_eta < 1.0)) {
    throw InvalidArgument("root_eta must lie in (0,1)");
  }
  if (max_balls == 0) throw InvalidArgument("max_balls must be positive");
  const double a_alpha = std::pow(a, alpha());
  if (const auto* s = std::get_if<SummableSchedule>(&schedule)) {
    if (!(s->delta0 > 0.0)) throw InvalidArgument("delta0 must be positive");
    if (!(s->q > 0.0)) throw InvalidArgument("q must be positive");
    if (!(s->q < a_alpha)) {
      throw ScheduleInfeasible("summable schedule needs q < a^alpha = " + std::to_string(a_alpha) +
                               ", got q = " + std::to_string(s->q));
    }
    if (forced_branching) throw ScheduleMismatch("forced branching requires a CANTOR schedule");
  } else {
    const auto& c = std::get<CantorSchedule>(schedule);
    if (!(c.delta > 0.0)) throw InvalidArgument("cantor delta must be positive");
    if (!((1.0 + c.delta) * a_alpha < 1.0)) {
      throw ScheduleInfeasible("cantor schedule needs (1+delta) a^alpha < 1, got " +
                               std::to_string((1.0 + c.delta) * a_alpha));
    }
  }
}

SummableSchedule default_summable(const ScheduleParams& params, const BoxDomain& domain) {
  const double q = 0.9 * std::pow(params.a, params.alpha());
  const double d = static_cast<double>(params.depth);
  const double delta0 = domain.inradius() * std::pow(params.a, d - 1.0) / std::pow(q, d);
  return {delta0, q};
}

TailBound uniform_tail_bound(const ScheduleParams& params) {
  TailBound out;
  out.summable = !params.is_cantor();
  const double log_inv_a = -std::log(params.a);
  double sum = 0.0;
  for (int k = 1; k <= params.depth; ++k) {
    const double term = std::exp(k * params.alpha() * log_inv_a) * params.delta(k);
    out.terms.push_back(term);
    sum += term;
    out.partial_sums.push_back(sum);
  }
  if (const auto* s = std::get_if<SummableSchedule>(&params.schedule)) {
    out.ratio = s->q / std::pow(params.a, params.alpha());
  } else {
    out.ratio = 1.0 + std::get<CantorSchedule>(params.schedule).delta;
  }
  return out;
}

}  // namespace wqr
