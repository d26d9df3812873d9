// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Detail lines are indented by four spaces.

#include "wqr/commands.hpp"
#include "wqr/config.hpp"
#include "wqr/degree.hpp"
#include "wqr/dimension.hpp"
#include "wqr/energy.hpp"
#include "wqr/errors.hpp"
#include "wqr/map_tree.hpp"
#include "wqr/pairing.hpp"
#include "wqr/random.hpp"
#include "wqr/blowup.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <Eigen/SVD>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace wqr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("failed: " + what);
    }
  }
  void note(const std::string& line) { details.push_back(line); }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

MapTree build_config(const std::string& json) {
  const ExperimentConfig c = config_from_json(Json::parse(json));
  return build(c.domain, c.schedule);
}

const MapTree& default_tree() {
  static const MapTree t = build_config("{}");
  return t;
}

RadialStretch random_stretch(Rng& rng, StretchKind kind, double K) {
  Point y(3), z(3);
  for (Eigen::Index i = 0; i < 3; ++i) {
    y[i] = rng.uniform(-1, 1);
    z[i] = rng.uniform(-1, 1);
  }
  return RadialStretch(Ball(y, rng.uniform(0.1, 2.0)), z, rng.uniform(-3, 3),
                       StretchVariant(kind, K));
}

Point annulus_point(Rng& rng, const RadialStretch& m, double a) {
  return m.ball.center + m.ball.radius * rng.uniform(a, 1.0) * rng.on_sphere(3);
}

// ---------------------------------------------------------------------------

Outcome distortion_identity() {
  Outcome o;
  Rng rng(101);
  double worst = 0.0;
  int positive = 0;
  for (int i = 0; i < 1000; ++i) {
    const StretchKind kind = i % 2 ? StretchKind::Psi : StretchKind::Phi;
    const double K = rng.uniform(1.0, 10.0);
    const RadialStretch m = random_stretch(rng, kind, K);
    const double a = rng.uniform(0.01, 0.99);
    const Matrix J = jacobian(m, annulus_point(rng, m, a));
    Eigen::JacobiSVD<Matrix> svd(J);
    const auto s = svd.singularValues();
    worst = std::max(worst, std::abs(s[0] / s[2] - K) / K);
    positive += J.determinant() < 0.0 ? 0 : 1;
  }
  o.require(worst <= 1e-9, "distortion off by " + fmt(worst));
  o.require(positive == 0, std::to_string(positive) + " points with det >= 0");
  o.summary = "1000 points, max |ratio - K|/K = " + fmt(worst, 3) + ", det < 0 everywhere";
  return o;
}

Outcome gradient_correctness() {
  Outcome o;
  Rng rng(102);
  double worst = 0.0;
  for (StretchKind kind : {StretchKind::Phi, StretchKind::Psi}) {
    for (int i = 0; i < 100; ++i) {
      const RadialStretch m = random_stretch(rng, kind, rng.uniform(1.0, 10.0));
      const Point x = annulus_point(rng, m, 0.2);
      const double h = 1e-6 * m.ball.radius;
      Matrix F(3, 3);
      for (Eigen::Index j = 0; j < 3; ++j) {
        Point xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        F.col(j) = (eval(m, xp) - eval(m, xm)) / (2.0 * h);
      }
      const Matrix J = jacobian(m, x);
      worst = std::max(worst, (J - F).norm() / J.norm());
    }
  }
  o.require(worst <= 1e-5, "relative error " + fmt(worst));
  o.summary = "200 points, max relative error " + fmt(worst, 3);
  return o;
}

double radial_quadrature(const RadialStretch& m, double p, double a) {
  const double r = m.ball.radius;
  auto f = [&](double rho) {
    Point x = m.ball.center;
    x[0] += rho;
    Eigen::JacobiSVD<Matrix> svd(jacobian(m, x));
    return 4.0 * std::numbers::pi * std::pow(svd.singularValues()[0], p) * rho * rho;
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a * r, r, 15, 1e-12);
}

Outcome energy_closed_form() {
  Outcome o;
  Rng rng(103);
  double worst = 0.0;
  int cases = 0, log_cases = 0;
  const double as[] = {0.1, 0.3, 0.5, 0.7, 0.9};
  for (StretchKind kind : {StretchKind::Phi, StretchKind::Psi}) {
    for (double K : {1.0, 2.0, 3.0, 5.0, 8.0}) {
      const double critical = 3.0 / StretchVariant(kind, K).alpha();
      const double ps[] = {1.0, 1.5, 2.5, critical >= 1.0 ? critical : 1.2, 3.0};
      for (int i = 0; i < 5; ++i) {
        const RadialStretch m = random_stretch(rng, kind, K);
        const double p = ps[i];
        const double exact = radial_quadrature(m, p, as[i]);
        worst = std::max(worst, std::abs(annulus_energy(m, p, as[i]) / exact - 1.0));
        log_cases += std::abs(3.0 - p * m.variant.alpha()) < 1e-12 ? 1 : 0;
        ++cases;
      }
    }
  }
  const RadialStretch inv(Ball(Point::Zero(3), 1.0), Point::Zero(3), 0.0,
                          StretchVariant(StretchKind::Phi, 1.0));
  const double two_pi = annulus_energy(inv, 1.0, 0.5);
  o.require(cases == 50, "grid has " + std::to_string(cases) + " cases");
  o.require(log_cases > 0, "no logarithmic case in the grid");
  o.require(worst <= 1e-8, "relative error " + fmt(worst));
  o.require(std::abs(two_pi - 2.0 * std::numbers::pi) <= 1e-8, "inversion fixture " + fmt(two_pi, 17));
  o.summary = std::to_string(cases) + " cases (" + std::to_string(log_cases) +
              " logarithmic), max relative error " + fmt(worst, 3) +
              ", inversion fixture error " + fmt(std::abs(two_pi - 2.0 * std::numbers::pi), 3);
  return o;
}

Outcome critical_bracketing() {
  Outcome o;
  const MapTree& t = default_tree();
  double worst = 0.0;
  for (double p : {1.0, 1.5}) {
    const EnergyReport r = total_energy(t, p);
    for (double ratio : r.ratios) worst = std::max(worst, std::abs(ratio / r.predicted_ratio - 1.0));
  }
  o.require(worst <= 0.10, "ratio deviates by " + fmt(worst));
  const auto rows = criticality_sweep(t, {1.0, 1.5, 1.9, 2.0, 2.1, 2.5});
  std::string verdicts;
  for (const SweepRow& row : rows) {
    if (row.p <= 1.9) o.require(row.verdict == Verdict::Bounded, "p = " + fmt(row.p) + " not bounded");
    if (row.p >= 2.1) {
      o.require(row.verdict == Verdict::Divergent, "p = " + fmt(row.p) + " not divergent");
    }
    verdicts += " " + fmt(row.p) + ":" + std::string(to_string(row.verdict));
  }
  const double critical = total_energy(t, 1.0).critical_p;
  o.require(std::abs(critical - 2.0) <= 1e-12, "critical p = " + fmt(critical));
  o.summary = "max ratio deviation " + fmt(worst, 3) + ", critical p = " + fmt(critical) + ";" +
              verdicts;
  return o;
}

Outcome continuity_gluing() {
  Outcome o;
  const MapTree& t = default_tree();
  const double a = t.params().a;
  Rng rng(105);
  double worst = 0.0;
  int pairs = 0;
  std::vector<int> per_generation(t.depth() + 1, 0);
  while (pairs < 1000) {
    const int k = 1 + static_cast<int>(rng.uniform() * t.depth());
    const auto [b, e] = t.generation_range(k);
    const auto id = b + static_cast<std::uint32_t>(rng.uniform() * (e - b));
    const double radius = (pairs % 2 ? a : 1.0) * t.node(id).radius;
    const Point u = rng.on_sphere(3);
    const Point in = t.center(id) + radius * (1.0 - 1e-9) * u;
    const Point out = t.center(id) + radius * (1.0 + 1e-9) * u;
    if (!t.domain().contains(out)) continue;
    const Point fo = evaluate(t, out);
    const double rel = (evaluate(t, in) - fo).norm() / (fo - t.image_center(id)).norm();
    worst = std::max(worst, rel);
    ++per_generation[k];
    ++pairs;
  }
  o.require(worst <= 1e-6, "jump " + fmt(worst));
  std::string gens;
  for (int k = 1; k <= t.depth(); ++k) gens += " " + std::to_string(per_generation[k]);
  o.summary = "1000 pairs (per generation:" + gens + "), max relative jump " + fmt(worst, 3);
  return o;
}

Outcome uniform_convergence() {
  Outcome o;
  const MapTree& t = default_tree();
  const TailBound tail = uniform_tail_bound(t);
  Rng rng(106);
  std::vector<double> worst(t.depth(), 0.0);
  double sup = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Point x = rng.in_box(t.domain());
    Point prev = evaluate(t, x, 1);
    for (int k = 1; k < t.depth(); ++k) {
      const Point next = evaluate(t, x, k + 1);
      worst[k] = std::max(worst[k], (next - prev).norm());
      prev = next;
    }
    sup = std::max(sup, prev.norm());
  }
  std::string margins;
  for (int k = 1; k < t.depth(); ++k) {
    o.require(worst[k] <= tail.terms[k], "k = " + std::to_string(k));
    margins += " " + fmt(worst[k] / tail.terms[k], 3);
  }
  const double bound = t.domain().diameter() + tail.partial_sums.back();
  o.require(sup <= bound, "sup |F| = " + fmt(sup));
  o.summary = "sup|F_{k+1}-F_k| / bound for k=1..5:" + margins + "; sup|F_6| = " + fmt(sup) +
              " <= " + fmt(bound);
  return o;
}

Outcome degree_paradox() {
  Outcome o;
  const MapTree& t = default_tree();
  const DegreeReport r = degree_audit(t, 100, 200, 107, 4);
  std::size_t boundary_ok = 0, numeric_ok = 0;
  for (const NodeDegree& nd : r.nodes) {
    boundary_ok += nd.boundary_degree == 1 ? 1 : 0;
    numeric_ok += nd.numeric_degree == nd.boundary_degree ? 1 : 0;
  }
  o.require(r.nodes.size() >= 100, "only " + std::to_string(r.nodes.size()) + " nodes");
  o.require(boundary_ok == r.nodes.size(), "boundary degree differs from +1");
  o.require(numeric_ok == r.nodes.size(), "numeric degree disagrees with the sign rule");
  o.require(r.annulus_samples() > 0 && r.annulus_det_negative() == r.annulus_samples(),
            "annulus samples with det >= 0");
  const int antipodal = numeric_degree([](const Point& x) { return Point(-x); },
                                       Ball(Point::Zero(3), 1.0), 4, Point::Zero(3));
  o.require(antipodal == -1, "antipodal degree " + std::to_string(antipodal));
  o.summary = std::to_string(r.nodes.size()) + " nodes with degree +1, " +
              std::to_string(r.annulus_det_negative()) + "/" + std::to_string(r.annulus_samples()) +
              " annulus samples with det < 0, antipodal degree " + std::to_string(antipodal);
  return o;
}

Outcome pairing_sanity() {
  Outcome o;
  Rng rng(108);
  const Bump phi(Point{{0.1, -0.1, 0.05}}, 0.9);
  double worst_sigma = 0.0;
  for (int i = 0; i <= 10; ++i) {
    Matrix A = Matrix::Identity(3, 3);
    Point b = Point::Zero(3);
    if (i > 0) {
      for (Eigen::Index r = 0; r < 3; ++r) {
        b[r] = rng.uniform(-1, 1);
        for (Eigen::Index c = 0; c < 3; ++c) A(r, c) = rng.uniform(-1, 1);
      }
    }
    const PairingResult res = distributional_pairing(affine_map(A, b), phi, 100000, 200 + i);
    worst_sigma = std::max(worst_sigma, std::abs(res.gap) / res.gap_stderr);
  }
  o.require(worst_sigma <= 3.0, "affine gap at " + fmt(worst_sigma) + " sigma");

  const RadialStretch m(Ball(Point::Zero(3), 0.5), Point{{0.2, 0.0, 0.0}}, std::log(1.5),
                        StretchVariant(StretchKind::Phi, 2.0));
  const Bump around(Point{{0.05, -0.03, 0.02}}, 0.8);
  const double flux = stretch_interface_flux(m, 0.5, around);
  double stretch_sigma = 0.0;
  std::string gaps;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const PairingResult res = distributional_pairing(stretch_map(m, 0.5), around, 100000, seed);
    stretch_sigma = std::max(stretch_sigma, std::abs(res.gap - flux) / res.gap_stderr);
    gaps += " " + fmt(res.gap, 3) + "+-" + fmt(res.gap_stderr, 2);
  }
  o.require(stretch_sigma <= 3.0, "stretch gap at " + fmt(stretch_sigma) + " sigma from the flux");
  o.summary = "identity + 10 affine: max |gap|/stderr " + fmt(worst_sigma, 3) +
              "; stretch gaps" + gaps + " vs surface flux " + fmt(flux, 3) + " (max " +
              fmt(stretch_sigma, 3) + " sigma)";
  return o;
}

Outcome cantor_dimension_check() {
  Outcome o;
  // Part 1: analytic dimension against the asymptotic targets, every fixture with a <= 0.1.
  double worst_gap = 0.0;
  int within = 0, fixtures = 0;
  for (StretchKind kind : {StretchKind::Phi, StretchKind::Psi}) {
    for (double K : {1.0, 2.0}) {
      for (double a : {0.1, 0.05, 0.01}) {
        ScheduleParams p;
        p.kind = kind;
        p.K = K;
        p.a = a;
        p.depth = 2;
        p.schedule = CantorSchedule{0.2};
        p.forced_branching = true;
        p.eta = 0.9;
        const double target = idealized_dimension(3, kind, K);
        double d = 0.0;
        std::string n_text;
        try {
          const DimensionReport r = cantor_dimension(p);
          d = r.analytic;
          n_text = std::to_string(r.branching);
          if (r.branching <= 300000) {
            // Confirm the count on an actual spine.
            const double d1 = p.delta(1);
            const MapTree t = build(BoxDomain::cube(3, -d1, d1), p);
            const DimensionReport built = cantor_dimension(p, &t);
            o.require(built.branching == r.branching, "built spine count differs");
            n_text += " (built)";
          }
        } catch (const InfeasibleForcedCount&) {
          n_text = "1 (limit set is a point)";
        }
        const double gap = std::abs(target - d);
        worst_gap = std::max(worst_gap, gap);
        within += gap <= 0.1 ? 1 : 0;
        ++fixtures;
        o.note(std::string(to_string(kind)) + " K=" + fmt(K) + " a=" + fmt(a) + ": N=" + n_text +
               ", d=" + fmt(d) + ", target " + fmt(target) + ", gap " + fmt(gap, 3));
      }
    }
  }
  o.require(worst_gap <= 0.1, "analytic dimension within 0.1 of the target on " +
                                  std::to_string(within) + "/" + std::to_string(fixtures) +
                                  " fixtures (worst gap " + fmt(worst_gap, 3) + ")");

  // Part 2: box counting on the built depth-6 spine.
  const MapTree spine = build_config(R"({"schedule": {"type": "CANTOR"}, "depth": 6})");
  const DimensionReport r = cantor_dimension(spine.params(), &spine);
  const double slope = r.empirical ? r.empirical->slope : 0.0;
  o.require(r.empirical.has_value() && std::abs(slope - r.analytic) <= 0.15,
            "box-count slope " + fmt(slope) + " vs analytic " + fmt(r.analytic));

  // Part 3: selector.
  const KpChoice kp = kp_selector(3, 2.0);
  o.require(std::abs(kp.target_dimension - 1.0) <= 0.05, "selector target " + fmt(kp.target_dimension));

  o.summary = "target gap <= 0.1 on " + std::to_string(within) + "/" + std::to_string(fixtures) +
              " fixtures with a <= 0.1 (worst " + fmt(worst_gap, 3) + "); depth-6 box slope " +
              fmt(slope) + " vs analytic " + fmt(r.analytic) + "; selector (3, 2) -> " +
              std::string(to_string(kp.kind)) + " K=" + fmt(kp.K) + ", target " +
              fmt(kp.target_dimension);
  return o;
}

Outcome average_blowup() {
  Outcome o;
  const MapTree cantor = build_config(R"({"schedule": {"type": "CANTOR"}, "depth": 6})");
  const BlowupProbe p = blowup_probe(cantor, {}, 7, 100000, 110);
  bool increasing = true;
  for (std::size_t k = 1; k < p.averages.size(); ++k) {
    increasing = increasing && p.averages[k] > p.averages[k - 1];
  }
  o.require(increasing, "averages not strictly increasing");
  const double rel = std::abs(p.fitted_slope / p.predicted_slope - 1.0);
  o.require(rel <= 0.15, "slope off by " + fmt(rel));

  const MapTree& control = default_tree();
  const BlowupProbe c = blowup_probe(control, {}, 7, 100000, 111);
  const double bound = control.domain().diameter() + uniform_tail_bound(control).partial_sums.back();
  double top = 0.0;
  for (double v : c.averages) top = std::max(top, v);
  o.require(top <= bound, "control average " + fmt(top) + " exceeds " + fmt(bound));
  std::string avgs;
  for (double v : p.averages) avgs += " " + fmt(v, 4);
  o.summary = "spine averages" + avgs + "; slope " + fmt(p.fitted_slope) + " vs ln(1+delta) " +
              fmt(p.predicted_slope) + " (" + fmt(100.0 * rel, 2) + "%); control max " + fmt(top) +
              " <= " + fmt(bound);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "wqr_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cantor_cfg = root / "cantor.json";
  std::ofstream(cantor_cfg) << R"({"schedule": {"type": "CANTOR"}, "depth": 4, "seed": 5})";
  const fs::path default_cfg = root / "default.json";
  std::ofstream(default_cfg) << R"({"seed": 5})";

  struct Run {
    fs::path config;
    std::vector<std::string> verbs;
  };
  const std::vector<Run> runs = {
      {default_cfg, {"build", "energy", "degree", "blowup", "slice", "report"}},
      {cantor_cfg, {"build", "energy", "degree", "dimension", "blowup", "slice", "report"}}};
  std::size_t files = 0, differing = 0;
  for (const Run& run : runs) {
    for (const std::string& verb : run.verbs) {
      fs::path dirs[2];
      for (int rep = 0; rep < 2; ++rep) {
        dirs[rep] = root / (run.config.stem().string() + "_" + verb + "_" + std::to_string(rep));
        CommandOptions opts;
        opts.verb = verb;
        opts.config_path = run.config.string();
        opts.out_dir = dirs[rep].string();
        std::ostringstream log, err;
        const int code = run_command(opts, log, err);
        o.require(code == kExitOk, verb + " exited " + std::to_string(code));
      }
      for (const auto& entry : fs::directory_iterator(dirs[0])) {
        ++files;
        const fs::path twin = dirs[1] / entry.path().filename();
        if (!fs::exists(twin) || slurp(entry.path()) != slurp(twin)) {
          ++differing;
          o.note("differs: " + entry.path().filename().string() + " from " + verb);
        }
      }
    }
  }
  fs::remove_all(root);
  o.require(differing == 0, std::to_string(differing) + " artifacts differ");
  o.require(files > 0, "no artifacts written");
  o.summary = std::to_string(files) + " artifacts from 13 command runs compared byte for byte, " +
              std::to_string(differing) + " differ";
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "distortion identity", 1.0, distortion_identity},
      {2, "gradient correctness", 1.0, gradient_correctness},
      {3, "energy closed form", 5.0, energy_closed_form},
      {4, "critical exponent bracketing", 120.0, critical_bracketing},
      {5, "continuity gluing", 10.0, continuity_gluing},
      {6, "uniform convergence", 60.0, uniform_convergence},
      {7, "degree/sign paradox", 60.0, degree_paradox},
      {8, "distributional pairing", 120.0, pairing_sanity},
      {9, "singular set dimension", 120.0, cantor_dimension_check},
      {10, "average blow-up", 120.0, average_blowup},
      {11, "determinism", 300.0, determinism},
  };
  // Criteria 4-7 share the default tree; its build time is charged to criterion 4.
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.summary = std::string("threw: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.budget_seconds) {
      out.pass = false;
      out.details.push_back("failed: runtime " + fmt(seconds, 3) + " s over budget " +
                            fmt(c.budget_seconds) + " s");
    }
    for (const std::string& line : out.details) std::printf("    %s\n", line.c_str());
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.summary.c_str(), seconds);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
