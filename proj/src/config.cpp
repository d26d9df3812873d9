#include "wqr/config.hpp"

#include "wqr/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace wqr {

namespace {

constexpr double kDefaultCantorDelta = 0.2;
constexpr double kDefaultCantorEta = 0.9;
constexpr double kDefaultRootEta = 0.2;
// Small enough that a spine ball hosts several children (7 at n = 3, K = 2).
constexpr double kDefaultCantorA = 0.07;

}  // namespace

ExperimentConfig config_from_json(const Json& j) {
  KeyReader r(j, "config");
  ExperimentConfig c;
  ScheduleParams& s = c.schedule;
  s.n = r.get_or<int>("n", 3);
  if (s.n < 2) throw ConfigError("n must be >= 2");
  s.depth = r.get_or<int>("depth", 6);

  const bool has_kind = r.has("variant");
  const bool has_K = r.has("K");
  if (r.has("dimension")) {
    KeyReader d(r.at("dimension"), "config.dimension");
    if (d.has("p")) c.target_p = d.get<double>("p");
    c.theta = d.get_or<double>("theta", c.theta);
    c.dimension_max_nodes = d.get_or<std::uint64_t>("max_nodes", c.dimension_max_nodes);
    d.finish();
  }
  if (c.target_p) {
    if (has_kind || has_K) {
      throw ConfigError("give either dimension.p or (variant, K), not both");
    }
    try {
      const KpChoice k = kp_selector(s.n, *c.target_p, c.theta);
      s.kind = k.kind;
      s.K = k.K;
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("dimension.p: ") + e.what());
    }
  } else {
    s.kind = stretch_kind_from_string(r.get_or<std::string>("variant", "PHI"));
    s.K = r.get_or<double>("K", 2.0);
  }

  std::string type = "SUMMABLE";
  std::optional<double> delta0, q, cantor_delta;
  if (r.has("schedule")) {
    KeyReader sc(r.at("schedule"), "config.schedule");
    type = sc.get_or<std::string>("type", type);
    if (type == "SUMMABLE") {
      if (sc.has("delta0")) delta0 = sc.get<double>("delta0");
      if (sc.has("q")) q = sc.get<double>("q");
    } else if (type == "CANTOR") {
      if (sc.has("delta")) cantor_delta = sc.get<double>("delta");
    } else {
      throw ConfigError("schedule.type must be SUMMABLE or CANTOR, got '" + type + "'");
    }
    sc.finish();
  }
  const bool cantor = type == "CANTOR";
  s.a = r.get_or<double>("a", cantor ? kDefaultCantorA : 0.5);
  if (!(s.K >= 1.0)) throw ConfigError("K must be >= 1");
  if (!(s.a > 0.0 && s.a < 1.0)) throw ConfigError("a must lie in (0,1)");
  s.forced_branching = r.get_or<bool>("forced_branching", cantor);
  s.eta = r.get_or<double>("eta", cantor ? kDefaultCantorEta : 0.05);
  if (r.has("root_eta")) {
    s.root_eta = r.get<double>("root_eta");
  } else {
    s.root_eta = cantor ? s.eta : kDefaultRootEta;
  }
  s.root_spine_count = r.get_or<std::uint64_t>("root_spine_count", 1);
  s.max_balls = r.get_or<std::uint64_t>("max_balls", s.max_balls);
  s.seed = r.get_or<std::uint64_t>("seed", 0);

  if (cantor) s.schedule = CantorSchedule{cantor_delta.value_or(kDefaultCantorDelta)};

  if (r.has("domain")) {
    c.domain = domain_from_json(r.at("domain"));
  } else if (cantor) {
    const double d1 = s.delta(1);
    c.domain = BoxDomain::cube(static_cast<std::size_t>(s.n), -d1, d1);
  } else {
    c.domain = BoxDomain::cube(static_cast<std::size_t>(s.n), 0.0, 1.0);
  }
  if (c.domain.dim() != static_cast<std::size_t>(s.n)) {
    throw ConfigError("domain dimension does not match n");
  }
  if (!(c.domain.upper.array() > c.domain.lower.array()).all()) {
    throw ConfigError("domain upper corner must exceed lower corner on every axis");
  }
  if (!cantor) {
    SummableSchedule d = default_summable(s, c.domain);
    if (q) {
      d.q = *q;
      if (!delta0) {
        // Keep the concentric-nesting property for a user-chosen ratio.
        d.delta0 = c.domain.inradius() * std::pow(s.a, s.depth - 1.0) / std::pow(*q, s.depth);
      }
    }
    if (delta0) d.delta0 = *delta0;
    s.schedule = d;
  }

  if (r.has("energy")) {
    KeyReader e(r.at("energy"), "config.energy");
    c.p_grid = e.get_or<std::vector<double>>("p_grid", c.p_grid);
    c.margin = e.get_or<double>("margin", c.margin);
    e.finish();
  }
  if (r.has("degree")) {
    KeyReader d(r.at("degree"), "config.degree");
    c.degree_nodes = d.get_or<std::uint64_t>("nodes", c.degree_nodes);
    c.degree_interior = d.get_or<std::uint64_t>("interior_samples", c.degree_interior);
    c.triangulation_level = d.get_or<int>("triangulation_level", c.triangulation_level);
    d.finish();
  }
  if (r.has("blowup")) {
    KeyReader b(r.at("blowup"), "config.blowup");
    c.blowup_radii = b.get_or<std::uint64_t>("radii", 0);
    c.blowup_samples = b.get_or<std::uint64_t>("samples", c.blowup_samples);
    c.blowup_path = b.get_or<std::vector<std::uint32_t>>("path", {});
    b.finish();
  }
  if (c.blowup_radii == 0) c.blowup_radii = static_cast<std::size_t>(s.depth) + 1;
  if (r.has("slice")) {
    KeyReader sl(r.at("slice"), "config.slice");
    c.slice_axis = sl.get_or<int>("axis", c.slice_axis);
    if (sl.has("offset")) c.slice_offset = sl.get<double>("offset");
    c.slice_width = sl.get_or<int>("width", c.slice_width);
    c.slice_height = sl.get_or<int>("height", c.slice_height);
    c.slice_field = sl.get_or<std::string>("field", c.slice_field);
    sl.finish();
  }
  if (c.slice_axis < 0 || c.slice_axis >= s.n) throw ConfigError("slice.axis out of range");
  if (c.slice_width < 1 || c.slice_height < 1) throw ConfigError("slice resolution must be >= 1");
  if (c.slice_field != "log_grad" && c.slice_field != "abs_value") {
    throw ConfigError("slice.field must be log_grad or abs_value");
  }
  if (!c.slice_offset) c.slice_offset = c.domain.center()[c.slice_axis];
  c.out_dir = r.get_or<std::string>("out", c.out_dir);
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

Json config_to_json(const ExperimentConfig& c) {
  Json j = params_to_json(c.schedule);
  j["domain"] = domain_to_json(c.domain);
  j["energy"] = {{"p_grid", c.p_grid}, {"margin", c.margin}};
  j["degree"] = {{"nodes", c.degree_nodes},
                 {"interior_samples", c.degree_interior},
                 {"triangulation_level", c.triangulation_level}};
  j["blowup"] = {{"radii", c.blowup_radii}, {"samples", c.blowup_samples}, {"path", c.blowup_path}};
  j["dimension"] = {{"p", c.target_p ? Json(*c.target_p) : Json(nullptr)},
                    {"theta", c.theta},
                    {"max_nodes", c.dimension_max_nodes}};
  j["slice"] = {{"axis", c.slice_axis},
                {"offset", *c.slice_offset},
                {"width", c.slice_width},
                {"height", c.slice_height},
                {"field", c.slice_field}};
  j["out"] = c.out_dir;
  return j;
}

std::string config_hash(const ExperimentConfig& c) {
  // The output directory does not change any result.
  Json j = config_to_json(c);
  j.erase("out");
  return fnv1a_hex(j.dump());
}

}  // namespace wqr
