#include "wqr/io.hpp"

#include "wqr/errors.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <type_traits>

namespace wqr {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

KeyReader::KeyReader(const Json& obj, std::string context)
    : obj_(obj), context_(std::move(context)) {
  if (!obj_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
}

bool KeyReader::has(const std::string& key) {
  used_.insert(key);
  return obj_.contains(key) && !obj_.at(key).is_null();
}

const Json& KeyReader::at(const std::string& key) {
  used_.insert(key);
  if (!obj_.contains(key)) throw ConfigError(context_ + ": missing key '" + key + "'");
  return obj_.at(key);
}

template <class T>
T KeyReader::get(const std::string& key) {
  const Json& v = at(key);
  if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
    if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0)) {
      throw ConfigError(context_ + ": '" + key + "' must be an integer in range");
    }
  }
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(context_ + ": bad value for '" + key + "': " + e.what());
  }
}

template double KeyReader::get<double>(const std::string&);
template int KeyReader::get<int>(const std::string&);
template bool KeyReader::get<bool>(const std::string&);
template std::string KeyReader::get<std::string>(const std::string&);
template std::uint64_t KeyReader::get<std::uint64_t>(const std::string&);
template std::vector<double> KeyReader::get<std::vector<double>>(const std::string&);
template std::vector<std::uint32_t> KeyReader::get<std::vector<std::uint32_t>>(
    const std::string&);

void KeyReader::finish() const {
  for (const auto& item : obj_.items()) {
    if (!used_.count(item.key())) {
      throw ConfigError(context_ + ": unknown key '" + item.key() + "'");
    }
  }
}

Json point_to_json(const Point& p) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) arr.push_back(p[i]);
  return arr;
}

Point point_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a non-empty array of numbers");
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError("expected a number in point array");
    p[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return p;
}

Json params_to_json(const ScheduleParams& p) {
  Json sched;
  if (const auto* s = std::get_if<SummableSchedule>(&p.schedule)) {
    sched = {{"type", "SUMMABLE"}, {"delta0", s->delta0}, {"q", s->q}};
  } else {
    sched = {{"type", "CANTOR"}, {"delta", std::get<CantorSchedule>(p.schedule).delta}};
  }
  Json j;
  j["n"] = p.n;
  j["K"] = p.K;
  j["a"] = p.a;
  j["variant"] = std::string(to_string(p.kind));
  j["depth"] = p.depth;
  j["schedule"] = sched;
  j["eta"] = p.eta;
  j["root_eta"] = p.root_eta ? Json(*p.root_eta) : Json(nullptr);
  j["forced_branching"] = p.forced_branching;
  j["root_spine_count"] = p.root_spine_count;
  j["max_balls"] = static_cast<std::uint64_t>(p.max_balls);
  j["seed"] = p.seed;
  return j;
}

ScheduleParams params_from_json(const Json& j) {
  KeyReader r(j, "params");
  ScheduleParams p;
  p.n = r.get<int>("n");
  p.K = r.get<double>("K");
  p.a = r.get<double>("a");
  p.kind = stretch_kind_from_string(r.get<std::string>("variant"));
  p.depth = r.get<int>("depth");
  KeyReader s(r.at("schedule"), "params.schedule");
  const std::string type = s.get<std::string>("type");
  if (type == "SUMMABLE") {
    p.schedule = SummableSchedule{s.get<double>("delta0"), s.get<double>("q")};
  } else if (type == "CANTOR") {
    p.schedule = CantorSchedule{s.get<double>("delta")};
  } else {
    throw ConfigError("unknown schedule type '" + type + "'");
  }
  s.finish();
  p.eta = r.get<double>("eta");
  if (r.has("root_eta")) p.root_eta = r.get<double>("root_eta");
  p.forced_branching = r.get<bool>("forced_branching");
  p.root_spine_count = r.get<std::uint64_t>("root_spine_count");
  p.max_balls = r.get<std::uint64_t>("max_balls");
  p.seed = r.get<std::uint64_t>("seed");
  r.finish();
  return p;
}

Json domain_to_json(const BoxDomain& d) {
  return {{"lower", point_to_json(d.lower)}, {"upper", point_to_json(d.upper)}};
}

BoxDomain domain_from_json(const Json& j) {
  KeyReader r(j, "domain");
  BoxDomain d(point_from_json(r.at("lower")), point_from_json(r.at("upper")));
  r.finish();
  return d;
}

Json tree_to_json(const MapTree& tree) {
  Json parent = Json::array(), generation = Json::array(), center = Json::array(),
       radius = Json::array(), image = Json::array(), scale = Json::array(),
       spine = Json::array();
  for (std::uint32_t id = 0; id < tree.size(); ++id) {
    const MapNode& nd = tree.node(id);
    parent.push_back(nd.parent == kNoNode ? -1 : static_cast<std::int64_t>(nd.parent));
    generation.push_back(nd.generation);
    center.push_back(point_to_json(tree.center(id)));
    radius.push_back(nd.radius);
    image.push_back(point_to_json(tree.image_center(id)));
    scale.push_back(nd.log_accum_scale);
    spine.push_back(nd.spine);
  }
  Json j;
  j["format"] = "wqr-tree";
  j["params"] = params_to_json(tree.params());
  j["domain"] = domain_to_json(tree.domain());
  j["nodes"] = {{"parent", parent},         {"generation", generation},
                {"center", center},         {"radius", radius},
                {"image_center", image},    {"log_accum_scale", scale},
                {"spine", spine}};
  return j;
}

MapTree tree_from_json(const Json& j) {
  KeyReader r(j, "tree");
  if (r.get<std::string>("format") != "wqr-tree") throw ConfigError("not a tree document");
  ScheduleParams params = params_from_json(r.at("params"));
  BoxDomain domain = domain_from_json(r.at("domain"));
  KeyReader t(r.at("nodes"), "tree.nodes");
  const Json& parent = t.at("parent");
  const Json& generation = t.at("generation");
  const Json& center = t.at("center");
  const Json& radius = t.at("radius");
  const Json& image = t.at("image_center");
  const Json& scale = t.at("log_accum_scale");
  const Json& spine = t.at("spine");
  t.finish();
  r.finish();
  const std::size_t m = parent.size();
  for (const Json* col : {&generation, &center, &radius, &image, &scale, &spine}) {
    if (!col->is_array() || col->size() != m) throw ConfigError("node columns differ in length");
  }
  std::vector<NodeRecord> records(m);
  try {
    for (std::size_t i = 0; i < m; ++i) {
      const auto pid = parent[i].get<std::int64_t>();
      records[i].parent = pid < 0 ? kNoNode : static_cast<std::uint32_t>(pid);
      records[i].generation = generation[i].get<int>();
      records[i].center = point_from_json(center[i]);
      records[i].radius = radius[i].get<double>();
      records[i].image_center = point_from_json(image[i]);
      records[i].log_accum_scale = scale[i].get<double>();
      records[i].spine = spine[i].get<bool>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed node table: ") + e.what());
  }
  return MapTree(std::move(domain), std::move(params), std::move(records));
}

std::string tree_hash(const MapTree& tree) { return fnv1a_hex(tree_to_json(tree).dump()); }

std::string nodes_csv(const MapTree& tree) {
  std::ostringstream out;
  const std::size_t n = tree.dim();
  out << "id,generation,parent";
  for (std::size_t d = 0; d < n; ++d) out << ",center_" << d;
  out << ",radius";
  for (std::size_t d = 0; d < n; ++d) out << ",image_" << d;
  out << ",log_accum_scale,spine\n";
  for (std::uint32_t id = 0; id < tree.size(); ++id) {
    const MapNode& nd = tree.node(id);
    out << id << ',' << nd.generation << ',';
    if (nd.parent == kNoNode) {
      out << -1;
    } else {
      out << nd.parent;
    }
    const auto c = tree.center(id);
    for (std::size_t d = 0; d < n; ++d) out << ',' << format_double(c[static_cast<Eigen::Index>(d)]);
    out << ',' << format_double(nd.radius);
    const auto z = tree.image_center(id);
    for (std::size_t d = 0; d < n; ++d) out << ',' << format_double(z[static_cast<Eigen::Index>(d)]);
    out << ',' << format_double(nd.log_accum_scale) << ',' << (nd.spine ? 1 : 0) << '\n';
  }
  return out.str();
}

Json energy_to_json(const EnergyReport& r) {
  Json gens = Json::array();
  for (std::size_t i = 0; i < r.per_generation.size(); ++i) {
    const GenerationEnergy& g = r.per_generation[i];
    gens.push_back({{"generation", g.generation},
                    {"annulus", g.annulus},
                    {"affine", g.affine},
                    {"partial_sum", r.partial_sums[i]}});
  }
  Json j;
  j["p"] = r.p;
  j["per_generation"] = gens;
  j["ratios"] = r.ratios;
  j["growth_ratio"] = r.growth_ratio;
  j["predicted_ratio"] = r.predicted_ratio;
  j["critical_p"] = r.critical_p;
  j["outside"] = r.outside;
  j["total"] = r.total;
  return j;
}

Json sweep_to_json(const std::vector<SweepRow>& rows) {
  Json arr = Json::array();
  for (const SweepRow& s : rows) {
    arr.push_back({{"p", s.p},
                   {"growth_ratio", s.growth_ratio},
                   {"predicted_ratio", s.predicted_ratio},
                   {"verdict", std::string(to_string(s.verdict))}});
  }
  return arr;
}

Json degree_to_json(const DegreeReport& r) {
  Json nodes = Json::array();
  for (const NodeDegree& d : r.nodes) {
    nodes.push_back({{"node", d.node},
                     {"generation", d.generation},
                     {"boundary_degree", d.boundary_degree},
                     {"numeric_degree", d.numeric_degree},
                     {"det_negative", d.det_negative},
                     {"det_positive", d.det_positive},
                     {"on_interface", d.on_interface},
                     {"annulus_samples", d.annulus_samples},
                     {"annulus_det_negative", d.annulus_det_negative}});
  }
  Json j;
  j["seed"] = r.seed;
  j["interior_samples"] = r.interior_samples;
  j["triangulation_level"] = r.triangulation_level;
  j["annulus_samples"] = r.annulus_samples();
  j["annulus_det_negative_fraction"] = r.annulus_det_negative_fraction();
  j["paradox_confirmed"] = r.paradox_confirmed();
  j["nodes"] = nodes;
  return j;
}

Json dimension_to_json(const DimensionReport& r) {
  Json boxes = Json::array();
  for (const BoxCount& b : r.box_counts) boxes.push_back({{"scale", b.scale}, {"count", b.count}});
  Json j;
  j["variant"] = std::string(to_string(r.kind));
  j["K"] = r.K;
  j["branching"] = r.branching;
  j["contraction"] = r.contraction;
  j["analytic"] = r.analytic;
  j["idealized_target"] = r.idealized_target;
  j["target_gap"] = r.target_gap;
  j["packing_constant"] = r.packing_constant;
  j["depth"] = r.depth;
  j["box_counts"] = boxes;
  if (r.empirical) {
    j["empirical"] = {{"slope", r.empirical->slope},
                      {"intercept", r.empirical->intercept},
                      {"r_squared", r.empirical->r_squared}};
  } else {
    j["empirical"] = nullptr;
  }
  return j;
}

Json blowup_to_json(const BlowupProbe& r) {
  Json j;
  j["point"] = point_to_json(r.point);
  j["path"] = r.path;
  j["radii"] = r.radii;
  j["averages"] = r.averages;
  j["stderrs"] = r.stderrs;
  j["fitted_slope"] = r.fitted_slope;
  j["fitted_intercept"] = r.fitted_intercept;
  j["predicted_slope"] = r.predicted_slope;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  return j;
}

Json tail_to_json(const TailBound& t) {
  return {{"terms", t.terms},
          {"partial_sums", t.partial_sums},
          {"summable", t.summable},
          {"ratio", t.ratio}};
}

}  // namespace wqr
