#pragma once

#include "wqr/blowup.hpp"
#include "wqr/degree.hpp"
#include "wqr/dimension.hpp"
#include "wqr/energy.hpp"
#include "wqr/map_tree.hpp"

#include <json.hpp>

#include <set>
#include <string>

namespace wqr {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "wqr 1.0.0";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);
/// FNV-1a 64 of the bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// Reads the keys of one JSON object and rejects any key never asked for.
class KeyReader {
 public:
  KeyReader(const Json& obj, std::string context);

  bool has(const std::string& key);
  const Json& at(const std::string& key);
  template <class T>
  T get(const std::string& key);
  template <class T>
  T get_or(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }
  /// Throws ConfigError naming the first unknown key.
  void finish() const;

 private:
  const Json& obj_;
  std::string context_;
  std::set<std::string> used_;
};

Json point_to_json(const Point& p);
Point point_from_json(const Json& j);

Json params_to_json(const ScheduleParams& p);
/// Strict: every field required, unknown keys rejected (ConfigError).
ScheduleParams params_from_json(const Json& j);

Json domain_to_json(const BoxDomain& d);
BoxDomain domain_from_json(const Json& j);

/// Params, domain and a column-oriented node table with parent indices.
Json tree_to_json(const MapTree& tree);
MapTree tree_from_json(const Json& j);
std::string tree_hash(const MapTree& tree);

/// generation,parent,center_*,radius,image_*,log_accum_scale,spine
std::string nodes_csv(const MapTree& tree);

Json energy_to_json(const EnergyReport& r);
Json sweep_to_json(const std::vector<SweepRow>& rows);
Json degree_to_json(const DegreeReport& r);
Json dimension_to_json(const DimensionReport& r);
Json blowup_to_json(const BlowupProbe& r);
Json tail_to_json(const TailBound& t);

}  // namespace wqr
