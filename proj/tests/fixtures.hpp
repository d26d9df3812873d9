#pragma once

#include "wqr/config.hpp"
#include "wqr/map_tree.hpp"

#include <string>

namespace wqr::testing {

/// Config resolved from an inline JSON document, exactly as the CLI would.
inline ExperimentConfig config_of(const std::string& json) {
  return config_from_json(Json::parse(json));
}

inline MapTree build_from(const std::string& json) {
  const ExperimentConfig c = config_of(json);
  return build(c.domain, c.schedule);
}

/// Default experiment tree (n = 3, K = 2, PHI, a = 0.5, depth 6). Built once.
inline const MapTree& default_tree() {
  static const MapTree tree = build_from("{}");
  return tree;
}

/// Cantor tree with the default spine (a = 0.07, delta = 0.2), depth 3.
inline const MapTree& small_cantor_tree() {
  static const MapTree tree = build_from(R"({"schedule": {"type": "CANTOR"}, "depth": 3})");
  return tree;
}

}  // namespace wqr::testing
