#pragma once

#include "wqr/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wqr {

/// Everything an experiment run needs. Every field has a default; the empty
/// document gives n = 3, K = 2, a = 0.5, PHI, depth 6 on the unit cube.
/// A CANTOR schedule switches the defaults to a = 0.07, delta = 0.2,
/// eta = 0.9 and the cube [-delta_1, delta_1]^n.
struct ExperimentConfig {
  ScheduleParams schedule;
  BoxDomain domain;

  std::vector<double> p_grid{1.0, 1.5, 1.9, 2.0, 2.1, 2.5};
  double margin = 0.02;

  std::size_t degree_nodes = 100;
  std::size_t degree_interior = 200;
  int triangulation_level = 4;

  /// Defaults to depth + 1 (global radius plus one per generation).
  std::size_t blowup_radii = 0;
  std::size_t blowup_samples = 100000;
  std::vector<std::uint32_t> blowup_path;

  /// When set, (variant, K) come from kp_selector(n, p, theta).
  std::optional<double> target_p;
  double theta = 0.01;
  /// Spine trees larger than this are analysed without being built.
  std::size_t dimension_max_nodes = 2000000;

  int slice_axis = 2;
  std::optional<double> slice_offset;
  int slice_width = 256;
  int slice_height = 256;
  /// "log_grad" (log of the operator norm of DF) or "abs_value" (|F|).
  std::string slice_field = "log_grad";

  std::string out_dir = "out";
};

/// Parses a config document, filling defaults. Unknown keys, malformed
/// values and contradictory settings raise ConfigError.
ExperimentConfig config_from_json(const Json& j);
ExperimentConfig load_config(const std::string& path);
/// Fully resolved config (defaults expanded); its dump is what gets hashed.
Json config_to_json(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);

}  // namespace wqr
