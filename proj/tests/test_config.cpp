#include <doctest.h>

#include "fixtures.hpp"
#include "wqr/config.hpp"
#include "wqr/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace wqr;
using wqr::testing::config_of;

TEST_SUITE("config") {

TEST_CASE("empty document reproduces the default experiment") {
  const ExperimentConfig c = config_of("{}");
  const ScheduleParams& s = c.schedule;
  CHECK(s.n == 3);
  CHECK(s.K == 2.0);
  CHECK(s.a == 0.5);
  CHECK(s.kind == StretchKind::Phi);
  CHECK(s.depth == 6);
  CHECK(s.eta == 0.05);
  CHECK(s.seed == 0);
  CHECK_FALSE(s.is_cantor());
  CHECK(c.domain.volume() == 1.0);
  const auto& sched = std::get<SummableSchedule>(s.schedule);
  CHECK(sched.q == doctest::Approx(0.9 * std::pow(0.5, 1.5)));
  CHECK(c.p_grid == std::vector<double>{1.0, 1.5, 1.9, 2.0, 2.1, 2.5});
  CHECK(c.blowup_radii == 7);
  CHECK(c.slice_offset.has_value());
  CHECK(*c.slice_offset == 0.5);
  CHECK(c.out_dir == "out");
}

TEST_CASE("cantor defaults") {
  const ExperimentConfig c = config_of(R"({"schedule": {"type": "CANTOR"}})");
  const ScheduleParams& s = c.schedule;
  CHECK(s.a == 0.07);
  CHECK(std::get<CantorSchedule>(s.schedule).delta == 0.2);
  CHECK(s.forced_branching);
  CHECK(s.eta == 0.9);
  CHECK(s.effective_root_eta() == 0.9);
  CHECK(c.domain.upper[0] == doctest::Approx(s.delta(1)));
  CHECK(c.domain.lower[0] == doctest::Approx(-s.delta(1)));
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("unknown keys are errors at every level") {
  CHECK_THROWS_AS(config_of(R"({"depht": 3})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"energy": {"pgrid": [1]}})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"schedule": {"type": "SUMMABLE", "delta": 0.1}})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"slice": {"axis": 1, "color": 2}})"), ConfigError);
}

TEST_CASE("malformed and contradictory values") {
  CHECK_THROWS_AS(config_of(R"({"depth": 2.5})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"K": "two"})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"a": 1.5})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"schedule": {"type": "LINEAR"}})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"n": 2, "domain": {"lower": [0,0,0], "upper": [1,1,1]}})"),
                  ConfigError);
  CHECK_THROWS_AS(config_of(R"({"dimension": {"p": 2}, "K": 3})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"slice": {"field": "phase"}})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"slice": {"axis": 3}})"), ConfigError);
  CHECK_THROWS_AS(config_of(R"({"variant": "CHI"})"), Error);
}

TEST_CASE("target exponent selects the variant") {
  const ExperimentConfig c = config_of(R"({"dimension": {"p": 2}})");
  CHECK(c.schedule.kind == StretchKind::Phi);
  CHECK(c.schedule.K == doctest::Approx(2.02));
  const ExperimentConfig low = config_of(R"({"dimension": {"p": 1.2}})");
  CHECK(low.schedule.kind == StretchKind::Psi);
}

TEST_CASE("a custom ratio keeps the root balls nesting") {
  const ExperimentConfig c = config_of(R"({"schedule": {"q": 0.2}})");
  const ScheduleParams& s = c.schedule;
  CHECK(std::get<SummableSchedule>(s.schedule).q == 0.2);
  CHECK(s.delta(s.depth) == doctest::Approx(0.5 * std::pow(0.5, s.depth - 1)));
  const ExperimentConfig d = config_of(R"({"schedule": {"q": 0.2, "delta0": 3}})");
  CHECK(std::get<SummableSchedule>(d.schedule.schedule).delta0 == 3.0);
}

TEST_CASE("config hash ignores the output directory only") {
  const std::string h = config_hash(config_of("{}"));
  CHECK(h.size() == 16);
  CHECK(config_hash(config_of(R"({"out": "elsewhere"})")) == h);
  CHECK(config_hash(config_of(R"({"seed": 1})")) != h);
  // Spelling out a default does not change the experiment.
  CHECK(config_hash(config_of(R"({"depth": 6})")) == h);
  const Json resolved = config_to_json(config_of(R"({"schedule": {"type": "CANTOR"}})"));
  CHECK(resolved.at("a") == 0.07);
  CHECK(resolved.contains("slice"));
}

TEST_CASE("config files") {
  const auto dir = std::filesystem::temp_directory_path() / "wqr_config_test";
  std::filesystem::create_directories(dir);
  const auto good = dir / "good.json";
  const auto bad = dir / "bad.json";
  std::ofstream(good) << R"({"depth": 2, "seed": 5})";
  std::ofstream(bad) << R"({"depth": 2,)";
  CHECK(load_config(good.string()).schedule.seed == 5);
  CHECK_THROWS_AS(load_config(bad.string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "absent.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
