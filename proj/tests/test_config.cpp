#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "seo/config.hpp"

using namespace seo;

TEST_SUITE_BEGIN("config");

TEST_CASE("defaults are self-consistent") {
  RunConfig cfg = default_config();
  CHECK(cfg.tau_s == 0.020);
  CHECK(cfg.mode == OptimizeMode::Offload);
  CHECK(cfg.filtered);
  CHECK(cfg.obstacle_count == 4);
  CHECK(cfg.seeds.size() == 25);
  CHECK(cfg.seeds.front() == 1);
  CHECK(cfg.seeds.back() == 25);

  REQUIRE(cfg.models.size() == 3);
  CHECK(cfg.models[0].id == "detector_fast");
  CHECK(cfg.models[0].period_s == cfg.tau_s);
  CHECK(cfg.models[0].sensor.has_value());
  CHECK(cfg.models[1].id == "detector_slow");
  CHECK(cfg.models[1].period_s == 2.0 * cfg.tau_s);
  CHECK(cfg.models[2].subset == ModelSubset::Critical);

  CHECK_NOTHROW(validate_config(cfg));
  CHECK(cfg.scenario.dt == cfg.tau_s);
  CHECK(cfg.filter.steer_max == cfg.dynamics.steer_max);
  CHECK(cfg.table_grid.steer_max == cfg.dynamics.steer_max);
}

TEST_CASE("mode names round-trip") {
  for (const OptimizeMode m : {OptimizeMode::Offload, OptimizeMode::ModelGate,
                               OptimizeMode::SensorGate})
    CHECK(parse_mode(std::string(to_string(m))) == m);
  CHECK_THROWS(parse_mode("turbo"));

  CHECK(accounting_for(OptimizeMode::SensorGate) ==
        AccountingMode::SensorAndModel);
  CHECK(accounting_for(OptimizeMode::Offload) == AccountingMode::ModelOnly);
  CHECK(accounting_for(OptimizeMode::ModelGate) == AccountingMode::ModelOnly);
}

TEST_CASE("json round-trip preserves every field it documents") {
  RunConfig cfg = default_config();
  cfg.tau_s = 0.010;
  cfg.mode = OptimizeMode::SensorGate;
  cfg.filtered = false;
  cfg.obstacle_count = 2;
  cfg.seeds = {3, 9, 27};
  cfg.episode_cap_s = 12.0;
  cfg.target_speed_mps = 6.5;
  cfg.measurement_span = MeasurementSpan::BasePeriod;
  cfg.scenario.road_length = 80.0;
  cfg.dynamics.wheelbase = 2.8;
  cfg.barrier.k_v = 0.5;
  cfg.filter.steer_candidates = 11;
  cfg.table_grid.distance_bins = 9;
  cfg.table_horizon_s = 0.05;
  cfg.channel.tx_power_w = 2.0;
  cfg.channel.fixed_response_s = 0.018;
  cfg.estimator.alpha = 0.5;
  cfg.controller.avoid_gain = 0.9;
  for (auto& m : cfg.models) m.period_s = std::max(m.period_s, cfg.tau_s);
  validate_config(cfg);

  const RunConfig back = config_from_json(config_json(cfg));
  CHECK(back.tau_s == cfg.tau_s);
  CHECK(back.mode == cfg.mode);
  CHECK(back.filtered == cfg.filtered);
  CHECK(back.obstacle_count == cfg.obstacle_count);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.episode_cap_s == cfg.episode_cap_s);
  CHECK(back.target_speed_mps == cfg.target_speed_mps);
  CHECK(back.measurement_span == cfg.measurement_span);
  CHECK(back.scenario.road_length == cfg.scenario.road_length);
  CHECK(back.dynamics.wheelbase == cfg.dynamics.wheelbase);
  CHECK(back.barrier.k_v == cfg.barrier.k_v);
  CHECK(back.filter.steer_candidates == cfg.filter.steer_candidates);
  CHECK(back.table_grid.distance_bins == cfg.table_grid.distance_bins);
  CHECK(back.table_horizon_s == cfg.table_horizon_s);
  CHECK(back.channel.tx_power_w == cfg.channel.tx_power_w);
  REQUIRE(back.channel.fixed_response_s.has_value());
  CHECK(*back.channel.fixed_response_s == 0.018);
  CHECK(back.estimator.alpha == cfg.estimator.alpha);
  CHECK(back.controller.avoid_gain == cfg.controller.avoid_gain);
  REQUIRE(back.models.size() == cfg.models.size());
  for (std::size_t i = 0; i < cfg.models.size(); ++i) {
    CHECK(back.models[i].id == cfg.models[i].id);
    CHECK(back.models[i].period_s == cfg.models[i].period_s);
    CHECK(back.models[i].subset == cfg.models[i].subset);
    CHECK(back.models[i].sensor.has_value() ==
          cfg.models[i].sensor.has_value());
  }
}

TEST_CASE("an infinite pinned response survives the round trip") {
  RunConfig cfg = default_config();
  cfg.channel.fixed_response_s = std::numeric_limits<double>::infinity();
  const RunConfig back = config_from_json(config_json(cfg));
  REQUIRE(back.channel.fixed_response_s.has_value());
  CHECK(std::isinf(*back.channel.fixed_response_s));
}

TEST_CASE("seeds accept an explicit list or a range object") {
  const RunConfig a =
      config_from_json(nlohmann::json{{"seeds", {5, 6, 9}}});
  CHECK(a.seeds == std::vector<std::uint64_t>{5, 6, 9});
  const RunConfig b = config_from_json(
      nlohmann::json{{"seeds", {{"from", 2}, {"to", 5}}}});
  CHECK(b.seeds == std::vector<std::uint64_t>{2, 3, 4, 5});
  CHECK_THROWS(config_from_json(
      nlohmann::json{{"seeds", {{"from", 5}, {"to", 2}}}}));
}

TEST_CASE("sensors parse from presets or inline profiles") {
  const nlohmann::json j{
      {"models",
       {{{"id", "a"}, {"sensor", "navtech_radar"}},
        {{"id", "b"},
         {"sensor", {{"name", "thermal"}, {"p_meas_w", 3.0}, {"p_mech_w", 1.0}}}},
        {{"id", "c"}, {"subset", "critical"}}}}};
  const RunConfig cfg = config_from_json(j);
  REQUIRE(cfg.models.size() == 3);
  CHECK(cfg.models[0].sensor->p_meas_w == 21.6);
  CHECK(cfg.models[1].sensor->name == "thermal");
  CHECK(cfg.models[1].sensor->p_mech_w == 1.0);
  CHECK(cfg.models[2].subset == ModelSubset::Critical);
  CHECK_FALSE(cfg.models[2].sensor.has_value());
}

TEST_CASE("malformed configs are rejected with a reason") {
  CHECK_THROWS(config_from_json(nlohmann::json{{"mode", "warp"}}));
  CHECK_THROWS(config_from_json(nlohmann::json{{"tau_s", 0.0}}));
  CHECK_THROWS(config_from_json(nlohmann::json{{"obstacle_count", -1}}));
  CHECK_THROWS(config_from_json(nlohmann::json{{"measurement_span", "weekly"}}));
  CHECK_THROWS(
      config_from_json(nlohmann::json{{"seeds", nlohmann::json::array()}}));
  CHECK_THROWS(config_from_json(
      nlohmann::json{{"models", nlohmann::json::array()}}));
  CHECK_THROWS(config_from_json(
      nlohmann::json{{"estimator", {{"alpha", 0.0}}}}));
  CHECK_THROWS(config_from_json(
      nlohmann::json{{"estimator", {{"safety_multiplier", 0.5}}}}));

  // Sensor gating is meaningless without sensors on the optimizable models.
  nlohmann::json no_sensor{
      {"mode", "sensor-gate"},
      {"models", {{{"id", "a"}, {"period_s", 0.02}}}}};
  CHECK_THROWS(config_from_json(no_sensor));
}

TEST_CASE("load_config reads files and reports parse errors") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = (dir / "seo_cfg_good.json").string();
  const auto bad = (dir / "seo_cfg_bad.json").string();
  {
    std::ofstream f(good);
    f << R"({"mode": "model-gate", "obstacle_count": 1})";
    std::ofstream g(bad);
    g << "{not json";
  }
  const RunConfig cfg = load_config(good);
  CHECK(cfg.mode == OptimizeMode::ModelGate);
  CHECK(cfg.obstacle_count == 1);
  CHECK_THROWS(load_config(bad));
  CHECK_THROWS(load_config((dir / "seo_cfg_missing.json").string()));
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST_SUITE_END();
