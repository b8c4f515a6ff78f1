#include "seo/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace seo {

namespace {

using nlohmann::json;

template <class T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

double read_response(const json& v) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    throw std::runtime_error("fixed_response_s: expected number or \"inf\"");
  }
  return v.get<double>();
}

std::vector<std::uint64_t> read_seeds(const json& v) {
  std::vector<std::uint64_t> seeds;
  if (v.is_array()) {
    v.get_to(seeds);
  } else if (v.is_object()) {
    const auto from = v.at("from").get<std::uint64_t>();
    const auto to = v.at("to").get<std::uint64_t>();
    if (to < from) throw std::runtime_error("seeds: to < from");
    for (std::uint64_t s = from; s <= to; ++s) seeds.push_back(s);
  } else {
    throw std::runtime_error("seeds: expected array or {from, to}");
  }
  return seeds;
}

SensorProfile read_sensor(const json& v) {
  if (v.is_string()) return sensor_preset(v.get<std::string>());
  SensorProfile p;
  p.name = v.value("name", "custom");
  v.at("p_meas_w").get_to(p.p_meas_w);
  v.at("p_mech_w").get_to(p.p_mech_w);
  return p;
}

ModelSpec read_model(const json& v) {
  ModelSpec m;
  v.at("id").get_to(m.id);
  const std::string subset = v.value("subset", "optimizable");
  if (subset == "optimizable")
    m.subset = ModelSubset::Optimizable;
  else if (subset == "critical")
    m.subset = ModelSubset::Critical;
  else
    throw std::runtime_error("model subset must be optimizable or critical");
  read_if(v, "period_s", m.period_s);
  read_if(v, "latency_s", m.latency_s);
  read_if(v, "power_w", m.power_w);
  if (v.contains("sensor") && !v.at("sensor").is_null())
    m.sensor = read_sensor(v.at("sensor"));
  return m;
}

json sensor_json(const SensorProfile& p) {
  return {{"name", p.name}, {"p_meas_w", p.p_meas_w}, {"p_mech_w", p.p_mech_w}};
}

json model_json(const ModelSpec& m) {
  json v{{"id", m.id},
         {"subset", m.subset == ModelSubset::Critical ? "critical"
                                                      : "optimizable"},
         {"period_s", m.period_s},
         {"latency_s", m.latency_s},
         {"power_w", m.power_w}};
  if (m.sensor) v["sensor"] = sensor_json(*m.sensor);
  return v;
}

}  // namespace

std::string_view to_string(OptimizeMode m) {
  switch (m) {
    case OptimizeMode::Offload: return "offload";
    case OptimizeMode::ModelGate: return "model-gate";
    case OptimizeMode::SensorGate: return "sensor-gate";
  }
  return "offload";
}

OptimizeMode parse_mode(const std::string& s) {
  if (s == "offload") return OptimizeMode::Offload;
  if (s == "model-gate") return OptimizeMode::ModelGate;
  if (s == "sensor-gate") return OptimizeMode::SensorGate;
  throw std::runtime_error("unknown mode '" + s +
                           "' (expected offload, model-gate, sensor-gate)");
}

AccountingMode accounting_for(OptimizeMode m) {
  return m == OptimizeMode::SensorGate ? AccountingMode::SensorAndModel
                                       : AccountingMode::ModelOnly;
}

std::vector<ModelSpec> default_models(double tau_s) {
  ModelSpec fast;
  fast.id = "detector_fast";
  fast.period_s = tau_s;
  fast.sensor = sensor_preset("zed_camera");

  ModelSpec slow = fast;
  slow.id = "detector_slow";
  slow.period_s = 2.0 * tau_s;

  ModelSpec est;
  est.id = "state_estimator";
  est.subset = ModelSubset::Critical;
  est.period_s = tau_s;
  est.latency_s = 0.008;
  est.power_w = 5.0;

  return {fast, slow, est};
}

RunConfig default_config() {
  RunConfig cfg;
  for (std::uint64_t s = 1; s <= 25; ++s) cfg.seeds.push_back(s);
  cfg.models = default_models(cfg.tau_s);
  validate_config(cfg);
  return cfg;
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg = default_config();

  read_if(j, "tau_s", cfg.tau_s);
  if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
  read_if(j, "filtered", cfg.filtered);
  read_if(j, "obstacle_count", cfg.obstacle_count);
  if (j.contains("seeds")) cfg.seeds = read_seeds(j.at("seeds"));
  read_if(j, "episode_cap_s", cfg.episode_cap_s);
  read_if(j, "target_speed_mps", cfg.target_speed_mps);
  read_if(j, "sensing_horizon_m", cfg.sensing_horizon_m);
  read_if(j, "out_dir", cfg.out_dir);
  if (j.contains("measurement_span")) {
    const std::string s = j.at("measurement_span").get<std::string>();
    if (s == "sensor-period")
      cfg.measurement_span = MeasurementSpan::SensorPeriod;
    else if (s == "base-period")
      cfg.measurement_span = MeasurementSpan::BasePeriod;
    else
      throw std::runtime_error(
          "measurement_span must be sensor-period or base-period");
  }

  if (j.contains("scenario")) {
    const auto& v = j.at("scenario");
    read_if(v, "road_length_m", cfg.scenario.road_length);
    read_if(v, "lane_center_y_m", cfg.scenario.lane_center_y);
    read_if(v, "lane_half_width_m", cfg.scenario.lane_half_width);
    read_if(v, "obstacle_safety_radius_m", cfg.scenario.obstacle_safety_radius);
    read_if(v, "obstacle_collision_radius_m",
            cfg.scenario.obstacle_collision_radius);
    read_if(v, "obstacle_min_spacing_m", cfg.scenario.obstacle_min_spacing);
  }
  if (j.contains("dynamics")) {
    const auto& v = j.at("dynamics");
    read_if(v, "wheelbase_m", cfg.dynamics.wheelbase);
    read_if(v, "steer_max_rad", cfg.dynamics.steer_max);
    read_if(v, "a_max_mps2", cfg.dynamics.a_max);
    read_if(v, "c_drag_per_s", cfg.dynamics.c_drag);
  }
  if (j.contains("barrier")) {
    const auto& v = j.at("barrier");
    read_if(v, "d_min_m", cfg.barrier.d_min);
    read_if(v, "k_v_s", cfg.barrier.k_v);
  }
  if (j.contains("filter")) {
    const auto& v = j.at("filter");
    read_if(v, "lookahead_s", cfg.filter.lookahead);
    read_if(v, "steer_candidates", cfg.filter.steer_candidates);
    read_if(v, "brake_on_unsafe", cfg.filter.brake_on_unsafe);
    read_if(v, "canonical_radius_m", cfg.filter.canonical_radius);
  }
  if (j.contains("table")) {
    const auto& v = j.at("table");
    read_if(v, "distance_bins", cfg.table_grid.distance_bins);
    read_if(v, "distance_min_m", cfg.table_grid.distance_min);
    read_if(v, "distance_max_m", cfg.table_grid.distance_max);
    read_if(v, "angle_bins", cfg.table_grid.angle_bins);
    read_if(v, "speed_bins", cfg.table_grid.speed_bins);
    read_if(v, "speed_max_mps", cfg.table_grid.speed_max);
    read_if(v, "steer_bins", cfg.table_grid.steer_bins);
    read_if(v, "horizon_cap_s", cfg.table_horizon_s);
    read_if(v, "sub_dt_s", cfg.table_sub_dt_s);
  }
  if (j.contains("channel")) {
    const auto& v = j.at("channel");
    read_if(v, "rayleigh_scale_mbps", cfg.channel.rayleigh_scale_mbps);
    read_if(v, "payload_bits", cfg.channel.payload_bits);
    read_if(v, "server_compute_s", cfg.channel.server_compute_s);
    read_if(v, "tx_power_w", cfg.channel.tx_power_w);
    read_if(v, "seed", cfg.channel.seed);
    if (v.contains("fixed_response_s") && !v.at("fixed_response_s").is_null())
      cfg.channel.fixed_response_s = read_response(v.at("fixed_response_s"));
  }
  if (j.contains("estimator")) {
    const auto& v = j.at("estimator");
    read_if(v, "safety_multiplier", cfg.estimator.safety_multiplier);
    read_if(v, "alpha", cfg.estimator.alpha);
    read_if(v, "initial_response_s", cfg.estimator.ewma_response_s);
  }
  if (j.contains("controller")) {
    const auto& v = j.at("controller");
    read_if(v, "lane_gain", cfg.controller.lane_gain);
    read_if(v, "heading_gain", cfg.controller.heading_gain);
    read_if(v, "avoid_gain", cfg.controller.avoid_gain);
    read_if(v, "avoid_falloff_m", cfg.controller.avoid_falloff_m);
    read_if(v, "throttle_gain", cfg.controller.throttle_gain);
  }
  if (j.contains("models")) {
    cfg.models.clear();
    for (const auto& v : j.at("models")) cfg.models.push_back(read_model(v));
  }

  validate_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

json config_json(const RunConfig& cfg) {
  json j;
  j["tau_s"] = cfg.tau_s;
  j["mode"] = std::string(to_string(cfg.mode));
  j["filtered"] = cfg.filtered;
  j["obstacle_count"] = cfg.obstacle_count;
  j["seeds"] = cfg.seeds;
  j["episode_cap_s"] = cfg.episode_cap_s;
  j["target_speed_mps"] = cfg.target_speed_mps;
  j["sensing_horizon_m"] = cfg.sensing_horizon_m;
  j["out_dir"] = cfg.out_dir;
  j["measurement_span"] =
      cfg.measurement_span == MeasurementSpan::SensorPeriod ? "sensor-period"
                                                            : "base-period";
  j["scenario"] = {
      {"road_length_m", cfg.scenario.road_length},
      {"lane_center_y_m", cfg.scenario.lane_center_y},
      {"lane_half_width_m", cfg.scenario.lane_half_width},
      {"obstacle_safety_radius_m", cfg.scenario.obstacle_safety_radius},
      {"obstacle_collision_radius_m", cfg.scenario.obstacle_collision_radius},
      {"obstacle_min_spacing_m", cfg.scenario.obstacle_min_spacing}};
  j["dynamics"] = {{"wheelbase_m", cfg.dynamics.wheelbase},
                   {"steer_max_rad", cfg.dynamics.steer_max},
                   {"a_max_mps2", cfg.dynamics.a_max},
                   {"c_drag_per_s", cfg.dynamics.c_drag}};
  j["barrier"] = {{"d_min_m", cfg.barrier.d_min}, {"k_v_s", cfg.barrier.k_v}};
  j["filter"] = {{"lookahead_s", cfg.filter.lookahead},
                 {"steer_candidates", cfg.filter.steer_candidates},
                 {"brake_on_unsafe", cfg.filter.brake_on_unsafe},
                 {"canonical_radius_m", cfg.filter.canonical_radius}};
  j["table"] = {{"distance_bins", cfg.table_grid.distance_bins},
                {"distance_min_m", cfg.table_grid.distance_min},
                {"distance_max_m", cfg.table_grid.distance_max},
                {"angle_bins", cfg.table_grid.angle_bins},
                {"speed_bins", cfg.table_grid.speed_bins},
                {"speed_max_mps", cfg.table_grid.speed_max},
                {"steer_bins", cfg.table_grid.steer_bins},
                {"horizon_cap_s", cfg.table_horizon_s},
                {"sub_dt_s", cfg.table_sub_dt_s}};
  j["channel"] = {{"rayleigh_scale_mbps", cfg.channel.rayleigh_scale_mbps},
                  {"payload_bits", cfg.channel.payload_bits},
                  {"server_compute_s", cfg.channel.server_compute_s},
                  {"tx_power_w", cfg.channel.tx_power_w},
                  {"seed", cfg.channel.seed}};
  if (cfg.channel.fixed_response_s) {
    if (std::isinf(*cfg.channel.fixed_response_s))
      j["channel"]["fixed_response_s"] = "inf";
    else
      j["channel"]["fixed_response_s"] = *cfg.channel.fixed_response_s;
  }
  j["estimator"] = {{"safety_multiplier", cfg.estimator.safety_multiplier},
                    {"alpha", cfg.estimator.alpha},
                    {"initial_response_s", cfg.estimator.ewma_response_s}};
  j["controller"] = {{"lane_gain", cfg.controller.lane_gain},
                     {"heading_gain", cfg.controller.heading_gain},
                     {"avoid_gain", cfg.controller.avoid_gain},
                     {"avoid_falloff_m", cfg.controller.avoid_falloff_m},
                     {"throttle_gain", cfg.controller.throttle_gain}};
  j["models"] = json::array();
  for (const auto& m : cfg.models) j["models"].push_back(model_json(m));
  return j;
}

void validate_config(RunConfig& cfg) {
  if (!(cfg.tau_s > 0.0)) throw std::invalid_argument("tau_s must be > 0");
  if (!(cfg.episode_cap_s > 0.0))
    throw std::invalid_argument("episode_cap_s must be > 0");
  if (cfg.obstacle_count < 0)
    throw std::invalid_argument("obstacle_count must be >= 0");
  if (!(cfg.target_speed_mps >= 0.0))
    throw std::invalid_argument("target_speed_mps must be >= 0");
  if (cfg.seeds.empty()) throw std::invalid_argument("seeds must be non-empty");
  if (cfg.models.empty())
    throw std::invalid_argument("models must be non-empty");
  if (!(cfg.table_sub_dt_s > 0.0) || !(cfg.table_horizon_s >= cfg.tau_s))
    throw std::invalid_argument(
        "table sub_dt must be > 0 and horizon at least tau");
  if (!(cfg.estimator.safety_multiplier >= 1.0))
    throw std::invalid_argument("estimator safety_multiplier must be >= 1");
  if (!(cfg.estimator.alpha > 0.0) || cfg.estimator.alpha > 1.0)
    throw std::invalid_argument("estimator alpha must be in (0, 1]");

  for (const auto& m : cfg.models) {
    validate_model(m);
    if (cfg.mode == OptimizeMode::SensorGate &&
        m.subset == ModelSubset::Optimizable && !m.sensor)
      throw std::invalid_argument("model " + m.id +
                                  " needs a sensor profile for sensor gating");
  }

  // Dependent fields follow their owners.
  cfg.scenario.dt = cfg.tau_s;
  cfg.filter.steer_max = cfg.dynamics.steer_max;
  cfg.table_grid.steer_max = cfg.dynamics.steer_max;
}

}  // namespace seo
