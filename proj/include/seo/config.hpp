#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "seo/dynamics.hpp"
#include "seo/optimizers.hpp"
#include "seo/safety.hpp"
#include "seo/scheduler.hpp"

namespace seo {

enum class OptimizeMode { Offload, ModelGate, SensorGate };

std::string_view to_string(OptimizeMode m);
OptimizeMode parse_mode(const std::string& s);

AccountingMode accounting_for(OptimizeMode m);

struct ControllerGains {
  double lane_gain = 0.15;      // steer per meter of lateral error
  double heading_gain = 0.9;    // steer per radian of heading error
  double avoid_gain = 1.2;      // peak repulsive steer per obstacle
  double avoid_falloff_m = 6.0; // e-folding distance of the repulsion
  double throttle_gain = 0.5;   // throttle per m/s of speed error
};

struct RunConfig {
  double tau_s = 0.020;
  OptimizeMode mode = OptimizeMode::Offload;
  bool filtered = true;
  int obstacle_count = 4;
  std::vector<std::uint64_t> seeds;  // defaults to 1..25
  double episode_cap_s = 60.0;
  double target_speed_mps = 8.0;
  double sensing_horizon_m = 60.0;
  std::string out_dir = "out";
  MeasurementSpan measurement_span = MeasurementSpan::SensorPeriod;

  Scenario scenario;
  DynParams dynamics;
  BarrierParams barrier;
  FilterParams filter;
  TableGridSpec table_grid;
  double table_horizon_s = 0.08;
  double table_sub_dt_s = 0.002;
  ChannelModel channel;
  ResponseEstimator estimator;  // ewma_response_s <= 0 seeds from the channel nominal
  ControllerGains controller;
  std::vector<ModelSpec> models;  // defaults to default_models()
};

// Two optimizable detectors at the base period and twice it, plus a critical
// state estimator.
std::vector<ModelSpec> default_models(double tau_s = 0.020);

RunConfig default_config();

// Parses a JSON config; absent keys keep their defaults. Throws
// std::runtime_error with a descriptive message on malformed input.
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j);

// Full round-trip of the resolved configuration (documents the schema).
nlohmann::json config_json(const RunConfig& cfg);

// Throws std::invalid_argument on inconsistent settings; aligns dependent
// fields (scenario step, filter steering range).
void validate_config(RunConfig& cfg);

}  // namespace seo
