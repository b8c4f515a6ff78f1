#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "seo/config.hpp"
#include "seo/dynamics.hpp"
#include "seo/ledger.hpp"
#include "seo/safety.hpp"
#include "seo/scheduler.hpp"

namespace seo {

// Freshness tracking for full-fidelity model outputs. Stores, per model, the
// first period from which its newest output is usable; stamps are monotone.
class PredictionStore {
 public:
  void stamp(const std::string& id, long long available_at);
  // Periods since the newest output became usable (negative while a run is
  // still completing). Throws if the model was never stamped.
  long long age_at(const std::string& id, long long period) const;

 private:
  std::map<std::string, long long> available_at_;
};

struct ControllerTerms {
  double lane_steer = 0.0;
  double avoid_steer = 0.0;
  double throttle = 0.0;
};

// Lane-keeping P-controller with an exponential repulsive steer around
// obstacles and throttle regulation toward the target speed. Deterministic;
// the output is clamped to the admissible ranges.
ControllerTerms controller_terms(const VehicleState& s,
                                 const std::vector<Obstacle>& obstacles,
                                 const Scenario& sc, const ControllerGains& g,
                                 const DynParams& dp, double target_speed);

ControlAction stand_in_controller(const VehicleState& s,
                                  const std::vector<Obstacle>& obstacles,
                                  const Scenario& sc, const ControllerGains& g,
                                  const DynParams& dp, double target_speed);

enum class TerminalStatus { Completed, Collided, Timeout };

std::string_view to_string(TerminalStatus s);

struct PeriodRecord {
  long long global_period = 0;
  VehicleState state;       // at period start
  ControlAction u_raw;      // controller output
  ControlAction u;          // after the filter (== u_raw when unfiltered)
  SafetyContext ctx;
  double h_value = 0.0;
  int delta_max = 0;
  std::vector<ModelPeriodDecision> decisions;
};

struct RunTrace {
  TerminalStatus status = TerminalStatus::Timeout;
  double final_time_s = 0.0;
  long long periods = 0;
  double min_clearance_m = 0.0;  // smallest center distance to any obstacle
  long long staleness_violations = 0;
  std::vector<PeriodRecord> records;  // filled only when requested
};

struct EpisodeResult {
  std::uint64_t seed = 0;
  RunTrace trace;
  EnergyLedger ledger;
  GainReport report;
};

EpisodeResult run_episode(const RunConfig& cfg, const DeadlineTable& table,
                          std::uint64_t seed, bool record_trace = false);

struct EpisodeSummary {
  std::uint64_t seed = 0;
  TerminalStatus status = TerminalStatus::Timeout;
  double final_time_s = 0.0;
  long long periods = 0;
  double min_clearance_m = 0.0;
  long long staleness_violations = 0;
  GainReport report;
};

EpisodeSummary summarize(const EpisodeResult& r);

struct BatchResult {
  std::vector<EpisodeSummary> episodes;  // one per seed, in seed order
  long long completed = 0;
  // Mean per-model and combined gains over completed episodes; merged
  // delta_max histogram.
  GainReport aggregate;
};

// Runs cfg.seeds sequentially. Throws std::runtime_error when no episode
// completes the route (nothing to average).
BatchResult run_batch(const RunConfig& cfg, const DeadlineTable& table);

// Builds the deadline table described by the config.
DeadlineTable build_table(const RunConfig& cfg);

}  // namespace seo
