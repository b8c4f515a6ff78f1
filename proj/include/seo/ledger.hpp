#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "seo/optimizers.hpp"
#include "seo/scheduler.hpp"

namespace seo {

struct EnergyEntry {
  long long global_period = 0;
  std::string model_id;
  ScheduleDecision decision = ScheduleDecision::Idle;
  double energy_mj = 0.0;
  int delta_max = 0;  // deadline in force during this period
};

struct IntervalRecord {
  long long start_period = 0;
  int delta_max = 0;
};

// Append-only per-period energy bookkeeping for one episode. Exactly one
// entry per (model, global period).
class EnergyLedger {
 public:
  explicit EnergyLedger(double tau_s);

  void record(EnergyEntry e);
  void record_interval(IntervalRecord r);

  const std::vector<EnergyEntry>& entries() const { return entries_; }
  const std::vector<IntervalRecord>& intervals() const { return intervals_; }
  double tau() const { return tau_s_; }

  // Number of base periods covered (highest recorded period + 1).
  long long period_count() const { return period_count_; }
  double total_mj(const std::string& model_id) const;

 private:
  double tau_s_;
  std::vector<EnergyEntry> entries_;
  std::vector<IntervalRecord> intervals_;
  std::set<std::pair<long long, std::string>> seen_;
  long long period_count_ = 0;
};

// Energy of never-optimized execution over the same window: the model runs
// at its natural cadence every time, and in sensor accounting the sensor
// measures every cycle while mechanical power is drawn every base period.
double baseline_energy(const ModelSpec& model, long long periods,
                       AccountingMode mode, double tau_s,
                       MeasurementSpan span = MeasurementSpan::SensorPeriod);

struct ModelGain {
  std::string id;
  double baseline_mj = 0.0;
  double optimized_mj = 0.0;
  double gain = 0.0;  // 1 - optimized / baseline
};

struct GainReport {
  std::vector<ModelGain> per_model;  // optimizable models only
  double combined_gain = 0.0;        // arithmetic mean over per_model
  std::map<int, long long> delta_histogram;
  double mean_delta_max = 0.0;
  long long interval_count = 0;
};

GainReport compute_gains(const EnergyLedger& ledger,
                         const std::vector<ModelSpec>& models,
                         AccountingMode mode,
                         MeasurementSpan span = MeasurementSpan::SensorPeriod);

void write_trace_csv(const EnergyLedger& ledger, const std::string& path);

nlohmann::json gain_report_json(const GainReport& report);

}  // namespace seo
