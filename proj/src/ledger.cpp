#include "seo/ledger.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace seo {

namespace {
constexpr double kJoulesToMilli = 1000.0;
}

EnergyLedger::EnergyLedger(double tau_s) : tau_s_(tau_s) {
  if (!(tau_s > 0.0))
    throw std::invalid_argument("EnergyLedger: tau must be > 0");
}

void EnergyLedger::record(EnergyEntry e) {
  if (e.global_period < 0)
    throw std::invalid_argument("EnergyLedger: negative period");
  if (!(e.energy_mj >= 0.0))
    throw std::invalid_argument("EnergyLedger: negative energy for " +
                                e.model_id);
  if (!seen_.emplace(e.global_period, e.model_id).second)
    throw std::invalid_argument("EnergyLedger: duplicate entry for " +
                                e.model_id + " at period " +
                                std::to_string(e.global_period));
  period_count_ = std::max(period_count_, e.global_period + 1);
  entries_.push_back(std::move(e));
}

void EnergyLedger::record_interval(IntervalRecord r) {
  if (r.start_period < 0 || r.delta_max < 0)
    throw std::invalid_argument("EnergyLedger: bad interval record");
  intervals_.push_back(r);
}

double EnergyLedger::total_mj(const std::string& model_id) const {
  double sum = 0.0;
  for (const auto& e : entries_)
    if (e.model_id == model_id) sum += e.energy_mj;
  return sum;
}

double baseline_energy(const ModelSpec& model, long long periods,
                       AccountingMode mode, double tau_s,
                       MeasurementSpan span) {
  if (periods < 0) throw std::invalid_argument("baseline_energy: periods < 0");
  const int di = discretize_period(model.period_s, tau_s);
  const double activations = static_cast<double>(periods / di);
  const double run_mj = model.latency_s * model.power_w * kJoulesToMilli;

  if (mode == AccountingMode::ModelOnly) return activations * run_mj;

  if (!model.sensor)
    throw std::invalid_argument("baseline_energy: model " + model.id +
                                " has no sensor profile");
  const double meas_window =
      span == MeasurementSpan::SensorPeriod ? model.period_s : tau_s;
  const double meas_mj =
      meas_window * model.sensor->p_meas_w * kJoulesToMilli;
  const double mech_mj = tau_s * model.sensor->p_mech_w * kJoulesToMilli;
  return static_cast<double>(periods) * mech_mj +
         activations * (meas_mj + run_mj);
}

GainReport compute_gains(const EnergyLedger& ledger,
                         const std::vector<ModelSpec>& models,
                         AccountingMode mode, MeasurementSpan span) {
  GainReport rep;
  double gain_sum = 0.0;
  for (const auto& m : models) {
    if (m.subset != ModelSubset::Optimizable) continue;
    ModelGain g;
    g.id = m.id;
    g.optimized_mj = ledger.total_mj(m.id);
    g.baseline_mj =
        baseline_energy(m, ledger.period_count(), mode, ledger.tau(), span);
    if (!(g.baseline_mj > 0.0))
      throw std::runtime_error("compute_gains: zero baseline for " + m.id);
    g.gain = 1.0 - g.optimized_mj / g.baseline_mj;
    gain_sum += g.gain;
    rep.per_model.push_back(std::move(g));
  }
  if (!rep.per_model.empty())
    rep.combined_gain = gain_sum / static_cast<double>(rep.per_model.size());

  double delta_sum = 0.0;
  for (const auto& iv : ledger.intervals()) {
    ++rep.delta_histogram[iv.delta_max];
    delta_sum += iv.delta_max;
  }
  rep.interval_count = static_cast<long long>(ledger.intervals().size());
  if (rep.interval_count > 0)
    rep.mean_delta_max = delta_sum / static_cast<double>(rep.interval_count);
  return rep;
}

void write_trace_csv(const EnergyLedger& ledger, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
  f << "global_period,time_s,model,decision,energy_mJ,delta_max\n";
  char row[256];
  for (const auto& e : ledger.entries()) {
    std::snprintf(row, sizeof(row), "%lld,%.6f,%s,%s,%.9g,%d\n",
                  e.global_period, e.global_period * ledger.tau(),
                  e.model_id.c_str(), std::string(to_string(e.decision)).c_str(),
                  e.energy_mj, e.delta_max);
    f << row;
  }
}

nlohmann::json gain_report_json(const GainReport& report) {
  nlohmann::json j;
  j["per_model"] = nlohmann::json::array();
  for (const auto& g : report.per_model) {
    j["per_model"].push_back({{"model", g.id},
                              {"baseline_mJ", g.baseline_mj},
                              {"optimized_mJ", g.optimized_mj},
                              {"gain", g.gain}});
  }
  j["combined_gain"] = report.combined_gain;
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [delta, count] : report.delta_histogram)
    hist[std::to_string(delta)] = count;
  j["delta_max_histogram"] = hist;
  j["mean_delta_max"] = report.mean_delta_max;
  j["interval_count"] = report.interval_count;
  return j;
}

}  // namespace seo
