#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace seo {

// Power draw of the sensor feeding a model. p_meas_w is charged while the
// sensor actually measures; p_mech_w (spinning optics, antenna motors) is
// drawn every base period no matter what.
struct SensorProfile {
  std::string name;
  double p_meas_w = 0.0;
  double p_mech_w = 0.0;
};

enum class ModelSubset { Optimizable, Critical };

struct ModelSpec {
  std::string id;
  ModelSubset subset = ModelSubset::Optimizable;
  double period_s = 0.020;   // sensor-synchronized invocation period
  double latency_s = 0.017;  // local full-fidelity inference time
  double power_w = 7.0;      // power while inferring locally
  std::optional<SensorProfile> sensor;
};

// Throws std::invalid_argument if the spec is not schedulable.
void validate_model(const ModelSpec& m);

// Integer multiples of the base period tau. Periods snap down only when they
// divide tau exactly (1 ns tolerance); otherwise round up so a model is never
// scheduled faster than its sensor delivers.
int discretize_period(double period_s, double tau_s);

// Deadlines always round down (conservative). A small guard absorbs FP error
// so that e.g. 0.060 / 0.020 lands on 3, not 2.
int discretize_deadline(double delta_s, double tau_s);

enum class ScheduleDecision { RunFull, Optimize, Idle };

std::string_view to_string(ScheduleDecision d);

// Regulated schedule for one model at period index n within the current
// interval. Critical models never optimize. Optimizable models run the cheap
// substitute on their cadence during slack and the full model exactly once,
// timed to finish at the interval deadline.
ScheduleDecision decide(int n, int delta_i, int delta_max, ModelSubset subset);
ScheduleDecision decide(const ModelSpec& m, int n, int delta_max, double tau_s);

struct ModelPeriodDecision {
  std::string id;
  int delta_i = 1;
  ScheduleDecision decision = ScheduleDecision::Idle;
};

// State machine driving intervals of delta_max base periods between deadline
// measurements.
struct IntervalState {
  int n = 0;
  int delta_max = 0;
  bool new_delta = true;
  std::map<std::string, bool> done;  // optimizable models only
};

// Adopts a freshly measured deadline when new_delta is set: resets n, clears
// done flags. Models whose cadence is at least delta_max can never hit the
// deadline slot, so they are marked done immediately.
void load_interval(IntervalState& st, int delta_new,
                   const std::vector<ModelSpec>& models, double tau_s);

// Consumes one period's executed decisions: marks deadline runs done, sets
// new_delta when every model is done (or the interval is exhausted), then
// advances n. Every interval ends after at most max(delta_max, 1) periods.
void finish_period(IntervalState& st,
                   const std::vector<ModelPeriodDecision>& decisions);

struct PeriodPlan {
  IntervalState next;
  std::vector<ModelPeriodDecision> decisions;
};

// One full period of the interval state machine: load (if a new interval is
// starting), decide for every model, finish. delta_new is only consulted when
// new_delta was set.
PeriodPlan advance_interval(const IntervalState& st,
                            const std::vector<ModelSpec>& models,
                            int delta_new, double tau_s);

}  // namespace seo
