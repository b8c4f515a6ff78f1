#include "seo/scheduler.hpp"

#include <cmath>
#include <stdexcept>

namespace seo {

void validate_model(const ModelSpec& m) {
  if (m.id.empty()) throw std::invalid_argument("model id must be non-empty");
  if (!(m.period_s > 0.0))
    throw std::invalid_argument("model " + m.id + ": period must be > 0");
  if (!(m.power_w > 0.0))
    throw std::invalid_argument("model " + m.id + ": power must be > 0");
  if (!(m.latency_s >= 0.0) || m.latency_s > m.period_s)
    throw std::invalid_argument("model " + m.id +
                                ": latency must lie in [0, period]");
}

int discretize_period(double period_s, double tau_s) {
  if (!(period_s > 0.0) || !(tau_s > 0.0))
    throw std::invalid_argument("discretize_period: inputs must be > 0");
  const long long k = std::llround(period_s / tau_s);
  if (k >= 1 && std::abs(period_s - static_cast<double>(k) * tau_s) <= 1e-9)
    return static_cast<int>(k);
  return static_cast<int>(std::floor(period_s / tau_s)) + 1;
}

int discretize_deadline(double delta_s, double tau_s) {
  if (!(tau_s > 0.0))
    throw std::invalid_argument("discretize_deadline: tau must be > 0");
  if (!(delta_s > 0.0)) return 0;
  return static_cast<int>(std::floor(delta_s / tau_s + 1e-9));
}

std::string_view to_string(ScheduleDecision d) {
  switch (d) {
    case ScheduleDecision::RunFull: return "RunFull";
    case ScheduleDecision::Optimize: return "Optimize";
    case ScheduleDecision::Idle: return "Idle";
  }
  return "Idle";
}

ScheduleDecision decide(int n, int delta_i, int delta_max, ModelSubset subset) {
  if (n < 0 || delta_i < 1)
    throw std::invalid_argument("decide: n >= 0 and delta_i >= 1 required");

  const bool cadence = n % delta_i == 0;
  if (subset == ModelSubset::Critical)
    return cadence ? ScheduleDecision::RunFull : ScheduleDecision::Idle;

  if (delta_i >= delta_max)
    return cadence ? ScheduleDecision::RunFull : ScheduleDecision::Idle;

  const int deadline_slot = delta_max - delta_i;
  if (n == deadline_slot) return ScheduleDecision::RunFull;
  if (n < deadline_slot && cadence) return ScheduleDecision::Optimize;
  return ScheduleDecision::Idle;
}

ScheduleDecision decide(const ModelSpec& m, int n, int delta_max, double tau_s) {
  return decide(n, discretize_period(m.period_s, tau_s), delta_max, m.subset);
}

void load_interval(IntervalState& st, int delta_new,
                   const std::vector<ModelSpec>& models, double tau_s) {
  if (!st.new_delta) return;
  st.delta_max = std::max(0, delta_new);
  st.n = 0;
  st.new_delta = false;
  st.done.clear();
  for (const auto& m : models) {
    if (m.subset != ModelSubset::Optimizable) continue;
    const int di = discretize_period(m.period_s, tau_s);
    st.done[m.id] = di >= st.delta_max;
  }
}

void finish_period(IntervalState& st,
                   const std::vector<ModelPeriodDecision>& decisions) {
  for (const auto& d : decisions) {
    auto it = st.done.find(d.id);
    if (it == st.done.end()) continue;
    if (d.decision == ScheduleDecision::RunFull &&
        st.n == st.delta_max - d.delta_i)
      it->second = true;
  }

  bool all_done = true;
  for (const auto& [id, ok] : st.done) all_done = all_done && ok;
  if (all_done || st.n >= st.delta_max) st.new_delta = true;

  ++st.n;
}

PeriodPlan advance_interval(const IntervalState& st,
                            const std::vector<ModelSpec>& models,
                            int delta_new, double tau_s) {
  PeriodPlan plan;
  plan.next = st;
  load_interval(plan.next, delta_new, models, tau_s);
  for (const auto& m : models) {
    const int di = discretize_period(m.period_s, tau_s);
    plan.decisions.push_back(
        {m.id, di, decide(plan.next.n, di, plan.next.delta_max, m.subset)});
  }
  finish_period(plan.next, plan.decisions);
  return plan;
}

}  // namespace seo
