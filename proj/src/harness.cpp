#include "seo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "seo/optimizers.hpp"
#include "seo/rng.hpp"

namespace seo {

namespace {
constexpr double kJoulesToMilli = 1000.0;
}

void PredictionStore::stamp(const std::string& id, long long available_at) {
  auto [it, inserted] = available_at_.emplace(id, available_at);
  if (!inserted) it->second = std::max(it->second, available_at);
}

long long PredictionStore::age_at(const std::string& id,
                                  long long period) const {
  return period - available_at_.at(id);
}

ControllerTerms controller_terms(const VehicleState& s,
                                 const std::vector<Obstacle>& obstacles,
                                 const Scenario& sc, const ControllerGains& g,
                                 const DynParams& dp, double target_speed) {
  ControllerTerms t;
  t.lane_steer = g.lane_gain * (sc.lane_center_y - s.pos_y) -
                 g.heading_gain * s.heading;

  // Repulsion from obstacles ahead, steering away from each bearing; a
  // dead-ahead obstacle is treated as left so the push breaks right.
  for (const auto& o : obstacles) {
    const SafetyContext rel = relative_state(s, o);
    const double ahead = std::max(0.0, std::cos(rel.rel_angle));
    if (ahead <= 0.0) continue;
    const double strength =
        g.avoid_gain * ahead *
        std::exp(-std::max(0.0, rel.distance) / g.avoid_falloff_m);
    t.avoid_steer += rel.rel_angle >= 0.0 ? -strength : strength;
  }
  t.avoid_steer = std::clamp(t.avoid_steer, -dp.steer_max, dp.steer_max);

  const double cruise =
      std::clamp(dp.c_drag * target_speed / dp.a_max, 0.0, 1.0);
  t.throttle =
      std::clamp(cruise + g.throttle_gain * (target_speed - s.speed), 0.0, 1.0);
  return t;
}

ControlAction stand_in_controller(const VehicleState& s,
                                  const std::vector<Obstacle>& obstacles,
                                  const Scenario& sc, const ControllerGains& g,
                                  const DynParams& dp, double target_speed) {
  const ControllerTerms t =
      controller_terms(s, obstacles, sc, g, dp, target_speed);
  return {std::clamp(t.lane_steer + t.avoid_steer, -dp.steer_max, dp.steer_max),
          t.throttle};
}

std::string_view to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::Completed: return "Completed";
    case TerminalStatus::Collided: return "Collided";
    case TerminalStatus::Timeout: return "Timeout";
  }
  return "Timeout";
}

DeadlineTable build_table(const RunConfig& cfg) {
  return build_deadline_table(cfg.table_grid, cfg.table_horizon_s,
                              cfg.table_sub_dt_s, cfg.barrier, cfg.dynamics);
}

namespace {

double min_center_distance(const VehicleState& s,
                           const std::vector<Obstacle>& obs) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& o : obs)
    m = std::min(m, std::hypot(o.pos_x - s.pos_x, o.pos_y - s.pos_y));
  return m;
}

struct OffloadSlot {
  OffloadRequest req;
  bool active = false;       // a request exists for the current interval
  bool applied = false;      // its response was applied this interval
  bool attempted = false;    // a request was issued this interval
};

}  // namespace

EpisodeResult run_episode(const RunConfig& cfg, const DeadlineTable& table,
                          std::uint64_t seed, bool record_trace) {
  Scenario sc = cfg.scenario;
  sc.dt = cfg.tau_s;

  Rng root(seed);
  const std::uint64_t obstacle_seed = root.next_u64();
  Rng channel_rng = root.fork(cfg.channel.seed + 1);
  sc.obstacles = place_obstacles(cfg.obstacle_count, obstacle_seed, sc);

  VehicleState state;
  state.pos_y = sc.lane_center_y;
  state.speed = cfg.target_speed_mps;

  ResponseEstimator est = cfg.estimator;
  if (est.ewma_response_s <= 0.0)
    est.ewma_response_s = nominal_response_time(cfg.channel);

  const AccountingMode acct = accounting_for(cfg.mode);
  const double tau = cfg.tau_s;
  const long long max_periods =
      std::max<long long>(1, std::llround(cfg.episode_cap_s / tau));

  EpisodeResult result{seed, {}, EnergyLedger(tau), {}};
  RunTrace& trace = result.trace;
  EnergyLedger& ledger = result.ledger;

  IntervalState ist;
  PredictionStore store;
  std::map<std::string, OffloadSlot> slots;
  std::map<std::string, int> cadence;  // delta_i per model
  for (const auto& m : cfg.models) {
    cadence[m.id] = discretize_period(m.period_s, tau);
    if (m.subset == ModelSubset::Optimizable) {
      store.stamp(m.id, 0);  // warm start: outputs assumed fresh at t = 0
      slots[m.id] = {};
    }
  }

  trace.min_clearance_m = min_center_distance(state, sc.obstacles);
  trace.status = TerminalStatus::Timeout;

  for (long long g = 0; g < max_periods; ++g) {
    const SafetyContext ctx =
        sense_context(state, sc.obstacles, cfg.barrier, cfg.sensing_horizon_m);
    const ControlAction u_raw = stand_in_controller(
        state, sc.obstacles, sc, cfg.controller, cfg.dynamics,
        cfg.target_speed_mps);
    const ControlAction u =
        cfg.filtered
            ? filter_control(ctx, u_raw, cfg.filter, cfg.barrier, cfg.dynamics)
            : u_raw;

    const bool boundary = ist.new_delta;
    int delta_new = ist.delta_max;
    if (boundary) {
      if (g > 0) {
        for (const auto& [id, slot] : slots)
          if (store.age_at(id, g) > ist.delta_max) ++trace.staleness_violations;
      }
      delta_new =
          discretize_deadline(sample_deadline(table, ctx, u), tau);
      for (auto& [id, slot] : slots) slot = {};
    }

    const PeriodPlan plan = advance_interval(ist, cfg.models, delta_new, tau);
    const int delta_max = plan.next.delta_max;
    const int n = plan.next.n - 1;  // period index within the interval
    if (boundary) ledger.record_interval({g, delta_max});

    for (std::size_t i = 0; i < cfg.models.size(); ++i) {
      const ModelSpec& m = cfg.models[i];
      const ScheduleDecision d = plan.decisions[i].decision;
      const int di = cadence[m.id];
      const double run_mj = m.latency_s * m.power_w * kJoulesToMilli;
      double energy = 0.0;

      if (m.subset == ModelSubset::Critical) {
        if (d == ScheduleDecision::RunFull) energy = run_mj;
      } else if (cfg.mode == OptimizeMode::Offload) {
        OffloadSlot& slot = slots[m.id];
        if (d == ScheduleDecision::Optimize && !slot.active &&
            !slot.attempted &&
            offload_decide(m, di, delta_max, est, tau) ==
                OffloadChoice::OffloadNow) {
          const ChannelDraw draw = draw_channel(cfg.channel, channel_rng);
          slot.req = {m.id, n, est.predicted(), draw.response_s,
                      draw.tx_time_s, false};
          slot.active = true;
          slot.attempted = true;
        }
        if (slot.active && !slot.req.resolved) {
          const OffloadStepResult sr =
              offload_step(slot.req, n, delta_max, di, m, cfg.channel, tau);
          energy += sr.energy_mj;
          if (sr.outcome == OffloadOutcome::ResponseApplied) {
            slot.applied = true;
            store.stamp(m.id, g + 1);
            update_estimator(est, slot.req.actual_response_s);
          } else if (sr.outcome == OffloadOutcome::FallbackLocal) {
            store.stamp(m.id, g + di);
            const double waited = (delta_max - di - slot.req.issued_at) * tau;
            if (waited > 0.0) update_estimator(est, waited);
          }
        }
        if (d == ScheduleDecision::RunFull && !slot.active) {
          energy += run_mj;  // no offload this interval: run locally
          store.stamp(m.id, g + di);
        }
      } else {
        // Idle periods charge like gated ones: mechanical power is drawn
        // even when the sensor has no fresh sample.
        const GatingPeriod kind = d == ScheduleDecision::RunFull
                                      ? GatingPeriod::Active
                                      : GatingPeriod::Gated;
        energy = gating_energy(kind, m, acct, tau, cfg.measurement_span);
        if (d == ScheduleDecision::RunFull) store.stamp(m.id, g + di);
      }

      ledger.record({g, m.id, d, energy, delta_max});
    }
    ist = plan.next;

    if (record_trace) {
      const double h = evaluate_h(ctx, cfg.barrier).h_value;
      trace.records.push_back(
          {g, state, u_raw, u, ctx, h, delta_max, plan.decisions});
    }

    state = step_dynamics(state, u, tau, cfg.dynamics);
    trace.min_clearance_m =
        std::min(trace.min_clearance_m, min_center_distance(state, sc.obstacles));
    trace.periods = g + 1;
    trace.final_time_s = (g + 1) * tau;

    if (check_collision(state, sc.obstacles)) {
      trace.status = TerminalStatus::Collided;
      break;
    }
    if (state.pos_x >= sc.road_length) {
      trace.status = TerminalStatus::Completed;
      break;
    }
  }

  long long max_cadence = 1;
  for (const auto& [id, di] : cadence) max_cadence = std::max<long long>(max_cadence, di);
  if (ledger.period_count() >= max_cadence)
    result.report =
        compute_gains(ledger, cfg.models, acct, cfg.measurement_span);
  return result;
}

EpisodeSummary summarize(const EpisodeResult& r) {
  return {r.seed,
          r.trace.status,
          r.trace.final_time_s,
          r.trace.periods,
          r.trace.min_clearance_m,
          r.trace.staleness_violations,
          r.report};
}

BatchResult run_batch(const RunConfig& cfg, const DeadlineTable& table) {
  BatchResult batch;
  std::map<std::string, double> gain_sums;
  std::map<std::string, std::pair<double, double>> energy_sums;
  double combined_sum = 0.0;
  double delta_sum = 0.0;

  for (const auto seed : cfg.seeds) {
    const EpisodeResult r = run_episode(cfg, table, seed);
    batch.episodes.push_back(summarize(r));
    if (r.trace.status != TerminalStatus::Completed) continue;

    ++batch.completed;
    combined_sum += r.report.combined_gain;
    for (const auto& g : r.report.per_model) {
      gain_sums[g.id] += g.gain;
      energy_sums[g.id].first += g.baseline_mj;
      energy_sums[g.id].second += g.optimized_mj;
    }
    for (const auto& [delta, count] : r.report.delta_histogram) {
      batch.aggregate.delta_histogram[delta] += count;
      delta_sum += static_cast<double>(delta) * static_cast<double>(count);
      batch.aggregate.interval_count += count;
    }
  }

  if (batch.completed == 0)
    throw std::runtime_error("run_batch: no episode completed the route");

  for (const auto& [id, sum] : gain_sums) {
    ModelGain g;
    g.id = id;
    g.baseline_mj = energy_sums[id].first / batch.completed;
    g.optimized_mj = energy_sums[id].second / batch.completed;
    g.gain = sum / batch.completed;
    batch.aggregate.per_model.push_back(std::move(g));
  }
  batch.aggregate.combined_gain = combined_sum / batch.completed;
  if (batch.aggregate.interval_count > 0)
    batch.aggregate.mean_delta_max =
        delta_sum / static_cast<double>(batch.aggregate.interval_count);
  return batch;
}

}  // namespace seo
