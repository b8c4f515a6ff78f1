#include "seo/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace seo {

namespace {
constexpr double kJoulesToMilli = 1000.0;
}

ChannelDraw response_for_rate(const ChannelModel& ch, double rate_mbps) {
  if (!(rate_mbps > 0.0))
    throw std::invalid_argument("response_for_rate: rate must be > 0");
  ChannelDraw d;
  d.rate_mbps = rate_mbps;
  d.tx_time_s = ch.payload_bits * 1e-6 / rate_mbps;
  d.response_s = d.tx_time_s + ch.server_compute_s;
  return d;
}

ChannelDraw draw_channel(const ChannelModel& ch, Rng& rng) {
  if (!(ch.rayleigh_scale_mbps > 0.0) || !(ch.payload_bits >= 0.0) ||
      !(ch.server_compute_s >= 0.0) || !(ch.tx_power_w > 0.0))
    throw std::invalid_argument("draw_channel: bad channel parameters");

  if (ch.fixed_response_s) {
    ChannelDraw d;
    d.response_s = *ch.fixed_response_s;
    d.tx_time_s = std::max(0.0, d.response_s - ch.server_compute_s);
    d.rate_mbps = d.tx_time_s > 0.0 ? ch.payload_bits * 1e-6 / d.tx_time_s
                                    : std::numeric_limits<double>::infinity();
    return d;
  }

  return response_for_rate(ch, rng.rayleigh(ch.rayleigh_scale_mbps));
}

double sample_response_time(const ChannelModel& ch, Rng& rng) {
  return draw_channel(ch, rng).response_s;
}

double nominal_response_time(const ChannelModel& ch) {
  const double mean_rate =
      ch.rayleigh_scale_mbps * std::sqrt(std::numbers::pi / 2.0);
  return ch.payload_bits * 1e-6 / mean_rate + ch.server_compute_s;
}

void update_estimator(ResponseEstimator& est, double observed_s) {
  if (!(observed_s > 0.0))
    throw std::invalid_argument("update_estimator: observation must be > 0");
  if (!(est.alpha > 0.0) || est.alpha > 1.0)
    throw std::invalid_argument("update_estimator: alpha must be in (0, 1]");
  if (est.ewma_response_s <= 0.0)
    est.ewma_response_s = observed_s;
  else
    est.ewma_response_s =
        est.alpha * observed_s + (1.0 - est.alpha) * est.ewma_response_s;
}

OffloadChoice offload_decide(const ModelSpec& model, int delta_i,
                             int delta_max, const ResponseEstimator& est,
                             double tau_s) {
  (void)model;
  if (delta_i >= delta_max)
    throw std::logic_error("offload_decide: requires delta_i < delta_max");
  return delta_i * tau_s <= est.predicted() ? OffloadChoice::LocalOnly
                                            : OffloadChoice::OffloadNow;
}

OffloadStepResult offload_step(OffloadRequest& req, int n, int delta_max,
                               int delta_i, const ModelSpec& model,
                               const ChannelModel& ch, double tau_s) {
  if (req.resolved) throw std::logic_error("offload_step: request resolved");

  const double t_issue = req.issued_at * tau_s;
  const double t_fallback = (delta_max - delta_i) * tau_s;
  const double t_arrival = t_issue + req.actual_response_s;
  const double w_lo = n * tau_s;
  const double w_hi = (n + 1) * tau_s;

  // Radio occupies [t_issue, t_issue + tx_time), abandoned at the fallback
  // slot if still transmitting.
  const double tx_end = std::min(t_issue + req.tx_time_s, t_fallback);
  const double overlap =
      std::max(0.0, std::min(w_hi, tx_end) - std::max(w_lo, t_issue));

  OffloadStepResult r;
  r.energy_mj = overlap * ch.tx_power_w * kJoulesToMilli;

  if (t_arrival < t_fallback && t_arrival < w_hi) {
    req.resolved = true;
    r.outcome = OffloadOutcome::ResponseApplied;
  } else if (n >= delta_max - delta_i) {
    req.resolved = true;
    r.outcome = OffloadOutcome::FallbackLocal;
    r.energy_mj += model.latency_s * model.power_w * kJoulesToMilli;
  } else {
    r.outcome = OffloadOutcome::StillWaiting;
  }
  return r;
}

double gating_energy(GatingPeriod kind, const ModelSpec& model,
                     AccountingMode mode, double tau_s, MeasurementSpan span) {
  const double run_mj = model.latency_s * model.power_w * kJoulesToMilli;
  if (mode == AccountingMode::ModelOnly)
    return kind == GatingPeriod::Active ? run_mj : 0.0;

  if (!model.sensor)
    throw std::invalid_argument("gating_energy: model " + model.id +
                                " has no sensor profile");
  const double mech_mj = tau_s * model.sensor->p_mech_w * kJoulesToMilli;
  if (kind == GatingPeriod::Gated) return mech_mj;

  const double meas_window =
      span == MeasurementSpan::SensorPeriod ? model.period_s : tau_s;
  return mech_mj + meas_window * model.sensor->p_meas_w * kJoulesToMilli +
         run_mj;
}

SensorProfile sensor_preset(const std::string& name) {
  if (name == "zed_camera") return {name, 1.9, 0.0};
  if (name == "navtech_radar") return {name, 21.6, 2.4};
  if (name == "velodyne_hdl32e") return {name, 9.6, 2.4};
  throw std::invalid_argument(
      "unknown sensor preset '" + name +
      "' (expected zed_camera, navtech_radar, velodyne_hdl32e)");
}

}  // namespace seo
