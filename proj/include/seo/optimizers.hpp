#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "seo/rng.hpp"
#include "seo/scheduler.hpp"

namespace seo {

// Wireless uplink to the edge server. Effective data rate is drawn per
// request from a Rayleigh distribution; response time is transmission plus
// server compute. fixed_response_s overrides sampling entirely (useful for
// adversarial channels in tests).
struct ChannelModel {
  double rayleigh_scale_mbps = 20.0;
  double payload_bits = 1.6e5;
  double server_compute_s = 3e-3;
  double tx_power_w = 3.3;
  std::optional<double> fixed_response_s;
  std::uint64_t seed = 0;
};

struct ChannelDraw {
  double rate_mbps = 0.0;
  double tx_time_s = 0.0;
  double response_s = 0.0;
};

// Response of one offload given an effective uplink rate.
ChannelDraw response_for_rate(const ChannelModel& ch, double rate_mbps);

ChannelDraw draw_channel(const ChannelModel& ch, Rng& rng);
double sample_response_time(const ChannelModel& ch, Rng& rng);

// Mean response time at the distribution's mean rate; used to seed the
// estimator so the first interval has a sane feasibility check.
double nominal_response_time(const ChannelModel& ch);

// EWMA of observed response times with a safety margin on top. ewma <= 0
// means uninitialized; the first observation sets it directly.
struct ResponseEstimator {
  double ewma_response_s = 0.0;
  double safety_multiplier = 1.25;
  double alpha = 0.2;

  double predicted() const { return safety_multiplier * ewma_response_s; }
};

void update_estimator(ResponseEstimator& est, double observed_s);

enum class OffloadChoice { OffloadNow, LocalOnly };

// Offloading needs at least one fallback period: if the predicted response
// does not beat the model's own cadence, run locally instead.
OffloadChoice offload_decide(const ModelSpec& model, int delta_i, int delta_max,
                             const ResponseEstimator& est, double tau_s);

struct OffloadRequest {
  std::string model_id;
  int issued_at = 0;  // period index within the interval
  double predicted_response_s = 0.0;
  double actual_response_s = 0.0;
  double tx_time_s = 0.0;
  bool resolved = false;
};

enum class OffloadOutcome { ResponseApplied, StillWaiting, FallbackLocal };

struct OffloadStepResult {
  OffloadOutcome outcome = OffloadOutcome::StillWaiting;
  double energy_mj = 0.0;
};

// Advances an in-flight request through period n of its interval. Radio
// energy is charged per period as the transmission overlaps it, truncated at
// the fallback slot (the radio is abandoned, not refunded). A response
// landing at or after the fallback slot is discarded and the local model runs
// instead, charging its full inference energy.
OffloadStepResult offload_step(OffloadRequest& req, int n, int delta_max,
                               int delta_i, const ModelSpec& model,
                               const ChannelModel& ch, double tau_s);

enum class GatingPeriod { Gated, Active };
enum class AccountingMode { ModelOnly, SensorAndModel };

// Active-period measurement energy can span the sensor's own sampling period
// (default, reproduces published per-sensor gains) or just the base period.
enum class MeasurementSpan { SensorPeriod, BasePeriod };

double gating_energy(GatingPeriod kind, const ModelSpec& model,
                     AccountingMode mode, double tau_s,
                     MeasurementSpan span = MeasurementSpan::SensorPeriod);

// Presets: "zed_camera", "navtech_radar", "velodyne_hdl32e".
SensorProfile sensor_preset(const std::string& name);

}  // namespace seo
