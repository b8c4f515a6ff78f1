#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seo/dynamics.hpp"

namespace seo {

// h(x, u) = distance - (d_min + k_v * speed * max(0, cos(rel_angle))).
// The closing-speed term only penalizes motion toward the obstacle.
struct BarrierParams {
  double d_min = 2.0;  // m
  double k_v = 0.4;    // s
};

struct SafetyVerdict {
  double h_value = 0.0;
  bool s_flag = true;  // h >= 0
};

SafetyVerdict evaluate_h(const SafetyContext& ctx, const BarrierParams& bp = {});

// Context of the most endangered obstacle (minimum h) within the sensing
// horizon. With nothing in range, distance is the horizon sentinel.
SafetyContext sense_context(const VehicleState& s,
                            const std::vector<Obstacle>& obs,
                            const BarrierParams& bp = {},
                            double sensing_horizon = 60.0);

// Rebuild a concrete vehicle/obstacle pair realizing a context: vehicle at
// the origin heading +x, obstacle center at the context bearing. Shared by
// the filter prediction, the deadline table builder and its audit.
std::pair<VehicleState, Obstacle> canonical_pose(const SafetyContext& ctx,
                                                 double canonical_radius = 2.0);

struct FilterParams {
  double steer_max = 0.6;
  bool brake_on_unsafe = true;
  double lookahead = 0.2;         // s, prediction window for the filter
  int steer_candidates = 21;
  double canonical_radius = 2.0;  // m, virtual obstacle used for prediction
};

// Safety filter: passes u through when the current context is safe and u's
// predicted h stays nonnegative; otherwise substitutes the steer maximizing
// predicted h (ties toward positive steer), zeroing throttle when every
// candidate is predicted unsafe and brake_on_unsafe is set.
ControlAction filter_control(const SafetyContext& ctx, const ControlAction& u,
                             const FilterParams& fp, const BarrierParams& bp = {},
                             const DynParams& dp = {});

// Forward-integrates the dynamics under held u with step sub_dt and returns
// the last time known safe before h first goes negative (0 when already
// unsafe, horizon when never unsafe). Conservative: quantized down.
double time_to_unsafe(const VehicleState& s, const std::vector<Obstacle>& obs,
                      const ControlAction& u, double horizon, double sub_dt,
                      const BarrierParams& bp = {}, const DynParams& dp = {});

struct TableGridSpec {
  int distance_bins = 25;       // log-spaced axis points
  double distance_min = 0.5;
  double distance_max = 60.0;
  int angle_bins = 17;          // uniform over [-pi, pi]
  int speed_bins = 9;
  double speed_max = 12.0;
  int steer_bins = 7;
  double steer_max = 0.6;
};

// Precomputed safe-time lookup over (distance, rel_angle, speed, steer).
// Axes hold grid points; values hold one entry per cell (row-major), each the
// minimum of time_to_unsafe over the cell's corners.
struct DeadlineTable {
  std::vector<double> distance_axis;
  std::vector<double> angle_axis;
  std::vector<double> speed_axis;
  std::vector<double> steer_axis;
  std::vector<double> values;
  double horizon_cap = 0.08;
  double sub_dt = 0.002;
  double canonical_radius = 2.0;
  BarrierParams barrier;
  DynParams dyn;
};

DeadlineTable build_deadline_table(const TableGridSpec& grid, double horizon,
                                   double sub_dt, const BarrierParams& bp = {},
                                   const DynParams& dp = {});

// Cell lookup with edge clamping on the speed/steer axes and angle wrapping.
// A distance below the grid minimum returns 0 s (already too close to trust).
double sample_deadline(const DeadlineTable& t, const SafetyContext& ctx,
                       const ControlAction& u);

// Versioned JSON serialization (axes + row-major cells + build parameters).
void save_deadline_table(const DeadlineTable& t, const std::string& path);
DeadlineTable load_deadline_table(const std::string& path);

}  // namespace seo
