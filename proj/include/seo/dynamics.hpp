#pragma once

#include <cstdint>
#include <vector>

#include "seo/rng.hpp"

namespace seo {

// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

struct VehicleState {
  double pos_x = 0.0;    // m
  double pos_y = 0.0;    // m
  double heading = 0.0;  // rad, (-pi, pi]
  double speed = 0.0;    // m/s, >= 0
};

struct ControlAction {
  double steer = 0.0;     // rad
  double throttle = 0.0;  // [0, 1]
};

struct Obstacle {
  double pos_x = 0.0;
  double pos_y = 0.0;
  double safety_radius = 2.0;     // h is measured to this sphere
  double collision_radius = 1.0;  // physical extent
};

struct DynParams {
  double wheelbase = 2.5;   // m
  double steer_max = 0.6;   // rad
  double a_max = 3.0;       // m/s^2 at full throttle
  double c_drag = 0.375;    // 1/s, gives ~8 m/s cruise at full throttle
};

struct Scenario {
  double road_length = 100.0;
  double lane_center_y = 0.0;
  double lane_half_width = 2.0;         // lateral band for obstacle centers
  double obstacle_safety_radius = 2.0;
  double obstacle_collision_radius = 1.0;
  double obstacle_min_spacing = 8.0;    // pairwise center spacing
  double dt = 0.02;                     // base integration step
  std::vector<Obstacle> obstacles;
};

// Vehicle state as seen relative to one obstacle: distance to the safety
// sphere surface (negative inside), bearing relative to heading, own speed.
struct SafetyContext {
  double distance = 0.0;
  double rel_angle = 0.0;
  double speed = 0.0;
};

// One explicit-Euler step of the kinematic bicycle with speed-proportional
// drag. Throws on non-finite state or non-positive dt.
VehicleState step_dynamics(const VehicleState& s, const ControlAction& u,
                           double dt, const DynParams& p = {});

SafetyContext relative_state(const VehicleState& s, const Obstacle& o);

// True when any obstacle center is within its collision radius (closed ball).
bool check_collision(const VehicleState& s, const std::vector<Obstacle>& obs);

// Uniformly places obstacles in the final third of the road, inside the lane
// band, enforcing pairwise spacing with bounded retries. Deterministic in
// seed. Throws when the spacing constraint cannot be met.
std::vector<Obstacle> place_obstacles(int count, std::uint64_t seed,
                                      const Scenario& sc);

}  // namespace seo
