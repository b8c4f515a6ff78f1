#include "seo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace seo {

double wrap_angle(double a) {
  const double pi = std::numbers::pi;
  double w = std::fmod(a + pi, 2.0 * pi);
  if (w <= 0.0) w += 2.0 * pi;
  return w - pi;
}

static bool finite_state(const VehicleState& s) {
  return std::isfinite(s.pos_x) && std::isfinite(s.pos_y) &&
         std::isfinite(s.heading) && std::isfinite(s.speed);
}

VehicleState step_dynamics(const VehicleState& s, const ControlAction& u,
                           double dt, const DynParams& p) {
  if (!finite_state(s))
    throw std::runtime_error("step_dynamics: non-finite vehicle state");
  if (!(dt > 0.0)) throw std::invalid_argument("step_dynamics: dt must be > 0");

  const double steer = std::clamp(u.steer, -p.steer_max, p.steer_max);
  const double throttle = std::clamp(u.throttle, 0.0, 1.0);

  VehicleState n;
  n.pos_x = s.pos_x + s.speed * std::cos(s.heading) * dt;
  n.pos_y = s.pos_y + s.speed * std::sin(s.heading) * dt;
  n.heading = wrap_angle(s.heading + s.speed * std::tan(steer) / p.wheelbase * dt);
  n.speed = std::max(0.0, s.speed + (p.a_max * throttle - p.c_drag * s.speed) * dt);
  return n;
}

SafetyContext relative_state(const VehicleState& s, const Obstacle& o) {
  const double dx = o.pos_x - s.pos_x;
  const double dy = o.pos_y - s.pos_y;
  SafetyContext ctx;
  ctx.distance = std::hypot(dx, dy) - o.safety_radius;
  ctx.rel_angle = wrap_angle(std::atan2(dy, dx) - s.heading);
  ctx.speed = s.speed;
  return ctx;
}

bool check_collision(const VehicleState& s, const std::vector<Obstacle>& obs) {
  for (const auto& o : obs) {
    if (std::hypot(o.pos_x - s.pos_x, o.pos_y - s.pos_y) <= o.collision_radius)
      return true;
  }
  return false;
}

std::vector<Obstacle> place_obstacles(int count, std::uint64_t seed,
                                      const Scenario& sc) {
  if (count < 0) throw std::invalid_argument("place_obstacles: count < 0");
  std::vector<Obstacle> out;
  if (count == 0) return out;

  Rng rng(seed);
  const double x_lo = sc.road_length * (2.0 / 3.0);
  const double x_hi = sc.road_length;
  const double y_lo = sc.lane_center_y - sc.lane_half_width;
  const double y_hi = sc.lane_center_y + sc.lane_half_width;

  // A bad prefix can leave no room for the remaining points, so on a stuck
  // point the whole configuration is redrawn rather than kept.
  for (int restart = 0; restart < 200; ++restart) {
    out.clear();
    while (static_cast<int>(out.size()) < count) {
      bool placed = false;
      for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
        Obstacle o;
        o.pos_x = rng.uniform(x_lo, x_hi);
        o.pos_y = rng.uniform(y_lo, y_hi);
        o.safety_radius = sc.obstacle_safety_radius;
        o.collision_radius = sc.obstacle_collision_radius;
        bool ok = true;
        for (const auto& q : out) {
          if (std::hypot(q.pos_x - o.pos_x, q.pos_y - o.pos_y) <
              sc.obstacle_min_spacing) {
            ok = false;
            break;
          }
        }
        if (ok) {
          out.push_back(o);
          placed = true;
        }
      }
      if (!placed) break;
    }
    if (static_cast<int>(out.size()) == count) return out;
  }
  throw std::runtime_error(
      "place_obstacles: cannot satisfy min spacing; reduce count or spacing");
}

}  // namespace seo
