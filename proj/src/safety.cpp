#include "seo/safety.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace seo {

SafetyVerdict evaluate_h(const SafetyContext& ctx, const BarrierParams& bp) {
  const double closing = std::max(0.0, std::cos(ctx.rel_angle));
  const double margin = bp.d_min + bp.k_v * ctx.speed * closing;
  SafetyVerdict v;
  v.h_value = ctx.distance - margin;
  v.s_flag = v.h_value >= 0.0;
  return v;
}

SafetyContext sense_context(const VehicleState& s,
                            const std::vector<Obstacle>& obs,
                            const BarrierParams& bp, double sensing_horizon) {
  SafetyContext worst{sensing_horizon, 0.0, s.speed};
  double worst_h = std::numeric_limits<double>::infinity();
  for (const auto& o : obs) {
    SafetyContext c = relative_state(s, o);
    if (c.distance > sensing_horizon) continue;
    const double h = evaluate_h(c, bp).h_value;
    if (h < worst_h) {
      worst_h = h;
      worst = c;
    }
  }
  return worst;
}

std::pair<VehicleState, Obstacle> canonical_pose(const SafetyContext& ctx,
                                                 double canonical_radius) {
  VehicleState s;
  s.speed = ctx.speed;
  const double center = std::max(1e-6, ctx.distance + canonical_radius);
  Obstacle o;
  o.pos_x = center * std::cos(ctx.rel_angle);
  o.pos_y = center * std::sin(ctx.rel_angle);
  o.safety_radius = canonical_radius;
  o.collision_radius = 0.5 * canonical_radius;
  return {s, o};
}

// h after holding u for the filter's lookahead window, integrated on the
// canonical reconstruction of ctx.
static double predict_h(const SafetyContext& ctx, const ControlAction& u,
                        const FilterParams& fp, const BarrierParams& bp,
                        const DynParams& dp) {
  auto [veh, obs] = canonical_pose(ctx, fp.canonical_radius);
  const int substeps = 8;
  const double dt = fp.lookahead / substeps;
  for (int i = 0; i < substeps; ++i) veh = step_dynamics(veh, u, dt, dp);
  return evaluate_h(relative_state(veh, obs), bp).h_value;
}

ControlAction filter_control(const SafetyContext& ctx, const ControlAction& u,
                             const FilterParams& fp, const BarrierParams& bp,
                             const DynParams& dp) {
  if (!(fp.lookahead > 0.0))
    throw std::invalid_argument("filter_control: lookahead must be > 0");

  const SafetyVerdict now = evaluate_h(ctx, bp);
  if (now.s_flag && predict_h(ctx, u, fp, bp, dp) >= 0.0) return u;

  const int nc = std::max(2, fp.steer_candidates);
  double best_h = -std::numeric_limits<double>::infinity();
  double best_steer = 0.0;
  for (int k = 0; k < nc; ++k) {
    const double steer =
        -fp.steer_max + 2.0 * fp.steer_max * static_cast<double>(k) / (nc - 1);
    const double h = predict_h(ctx, {steer, u.throttle}, fp, bp, dp);
    if (h > best_h || (h == best_h && steer > best_steer)) {
      best_h = h;
      best_steer = steer;
    }
  }

  ControlAction out{best_steer, u.throttle};
  if (fp.brake_on_unsafe && best_h < 0.0) out.throttle = 0.0;
  return out;
}

double time_to_unsafe(const VehicleState& s, const std::vector<Obstacle>& obs,
                      const ControlAction& u, double horizon, double sub_dt,
                      const BarrierParams& bp, const DynParams& dp) {
  if (!(sub_dt > 0.0)) throw std::invalid_argument("time_to_unsafe: sub_dt <= 0");
  if (!(horizon >= 0.0)) throw std::invalid_argument("time_to_unsafe: horizon < 0");

  const double inf = std::numeric_limits<double>::infinity();
  if (!evaluate_h(sense_context(s, obs, bp, inf), bp).s_flag) return 0.0;

  VehicleState state = s;
  const int steps = static_cast<int>(std::floor(horizon / sub_dt + 1e-9));
  for (int k = 1; k <= steps; ++k) {
    state = step_dynamics(state, u, sub_dt, dp);
    if (!evaluate_h(sense_context(state, obs, bp, inf), bp).s_flag)
      return (k - 1) * sub_dt;
  }
  return horizon;
}

static std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

static std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v = linspace(std::log(lo), std::log(hi), n);
  for (double& x : v) x = std::exp(x);
  return v;
}

// Steady-speed throttle: the canonical realization of a (distance, angle,
// speed, steer) tuple holds speed while the table's horizon elapses.
static double cruise_throttle(double speed, const DynParams& dp) {
  return std::clamp(dp.c_drag * speed / dp.a_max, 0.0, 1.0);
}

static std::size_t cell_count(const DeadlineTable& t) {
  return (t.distance_axis.size() - 1) * (t.angle_axis.size() - 1) *
         (t.speed_axis.size() - 1) * (t.steer_axis.size() - 1);
}

DeadlineTable build_deadline_table(const TableGridSpec& grid, double horizon,
                                   double sub_dt, const BarrierParams& bp,
                                   const DynParams& dp) {
  if (grid.distance_bins < 2 || grid.angle_bins < 2 || grid.speed_bins < 2 ||
      grid.steer_bins < 2)
    throw std::invalid_argument("build_deadline_table: axes need >= 2 points");
  if (!(grid.distance_min > 0.0 && grid.distance_max > grid.distance_min))
    throw std::invalid_argument("build_deadline_table: bad distance range");

  DeadlineTable t;
  t.distance_axis = logspace(grid.distance_min, grid.distance_max, grid.distance_bins);
  t.angle_axis = linspace(-std::numbers::pi, std::numbers::pi, grid.angle_bins);
  t.speed_axis = linspace(0.0, grid.speed_max, grid.speed_bins);
  t.steer_axis = linspace(-grid.steer_max, grid.steer_max, grid.steer_bins);
  t.horizon_cap = horizon;
  t.sub_dt = sub_dt;
  t.barrier = bp;
  t.dyn = dp;

  const std::size_t nd = t.distance_axis.size(), na = t.angle_axis.size();
  const std::size_t nv = t.speed_axis.size(), ns = t.steer_axis.size();

  // Point evaluations first, then each cell takes the min over its corners.
  std::vector<double> point(nd * na * nv * ns);
  auto pidx = [&](std::size_t d, std::size_t a, std::size_t v, std::size_t s) {
    return ((d * na + a) * nv + v) * ns + s;
  };
  for (std::size_t d = 0; d < nd; ++d)
    for (std::size_t a = 0; a < na; ++a)
      for (std::size_t v = 0; v < nv; ++v) {
        SafetyContext ctx{t.distance_axis[d], t.angle_axis[a], t.speed_axis[v]};
        auto [veh, obs] = canonical_pose(ctx, t.canonical_radius);
        const double thr = cruise_throttle(ctx.speed, dp);
        for (std::size_t s = 0; s < ns; ++s) {
          point[pidx(d, a, v, s)] =
              time_to_unsafe(veh, {obs}, {t.steer_axis[s], thr}, horizon,
                             sub_dt, bp, dp);
        }
      }

  t.values.resize(cell_count(t));
  std::size_t i = 0;
  for (std::size_t d = 0; d + 1 < nd; ++d)
    for (std::size_t a = 0; a + 1 < na; ++a)
      for (std::size_t v = 0; v + 1 < nv; ++v)
        for (std::size_t s = 0; s + 1 < ns; ++s) {
          double m = std::numeric_limits<double>::infinity();
          for (int c = 0; c < 16; ++c) {
            m = std::min(m, point[pidx(d + (c & 1), a + ((c >> 1) & 1),
                                       v + ((c >> 2) & 1), s + ((c >> 3) & 1))]);
          }
          t.values[i++] = m;
        }
  return t;
}

// Index of the cell containing x, clamped to the edge cells.
static std::size_t cell_index(const std::vector<double>& axis, double x) {
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  const std::ptrdiff_t i = (it - axis.begin()) - 1;
  return static_cast<std::size_t>(
      std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(axis.size()) - 2));
}

double sample_deadline(const DeadlineTable& t, const SafetyContext& ctx,
                       const ControlAction& u) {
  if (t.values.size() != cell_count(t))
    throw std::runtime_error("sample_deadline: malformed table");
  if (ctx.distance < t.distance_axis.front()) return 0.0;

  const std::size_t d = cell_index(t.distance_axis, ctx.distance);
  const std::size_t a = cell_index(t.angle_axis, wrap_angle(ctx.rel_angle));
  const std::size_t v = cell_index(t.speed_axis, ctx.speed);
  const std::size_t s = cell_index(t.steer_axis, u.steer);

  const std::size_t na = t.angle_axis.size() - 1;
  const std::size_t nv = t.speed_axis.size() - 1;
  const std::size_t ns = t.steer_axis.size() - 1;
  return t.values[((d * na + a) * nv + v) * ns + s];
}

static constexpr int kTableFormatVersion = 1;

void save_deadline_table(const DeadlineTable& t, const std::string& path) {
  nlohmann::json j;
  j["format"] = "deadline-table";
  j["version"] = kTableFormatVersion;
  j["horizon_cap_s"] = t.horizon_cap;
  j["sub_dt_s"] = t.sub_dt;
  j["canonical_radius_m"] = t.canonical_radius;
  j["barrier"] = {{"d_min_m", t.barrier.d_min}, {"k_v_s", t.barrier.k_v}};
  j["dynamics"] = {{"wheelbase_m", t.dyn.wheelbase},
                   {"steer_max_rad", t.dyn.steer_max},
                   {"a_max_mps2", t.dyn.a_max},
                   {"c_drag_per_s", t.dyn.c_drag}};
  j["axes"] = {{"distance_m", t.distance_axis},
               {"rel_angle_rad", t.angle_axis},
               {"speed_mps", t.speed_axis},
               {"steer_rad", t.steer_axis}};
  j["cells_row_major"] = t.values;

  std::ofstream f(path);
  if (!f) throw std::runtime_error("save_deadline_table: cannot open " + path);
  f << j.dump(2) << "\n";
}

DeadlineTable load_deadline_table(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("load_deadline_table: cannot open " + path);
  nlohmann::json j;
  f >> j;

  if (j.value("format", "") != "deadline-table")
    throw std::runtime_error("load_deadline_table: not a deadline table file");
  if (j.value("version", -1) != kTableFormatVersion)
    throw std::runtime_error("load_deadline_table: unsupported version");

  DeadlineTable t;
  t.horizon_cap = j.at("horizon_cap_s").get<double>();
  t.sub_dt = j.at("sub_dt_s").get<double>();
  t.canonical_radius = j.at("canonical_radius_m").get<double>();
  t.barrier.d_min = j.at("barrier").at("d_min_m").get<double>();
  t.barrier.k_v = j.at("barrier").at("k_v_s").get<double>();
  const auto& dyn = j.at("dynamics");
  t.dyn.wheelbase = dyn.at("wheelbase_m").get<double>();
  t.dyn.steer_max = dyn.at("steer_max_rad").get<double>();
  t.dyn.a_max = dyn.at("a_max_mps2").get<double>();
  t.dyn.c_drag = dyn.at("c_drag_per_s").get<double>();
  const auto& ax = j.at("axes");
  t.distance_axis = ax.at("distance_m").get<std::vector<double>>();
  t.angle_axis = ax.at("rel_angle_rad").get<std::vector<double>>();
  t.speed_axis = ax.at("speed_mps").get<std::vector<double>>();
  t.steer_axis = ax.at("steer_rad").get<std::vector<double>>();
  t.values = j.at("cells_row_major").get<std::vector<double>>();

  if (t.distance_axis.size() < 2 || t.angle_axis.size() < 2 ||
      t.speed_axis.size() < 2 || t.steer_axis.size() < 2 ||
      t.values.size() != cell_count(t))
    throw std::runtime_error("load_deadline_table: inconsistent axes/cells");
  return t;
}

}  // namespace seo
