/// @file   rampmerge/dynamics.hpp
/// @brief  Longitudinal vehicle models: the consensus law for CAVs, Krauss car-following for
///         legacy vehicles, free-flow speed tracking and the kinematic update.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "rampmerge/scenario.hpp"
#include "rampmerge/types.hpp"

namespace rampmerge {

/// Longitudinal snapshot of one vehicle in some frame shared with whoever reads it.
struct Kinematics {
  double position = 0.0;  // front bumper
  double speed = 0.0;
  double accel = 0.0;
  double length = 5.0;

  static Kinematics of(const VehicleState& s) { return {s.position, s.speed, s.accel, s.length}; }
};

struct AccelBounds {
  double min = -5.0;
  double max = 3.0;

  double clamp(double a) const { return std::clamp(a, min, max); }
  static AccelBounds of(const ScenarioConfig& c) { return {c.accel_min(), c.accel_max()}; }
};

class DynamicsError : public std::runtime_error {
 public:
  enum class Kind { MissingTarget, NegativeGap };
  DynamicsError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Consensus reference acceleration before clamping:
///   -a_ij k_ij [ (r_i - r_j(t-tau) + l_j + v_i (t_g + tau)) + gamma_i (v_i - v_j(t-tau)) ]
/// `target` must already be the delayed snapshot. `standstill` is an extra distance added to the
/// target length, zero for the plain law.
inline double consensus_accel_raw(const Kinematics& ego, const Kinematics& target, const ControllerParams& p,
                                  double standstill = 0.0) {
  const double spacing_error = ego.position - target.position + target.length + standstill +
                               ego.speed * (p.desired_time_gap + p.comm_delay);
  const double speed_error = ego.speed - target.speed;
  return -p.adjacency * p.gain_k * (spacing_error + p.gain_gamma * speed_error);
}

inline double consensus_accel(const Kinematics& ego, const std::optional<Kinematics>& target,
                              const ControllerParams& p, const AccelBounds& bounds, double standstill = 0.0) {
  if (!target) throw DynamicsError(DynamicsError::Kind::MissingTarget, "MissingTarget: no target snapshot");
  return bounds.clamp(consensus_accel_raw(ego, *target, p, standstill));
}

/// Extra distance on top of the time-gap spacing that keeps a cross-lane game target at least
/// merge_min_gap + v * merge_time_gap ahead.
inline double merge_standstill(const ControllerParams& p, double speed) {
  return std::max(0.0, p.merge_min_gap + speed * (p.merge_time_gap - p.desired_time_gap - p.comm_delay));
}

/// Speed tracking toward a setpoint, used by game leaders and CAVs without a conflict.
inline double free_flow_accel(double speed, double desired_speed, double gain, const AccelBounds& bounds) {
  return bounds.clamp(gain * (desired_speed - speed));
}

/// Krauss safe speed behind a leader. `gap` is bumper-to-bumper; `min_gap` is the standstill
/// distance the follower keeps on top of it.
inline double krauss_safe_speed(double gap, double v_follower, double v_leader, double reaction_time,
                                double max_decel, double min_gap = 0.0) {
  const double usable = gap - min_gap;
  return v_leader + (usable - v_leader * reaction_time) / ((v_leader + v_follower) / (2.0 * max_decel) + reaction_time);
}

/// Krauss update from an already-combined safe speed (minimum over every obstacle ahead).
inline double krauss_speed_from_safe(double v_follower, double v_safe, double desired_speed, double sigma,
                                     const KraussParams& p, double noise_u) {
  const double v_des = std::min({v_safe, v_follower + p.accel_max * p.timestep, desired_speed});
  return std::max(0.0, v_des - sigma * p.accel_max * p.timestep * noise_u);
}

/// Krauss speed update. `noise_u` is a uniform draw in [0, 1) from the vehicle's own stream.
/// Throws NegativeGap when the leader overlaps the follower.
inline double krauss_speed(const Kinematics& follower, double desired_speed, double sigma,
                           const std::optional<Kinematics>& leader, const KraussParams& p, double noise_u) {
  double v_safe = std::numeric_limits<double>::infinity();
  if (leader) {
    const double gap = leader->position - follower.position - leader->length;
    if (gap < 0)
      throw DynamicsError(DynamicsError::Kind::NegativeGap, "NegativeGap: " + std::to_string(gap) + " m");
    v_safe = krauss_safe_speed(gap, follower.speed, leader->speed, p.reaction_time, p.max_decel, p.min_gap);
  }
  return krauss_speed_from_safe(follower.speed, v_safe, desired_speed, sigma, p, noise_u);
}

inline double krauss_speed(const VehicleState& follower, const std::optional<VehicleState>& leader,
                           const KraussParams& p, double noise_u) {
  std::optional<Kinematics> lead;
  if (leader) lead = Kinematics::of(*leader);
  return krauss_speed(Kinematics::of(follower), follower.desired_speed, follower.driver_sigma, lead, p, noise_u);
}

struct AccelCommand {
  double accel;
};
struct SpeedCommand {
  double speed;
};
using LongitudinalCommand = std::variant<AccelCommand, SpeedCommand>;

/// Semi-implicit Euler: new speed first, then position with the new speed. The stored `accel` is
/// the realized one, so a speed floor shows up as a smaller deceleration.
inline VehicleState integrate(VehicleState state, const LongitudinalCommand& command, double dt) {
  const double v_new = std::visit(
      [&](const auto& cmd) -> double {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, AccelCommand>) {
          return std::max(0.0, state.speed + cmd.accel * dt);
        } else {
          return std::max(0.0, cmd.speed);
        }
      },
      command);
  state.accel = (v_new - state.speed) / dt;
  state.speed = v_new;
  state.position += v_new * dt;
  state.distance_traveled += v_new * dt;
  return state;
}

}  // namespace rampmerge
