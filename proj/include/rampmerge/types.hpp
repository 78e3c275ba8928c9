/// @file   rampmerge/types.hpp
/// @brief  Vehicle state and the small enums shared by every stage of the merge pipeline.

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace rampmerge {

using VehicleId = std::uint64_t;

enum class VehicleClass : std::uint8_t { CAV, Legacy };

/// Physical lane. Each lane has its own longitudinal frame starting at the spawn point.
enum class Lane : std::uint8_t { Ramp, MainlineRight, MainlineLeft };

/// Game role. Unassigned vehicles follow their baseline controller.
enum class Role : std::uint8_t { Unassigned, Leader, Follower };

enum class GameKind : std::uint8_t { NoGame, NonCooperative, Cooperative };

/// Which cost formula a player uses (Mainline: risk + mobility, Ramp adds the distance-to-end term).
enum class RoadSide : std::uint8_t { Mainline, Ramp };

constexpr std::string_view to_string(VehicleClass c) { return c == VehicleClass::CAV ? "CAV" : "Legacy"; }

constexpr std::string_view to_string(Lane l) {
  switch (l) {
    case Lane::Ramp: return "Ramp";
    case Lane::MainlineRight: return "MainlineRight";
    case Lane::MainlineLeft: return "MainlineLeft";
  }
  return "?";
}

constexpr std::string_view to_string(Role r) {
  switch (r) {
    case Role::Leader: return "Leader";
    case Role::Follower: return "Follower";
    case Role::Unassigned: return "Unassigned";
  }
  return "?";
}

constexpr std::string_view to_string(GameKind k) {
  switch (k) {
    case GameKind::NonCooperative: return "NonCooperative";
    case GameKind::Cooperative: return "Cooperative";
    case GameKind::NoGame: return "NoGame";
  }
  return "?";
}

constexpr Role opposite(Role r) {
  return r == Role::Leader ? Role::Follower : (r == Role::Follower ? Role::Leader : Role::Unassigned);
}

/// Kinematic and classification state of one vehicle. `position` is the front bumper in the
/// vehicle's own lane frame; `origin` is the lane it spawned on and never changes.
struct VehicleState {
  VehicleId id = 0;
  VehicleClass vehicle_class = VehicleClass::Legacy;
  Lane lane = Lane::MainlineRight;
  Lane origin = Lane::MainlineRight;
  double position = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  double length = 5.0;
  double driver_sigma = 0.0;
  double desired_speed = 20.0;
  Role role = Role::Unassigned;
  std::optional<VehicleId> target_id;
  double depart_time = 0.0;
  double distance_traveled = 0.0;
  double fuel_grams = 0.0;

  bool is_cav() const { return vehicle_class == VehicleClass::CAV; }
};

}  // namespace rampmerge
