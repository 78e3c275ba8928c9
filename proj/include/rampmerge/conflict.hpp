/// @file   rampmerge/conflict.hpp
/// @brief  Conflict prediction: projection into a shared distance-to-merge frame, ETA-window
///         conflict detection and greedy pair formation.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <utility>
#include <stdexcept>
#include <vector>

#include "rampmerge/scenario.hpp"
#include "rampmerge/types.hpp"

namespace rampmerge {

/// Speed floor for ETA division.
inline constexpr double kEtaSpeedFloor = 0.1;

struct MergeFrameProjection {
  VehicleId vehicle_id = 0;
  double distance_to_merge = 0.0;
  double projected_position = 0.0;  // -distance_to_merge
  double eta = 0.0;
  double speed = 0.0;
  double length = 5.0;
};

struct ConflictPair {
  VehicleId ramp_vehicle_id = 0;
  VehicleId mainline_vehicle_id = 0;
  GameKind game_kind = GameKind::NoGame;
  double projected_gap = 0.0;
  double distance_to_end = 0.0;  // D_end of the ramp vehicle
  double eta_difference = 0.0;
};

struct ConflictSettings {
  double horizon = 15.0;
  double window = 2.0;
  double detection_range = 150.0;
  double merge_zone_length = 89.0;

  static ConflictSettings of(const ScenarioConfig& c) {
    return {c.game.conflict_horizon, c.game.conflict_window, c.game.detection_range, c.geometry.merge_zone_length};
  }
};

class WrongLane : public std::invalid_argument {
 public:
  WrongLane() : std::invalid_argument("WrongLane: mainline-left vehicles never enter the merge frame") {}
};

inline MergeFrameProjection project_to_merge_frame(const VehicleState& s, const NetworkGeometry& g) {
  if (s.lane == Lane::MainlineLeft) throw WrongLane();
  MergeFrameProjection p;
  p.vehicle_id = s.id;
  p.distance_to_merge = g.merge_point(s.lane) - s.position;
  p.projected_position = -p.distance_to_merge;
  p.eta = p.distance_to_merge / std::max(s.speed, kEtaSpeedFloor);
  p.speed = s.speed;
  p.length = s.length;
  return p;
}

/// Bumper-to-bumper gap in the merge frame; the leader is whichever is closer to (or past) the merge point.
inline double projected_gap(const MergeFrameProjection& a, const MergeFrameProjection& b) {
  const double leader_length = a.distance_to_merge < b.distance_to_merge ? a.length : b.length;
  return std::abs(a.distance_to_merge - b.distance_to_merge) - leader_length;
}

inline bool in_detection_band(const MergeFrameProjection& p, const ConflictSettings& s) {
  return p.distance_to_merge >= -s.merge_zone_length && p.distance_to_merge <= s.detection_range;
}

/// ETAs of a ramp vehicle and a candidate as compared for conflicts. A ramp vehicle already inside
/// the merge zone merges where it stands, so the candidate's ETA is then taken to that point and the
/// ramp vehicle's is zero.
inline std::pair<double, double> conflict_etas(const MergeFrameProjection& ramp, const MergeFrameProjection& c) {
  if (ramp.distance_to_merge >= 0) return {ramp.eta, c.eta};
  return {0.0, (c.distance_to_merge - ramp.distance_to_merge) / std::max(c.speed, kEtaSpeedFloor)};
}

/// Picks the candidate whose ETA is closest to the ramp vehicle's, if that ETA difference is inside
/// the window and both ETAs are inside the horizon. Both vehicles must be in the detection band. Ties go to the candidate closer to the merge point.
inline std::optional<ConflictPair> predict_conflict(const MergeFrameProjection& ramp,
                                                    std::span<const MergeFrameProjection> candidates,
                                                    const ConflictSettings& s) {
  if (!in_detection_band(ramp, s)) return std::nullopt;
  const MergeFrameProjection* best = nullptr;
  double best_diff = 0.0;
  for (const auto& c : candidates) {
    if (!in_detection_band(c, s)) continue;
    const auto [eta_r, eta_c] = conflict_etas(ramp, c);
    const double diff = std::abs(eta_r - eta_c);
    if (!best || diff < best_diff ||
        (diff == best_diff && (c.distance_to_merge < best->distance_to_merge ||
                               (c.distance_to_merge == best->distance_to_merge && c.vehicle_id < best->vehicle_id)))) {
      best = &c;
      best_diff = diff;
    }
  }
  if (!best) return std::nullopt;
  const auto [eta_r, eta_c] = conflict_etas(ramp, *best);
  if (best_diff >= s.window || eta_r >= s.horizon || eta_c >= s.horizon) return std::nullopt;

  ConflictPair pair;
  pair.ramp_vehicle_id = ramp.vehicle_id;
  pair.mainline_vehicle_id = best->vehicle_id;
  pair.projected_gap = projected_gap(ramp, *best);
  pair.distance_to_end = std::max(0.0, ramp.distance_to_merge + s.merge_zone_length);
  pair.eta_difference = best_diff;
  return pair;
}

inline GameKind pair_game_kind(VehicleClass ramp_class, VehicleClass mainline_class) {
  const bool a = ramp_class == VehicleClass::CAV;
  const bool b = mainline_class == VehicleClass::CAV;
  if (a && b) return GameKind::Cooperative;
  if (a || b) return GameKind::NonCooperative;
  return GameKind::NoGame;
}

struct Pairing {
  std::vector<ConflictPair> proposals;  // every predicted conflict, before claims are resolved
  std::vector<ConflictPair> pairs;
};

/// One pass of pair formation. Ramp vehicles are processed in ETA order; a mainline vehicle wanted
/// by several ramp vehicles goes to the one with the smallest ETA difference, the others stay
/// unpaired until the next step.
inline Pairing form_pairs(std::span<const MergeFrameProjection> ramp_vehicles,
                          std::span<const MergeFrameProjection> mainline_vehicles, const ConflictSettings& s) {
  std::vector<const MergeFrameProjection*> order;
  order.reserve(ramp_vehicles.size());
  for (const auto& r : ramp_vehicles) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) {
    return a->eta < b->eta || (a->eta == b->eta && a->vehicle_id < b->vehicle_id);
  });

  Pairing out;
  auto& proposals = out.proposals;
  for (const auto* r : order)
    if (auto p = predict_conflict(*r, mainline_vehicles, s)) proposals.push_back(*p);

  for (std::size_t i = 0; i < proposals.size(); ++i) {
    bool wins = true;
    for (std::size_t j = 0; j < proposals.size() && wins; ++j) {
      if (i == j || proposals[j].mainline_vehicle_id != proposals[i].mainline_vehicle_id) continue;
      // Earlier index means earlier ramp ETA, which breaks exact ties.
      if (proposals[j].eta_difference < proposals[i].eta_difference ||
          (proposals[j].eta_difference == proposals[i].eta_difference && j < i))
        wins = false;
    }
    if (wins) out.pairs.push_back(proposals[i]);
  }
  return out;
}

}  // namespace rampmerge
