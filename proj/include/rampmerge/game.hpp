/// @file   rampmerge/game.hpp
/// @brief  Two-player merge game: per-action safety and mobility costs and the non-cooperative /
///         cooperative role solvers.
///
/// @details Every action (Leader or Follower) gets a candidate acceleration from the consensus
///          controller. The pair's motion is predicted one game step ahead and scored:
///
///            TTC      = gap' / (v_f' - v_p')                      when the rear vehicle closes in
///            h        = gap' / v_f'
///            risk1    = [(1 - tanh(TTC/t_h)) + (1 - tanh(h/t_h))] / 2   closing
///                     = (1 - tanh(h/t_h)) / 2                           otherwise
///            risk_d2e = (1 - tanh(D_end / v_ramp / t_h)) / 2
///            mobility = (1 - tanh(dv / v)) / 2,   dv = a * dt_g
///
///            mainline cost = risk1 + mobility
///            ramp cost     = (risk1 + risk_d2e) / 2 + mobility
///
///          The rear vehicle of the predicted order is the one whose TTC and headway are measured,
///          so when the ego ends up ahead the competitor's view of the ego is scored.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <utility>

#include "rampmerge/dynamics.hpp"
#include "rampmerge/scenario.hpp"
#include "rampmerge/types.hpp"

namespace rampmerge {

inline constexpr double kCostSpeedFloor = 0.1;

/// Gap and speeds of an ordered (rear, front) pair one game step ahead.
struct PredictedPair {
  double gap = 0.0;           // gap + dGap, floored at 0
  double rear_speed = 0.0;    // v_f + dv_f, floored at 0
  double front_speed = 0.0;   // v_p + dv_p, floored at 0
  double ttc_denominator = 0.0;
};

inline PredictedPair predict_pair(double gap, double v_rear, double v_front, double a_rear, double a_front, double dt,
                                  bool literal_sign = false) {
  PredictedPair p;
  const double delta_gap = (v_front - v_rear) * dt + 0.5 * (a_front - a_rear) * dt * dt;
  p.gap = std::max(0.0, gap + delta_gap);
  p.rear_speed = std::max(0.0, v_rear + a_rear * dt);
  p.front_speed = std::max(0.0, v_front + a_front * dt);
  // The literal form subtracts the front vehicle's speed change instead of adding it.
  p.ttc_denominator = literal_sign ? p.rear_speed - (v_front - a_front * dt) : p.rear_speed - p.front_speed;
  return p;
}

/// TTC from already-predicted quantities; empty unless the rear vehicle is strictly faster.
inline std::optional<double> ttc_from_prediction(double predicted_gap, double closing_speed) {
  if (!(closing_speed > 0)) return std::nullopt;
  return std::max(0.0, predicted_gap / closing_speed);
}

inline std::optional<double> predicted_ttc(double gap, double v_f, double v_p, double a_f, double a_p, double dt_g,
                                           bool literal_sign = false) {
  const auto p = predict_pair(gap, v_f, v_p, a_f, a_p, dt_g, literal_sign);
  return ttc_from_prediction(p.gap, p.ttc_denominator);
}

inline double risk_from_terms(const std::optional<double>& ttc, double headway, double safe_headway) {
  const double headway_term = 1.0 - std::tanh(headway / safe_headway);
  if (ttc) return ((1.0 - std::tanh(*ttc / safe_headway)) + headway_term) / 2.0;
  return headway_term / 2.0;
}

/// Safety risk of the rear (`e`) vehicle behind the front (`c`) vehicle after one game step.
/// Equal predicted speeds take the non-closing branch.
inline double safety_risk(double gap, double v_e, double v_c, double a_e, double a_c, double dt_g, double t_h,
                          bool literal_sign = false) {
  const auto p = predict_pair(gap, v_e, v_c, a_e, a_c, dt_g, literal_sign);
  const double headway = p.gap / std::max(p.rear_speed, kCostSpeedFloor);
  return risk_from_terms(ttc_from_prediction(p.gap, p.ttc_denominator), headway, t_h);
}

inline double distance_risk(double distance_to_end, double v_ramp, double t_h) {
  const double h_ending = std::max(0.0, distance_to_end) / std::max(v_ramp, kCostSpeedFloor);
  return (1.0 - std::tanh(h_ending / t_h)) / 2.0;
}

inline double mobility_cost(double delta_v, double v) {
  return (1.0 - std::tanh(delta_v / std::max(v, kCostSpeedFloor))) / 2.0;
}

/// One player as seen by the game: kinematics in the merge frame (position = -distance_to_merge).
struct Player {
  VehicleId id = 0;
  RoadSide side = RoadSide::Mainline;
  Kinematics kin;
  double desired_speed = 20.0;
  double distance_to_end = 0.0;  // used when side == Ramp
};

/// Merge-frame acceleration for one role. A Follower tracks the competitor. A Leader tracks the
/// competitor's predecessor when that vehicle is ahead of the ego, capped by free-flow tracking;
/// without one it is plain free-flow tracking.
inline double candidate_accel(const Player& ego, const Player& competitor, const std::optional<Kinematics>& competitor_predecessor,
                              Role role, const ControllerParams& controller, const AccelBounds& bounds) {
  const double s0 = merge_standstill(controller, ego.kin.speed);
  if (role == Role::Follower) return consensus_accel(ego.kin, competitor.kin, controller, bounds, s0);
  const double free = free_flow_accel(ego.kin.speed, ego.desired_speed, controller.free_flow_gain, bounds);
  if (competitor_predecessor && competitor_predecessor->position > ego.kin.position)
    return std::min(free, consensus_accel(ego.kin, competitor_predecessor, controller, bounds, s0));
  return free;
}

struct ActionEvaluation {
  Role role = Role::Unassigned;
  double candidate_accel = 0.0;
  bool ego_ahead = false;
  double predicted_gap = 0.0;
  std::optional<double> predicted_ttc;
  double predicted_headway = 0.0;
  double risk1 = 0.0;
  double risk_d2e = 0.0;
  double mobility = 0.0;
  double total_cost = 0.0;
};

/// Cost of `ego` taking `role` with acceleration `accel`; the competitor keeps its current acceleration.
inline ActionEvaluation action_cost(const Player& ego, const Player& competitor, Role role, double accel,
                                    const GameParams& params) {
  const double dt = params.prediction_step;
  const double t_h = params.safe_time_headway;

  ActionEvaluation ev;
  ev.role = role;
  ev.candidate_accel = accel;

  const auto predicted_position = [dt](const Kinematics& k, double a) {
    return k.position + k.speed * dt + 0.5 * a * dt * dt;
  };
  ev.ego_ahead = predicted_position(ego.kin, accel) > predicted_position(competitor.kin, competitor.kin.accel);

  Kinematics rear = competitor.kin, front = ego.kin;
  double a_rear = competitor.kin.accel, a_front = accel;
  if (!ev.ego_ahead) {
    std::swap(rear, front);
    std::swap(a_rear, a_front);
  }
  const double gap = front.position - rear.position - front.length;
  const auto p = predict_pair(gap, rear.speed, front.speed, a_rear, a_front, dt, params.ttc_literal_sign);

  ev.predicted_gap = p.gap;
  ev.predicted_ttc = ttc_from_prediction(p.gap, p.ttc_denominator);
  ev.predicted_headway = p.gap / std::max(p.rear_speed, kCostSpeedFloor);
  ev.risk1 = risk_from_terms(ev.predicted_ttc, ev.predicted_headway, t_h);
  ev.mobility = mobility_cost(accel * dt, ego.kin.speed);
  if (ego.side == RoadSide::Ramp) {
    ev.risk_d2e = distance_risk(ego.distance_to_end, ego.kin.speed, t_h);
    ev.total_cost = (ev.risk1 + ev.risk_d2e) / 2.0 + ev.mobility;
  } else {
    ev.total_cost = ev.risk1 + ev.mobility;
  }
  return ev;
}

/// Minimum of the ego's own two costs; an exact tie goes to Follower.
inline Role solve_noncooperative(double cost_lead, double cost_follow) {
  return cost_lead < cost_follow ? Role::Leader : Role::Follower;
}

/// Cost table of the cooperative game, indexed [ego role][competitor role] with 0 = Leader,
/// 1 = Follower. The Leader/Leader and Follower/Follower cells are infeasible.
inline std::array<std::array<double, 2>, 2> cooperative_table(double ego_lead, double ego_follow, double comp_lead,
                                                              double comp_follow, double infinity_cost) {
  return {{{infinity_cost, ego_lead + comp_follow}, {ego_follow + comp_lead, infinity_cost}}};
}

/// Roles minimizing the pair's summed cost. Sums saturate at `infinity_cost`, so two infeasible
/// assignments tie. On a tie the ramp vehicle follows.
inline std::pair<Role, Role> solve_cooperative(double ego_lead, double ego_follow, double comp_lead, double comp_follow,
                                               bool ego_is_ramp = true, double infinity_cost = 1e6) {
  const double ego_leads = std::min(ego_lead + comp_follow, infinity_cost);
  const double ego_follows = std::min(ego_follow + comp_lead, infinity_cost);
  if (ego_leads < ego_follows) return {Role::Leader, Role::Follower};
  if (ego_follows < ego_leads) return {Role::Follower, Role::Leader};
  return ego_is_ramp ? std::pair{Role::Follower, Role::Leader} : std::pair{Role::Leader, Role::Follower};
}

struct GameOutcome {
  Role ego_role = Role::Unassigned;
  Role competitor_role = Role::Unassigned;
  std::optional<VehicleId> ego_target_id;
  std::optional<VehicleId> competitor_target_id;
  GameKind solved_as = GameKind::NoGame;
};

/// Everything computed while resolving one pair, kept for the game trace.
struct GameRecord {
  GameKind kind = GameKind::NoGame;
  VehicleId ego_id = 0;
  VehicleId competitor_id = 0;
  ActionEvaluation ego_lead, ego_follow;
  std::optional<ActionEvaluation> comp_lead, comp_follow;
  GameOutcome outcome;

  const ActionEvaluation& chosen() const { return outcome.ego_role == Role::Leader ? ego_lead : ego_follow; }
};

/// Whether `self` can end up behind `other`. A ramp competitor can advance no further than the end
/// of the merge zone, so a mainline player must be able to stop behind that point at full braking.
inline bool follower_feasible(const Player& self, const Player& other, const AccelBounds& bounds) {
  if (other.side != RoadSide::Ramp) return true;
  const double stopping = self.kin.speed * self.kin.speed / (2.0 * -bounds.min);
  return self.kin.position + stopping <= other.kin.position + std::max(0.0, other.distance_to_end) - other.kin.length;
}

/// A player plus the vehicle ahead of it that a Leader opponent would slot in behind.
struct PlayerContext {
  Player player;
  std::optional<Kinematics> predecessor;
  std::optional<VehicleId> predecessor_id;
};

/// Resolves one pair. `ego` is the CAV in a non-cooperative game (the legacy competitor is not
/// strategic and keeps its observed motion) and the ramp vehicle in a cooperative one.
inline GameRecord resolve_game(GameKind kind, const PlayerContext& ego, const PlayerContext& competitor,
                               const ControllerParams& controller, const AccelBounds& bounds,
                               const GameParams& params) {
  GameRecord rec;
  rec.kind = kind;
  rec.ego_id = ego.player.id;
  rec.competitor_id = competitor.player.id;

  auto evaluate = [&](const PlayerContext& self, const PlayerContext& other, Role role) {
    const double a = candidate_accel(self.player, other.player, other.predecessor, role, controller, bounds);
    auto ev = action_cost(self.player, other.player, role, a, params);
    if (role == Role::Follower && !follower_feasible(self.player, other.player, bounds)) ev.total_cost = params.infinity_cost;
    return ev;
  };
  auto target_for = [](Role role, const PlayerContext& self, const PlayerContext& other) -> std::optional<VehicleId> {
    if (role == Role::Follower) return other.player.id;
    if (other.predecessor && other.predecessor->position > self.player.kin.position) return other.predecessor_id;
    return std::nullopt;
  };

  rec.ego_lead = evaluate(ego, competitor, Role::Leader);
  rec.ego_follow = evaluate(ego, competitor, Role::Follower);

  if (kind == GameKind::Cooperative) {
    rec.comp_lead = evaluate(competitor, ego, Role::Leader);
    rec.comp_follow = evaluate(competitor, ego, Role::Follower);
    const auto [er, cr] = solve_cooperative(rec.ego_lead.total_cost, rec.ego_follow.total_cost,
                                            rec.comp_lead->total_cost, rec.comp_follow->total_cost,
                                            ego.player.side == RoadSide::Ramp, params.infinity_cost);
    rec.outcome.ego_role = er;
    rec.outcome.competitor_role = cr;
  } else {
    rec.outcome.ego_role = solve_noncooperative(rec.ego_lead.total_cost, rec.ego_follow.total_cost);
    rec.outcome.competitor_role = opposite(rec.outcome.ego_role);
  }
  rec.outcome.solved_as = kind;
  rec.outcome.ego_target_id = target_for(rec.outcome.ego_role, ego, competitor);
  rec.outcome.competitor_target_id = target_for(rec.outcome.competitor_role, competitor, ego);
  return rec;
}

}  // namespace rampmerge
