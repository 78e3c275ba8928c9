/// @file   rampmerge/engine.hpp
/// @brief  Per-timestep simulation of the on-ramp merge.
///
/// @details Each step runs, in order:
///            1. spawn due departures whose entry cell is free (FIFO per origin)
///            2. freeze a snapshot of every vehicle; all sensing below reads only this snapshot
///            3. conflict prediction and pair formation
///            4. game resolution for pairs with at least one CAV
///            5. longitudinal commands (consensus for CAVs, Krauss for legacy vehicles)
///            6. kinematic integration
///            7. ramp merges and avoidance lane changes (sequential, downstream first)
///            8. exits, collision check, fuel accumulation and logging
///
///          Stages 3-5 are pure functions of the snapshot, so the order in which vehicles are visited
///          does not change the outcome.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rampmerge/conflict.hpp"
#include "rampmerge/dynamics.hpp"
#include "rampmerge/game.hpp"
#include "rampmerge/metrics.hpp"
#include "rampmerge/rng.hpp"
#include "rampmerge/scenario.hpp"
#include "rampmerge/types.hpp"

namespace rampmerge {

struct TrajectoryRecord {
  VehicleId id = 0;
  double time = 0.0;
  Lane lane = Lane::MainlineRight;
  double position = 0.0;
  double speed = 0.0;
  double accel = 0.0;
  Role role = Role::Unassigned;
  std::optional<VehicleId> target_id;
};

struct GameTraceRecord {
  double time = 0.0;
  GameRecord game;
};

enum class GameTrace { None, Changes, Full };

struct LogOptions {
  int trajectory_decimation = 0;  // 0 disables trajectory records; 1 logs every step
  GameTrace games = GameTrace::Changes;
};

struct RunStats {
  std::size_t spawned = 0;
  std::size_t arrived = 0;
  std::size_t steps = 0;
  double min_same_lane_gap = std::numeric_limits<double>::infinity();
  std::size_t games_played = 0;
  std::size_t role_switches = 0;  // ego role changed while the same pair persisted
  std::size_t ramp_merges = 0;
  std::size_t avoidance_lane_changes = 0;
};

struct SimulationLog {
  std::vector<TripRecord> trips;
  std::vector<TrajectoryRecord> trajectories;
  std::vector<GameTraceRecord> games;
  RunStats stats;
};

class SimulationError : public std::runtime_error {
 public:
  enum class Kind { CollisionDetected, NonTermination };
  SimulationError(Kind kind, const std::string& what, std::string diagnostics = {})
      : std::runtime_error(what), kind_(kind), diagnostics_(std::move(diagnostics)) {}
  Kind kind() const { return kind_; }
  const std::string& diagnostics() const { return diagnostics_; }

 private:
  Kind kind_;
  std::string diagnostics_;
};

/// A pair that survived pairing this step together with its resolved game.
struct ActivePair {
  ConflictPair pair;
  GameRecord game;
  double formed_time = 0.0;
  double roles_time = 0.0;  // when the current roles were last changed
};

struct WorldState {
  double sim_time = 0.0;
  std::size_t step_index = 0;
  std::vector<VehicleState> vehicles;  // sorted by id
  std::vector<ActivePair> active_pairs;
  std::deque<std::vector<VehicleState>> history;  // front = most recent frozen snapshot
  std::array<std::deque<Departure>, 3> pending;   // per origin, FIFO
  std::size_t next_departure = 0;
};

namespace engine_detail {

constexpr std::size_t origin_index(Lane l) { return static_cast<std::size_t>(l); }

/// Read-only view of one frozen snapshot with per-lane ordering.
class Snapshot {
 public:
  Snapshot(std::span<const VehicleState> vehicles, const NetworkGeometry& g) : vehicles_(vehicles), geometry_(g) {
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
      by_id_.emplace(vehicles_[i].id, i);
      lanes_[origin_index(vehicles_[i].lane)].push_back(i);
    }
    for (auto& lane : lanes_)
      std::sort(lane.begin(), lane.end(), [&](std::size_t a, std::size_t b) {
        return vehicles_[a].position < vehicles_[b].position ||
               (vehicles_[a].position == vehicles_[b].position && vehicles_[a].id < vehicles_[b].id);
      });
    predecessor_.assign(vehicles_.size(), kNone);
    for (const auto& lane : lanes_)
      for (std::size_t k = 0; k + 1 < lane.size(); ++k) predecessor_[lane[k]] = lane[k + 1];
  }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::span<const VehicleState> vehicles() const { return vehicles_; }
  const std::vector<std::size_t>& lane(Lane l) const { return lanes_[origin_index(l)]; }

  const VehicleState* find(VehicleId id) const {
    const auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &vehicles_[it->second];
  }
  std::size_t index_of(VehicleId id) const { return by_id_.at(id); }

  const VehicleState* predecessor(std::size_t i) const {
    return predecessor_[i] == kNone ? nullptr : &vehicles_[predecessor_[i]];
  }

  /// Kinematics in the merge frame: position relative to the merge point of the vehicle's lane.
  Kinematics frame(const VehicleState& v) const {
    const double merge = v.lane == Lane::Ramp ? geometry_.ramp_approach_length : geometry_.mainline_approach_length;
    return {v.position - merge, v.speed, v.accel, v.length};
  }

 private:
  std::span<const VehicleState> vehicles_;
  const NetworkGeometry& geometry_;
  std::unordered_map<VehicleId, std::size_t> by_id_;
  std::array<std::vector<std::size_t>, 3> lanes_;
  std::vector<std::size_t> predecessor_;
};

}  // namespace engine_detail

class Simulation {
 public:
  explicit Simulation(ScenarioConfig config, LogOptions options = {})
      : config_(prepared(std::move(config))),
        geometry_(build_network(config_)),
        bounds_(AccelBounds::of(config_)),
        options_(options),
        schedule_(generate_departures(config_)) {
    delay_steps_ = static_cast<std::size_t>(std::floor(config_.controller.comm_delay / config_.timestep + 1e-9));
    history_depth_ = std::max<std::size_t>(delay_steps_ + 1,
                                           static_cast<std::size_t>(std::ceil(1.0 / config_.timestep)) + 1);
  }

  /// Replaces the generated demand, for scripted scenes.
  void set_schedule(DepartureSchedule schedule) {
    schedule_ = std::move(schedule);
    world_.next_departure = 0;
  }

  /// Places a vehicle directly, bypassing spawn rules. The id must be unused.
  void add_vehicle(VehicleState v) {
    const auto it = std::lower_bound(world_.vehicles.begin(), world_.vehicles.end(), v.id,
                                     [](const VehicleState& a, VehicleId id) { return a.id < id; });
    world_.vehicles.insert(it, v);
    next_id_ = std::max(next_id_, v.id + 1);
    ++log_.stats.spawned;
  }

  const WorldState& world() const { return world_; }
  const ScenarioConfig& config() const { return config_; }
  const NetworkGeometry& geometry() const { return geometry_; }
  const SimulationLog& log() const { return log_; }
  const DepartureSchedule& schedule() const { return schedule_; }

  const VehicleState* vehicle(VehicleId id) const {
    for (const auto& v : world_.vehicles)
      if (v.id == id) return &v;
    return nullptr;
  }

  bool demand_exhausted() const {
    return world_.next_departure >= schedule_.entries.size() &&
           std::all_of(world_.pending.begin(), world_.pending.end(), [](const auto& q) { return q.empty(); });
  }

  bool finished() const {
    return world_.sim_time >= config_.duration - 1e-9 && world_.vehicles.empty() && demand_exhausted();
  }

  void step() {
    spawn();
    freeze();
    const engine_detail::Snapshot snap(world_.history.front(), geometry_);
    const auto pairing = pair_and_play(snap);
    const auto yielding = command_and_integrate(snap);
    lane_changes(pairing, yielding);
    finish_step();
  }

  SimulationLog run() {
    const double limit = 3.0 * config_.duration;
    while (!finished()) {
      if (world_.sim_time > limit)
        throw SimulationError(SimulationError::Kind::NonTermination,
                              "NonTermination: " + std::to_string(world_.vehicles.size()) +
                                  " vehicles still in the network at t=" + format_time(world_.sim_time),
                              stranded());
      step();
    }
    return log_;
  }

 private:
  using Snapshot = engine_detail::Snapshot;

  static ScenarioConfig prepared(ScenarioConfig c) {
    validate(c);
    c.krauss.accel_max = c.accel_max();
    c.krauss.timestep = c.timestep;
    c.krauss.min_gap = c.min_gap;
    c.controller.merge_min_gap = c.min_gap;
    c.controller.merge_time_gap = c.merge.t_gap_safe;
    return c;
  }

  static std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", t);
    return buf;
  }

  double initial_speed(Lane origin) const {
    return origin == Lane::Ramp ? config_.initial_speed_ramp : config_.initial_speed_mainline;
  }

  /// Last vehicle on a lane (smallest position), or null.
  const VehicleState* last_on_lane(Lane lane) const {
    const VehicleState* last = nullptr;
    for (const auto& v : world_.vehicles)
      if (v.lane == lane && (!last || v.position < last->position)) last = &v;
    return last;
  }

  void spawn() {
    const auto& entries = schedule_.entries;
    while (world_.next_departure < entries.size() &&
           entries[world_.next_departure].departure_time <= world_.sim_time + 1e-9) {
      const auto& d = entries[world_.next_departure];
      world_.pending[engine_detail::origin_index(d.origin)].push_back(d);
      ++world_.next_departure;
    }

    for (const Lane origin : kOrigins) {
      auto& queue = world_.pending[engine_detail::origin_index(origin)];
      if (queue.empty()) continue;
      const Departure d = queue.front();
      const double length = config_.vehicle_length;
      const VehicleState* last = last_on_lane(origin);
      double speed = initial_speed(origin);
      if (last) {
        const double rear = last->position - last->length;
        // Entry cell: the first min_gap + length meters of the lane.
        if (rear < config_.min_gap + length) continue;
        const double gap = rear;  // new vehicle's front bumper sits at 0
        const bool cav = d.vehicle_class == VehicleClass::CAV;
        const double safe = cav ? krauss_safe_speed(gap, speed, last->speed, config_.controller.guard_reaction_time,
                                                    config_.controller.guard_decel, config_.min_gap)
                                : krauss_safe_speed(gap, speed, last->speed, config_.krauss.reaction_time,
                                                    config_.krauss.max_decel, config_.min_gap);
        speed = std::clamp(safe, 0.0, speed);
      }
      queue.pop_front();

      VehicleState v;
      v.id = next_id_++;
      v.vehicle_class = d.vehicle_class;
      v.lane = origin;
      v.origin = origin;
      v.position = 0.0;
      v.speed = speed;
      v.length = length;
      v.driver_sigma = d.driver_sigma;
      v.desired_speed = config_.desired_speed * d.desired_speed_multiplier;
      v.depart_time = world_.sim_time;
      world_.vehicles.push_back(v);  // ids are increasing, order preserved
      ++log_.stats.spawned;
    }
  }

  void freeze() {
    world_.history.push_front(world_.vehicles);
    while (world_.history.size() > history_depth_) world_.history.pop_back();
  }

  /// State of `id` as seen `delay_steps_` ago, or the freshest snapshot that has it.
  std::optional<VehicleState> delayed(VehicleId id) const {
    const std::size_t k = std::min(delay_steps_, world_.history.size() - 1);
    for (std::size_t back = k + 1; back-- > 0;) {
      const auto& snap = world_.history[back];
      const auto it = std::lower_bound(snap.begin(), snap.end(), id,
                                       [](const VehicleState& a, VehicleId x) { return a.id < x; });
      if (it != snap.end() && it->id == id) return *it;
    }
    return std::nullopt;
  }

  bool eligible_ramp(const VehicleState& v) const {
    return v.lane == Lane::Ramp && v.position <= geometry_.ramp_end();
  }

  // Stage 3 and 4 -------------------------------------------------------------------------------

  std::optional<Kinematics> predecessor_within_range(const Snapshot& snap, const VehicleState& v,
                                                     std::optional<VehicleId>& id_out) const {
    const auto* p = snap.predecessor(snap.index_of(v.id));
    if (!p) return std::nullopt;
    const auto self = snap.frame(v);
    const auto pk = snap.frame(*p);
    if (pk.position - self.position > config_.game.detection_range) return std::nullopt;
    id_out = p->id;
    return pk;
  }

  PlayerContext player_context(const Snapshot& snap, const VehicleState& v, const ConflictPair& pair) const {
    PlayerContext ctx;
    ctx.player.id = v.id;
    ctx.player.side = v.lane == Lane::Ramp ? RoadSide::Ramp : RoadSide::Mainline;
    ctx.player.kin = snap.frame(v);
    ctx.player.desired_speed = v.desired_speed;
    ctx.player.distance_to_end = pair.distance_to_end;
    // Only a mainline predecessor can be a Leader target: the ramp vehicle's own predecessor has not
    // merged yet and may be waiting on the very traffic that would track it.
    if (v.lane != Lane::Ramp) ctx.predecessor = predecessor_within_range(snap, v, ctx.predecessor_id);
    return ctx;
  }

  /// Pairs are sticky: a pair from the previous step survives while its own conflict still holds,
  /// and only the remaining vehicles are paired afresh. Roles are re-solved every step unless the
  /// commitment window freezes them.
  Pairing pair_and_play(const Snapshot& snap) {
    for (auto& v : world_.vehicles) {
      v.role = Role::Unassigned;
      v.target_id.reset();
    }

    const auto settings = ConflictSettings::of(config_);
    std::vector<ActivePair> previous = std::move(world_.active_pairs);
    world_.active_pairs.clear();

    const double zone_exit = geometry_.mainline_approach_length + geometry_.merge_zone_length;
    auto mainline_candidate = [&](const VehicleState& v) {
      return v.lane == Lane::MainlineRight && v.position <= zone_exit;
    };

    Pairing pairing;
    std::vector<VehicleId> claimed;
    std::vector<const ActivePair*> carried;
    for (const auto& p : previous) {
      const auto* r = snap.find(p.pair.ramp_vehicle_id);
      const auto* m = snap.find(p.pair.mainline_vehicle_id);
      if (!r || !m || !eligible_ramp(*r) || !mainline_candidate(*m)) continue;
      const auto mp = project_to_merge_frame(*m, geometry_);
      auto still = predict_conflict(project_to_merge_frame(*r, geometry_), std::span(&mp, 1), settings);
      if (!still) continue;
      still->game_kind = p.pair.game_kind;
      pairing.proposals.push_back(*still);
      pairing.pairs.push_back(*still);
      carried.push_back(&p);
      claimed.push_back(r->id);
      claimed.push_back(m->id);
    }
    auto is_claimed = [&](VehicleId id) { return std::find(claimed.begin(), claimed.end(), id) != claimed.end(); };

    std::vector<MergeFrameProjection> ramp, mainline;
    for (const auto& v : snap.vehicles()) {
      if (is_claimed(v.id)) continue;
      if (eligible_ramp(v)) ramp.push_back(project_to_merge_frame(v, geometry_));
      else if (mainline_candidate(v)) mainline.push_back(project_to_merge_frame(v, geometry_));
    }
    const Pairing fresh = form_pairs(ramp, mainline, settings);
    const std::size_t n_carried = pairing.pairs.size();
    for (auto pair : fresh.pairs) {
      pair.game_kind = pair_game_kind(snap.find(pair.ramp_vehicle_id)->vehicle_class,
                                      snap.find(pair.mainline_vehicle_id)->vehicle_class);
      pairing.pairs.push_back(pair);
    }
    pairing.proposals.insert(pairing.proposals.end(), fresh.proposals.begin(), fresh.proposals.end());

    for (std::size_t i = 0; i < pairing.pairs.size(); ++i) {
      const auto& pair = pairing.pairs[i];
      const ActivePair* before = i < n_carried ? carried[i] : nullptr;
      ActivePair ap;
      ap.pair = pair;
      ap.formed_time = before ? before->formed_time : world_.sim_time;
      if (pair.game_kind == GameKind::NoGame) {
        world_.active_pairs.push_back(ap);
        continue;
      }
      if (before && world_.sim_time - before->roles_time < config_.game.commitment_window) {
        ap.game = before->game;
        ap.roles_time = before->roles_time;
        world_.active_pairs.push_back(ap);
        continue;
      }

      const auto& r = *snap.find(pair.ramp_vehicle_id);
      const auto& m = *snap.find(pair.mainline_vehicle_id);
      // Ego: the ramp vehicle in a cooperative game, the CAV otherwise.
      const bool ramp_is_ego = pair.game_kind == GameKind::Cooperative || r.is_cav();
      const auto& ego = ramp_is_ego ? r : m;
      const auto& comp = ramp_is_ego ? m : r;
      ap.game = resolve_game(pair.game_kind, player_context(snap, ego, pair), player_context(snap, comp, pair),
                             config_.controller, bounds_, config_.game);
      ++log_.stats.games_played;

      const bool changed = !before || before->game.outcome.ego_role != ap.game.outcome.ego_role;
      ap.roles_time = changed ? world_.sim_time : before->roles_time;
      if (before && changed) ++log_.stats.role_switches;
      if (options_.games == GameTrace::Full || (options_.games == GameTrace::Changes && changed))
        log_.games.push_back({world_.sim_time, ap.game});
      world_.active_pairs.push_back(ap);
    }

    for (const auto& ap : world_.active_pairs) {
      if (ap.pair.game_kind == GameKind::NoGame) continue;
      const auto& out = ap.game.outcome;
      assign_role(ap.game.ego_id, out.ego_role, out.ego_target_id);
      assign_role(ap.game.competitor_id, out.competitor_role, out.competitor_target_id);
    }
    return pairing;
  }

  void assign_role(VehicleId id, Role role, std::optional<VehicleId> target) {
    auto it = std::lower_bound(world_.vehicles.begin(), world_.vehicles.end(), id,
                               [](const VehicleState& a, VehicleId x) { return a.id < x; });
    if (it == world_.vehicles.end() || it->id != id || !it->is_cav()) return;
    it->role = role;
    it->target_id = target;
  }

  // Stage 5 and 6 -------------------------------------------------------------------------------

  bool paired(VehicleId a, VehicleId b) const {
    return std::any_of(world_.active_pairs.begin(), world_.active_pairs.end(), [&](const ActivePair& p) {
      const auto r = p.pair.ramp_vehicle_id, m = p.pair.mainline_vehicle_id;
      return (r == a && m == b) || (r == b && m == a);
    });
  }

  /// Nearest vehicle ahead of `self` in the other merging stream, measured in the merge
  /// frame, so ramp and right-lane CAVs inside the blend region space themselves as one virtual
  /// platoon. A Leader ignores its own competitor.
  const VehicleState* virtual_predecessor(const Snapshot& snap, const VehicleState& live, const VehicleState& self,
                                          double frame_position) const {
    const double range = config_.game.detection_range + config_.controller.platoon_blend_distance;
    if (self.lane == Lane::MainlineLeft || frame_position < -range) return nullptr;
    if (self.lane == Lane::MainlineRight && frame_position > geometry_.merge_zone_length) return nullptr;
    const Lane other = self.lane == Lane::Ramp ? Lane::MainlineRight : Lane::Ramp;
    for (const auto i : snap.lane(other)) {
      const auto& v = snap.vehicles()[i];
      const double x = snap.frame(v).position;
      if (x <= frame_position || !v.is_cav()) continue;
      if (other == Lane::Ramp) {
        if (x < -range) continue;
        // If even a ramp vehicle stopped at the end of the zone would sit closer than a merge gap,
        // the mainline vehicle goes first rather than stopping where that vehicle could never merge.
        const double last_stop = geometry_.merge_zone_length - kStopMargin;
        if (last_stop - v.length - frame_position < config_.min_gap + kStopMargin) continue;
      }
      if (live.role == Role::Leader && paired(self.id, v.id)) continue;
      return &v;
    }
    return nullptr;
  }

  double cav_accel(const Snapshot& snap, const VehicleState& live, const VehicleState& self) const {
    const auto& ctl = config_.controller;
    const Kinematics me = snap.frame(self);
    const double free = free_flow_accel(self.speed, self.desired_speed, ctl.free_flow_gain, bounds_);

    std::optional<Kinematics> target;
    if (live.target_id)
      if (const auto t = delayed(*live.target_id)) target = snap.frame(*t);

    const double s0 = merge_standstill(ctl, self.speed);
    double a = free;
    if (live.role == Role::Follower && target) a = consensus_accel(me, target, ctl, bounds_, s0);
    else if (live.role == Role::Leader && target) a = std::min(free, consensus_accel(me, target, ctl, bounds_, s0));

    const auto idx = snap.index_of(self.id);
    if (const auto* pred = snap.predecessor(idx)) {
      if (const auto pd = delayed(pred->id)) a = std::min(a, consensus_accel(me, snap.frame(*pd), ctl, bounds_));
      const double gap = pred->position - pred->length - self.position;
      const double v_safe = krauss_safe_speed(gap, self.speed, pred->speed, ctl.guard_reaction_time, ctl.guard_decel,
                                              config_.min_gap);
      a = std::min(a, (v_safe - self.speed) / config_.timestep);
    }
    if (const auto* vp = virtual_predecessor(snap, live, self, me.position)) {
      const Kinematics vk = snap.frame(*vp);
      // The spacing target grows from zero at the start of the blend region to its full value where
      // the detection band begins, so streams entering side by side separate before games start.
      const double blend = ctl.platoon_blend_distance;
      const double w = std::clamp((me.position + config_.game.detection_range + blend) / blend, 0.0, 1.0);
      const double time_part = self.speed * (ctl.desired_time_gap + ctl.comm_delay);
      const double standstill = w * (vk.length + s0 + time_part) - vk.length - time_part;
      if (const auto d = delayed(vp->id))
        a = std::min(a, consensus_accel(me, snap.frame(*d), ctl, bounds_, standstill));
      // Near the zone, stop clear of the slot: a gap of exactly min_gap fails gap acceptance.
      const double gap = vk.position - vk.length - me.position;
      if (me.position >= 0 && gap > 0) {
        const double v_safe = krauss_safe_speed(gap, self.speed, vk.speed, ctl.guard_reaction_time, ctl.guard_decel,
                                                config_.min_gap + kStopMargin);
        a = std::min(a, (v_safe - self.speed) / config_.timestep);
      }
    }
    if (self.lane == Lane::Ramp) {
      const double room = geometry_.ramp_end() - self.position - kStopMargin;
      if (room <= 0) {
        a = bounds_.min;
      } else {
        const double needed = self.speed * self.speed / (2.0 * room);
        if (needed >= ctl.stop_comfort_decel) a = std::min(a, -needed);
      }
    }
    // Never exceed the desired speed.
    a = std::min(a, (self.desired_speed - self.speed) / config_.timestep);
    return bounds_.clamp(a);
  }

  double legacy_speed(const Snapshot& snap, const VehicleState& self) const {
    const auto& kp = config_.krauss;
    double v_safe = std::numeric_limits<double>::infinity();
    if (const auto* pred = snap.predecessor(snap.index_of(self.id))) {
      const double gap = pred->position - pred->length - self.position;
      if (gap < 0)
        throw DynamicsError(DynamicsError::Kind::NegativeGap, "NegativeGap behind vehicle " + std::to_string(pred->id));
      v_safe = krauss_safe_speed(gap, self.speed, pred->speed, kp.reaction_time, kp.max_decel, kp.min_gap);
    }
    if (self.lane == Lane::Ramp) {
      const double room = std::max(0.0, geometry_.ramp_end() - self.position - kStopMargin);
      v_safe = std::min(v_safe, krauss_safe_speed(room, self.speed, 0.0, kp.reaction_time, kp.max_decel));
    }
    const double u = rng::counter_uniform01(config_.seed, self.id, world_.step_index);
    return krauss_speed_from_safe(self.speed, v_safe, self.desired_speed, self.driver_sigma, kp, u);
  }

  /// Returns the right-lane CAVs that are yielding to a ramp vehicle in the virtual platoon, each
  /// as a conflict with that ramp vehicle.
  std::vector<ConflictPair> command_and_integrate(const Snapshot& snap) {
    std::vector<ConflictPair> yielding;
    for (auto& v : world_.vehicles) {
      const VehicleState& self = *snap.find(v.id);
      if (v.is_cav() && v.lane == Lane::MainlineRight)
        if (const auto* vp = virtual_predecessor(snap, v, self, snap.frame(self).position))
          yielding.push_back({.ramp_vehicle_id = vp->id, .mainline_vehicle_id = v.id});
      LongitudinalCommand cmd = v.is_cav() ? LongitudinalCommand{AccelCommand{cav_accel(snap, v, self)}}
                                           : LongitudinalCommand{SpeedCommand{legacy_speed(snap, self)}};
      VehicleState next = integrate(self, cmd, config_.timestep);
      next.role = v.role;
      next.target_id = v.target_id;
      v = next;
    }
    return yielding;
  }

  // Stage 7 -------------------------------------------------------------------------------------

  struct Neighbors {
    const VehicleState* lead = nullptr;
    const VehicleState* lag = nullptr;
  };

  /// Nearest vehicles ahead/behind position `x` on `lane` in the current (post-integration) state.
  Neighbors neighbors(Lane lane, double x, VehicleId except) const {
    Neighbors n;
    for (const auto& v : world_.vehicles) {
      if (v.lane != lane || v.id == except) continue;
      if (v.position >= x) {
        if (!n.lead || v.position < n.lead->position) n.lead = &v;
      } else if (!n.lag || v.position > n.lag->position) {
        n.lag = &v;
      }
    }
    return n;
  }

 public:
  /// Gap acceptance: lead and lag gaps must cover the standstill gap, a time gap, and the distance
  /// needed to absorb any closing speed at a comfortable deceleration.
  bool gap_acceptable(Lane lane, double x, double speed, double length, VehicleId self) const {
    const auto n = neighbors(lane, x, self);
    const auto& mp = config_.merge;
    if (n.lead) {
      const double gap = n.lead->position - n.lead->length - x;
      const double closing = std::max(0.0, speed * speed - n.lead->speed * n.lead->speed) / (2.0 * mp.lag_decel);
      if (gap <= config_.min_gap + speed * mp.t_gap_safe + closing) return false;
    }
    if (n.lag) {
      const double gap = x - length - n.lag->position;
      const double closing = std::max(0.0, n.lag->speed * n.lag->speed - speed * speed) / (2.0 * mp.lag_decel);
      if (gap <= config_.min_gap + n.lag->speed * mp.t_gap_safe + closing) return false;
    }
    return true;
  }

  /// Whether a ramp vehicle inside the merge zone may switch to the mainline this step.
  bool merge_allowed(const VehicleState& v) const {
    if (v.lane != Lane::Ramp || v.position < geometry_.ramp_approach_length) return false;
    const double x = geometry_.ramp_to_mainline(v.position);
    if (v.is_cav() && v.role == Role::Follower && v.target_id) {
      const auto* t = vehicle(*v.target_id);
      if (t && t->lane == Lane::MainlineRight && t->position <= x) return false;
    }
    return gap_acceptable(Lane::MainlineRight, x, v.speed, v.length, v.id);
  }

 private:
  void lane_changes(const Pairing& pairing, std::span<const ConflictPair> yielding) {
    // Ramp merges, downstream first so each decision sees the merges ahead of it.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < world_.vehicles.size(); ++i)
      if (world_.vehicles[i].lane == Lane::Ramp) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return world_.vehicles[a].position > world_.vehicles[b].position;
    });
    for (const auto i : order) {
      auto& v = world_.vehicles[i];
      if (!merge_allowed(v)) continue;
      v.position = geometry_.ramp_to_mainline(v.position);
      v.lane = Lane::MainlineRight;
      ++log_.stats.ramp_merges;
    }

    // Right-lane vehicles dodge predicted conflicts, or a ramp vehicle they are yielding to, by moving left.
    std::vector<ConflictPair> conflicts(pairing.proposals.begin(), pairing.proposals.end());
    conflicts.insert(conflicts.end(), yielding.begin(), yielding.end());
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < world_.vehicles.size(); ++i) {
      const auto& v = world_.vehicles[i];
      if (v.lane != Lane::MainlineRight) continue;
      const bool conflicted = std::any_of(conflicts.begin(), conflicts.end(),
                                          [&](const ConflictPair& p) { return p.mainline_vehicle_id == v.id; });
      if (conflicted) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
      return world_.vehicles[a].position > world_.vehicles[b].position;
    });
    for (const auto i : candidates) {
      auto& v = world_.vehicles[i];
      const ConflictPair* conflict = nullptr;
      for (const auto& p : conflicts)
        if (p.mainline_vehicle_id == v.id && !conflict) conflict = &p;
      if (avoidance_change_wanted(v, *conflict)) {
        v.lane = Lane::MainlineLeft;
        ++log_.stats.avoidance_lane_changes;
      }
    }
  }

 public:
  /// Lane change left for a right-lane vehicle with a predicted merge conflict: the left lane must
  /// accept it and offer more speed than its current constraint (the slower of its own predecessor
  /// and the conflicting ramp vehicle).
  bool avoidance_change_wanted(const VehicleState& v, const ConflictPair& conflict) const {
    if (v.lane != Lane::MainlineRight) return false;
    if (!gap_acceptable(Lane::MainlineLeft, v.position, v.speed, v.length, v.id)) return false;

    double constraint = v.desired_speed;
    if (const auto* r = vehicle(conflict.ramp_vehicle_id)) constraint = std::min(constraint, r->speed);
    const auto right = neighbors(Lane::MainlineRight, v.position, v.id);
    if (right.lead && right.lead->position - v.position <= config_.game.detection_range)
      constraint = std::min(constraint, right.lead->speed);
    const auto left = neighbors(Lane::MainlineLeft, v.position, v.id);
    const double left_speed = left.lead ? left.lead->speed : std::numeric_limits<double>::infinity();
    return left_speed > constraint;
  }

 private:
  // Stage 8 -------------------------------------------------------------------------------------

  void finish_step() {
    const double dt = config_.timestep;
    const double now = static_cast<double>(world_.step_index + 1) * dt;

    for (auto& v : world_.vehicles) v.fuel_grams += fuel_rate(v.speed, v.accel, config_.fuel) * dt;

    if (options_.trajectory_decimation > 0 &&
        world_.step_index % static_cast<std::size_t>(options_.trajectory_decimation) == 0) {
      for (const auto& v : world_.vehicles)
        log_.trajectories.push_back({v.id, now, v.lane, v.position, v.speed, v.accel, v.role, v.target_id});
    }

    const double exit = geometry_.mainline_exit();
    std::vector<VehicleState> staying;
    staying.reserve(world_.vehicles.size());
    for (auto& v : world_.vehicles) {
      if (v.lane != Lane::Ramp && v.position >= exit) {
        log_.trips.push_back({v.id, v.vehicle_class, v.origin, v.depart_time, now, v.distance_traveled, v.fuel_grams});
        ++log_.stats.arrived;
      } else {
        staying.push_back(v);
      }
    }
    world_.vehicles = std::move(staying);

    check_collisions(now);
    world_.sim_time = now;
    ++world_.step_index;
    ++log_.stats.steps;
  }

  void check_collisions(double now) {
    const Snapshot snap(world_.vehicles, geometry_);
    for (const Lane lane : kOrigins) {
      const auto& order = snap.lane(lane);
      for (std::size_t k = 0; k + 1 < order.size(); ++k) {
        const auto& back = world_.vehicles[order[k]];
        const auto& front = world_.vehicles[order[k + 1]];
        const double gap = front.position - front.length - back.position;
        log_.stats.min_same_lane_gap = std::min(log_.stats.min_same_lane_gap, gap);
        if (gap <= 0) {
          throw SimulationError(SimulationError::Kind::CollisionDetected,
                                "CollisionDetected: vehicles " + std::to_string(back.id) + " and " +
                                    std::to_string(front.id) + " on " + std::string(to_string(lane)) + " at t=" +
                                    format_time(now),
                                diagnostics({back.id, front.id}));
        }
      }
    }
  }

  /// Current state of every vehicle still in the network.
  std::string stranded() const {
    std::ostringstream out;
    out << "id,class,lane,pos_m,speed_mps,role,target_id\n";
    for (const auto& v : world_.vehicles)
      out << v.id << ',' << to_string(v.vehicle_class) << ',' << to_string(v.lane) << ',' << v.position << ','
          << v.speed << ',' << to_string(v.role) << ',' << (v.target_id ? std::to_string(*v.target_id) : "") << '\n';
    return out.str();
  }

  /// Recent trajectories (about the last second) of the given vehicles, oldest first.
  std::string diagnostics(std::initializer_list<VehicleId> ids) const {
    std::ostringstream out;
    out << "t_s,id,lane,pos_m,speed_mps,accel_mps2,role,target_id\n";
    const double dt = config_.timestep;
    for (std::size_t back = world_.history.size(); back-- > 0;) {
      const double t = (static_cast<double>(world_.step_index) - static_cast<double>(back)) * dt;
      for (const auto& v : world_.history[back]) {
        if (std::find(ids.begin(), ids.end(), v.id) == ids.end()) continue;
        out << format_time(t) << ',' << v.id << ',' << to_string(v.lane) << ',' << v.position << ',' << v.speed
            << ',' << v.accel << ',' << to_string(v.role) << ',' << (v.target_id ? std::to_string(*v.target_id) : "")
            << '\n';
      }
    }
    return out.str();
  }

  static constexpr double kStopMargin = 0.5;

  ScenarioConfig config_;
  NetworkGeometry geometry_;
  AccelBounds bounds_;
  LogOptions options_;
  DepartureSchedule schedule_;
  WorldState world_;
  SimulationLog log_;
  VehicleId next_id_ = 1;
  std::size_t delay_steps_ = 0;
  std::size_t history_depth_ = 1;
};

inline SimulationLog run(const ScenarioConfig& config, LogOptions options = {}) {
  Simulation sim(config, options);
  return sim.run();
}

}  // namespace rampmerge
