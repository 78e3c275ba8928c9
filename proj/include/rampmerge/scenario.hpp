/// @file   rampmerge/scenario.hpp
/// @brief  Scenario configuration, merge-area geometry and the stochastic departure schedule.
///
/// @details A scenario file is a flat UTF-8 document of `key = value` lines. `#` starts a comment,
///          blank lines are ignored, pair-valued keys take `low, high`. Every key is optional; absent
///          keys keep the defaults declared below. Nested parameter groups use a dotted prefix
///          (`controller.gain_k`, `game.safe_time_headway`, `fuel.mass`, ...).

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rampmerge/rng.hpp"
#include "rampmerge/types.hpp"

namespace rampmerge {

/// Merge-area layout. Ramp and mainline frames start at their spawn points; the merge point sits
/// at `ramp_approach_length` in the ramp frame and `mainline_approach_length` in the mainline frames.
struct NetworkGeometry {
  double ramp_approach_length = 250.0;
  double mainline_approach_length = 280.0;
  double merge_zone_length = 89.0;
  double downstream_length = 200.0;
  int mainline_lane_count = 2;
  double speed_limit = 20.0;

  double merge_point(Lane lane) const {
    return lane == Lane::Ramp ? ramp_approach_length : mainline_approach_length;
  }
  /// End of the acceleration lane in the ramp frame.
  double ramp_end() const { return ramp_approach_length + merge_zone_length; }
  /// Where mainline trips end.
  double mainline_exit() const { return mainline_approach_length + merge_zone_length + downstream_length; }
  /// Converts a ramp-frame position to the mainline-right frame (the two frames share the merge point).
  double ramp_to_mainline(double ramp_position) const {
    return ramp_position - ramp_approach_length + mainline_approach_length;
  }
};

/// Gains of the consensus longitudinal law plus the CAV speed-tracking and safety layers.
struct ControllerParams {
  double adjacency = 1.0;
  double gain_k = 0.3;       // 1/s^2
  double gain_gamma = 1.5;   // s
  double comm_delay = 0.0;   // s
  double desired_time_gap = 1.0;
  double free_flow_gain = 0.4;  // 1/s
  // Spacing floor toward a game target in the other lane: at least merge_min_gap + v * merge_time_gap,
  // so the slot it opens passes gap acceptance even where v * desired_time_gap is smaller.
  double merge_min_gap = 0.0;
  double merge_time_gap = 0.0;
  // Safe-speed guard against the physical predecessor.
  double guard_reaction_time = 0.5;
  double guard_decel = 4.5;
  // Deceleration at which an unmerged ramp CAV starts braking for the end of the merge zone.
  double stop_comfort_decel = 3.5;
  // Distance upstream of the merge point over which ramp and right-lane CAVs blend into one
  // virtual platoon; the cross-stream spacing target grows linearly to full strength across it.
  double platoon_blend_distance = 300.0;
};

struct KraussParams {
  double reaction_time = 1.0;
  double max_decel = 5.0;
  double accel_max = 3.0;
  double timestep = 0.02;
  double min_gap = 0.0;
};

struct GameParams {
  double safe_time_headway = 3.0;
  double prediction_step = 0.5;
  double infinity_cost = 1e6;
  double conflict_window = 2.0;
  double conflict_horizon = 15.0;
  double detection_range = 150.0;
  double commitment_window = 0.0;
  bool ttc_literal_sign = false;
};

/// Gap-acceptance predicate shared by ramp merges and avoidance lane changes.
struct MergeParams {
  double t_gap_safe = 0.5;
  // Deceleration the new follower is assumed to tolerate when closing on the merging vehicle.
  double lag_decel = 4.0;
};

/// Resistance-power fuel surrogate.
struct FuelParams {
  double mass = 1500.0;
  double cda = 0.736;
  double air_density = 1.225;
  double rolling_coeff = 0.015;
  double gravity = 9.81;
  double idle_rate = 0.4;        // g/s
  double energy_slope = 7.66e-5; // g/J
};

struct ScenarioConfig {
  double demand_vph = 1400.0;
  double penetration_rate = 0.0;
  double ramp_demand_fraction = 1.0 / 3.0;
  double duration = 1800.0;
  double timestep = 0.02;
  std::uint64_t seed = 42;
  double initial_speed_ramp = 15.0;
  double initial_speed_mainline = 20.0;
  double desired_speed = 20.0;
  double desired_time_headway = 1.0;
  double min_gap = 5.0;
  double vehicle_length = 5.0;
  std::pair<double, double> accel_bounds{-5.0, 3.0};
  std::pair<double, double> driver_sigma_range{0.2, 0.8};
  std::pair<double, double> desired_speed_multiplier_range{0.9, 1.1};
  NetworkGeometry geometry;
  ControllerParams controller;
  KraussParams krauss;
  GameParams game;
  MergeParams merge;
  FuelParams fuel;

  double accel_min() const { return accel_bounds.first; }
  double accel_max() const { return accel_bounds.second; }
};

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { MalformedLine, UnknownKey, InvariantViolation, FileNotFound };

  ConfigError(Kind kind, std::string subject, const std::string& detail)
      : std::runtime_error(label(kind) + ": " + subject + (detail.empty() ? "" : " (" + detail + ")")),
        kind_(kind),
        subject_(std::move(subject)) {}

  Kind kind() const { return kind_; }
  const std::string& subject() const { return subject_; }

 private:
  static std::string label(Kind k) {
    switch (k) {
      case Kind::MalformedLine: return "MalformedLine";
      case Kind::UnknownKey: return "UnknownKey";
      case Kind::InvariantViolation: return "InvariantViolation";
      case Kind::FileNotFound: return "FileNotFound";
    }
    return "ConfigError";
  }

  Kind kind_;
  std::string subject_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline bool parse_number(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && !text.empty();
}

inline bool parse_number(std::string_view text, std::uint64_t& out) {
  text = trim(text);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && !text.empty();
}

inline bool parse_number(std::string_view text, int& out) {
  text = trim(text);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc{} && ptr == end && !text.empty();
}

inline bool parse_bool(std::string_view text, bool& out) {
  text = trim(text);
  if (text == "true" || text == "1") return out = true, true;
  if (text == "false" || text == "0") return out = false, true;
  return false;
}

inline bool parse_pair(std::string_view text, std::pair<double, double>& out) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) return false;
  return parse_number(text.substr(0, comma), out.first) && parse_number(text.substr(comma + 1), out.second);
}

/// Shortest decimal form that parses back to the same double.
inline std::string format_roundtrip(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

/// One entry per key: a setter from text and a getter to text, bound to a config instance.
struct KeyBinding {
  std::function<bool(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename Member>
KeyBinding bind(Member member) {
  return KeyBinding{
      [member](ScenarioConfig& c, std::string_view v) {
        auto& field = member(c);
        using T = std::remove_reference_t<decltype(field)>;
        if constexpr (std::is_same_v<T, bool>) {
          return parse_bool(v, field);
        } else if constexpr (std::is_same_v<T, std::pair<double, double>>) {
          return parse_pair(v, field);
        } else {
          return parse_number(v, field);
        }
      },
      [member](const ScenarioConfig& c) {
        auto& field = member(const_cast<ScenarioConfig&>(c));
        using T = std::remove_reference_t<decltype(field)>;
        if constexpr (std::is_same_v<T, bool>) {
          return std::string(field ? "true" : "false");
        } else if constexpr (std::is_same_v<T, std::pair<double, double>>) {
          return format_roundtrip(field.first) + ", " + format_roundtrip(field.second);
        } else if constexpr (std::is_floating_point_v<T>) {
          return format_roundtrip(field);
        } else {
          return std::to_string(field);
        }
      }};
}

#define RAMPMERGE_KEY(name, expr) \
  { name, bind([](ScenarioConfig& c) -> auto& { return expr; }) }

inline const std::vector<std::pair<std::string, KeyBinding>>& key_table() {
  static const std::vector<std::pair<std::string, KeyBinding>> table = {
      RAMPMERGE_KEY("demand_vph", c.demand_vph),
      RAMPMERGE_KEY("penetration_rate", c.penetration_rate),
      RAMPMERGE_KEY("ramp_demand_fraction", c.ramp_demand_fraction),
      RAMPMERGE_KEY("duration", c.duration),
      RAMPMERGE_KEY("timestep", c.timestep),
      RAMPMERGE_KEY("seed", c.seed),
      RAMPMERGE_KEY("initial_speed_ramp", c.initial_speed_ramp),
      RAMPMERGE_KEY("initial_speed_mainline", c.initial_speed_mainline),
      RAMPMERGE_KEY("desired_speed", c.desired_speed),
      RAMPMERGE_KEY("desired_time_headway", c.desired_time_headway),
      RAMPMERGE_KEY("min_gap", c.min_gap),
      RAMPMERGE_KEY("vehicle_length", c.vehicle_length),
      RAMPMERGE_KEY("accel_bounds", c.accel_bounds),
      RAMPMERGE_KEY("driver_sigma_range", c.driver_sigma_range),
      RAMPMERGE_KEY("desired_speed_multiplier_range", c.desired_speed_multiplier_range),
      RAMPMERGE_KEY("ramp_approach_length", c.geometry.ramp_approach_length),
      RAMPMERGE_KEY("mainline_approach_length", c.geometry.mainline_approach_length),
      RAMPMERGE_KEY("merge_zone_length", c.geometry.merge_zone_length),
      RAMPMERGE_KEY("downstream_length", c.geometry.downstream_length),
      RAMPMERGE_KEY("mainline_lane_count", c.geometry.mainline_lane_count),
      RAMPMERGE_KEY("speed_limit", c.geometry.speed_limit),
      RAMPMERGE_KEY("controller.adjacency", c.controller.adjacency),
      RAMPMERGE_KEY("controller.gain_k", c.controller.gain_k),
      RAMPMERGE_KEY("controller.gain_gamma", c.controller.gain_gamma),
      RAMPMERGE_KEY("controller.comm_delay", c.controller.comm_delay),
      RAMPMERGE_KEY("controller.desired_time_gap", c.controller.desired_time_gap),
      RAMPMERGE_KEY("controller.free_flow_gain", c.controller.free_flow_gain),
      RAMPMERGE_KEY("controller.guard_reaction_time", c.controller.guard_reaction_time),
      RAMPMERGE_KEY("controller.guard_decel", c.controller.guard_decel),
      RAMPMERGE_KEY("controller.stop_comfort_decel", c.controller.stop_comfort_decel),
      RAMPMERGE_KEY("controller.platoon_blend_distance", c.controller.platoon_blend_distance),
      RAMPMERGE_KEY("krauss.reaction_time", c.krauss.reaction_time),
      RAMPMERGE_KEY("krauss.max_decel", c.krauss.max_decel),
      RAMPMERGE_KEY("game.safe_time_headway", c.game.safe_time_headway),
      RAMPMERGE_KEY("game.prediction_step", c.game.prediction_step),
      RAMPMERGE_KEY("game.infinity_cost", c.game.infinity_cost),
      RAMPMERGE_KEY("game.conflict_window", c.game.conflict_window),
      RAMPMERGE_KEY("game.conflict_horizon", c.game.conflict_horizon),
      RAMPMERGE_KEY("game.detection_range", c.game.detection_range),
      RAMPMERGE_KEY("game.commitment_window", c.game.commitment_window),
      RAMPMERGE_KEY("game.ttc_literal_sign", c.game.ttc_literal_sign),
      RAMPMERGE_KEY("merge.t_gap_safe", c.merge.t_gap_safe),
      RAMPMERGE_KEY("merge.lag_decel", c.merge.lag_decel),
      RAMPMERGE_KEY("fuel.mass", c.fuel.mass),
      RAMPMERGE_KEY("fuel.cda", c.fuel.cda),
      RAMPMERGE_KEY("fuel.air_density", c.fuel.air_density),
      RAMPMERGE_KEY("fuel.rolling_coeff", c.fuel.rolling_coeff),
      RAMPMERGE_KEY("fuel.gravity", c.fuel.gravity),
      RAMPMERGE_KEY("fuel.idle_rate", c.fuel.idle_rate),
      RAMPMERGE_KEY("fuel.energy_slope", c.fuel.energy_slope),
  };
  return table;
}

#undef RAMPMERGE_KEY

}  // namespace detail

/// Throws ConfigError(InvariantViolation) naming the first offending key.
inline void validate(const ScenarioConfig& c) {
  auto require = [](bool ok, const char* key, const char* reason) {
    if (!ok) throw ConfigError(ConfigError::Kind::InvariantViolation, key, reason);
  };
  auto finite = [](double v) { return std::isfinite(v); };

  require(finite(c.timestep) && c.timestep > 0, "timestep", "must be > 0");
  require(finite(c.duration) && c.duration > 0, "duration", "must be > 0");
  require(finite(c.demand_vph) && c.demand_vph >= 0, "demand_vph", "must be >= 0");
  require(c.penetration_rate >= 0 && c.penetration_rate <= 1, "penetration_rate", "must lie in [0, 1]");
  require(c.ramp_demand_fraction > 0 && c.ramp_demand_fraction < 1, "ramp_demand_fraction", "must lie in (0, 1)");
  require(c.accel_min() < 0 && c.accel_max() > 0, "accel_bounds", "need a_min < 0 < a_max");
  require(c.min_gap > 0, "min_gap", "must be > 0");
  require(c.desired_time_headway > 0, "desired_time_headway", "must be > 0");
  require(c.initial_speed_ramp >= 0, "initial_speed_ramp", "must be >= 0");
  require(c.initial_speed_mainline >= 0, "initial_speed_mainline", "must be >= 0");
  require(c.desired_speed > 0, "desired_speed", "must be > 0");
  require(c.vehicle_length > 0, "vehicle_length", "must be > 0");
  require(c.driver_sigma_range.first >= 0 && c.driver_sigma_range.first <= c.driver_sigma_range.second &&
              c.driver_sigma_range.second <= 1,
          "driver_sigma_range", "need 0 <= low <= high <= 1");
  require(c.desired_speed_multiplier_range.first > 0 &&
              c.desired_speed_multiplier_range.first <= c.desired_speed_multiplier_range.second,
          "desired_speed_multiplier_range", "need 0 < low <= high");

  const auto& g = c.geometry;
  require(g.ramp_approach_length > 0, "ramp_approach_length", "must be > 0");
  require(g.mainline_approach_length > 0, "mainline_approach_length", "must be > 0");
  require(g.merge_zone_length > 0, "merge_zone_length", "must be > 0");
  require(g.downstream_length > 0, "downstream_length", "must be > 0");
  require(g.mainline_lane_count == 2, "mainline_lane_count", "exactly 2 mainline lanes are modeled");
  require(g.speed_limit > 0, "speed_limit", "must be > 0");

  const auto& k = c.controller;
  require(k.adjacency >= 0, "controller.adjacency", "must be >= 0");
  require(k.gain_k > 0, "controller.gain_k", "must be > 0");
  require(k.gain_gamma > 0, "controller.gain_gamma", "must be > 0");
  require(k.comm_delay >= 0, "controller.comm_delay", "must be >= 0");
  require(k.desired_time_gap > 0, "controller.desired_time_gap", "must be > 0");
  require(k.free_flow_gain > 0, "controller.free_flow_gain", "must be > 0");
  require(k.guard_reaction_time >= 0, "controller.guard_reaction_time", "must be >= 0");
  require(k.guard_decel > 0, "controller.guard_decel", "must be > 0");
  require(k.stop_comfort_decel > 0, "controller.stop_comfort_decel", "must be > 0");
  require(k.platoon_blend_distance > 0, "controller.platoon_blend_distance", "must be > 0");

  require(c.krauss.reaction_time > 0, "krauss.reaction_time", "must be > 0");
  require(c.krauss.max_decel > 0, "krauss.max_decel", "must be > 0");

  const auto& gp = c.game;
  require(gp.safe_time_headway > 0, "game.safe_time_headway", "must be > 0");
  require(gp.prediction_step > 0, "game.prediction_step", "must be > 0");
  require(gp.infinity_cost > 2, "game.infinity_cost", "must exceed every finite cost (2)");
  require(gp.conflict_window > 0, "game.conflict_window", "must be > 0");
  require(gp.conflict_horizon > 0, "game.conflict_horizon", "must be > 0");
  require(gp.detection_range > 0, "game.detection_range", "must be > 0");
  require(gp.commitment_window >= 0, "game.commitment_window", "must be >= 0");

  require(c.merge.t_gap_safe >= 0, "merge.t_gap_safe", "must be >= 0");
  require(c.merge.lag_decel > 0, "merge.lag_decel", "must be > 0");

  const auto& f = c.fuel;
  require(f.mass > 0, "fuel.mass", "must be > 0");
  require(f.cda > 0, "fuel.cda", "must be > 0");
  require(f.air_density > 0, "fuel.air_density", "must be > 0");
  require(f.rolling_coeff > 0, "fuel.rolling_coeff", "must be > 0");
  require(f.gravity > 0, "fuel.gravity", "must be > 0");
  require(f.idle_rate > 0, "fuel.idle_rate", "must be > 0");
  require(f.energy_slope > 0, "fuel.energy_slope", "must be > 0");
}

/// Copies the shared vehicle parameters into the per-model parameter blocks.
inline void resolve_derived(ScenarioConfig& c, bool time_gap_given) {
  if (!time_gap_given) c.controller.desired_time_gap = c.desired_time_headway;
  c.krauss.accel_max = c.accel_max();
  c.krauss.timestep = c.timestep;
  c.krauss.min_gap = c.min_gap;
  c.controller.merge_min_gap = c.min_gap;
  c.controller.merge_time_gap = c.merge.t_gap_safe;
}

inline ScenarioConfig parse_scenario(std::string_view text) {
  ScenarioConfig config;
  const auto& table = detail::key_table();
  bool time_gap_given = false;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(ConfigError::Kind::MalformedLine, "line " + std::to_string(line_no), "expected key = value");
    const auto key = detail::trim(line.substr(0, eq));
    const auto value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(ConfigError::Kind::MalformedLine, "line " + std::to_string(line_no), "empty key or value");

    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError(ConfigError::Kind::UnknownKey, std::string(key), "");
    if (!it->second.set(config, value))
      throw ConfigError(ConfigError::Kind::MalformedLine, "line " + std::to_string(line_no),
                        "cannot parse value for " + std::string(key));
    if (key == "controller.desired_time_gap") time_gap_given = true;
  }

  resolve_derived(config, time_gap_given);
  validate(config);
  return config;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(ConfigError::Kind::FileNotFound, path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

/// Fully resolved configuration in scenario-file syntax; parse_scenario(to_text(c)) == c.
inline std::string to_text(const ScenarioConfig& c) {
  std::string out;
  for (const auto& [key, binding] : detail::key_table()) out += key + " = " + binding.get(c) + "\n";
  return out;
}

/// Light/moderate/congested labels carried as metadata for the three reference demands.
inline std::string congestion_label(double demand_vph) {
  if (demand_vph == 1400.0) return "light";
  if (demand_vph == 2400.0) return "moderate";
  if (demand_vph == 3400.0) return "congested";
  return "custom";
}

inline NetworkGeometry build_network(const ScenarioConfig& config) {
  const auto& g = config.geometry;
  auto positive = [](double v, const char* key) {
    if (!(v > 0)) throw ConfigError(ConfigError::Kind::InvariantViolation, key, "must be > 0");
  };
  positive(g.ramp_approach_length, "ramp_approach_length");
  positive(g.mainline_approach_length, "mainline_approach_length");
  positive(g.merge_zone_length, "merge_zone_length");
  positive(g.downstream_length, "downstream_length");
  positive(g.speed_limit, "speed_limit");
  if (g.mainline_lane_count != 2)
    throw ConfigError(ConfigError::Kind::InvariantViolation, "mainline_lane_count",
                      "exactly 2 mainline lanes are modeled");
  return g;
}

// ---------------------------------------------------------------------------------------------
// Demand

struct Departure {
  double departure_time = 0.0;
  Lane origin = Lane::MainlineRight;
  VehicleClass vehicle_class = VehicleClass::Legacy;
  double driver_sigma = 0.0;
  double desired_speed_multiplier = 1.0;

  bool operator==(const Departure&) const = default;
};

struct DepartureSchedule {
  std::vector<Departure> entries;
};

constexpr std::array<Lane, 3> kOrigins{Lane::Ramp, Lane::MainlineRight, Lane::MainlineLeft};

inline double origin_share(const ScenarioConfig& c, Lane origin) {
  return origin == Lane::Ramp ? c.ramp_demand_fraction : (1.0 - c.ramp_demand_fraction) / 2.0;
}

/// Poisson departures per origin. Each origin owns its own headway, classification and driver-trait
/// streams, so demand on one origin never perturbs the draws of another.
inline DepartureSchedule generate_departures(const ScenarioConfig& config) {
  DepartureSchedule schedule;
  if (config.demand_vph <= 0) return schedule;

  for (std::size_t o = 0; o < kOrigins.size(); ++o) {
    const Lane origin = kOrigins[o];
    const double rate_vph = origin_share(config, origin) * config.demand_vph;
    if (rate_vph <= 0) continue;
    const double mean_headway = 3600.0 / rate_vph;
    const auto index = static_cast<std::uint32_t>(o);
    auto headways = rng::make_stream(config.seed, rng::Stream::Headway, index);
    auto classes = rng::make_stream(config.seed, rng::Stream::Classification, index);
    auto traits = rng::make_stream(config.seed, rng::Stream::DriverTraits, index);

    double t = 0.0;
    for (;;) {
      t += rng::exponential(headways, mean_headway);
      if (t >= config.duration) break;
      Departure d;
      d.departure_time = t;
      d.origin = origin;
      d.vehicle_class =
          rng::uniform01(classes) < config.penetration_rate ? VehicleClass::CAV : VehicleClass::Legacy;
      // Trait draws happen for every entry so a vehicle's traits do not depend on its class draw.
      const double sigma = rng::uniform(traits, config.driver_sigma_range.first, config.driver_sigma_range.second);
      const double mult = rng::uniform(traits, config.desired_speed_multiplier_range.first,
                                       config.desired_speed_multiplier_range.second);
      if (d.vehicle_class == VehicleClass::Legacy) {
        d.driver_sigma = sigma;
        d.desired_speed_multiplier = mult;
      }
      schedule.entries.push_back(d);
    }
  }

  std::stable_sort(schedule.entries.begin(), schedule.entries.end(),
                   [](const Departure& a, const Departure& b) { return a.departure_time < b.departure_time; });
  return schedule;
}

}  // namespace rampmerge
