/// @file   rampmerge/csv.hpp
/// @brief  Fixed-schema CSV writers. Numbers use 9 significant digits and rows end in "\n".

#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "rampmerge/engine.hpp"
#include "rampmerge/metrics.hpp"

namespace rampmerge::csv {

inline constexpr std::string_view kTripsHeader = "id,class,origin,depart_s,arrival_s,distance_m,fuel_g";
inline constexpr std::string_view kTrajectoriesHeader = "id,t_s,lane,pos_m,speed_mps,accel_mps2,role,target_id";
inline constexpr std::string_view kGamesHeader =
    "t_s,ego_id,comp_id,kind,ego_role,ego_cost_lead,ego_cost_follow,comp_cost_lead,comp_cost_follow,risk1,risk_d2e,"
    "mobility";
inline constexpr std::string_view kTableHeader =
    "group,demand_vph,penetration,avg_speed_mps,improvement_pct,fuel_g_per_mile,reduction_pct,seed";

inline std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x);  // no "-0"
  return buf;
}

inline std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string{}; }

inline void write_trips(std::ostream& out, std::span<const TripRecord> trips) {
  out << kTripsHeader << '\n';
  for (const auto& t : trips)
    out << t.id << ',' << to_string(t.vehicle_class) << ',' << to_string(t.origin) << ',' << num(t.depart_time) << ','
        << num(t.arrival_time) << ',' << num(t.distance) << ',' << num(t.fuel_grams) << '\n';
}

inline void write_trajectories(std::ostream& out, std::span<const TrajectoryRecord> rows) {
  out << kTrajectoriesHeader << '\n';
  for (const auto& r : rows) {
    out << r.id << ',' << num(r.time) << ',' << to_string(r.lane) << ',' << num(r.position) << ',' << num(r.speed)
        << ',' << num(r.accel) << ',' << to_string(r.role) << ',';
    if (r.target_id) out << *r.target_id;
    out << '\n';
  }
}

inline void write_games(std::ostream& out, std::span<const GameTraceRecord> rows) {
  out << kGamesHeader << '\n';
  for (const auto& r : rows) {
    const auto& g = r.game;
    const auto& chosen = g.chosen();
    out << num(r.time) << ',' << g.ego_id << ',' << g.competitor_id << ',' << to_string(g.kind) << ','
        << to_string(g.outcome.ego_role) << ',' << num(g.ego_lead.total_cost) << ',' << num(g.ego_follow.total_cost)
        << ',';
    if (g.comp_lead) out << num(g.comp_lead->total_cost);
    out << ',';
    if (g.comp_follow) out << num(g.comp_follow->total_cost);
    out << ',' << num(chosen.risk1) << ',' << num(chosen.risk_d2e) << ',' << num(chosen.mobility) << '\n';
  }
}

inline void write_table(std::ostream& out, std::span<const ResultRow> rows) {
  out << kTableHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.group) << ',' << num(r.demand_vph) << ',' << num(r.penetration) << ',' << num(r.avg_speed)
        << ',' << num(r.improvement_pct) << ',' << num(r.fuel_g_per_mile) << ',' << num(r.reduction_pct) << ',';
    if (r.seed) out << *r.seed;
    out << '\n';
  }
}

}  // namespace rampmerge::csv
