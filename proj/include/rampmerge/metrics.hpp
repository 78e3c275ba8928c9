/// @file   rampmerge/metrics.hpp
/// @brief  Group average speed (VMT/VHT), fuel via a resistance-power surrogate, and the
///         baseline-relative result table.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "rampmerge/scenario.hpp"
#include "rampmerge/types.hpp"

namespace rampmerge {

inline constexpr double kMetersPerMile = 1609.344;

enum class Group : std::uint8_t { Ramp, Mainline };

constexpr std::string_view to_string(Group g) { return g == Group::Ramp ? "Ramp" : "Mainline"; }

constexpr Group group_of(Lane origin) { return origin == Lane::Ramp ? Group::Ramp : Group::Mainline; }

struct TripRecord {
  VehicleId id = 0;
  VehicleClass vehicle_class = VehicleClass::Legacy;
  Lane origin = Lane::MainlineRight;
  double depart_time = 0.0;
  std::optional<double> arrival_time;
  double distance = 0.0;
  double fuel_grams = 0.0;
};

class MetricsError : public std::runtime_error {
 public:
  enum class Kind { IncompleteTrip, ZeroDistance, MissingBaseline };
  MetricsError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Tractive power m a v + 1/2 rho CdA v^3 + m g Cr v; fuel = idle + slope * max(P, 0).
inline double tractive_power(double v, double a, const FuelParams& p) {
  return p.mass * a * v + 0.5 * p.air_density * p.cda * v * v * v + p.mass * p.gravity * p.rolling_coeff * v;
}

inline double fuel_rate(double v, double a, const FuelParams& p) {
  return p.idle_rate + p.energy_slope * std::max(tractive_power(v, a, p), 0.0);
}

struct TrajectorySample {
  double speed = 0.0;
  double accel = 0.0;
};

struct TripFuel {
  double grams = 0.0;
  double grams_per_mile = 0.0;
};

/// Integrates fuel over an undecimated trajectory. Throws ZeroDistance for trips that never moved.
inline TripFuel trip_fuel(std::span<const TrajectorySample> samples, double distance, double dt, const FuelParams& p) {
  TripFuel out;
  for (const auto& s : samples) out.grams += fuel_rate(s.speed, s.accel, p) * dt;
  if (!(distance > 0)) throw MetricsError(MetricsError::Kind::ZeroDistance, "ZeroDistance: trip has no distance");
  out.grams_per_mile = out.grams / (distance / kMetersPerMile);
  return out;
}

template <typename Pred>
std::vector<const TripRecord*> select(std::span<const TripRecord> trips, Pred pred) {
  std::vector<const TripRecord*> out;
  for (const auto& t : trips)
    if (pred(t)) out.push_back(&t);
  return out;
}

/// Sum of distance over sum of travel time; empty when the group has no trips.
template <typename Pred>
std::optional<double> average_speed(std::span<const TripRecord> trips, Pred pred) {
  double distance = 0.0, time = 0.0;
  bool any = false;
  for (const auto* t : select(trips, pred)) {
    if (!t->arrival_time)
      throw MetricsError(MetricsError::Kind::IncompleteTrip, "IncompleteTrip: vehicle " + std::to_string(t->id));
    distance += t->distance;
    time += *t->arrival_time - t->depart_time;
    any = true;
  }
  if (!any || time <= 0) return std::nullopt;
  return distance / time;
}

inline std::optional<double> average_speed(std::span<const TripRecord> trips, Group g) {
  return average_speed(trips, [g](const TripRecord& t) { return group_of(t.origin) == g; });
}

/// Total grams over total miles of the group.
inline std::optional<double> fuel_per_mile(std::span<const TripRecord> trips, Group g) {
  double grams = 0.0, distance = 0.0;
  for (const auto& t : trips) {
    if (group_of(t.origin) != g) continue;
    grams += t.fuel_grams;
    distance += t.distance;
  }
  if (distance <= 0) return std::nullopt;
  return grams / (distance / kMetersPerMile);
}

inline double improvement_pct(double value, double baseline) { return 100.0 * (value - baseline) / baseline; }
inline double reduction_pct(double value, double baseline) { return 100.0 * (baseline - value) / baseline; }

/// Per-group outcome of one simulation run.
struct CellResult {
  Group group = Group::Ramp;
  double demand_vph = 0.0;
  double penetration = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> avg_speed;
  std::optional<double> fuel_g_per_mile;
};

struct ResultRow {
  Group group = Group::Ramp;
  double demand_vph = 0.0;
  double penetration = 0.0;
  std::optional<std::uint64_t> seed;  // empty for seed-averaged rows
  std::optional<double> avg_speed;
  std::optional<double> improvement_pct;
  std::optional<double> fuel_g_per_mile;
  std::optional<double> reduction_pct;
};

struct ResultTable {
  std::vector<ResultRow> rows;

  const ResultRow* find(Group g, double demand, double penetration, std::optional<std::uint64_t> seed) const {
    for (const auto& r : rows)
      if (r.group == g && r.demand_vph == demand && r.penetration == penetration && r.seed == seed) return &r;
    return nullptr;
  }
};

/// Baseline-relative percentages against the 0%-penetration cell with the same group, demand and
/// seed. With more than one seed, seed-averaged rows (mean of per-seed raw values) follow.
inline ResultTable aggregate(std::span<const CellResult> cells) {
  using Key = std::tuple<int, double, std::uint64_t>;
  std::map<Key, const CellResult*> baselines;
  for (const auto& c : cells)
    if (c.penetration == 0.0) baselines[{static_cast<int>(c.group), c.demand_vph, c.seed}] = &c;

  auto pct = [](const std::optional<double>& v, const std::optional<double>& base, auto fn) -> std::optional<double> {
    if (!v || !base || *base == 0.0) return std::nullopt;
    return fn(*v, *base);
  };

  ResultTable table;
  std::map<std::tuple<int, double, double>, std::vector<const CellResult*>> by_point;
  for (const auto& c : cells) {
    const auto it = baselines.find({static_cast<int>(c.group), c.demand_vph, c.seed});
    if (it == baselines.end())
      throw MetricsError(MetricsError::Kind::MissingBaseline,
                         "MissingBaseline: no 0% penetration run for demand " + std::to_string(c.demand_vph));
    const auto& base = *it->second;
    ResultRow row;
    row.group = c.group;
    row.demand_vph = c.demand_vph;
    row.penetration = c.penetration;
    row.seed = c.seed;
    row.avg_speed = c.avg_speed;
    row.fuel_g_per_mile = c.fuel_g_per_mile;
    row.improvement_pct = pct(c.avg_speed, base.avg_speed, improvement_pct);
    row.reduction_pct = pct(c.fuel_g_per_mile, base.fuel_g_per_mile, reduction_pct);
    table.rows.push_back(row);
    by_point[{static_cast<int>(c.group), c.demand_vph, c.penetration}].push_back(&c);
  }

  std::map<std::uint64_t, bool> seeds;
  for (const auto& c : cells) seeds[c.seed] = true;
  if (seeds.size() <= 1) return table;

  auto mean = [](const std::vector<const CellResult*>& v, auto field) -> std::optional<double> {
    double sum = 0.0;
    for (const auto* c : v) {
      const auto x = field(*c);
      if (!x) return std::nullopt;
      sum += *x;
    }
    return v.empty() ? std::nullopt : std::optional<double>(sum / static_cast<double>(v.size()));
  };
  std::map<std::tuple<int, double>, std::pair<std::optional<double>, std::optional<double>>> mean_baseline;
  for (const auto& [key, members] : by_point) {
    if (std::get<2>(key) != 0.0) continue;
    mean_baseline[{std::get<0>(key), std::get<1>(key)}] = {
        mean(members, [](const CellResult& c) { return c.avg_speed; }),
        mean(members, [](const CellResult& c) { return c.fuel_g_per_mile; })};
  }
  for (const auto& [key, members] : by_point) {
    ResultRow row;
    row.group = static_cast<Group>(std::get<0>(key));
    row.demand_vph = std::get<1>(key);
    row.penetration = std::get<2>(key);
    row.avg_speed = mean(members, [](const CellResult& c) { return c.avg_speed; });
    row.fuel_g_per_mile = mean(members, [](const CellResult& c) { return c.fuel_g_per_mile; });
    const auto& base = mean_baseline[{std::get<0>(key), std::get<1>(key)}];
    row.improvement_pct = pct(row.avg_speed, base.first, improvement_pct);
    row.reduction_pct = pct(row.fuel_g_per_mile, base.second, reduction_pct);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace rampmerge
