/// @file   rampmerge/sweep.hpp
/// @brief  Demand x penetration x seed grid runner.

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "rampmerge/csv.hpp"
#include "rampmerge/engine.hpp"
#include "rampmerge/metrics.hpp"
#include "rampmerge/scenario.hpp"

namespace rampmerge {

struct SweepSpec {
  std::vector<double> demands{1400.0, 2400.0, 3400.0};
  std::vector<double> penetrations{0.0, 0.3, 0.7, 1.0};
  std::vector<std::uint64_t> seeds{42};
  ScenarioConfig base;

  std::size_t size() const { return demands.size() * penetrations.size() * seeds.size(); }
};

struct SweepCell {
  double demand_vph = 0.0;
  double penetration = 0.0;
  std::uint64_t seed = 0;

  ScenarioConfig config(const ScenarioConfig& base) const {
    ScenarioConfig c = base;
    c.demand_vph = demand_vph;
    c.penetration_rate = penetration;
    c.seed = seed;
    return c;
  }

  std::string directory_name() const {
    return std::string(congestion_label(demand_vph)) + "_d" + csv::num(demand_vph) + "_p" + csv::num(penetration) +
           "_s" + std::to_string(seed);
  }
};

inline std::vector<SweepCell> expand(const SweepSpec& spec) {
  if (spec.demands.empty() || spec.penetrations.empty() || spec.seeds.empty())
    throw ConfigError(ConfigError::Kind::InvariantViolation, "sweep lists", "must be non-empty");
  std::vector<SweepCell> cells;
  for (const double d : spec.demands)
    for (const double p : spec.penetrations)
      for (const auto s : spec.seeds) cells.push_back({d, p, s});
  return cells;
}

/// Per-group results of one finished run.
inline std::vector<CellResult> summarize(const SimulationLog& log, const ScenarioConfig& c) {
  std::vector<CellResult> out;
  for (const Group g : {Group::Ramp, Group::Mainline}) {
    CellResult r;
    r.group = g;
    r.demand_vph = c.demand_vph;
    r.penetration = c.penetration_rate;
    r.seed = c.seed;
    r.avg_speed = average_speed(log.trips, g);
    r.fuel_g_per_mile = fuel_per_mile(log.trips, g);
    out.push_back(r);
  }
  return out;
}

/// Result rows for a single run, with no baseline to compare against.
inline std::vector<ResultRow> single_run_rows(std::span<const CellResult> cells) {
  std::vector<ResultRow> rows;
  for (const auto& c : cells) {
    ResultRow r;
    r.group = c.group;
    r.demand_vph = c.demand_vph;
    r.penetration = c.penetration;
    r.seed = c.seed;
    r.avg_speed = c.avg_speed;
    r.fuel_g_per_mile = c.fuel_g_per_mile;
    rows.push_back(r);
  }
  return rows;
}

struct RunOutputs {
  int trajectory_decimation = 0;
  GameTrace games = GameTrace::Changes;
};

/// Runs one scenario and writes its CSVs into `dir`. Simulation errors propagate.
inline std::vector<CellResult> run_to_directory(const ScenarioConfig& config, const std::filesystem::path& dir,
                                                const RunOutputs& outputs) {
  std::filesystem::create_directories(dir);
  LogOptions opts;
  opts.trajectory_decimation = outputs.trajectory_decimation;
  opts.games = outputs.games;
  const SimulationLog log = run(config, opts);
  const auto cells = summarize(log, config);

  auto open = [&](const char* name) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(std::string("cannot write ") + (dir / name).string());
    return f;
  };
  {
    auto f = open("trips.csv");
    csv::write_trips(f, log.trips);
  }
  {
    auto f = open("results.csv");
    csv::write_table(f, single_run_rows(cells));
  }
  if (outputs.trajectory_decimation > 0) {
    auto f = open("trajectories.csv");
    csv::write_trajectories(f, log.trajectories);
  }
  if (outputs.games != GameTrace::None) {
    auto f = open("games.csv");
    csv::write_games(f, log.games);
  }
  return cells;
}

struct CellFailure {
  SweepCell cell;
  std::string message;
};

struct SweepResult {
  std::vector<CellResult> cells;  // in grid order, failed cells omitted
  std::vector<CellFailure> failures;
  ResultTable table;
};

/// Runs every cell, up to `jobs` at a time. A failing cell is recorded and the rest continue.
inline SweepResult run_sweep(const SweepSpec& spec, const std::filesystem::path& out, unsigned jobs,
                             const RunOutputs& outputs = {}) {
  const auto cells = expand(spec);
  std::vector<std::vector<CellResult>> results(cells.size());
  std::vector<std::optional<std::string>> errors(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = run_to_directory(cells[i].config(spec.base), out / cells[i].directory_name(), outputs);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepResult result;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (errors[i]) result.failures.push_back({cells[i], *errors[i]});
    else result.cells.insert(result.cells.end(), results[i].begin(), results[i].end());
  }
  // Cells whose baseline failed cannot be expressed relative to it; they are left out of the table.
  std::vector<CellResult> comparable;
  for (const auto& c : result.cells) {
    const bool has_base = std::any_of(result.cells.begin(), result.cells.end(), [&](const CellResult& b) {
      return b.penetration == 0.0 && b.group == c.group && b.demand_vph == c.demand_vph && b.seed == c.seed;
    });
    if (has_base) comparable.push_back(c);
  }
  result.table = aggregate(comparable);
  std::filesystem::create_directories(out);
  std::ofstream f(out / "table.csv", std::ios::binary | std::ios::trunc);
  csv::write_table(f, result.table.rows);
  return result;
}

}  // namespace rampmerge
