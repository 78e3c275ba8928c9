// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "closed_loop.hpp"
#include "fuel_profiles.hpp"
#include "oracle_suite.hpp"
#include "rampmerge/engine.hpp"
#include "rampmerge/game.hpp"
#include "rampmerge/sweep.hpp"
#include "reference_tables.hpp"

using namespace rampmerge;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %s  (%s)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void oracle_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = oracle::run_suite(10000, 20240601);
  const double t = seconds_since(t0);
  const bool ok = rep.cost_mismatches == 0 && rep.solver_mismatches == 0 && t < 10.0;
  report(ok, "cost function oracle equivalence",
         fmt("%zu states, %zu comparisons, max rel err %.2e, solver mismatches %zu, %.2f s%s%s", rep.cases,
             rep.comparisons, rep.max_relative_error, rep.solver_mismatches, t,
             rep.first_failure.empty() ? "" : ", first: ", rep.first_failure.c_str()));
}

void scalar_anchors() {
  // High-precision oracle evaluations, frozen.
  const double safety = risk_from_terms(10.0, 2.5, 3.0), distance = distance_risk(89.0, 15.0, 3.0),
               mobility = mobility_cost(-2.0, 10.0);
  const double e1 = std::abs(safety - 0.160140121143996), e2 = std::abs(distance - 0.0187882694943222),
               e3 = std::abs(mobility - 0.598687660112452);
  report(e1 < 1e-4 && e2 < 1e-4 && e3 < 1e-4, "scalar cost anchors",
         fmt("safety %.6f, distance %.6f, mobility %.6f; max abs err %.1e", safety, distance, mobility,
             std::max({e1, e2, e3})));
}

void consensus_convergence() {
  const auto r = closed_loop::run(20.0, 5.0, 20.0);
  report(r.converged && r.converged_at <= 60.0 && r.min_gap > 0.0, "consensus closed-loop convergence",
         fmt("gap error 20 m, speed error 5 m/s: inside (0.1 m, 0.1 m/s) from t=%.2f s, min gap %.2f m",
             r.converged_at, r.min_gap));
}

struct GridRun {
  std::vector<CellResult> cells;
  ResultTable table;
};

GridRun full_sweep() {
  const SweepSpec spec;
  const auto t0 = std::chrono::steady_clock::now();
  GridRun out;
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t collisions = 0, vehicles = 0;
  std::string error;
  for (const auto& cell : expand(spec)) {
    const auto c = cell.config(spec.base);
    try {
      const auto log = run(c, {.trajectory_decimation = 0, .games = GameTrace::None});
      min_gap = std::min(min_gap, log.stats.min_same_lane_gap);
      vehicles += log.stats.arrived;
      const auto rows = summarize(log, c);
      out.cells.insert(out.cells.end(), rows.begin(), rows.end());
    } catch (const SimulationError& e) {
      ++collisions;
      if (error.empty()) error = std::string(", ") + cell.directory_name() + ": " + e.what();
    } catch (const std::exception& e) {
      ++collisions;
      if (error.empty()) error = std::string(", ") + cell.directory_name() + ": " + e.what();
    }
  }
  const double t = seconds_since(t0);
  report(collisions == 0 && min_gap > 0.0 && t < 600.0, "collision-free 12-cell sweep",
         fmt("seed 42, %zu vehicles, %zu aborted cells, min same-lane gap %.3f m, %.1f s%s", vehicles, collisions,
             min_gap, t, error.c_str()));
  if (collisions == 0) out.table = aggregate(out.cells);
  return out;
}

void determinism() {
  ScenarioConfig c;
  c.demand_vph = 2400.0;
  c.penetration_rate = 0.3;
  const auto root = fs::temp_directory_path() / "rampmerge_acceptance_determinism";
  fs::remove_all(root);
  const RunOutputs outputs{10, GameTrace::Changes};
  run_to_directory(c, root / "a", outputs);
  run_to_directory(c, root / "b", outputs);
  std::size_t files = 0, differing = 0, bytes = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++files;
    const auto a = slurp(e.path()), b = slurp(root / "b" / e.path().filename());
    bytes += a.size();
    if (a != b) ++differing;
  }
  fs::remove_all(root);
  report(files >= 4 && differing == 0, "repeated runs are byte-identical",
         fmt("%zu CSV files, %zu bytes, %zu differing", files, bytes, differing));
}

const ResultRow* row(const ResultTable& t, Group g, double d, double p) { return t.find(g, d, p, 42); }

void speed_trend(const GridRun& grid) {
  bool ok = !grid.table.rows.empty();
  std::string detail;
  double worst_drop = 0.0, min_full = 1e9;
  for (const Group g : {Group::Ramp, Group::Mainline})
    for (const double d : {1400.0, 2400.0, 3400.0}) {
      for (std::size_t i = 0; ok && i + 1 < reference::kPenetrations.size(); ++i) {
        const auto* a = row(grid.table, g, d, reference::kPenetrations[i]);
        const auto* b = row(grid.table, g, d, reference::kPenetrations[i + 1]);
        if (!a || !b || !a->avg_speed || !b->avg_speed) {
          ok = false;
          break;
        }
        worst_drop = std::max(worst_drop, (*a->avg_speed - *b->avg_speed) / *a->avg_speed);
      }
      if (const auto* f = row(grid.table, g, d, 1.0); f && f->avg_speed) min_full = std::min(min_full, *f->avg_speed);
    }
  const auto* heavy = row(grid.table, Group::Ramp, 3400, 1.0);
  const auto* light = row(grid.table, Group::Ramp, 1400, 1.0);
  const double heavy_pct = heavy && heavy->improvement_pct ? *heavy->improvement_pct : 0.0;
  const double light_pct = light && light->improvement_pct ? *light->improvement_pct : 0.0;
  ok = ok && worst_drop <= 0.02 && min_full >= 0.9 * 20.0 && heavy_pct > light_pct;
  report(ok, "average speed rises with penetration",
         fmt("largest drop %.2f%%, slowest group at 100%% %.2f m/s, ramp gain at 100%% congested %.2f%% vs light %.2f%%",
             100.0 * worst_drop, min_full, heavy_pct, light_pct));
}

void fuel_trend(const GridRun& grid) {
  bool ok = !grid.table.rows.empty();
  double worst_rise = 0.0, smallest_cut = 1e9;
  for (const Group g : {Group::Ramp, Group::Mainline})
    for (const double d : {1400.0, 2400.0, 3400.0}) {
      for (std::size_t i = 0; ok && i + 1 < reference::kPenetrations.size(); ++i) {
        const auto* a = row(grid.table, g, d, reference::kPenetrations[i]);
        const auto* b = row(grid.table, g, d, reference::kPenetrations[i + 1]);
        if (!a || !b || !a->fuel_g_per_mile || !b->fuel_g_per_mile) {
          ok = false;
          break;
        }
        worst_rise = std::max(worst_rise, (*b->fuel_g_per_mile - *a->fuel_g_per_mile) / *a->fuel_g_per_mile);
      }
      const auto* base = row(grid.table, g, d, 0.0);
      const auto* full = row(grid.table, g, d, 1.0);
      if (base && full && base->fuel_g_per_mile && full->fuel_g_per_mile)
        smallest_cut = std::min(smallest_cut, *base->fuel_g_per_mile - *full->fuel_g_per_mile);
      else
        ok = false;
    }
  ok = ok && worst_rise <= 0.02 && smallest_cut > 0.0;
  report(ok, "fuel per mile falls with penetration",
         fmt("largest rise %.2f%%, smallest cut at 100%% %.2f g/mile", 100.0 * worst_rise, smallest_cut));
}

void percentage_regression() {
  const auto t = aggregate(reference::cells());
  double worst = 0.0;
  std::size_t checked = 0;
  bool ok = true;
  for (std::size_t s = 0; s < reference::kSpeed.size(); ++s)
    for (std::size_t p = 0; p < reference::kPenetrations.size(); ++p) {
      const auto* r = t.find(reference::kSpeed[s].group, reference::kSpeed[s].demand, reference::kPenetrations[p], 0);
      if (!r || !r->improvement_pct || !r->reduction_pct) {
        ok = false;
        continue;
      }
      worst = std::max({worst, std::abs(*r->improvement_pct - reference::kSpeed[s].pct[p]),
                        std::abs(*r->reduction_pct - reference::kFuel[s].pct[p])});
      checked += 2;
    }
  report(ok && worst <= 0.01, "improvement and reduction percentages",
         fmt("%zu published percentages, max deviation %.4f points", checked, worst));
}

void stop_and_go_fuel() {
  const double dt = 0.02;
  double covered = 0.0;
  const auto sg = fuel_profiles::stop_and_go(20.0, 2.0, 3.0, kMetersPerMile, dt, &covered);
  const auto steady = fuel_profiles::cruise(20.0, covered, dt);
  const auto a = trip_fuel(sg, covered, dt, FuelParams{});
  const auto b = trip_fuel(steady, covered, dt, FuelParams{});
  report(a.grams_per_mile > b.grams_per_mile, "stop-and-go burns more fuel than steady cruise",
         fmt("%.1f m: %.2f vs %.2f g/mile", covered, a.grams_per_mile, b.grams_per_mile));
}

}  // namespace

int main() {
  oracle_suite();
  scalar_anchors();
  consensus_convergence();
  const auto grid = full_sweep();
  determinism();
  speed_trend(grid);
  fuel_trend(grid);
  percentage_regression();
  stop_and_go_fuel();
  std::printf("%s: %d failing\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
