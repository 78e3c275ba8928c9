// rampmerge: validate a scenario, run it, or sweep the demand x penetration grid.
//
// Exit status: 0 ok, 1 configuration error, 2 simulation abort, 3 some sweep cells failed.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rampmerge/rampmerge.hpp"

namespace fs = std::filesystem;
using namespace rampmerge;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kSimulationAbort = 2;
constexpr int kPartialSweep = 3;

std::string default_out_dir() {
  if (const char* env = std::getenv("RAMPMERGE_OUT")) return env;
  return "rampmerge_out";
}

// "none", "full", or a positive integer N meaning every N-th step.
int parse_trajectory_mode(const std::string& mode) {
  if (mode == "none") return 0;
  if (mode == "full") return 1;
  std::size_t used = 0;
  int n = 0;
  try {
    n = std::stoi(mode, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != mode.size() || n <= 0) throw CLI::ValidationError("--trajectories", "expected none, full or N > 0");
  return n;
}

GameTrace parse_game_mode(const std::string& mode) {
  if (mode == "none") return GameTrace::None;
  if (mode == "full") return GameTrace::Full;
  return GameTrace::Changes;
}

void print_summary(std::span<const CellResult> cells) {
  for (const auto& c : cells)
    std::cout << to_string(c.group) << " demand=" << csv::num(c.demand_vph) << " ("
              << congestion_label(c.demand_vph) << ") penetration=" << csv::num(c.penetration)
              << " avg_speed_mps=" << csv::num(c.avg_speed) << " fuel_g_per_mile=" << csv::num(c.fuel_g_per_mile)
              << '\n';
}

ScenarioConfig base_config(const std::string& path) { return path.empty() ? ScenarioConfig{} : load_scenario(path); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"On-ramp merge simulator with game-theoretic CAV merging"};
  app.require_subcommand(1);

  auto* validate_cmd = app.add_subcommand("validate", "Parse a scenario file and print the resolved configuration");
  std::string validate_path;
  validate_cmd->add_option("config", validate_path, "Scenario file")->required();

  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write CSV outputs");
  std::string run_path;
  std::optional<std::uint64_t> run_seed;
  std::string run_out = default_out_dir();
  std::string trajectories = "none";
  std::string games = "changes";
  run_cmd->add_option("config", run_path, "Scenario file (defaults apply when omitted)");
  run_cmd->add_option("--seed", run_seed, "Override the scenario seed");
  run_cmd->add_option("--out", run_out, "Output directory (env RAMPMERGE_OUT)");
  run_cmd->add_option("--trajectories", trajectories, "none | full | N (every N-th step)");
  run_cmd->add_option("--games", games, "Game trace: none | changes | full")
      ->check(CLI::IsMember({"none", "changes", "full"}));

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the demand x penetration x seed grid");
  std::string sweep_path;
  SweepSpec spec;
  std::string sweep_out = default_out_dir();
  unsigned jobs = 1;
  std::string sweep_games = "none";
  sweep_cmd->add_option("config", sweep_path, "Base scenario file (defaults apply when omitted)");
  sweep_cmd->add_option("--demands", spec.demands, "Demands in veh/h")->delimiter(',');
  sweep_cmd->add_option("--penetrations", spec.penetrations, "CAV penetration fractions")->delimiter(',');
  sweep_cmd->add_option("--seeds", spec.seeds, "Seeds")->delimiter(',');
  sweep_cmd->add_option("--out", sweep_out, "Output directory (env RAMPMERGE_OUT)");
  sweep_cmd->add_option("--jobs", jobs, "Cells run concurrently")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--games", sweep_games, "Game trace per cell: none | changes | full")
      ->check(CLI::IsMember({"none", "changes", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate_cmd) {
      std::cout << to_text(load_scenario(validate_path));
      return kOk;
    }

    if (*run_cmd) {
      ScenarioConfig config = base_config(run_path);
      if (run_seed) config.seed = *run_seed;
      RunOutputs outputs{parse_trajectory_mode(trajectories), parse_game_mode(games)};
      try {
        const auto cells = run_to_directory(config, run_out, outputs);
        print_summary(cells);
      } catch (const SimulationError& e) {
        std::cerr << e.what() << '\n' << e.diagnostics();
        return kSimulationAbort;
      } catch (const DynamicsError& e) {
        std::cerr << e.what() << '\n';
        return kSimulationAbort;
      }
      return kOk;
    }

    if (*sweep_cmd) {
      spec.base = base_config(sweep_path);
      const auto result = run_sweep(spec, sweep_out, jobs, RunOutputs{0, parse_game_mode(sweep_games)});
      print_summary(result.cells);
      for (const auto& f : result.failures)
        std::cerr << "cell " << f.cell.directory_name() << " failed: " << f.message << '\n';
      return result.failures.empty() ? kOk : kPartialSweep;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
