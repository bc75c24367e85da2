// Copyright 2026 The faircap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <clocale>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "faircap/fairness.hpp"
#include "faircap/oracle.hpp"
#include "faircap/scenario.hpp"
#include "faircap/solvers.hpp"

namespace {

using namespace faircap;

struct CliOverrides {
  std::string config_path;
  std::vector<double> capacities;
  std::string regimes;
  std::string out_dir;
  std::int64_t seed = -1;
  int bins = 0;
  std::string preset;
  std::string csv;
};

ScenarioConfig assemble_config(const CliOverrides& cli) {
  ScenarioConfig cfg;
  if (!cli.config_path.empty()) {
    std::ifstream in(cli.config_path);
    if (!in) {
      throw ConfigError("cannot open config file " + cli.config_path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    cfg = parse_config(buf.str());
  }
  if (!cli.capacities.empty()) {
    cfg.capacities = cli.capacities;
  }
  if (!cli.regimes.empty()) {
    cfg.regimes.clear();
    std::stringstream ss(cli.regimes);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto regime = regime_from_name(name);
      if (!regime) {
        throw ConfigError("unknown regime '" + name + "'");
      }
      cfg.regimes.push_back(*regime);
    }
  }
  if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
  if (cli.seed >= 0) cfg.seed = static_cast<std::uint64_t>(cli.seed);
  if (cli.bins > 0) cfg.bins = cli.bins;
  if (!cli.preset.empty()) {
    cfg.csv_path.reset();
    cfg.inline_groups.clear();
    if (cli.preset == "fig1") cfg.preset = FigurePreset::fig1;
    else if (cli.preset == "fig2") cfg.preset = FigurePreset::fig2;
    else if (cli.preset == "fig3") cfg.preset = FigurePreset::fig3;
    else throw ConfigError("unknown preset '" + cli.preset + "'");
  }
  if (!cli.csv.empty()) {
    cfg.preset.reset();
    cfg.inline_groups.clear();
    cfg.csv_path = cli.csv;
  }
  return cfg;
}

int run_command(const CliOverrides& cli, bool sweep) {
  ScenarioConfig cfg;
  try {
    cfg = assemble_config(cli);
    if (!sweep && cfg.capacities.size() > 1) {
      throw ConfigError("run takes a single capacity; use sweep for lists");
    }
    const RunOutcome outcome = run_scenario(cfg);
    for (const auto& w : outcome.warnings) {
      std::cerr << "warning: " << w << '\n';
    }
    for (const auto& f : outcome.files_written) {
      std::cout << f << '\n';
    }
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

// Small deterministic instance pool for `verify`.
ScoreDistribution random_dist(std::mt19937_64& rng, int max_atoms) {
  std::uniform_int_distribution<int> n_atoms(1, max_atoms);
  std::uniform_real_distribution<double> value(0.02, 1.0);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  const int n = n_atoms(rng);
  std::vector<std::pair<double, double>> support;
  support.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    support.emplace_back(value(rng), mass(rng));
  }
  return ScoreDistribution(std::move(support));
}

GroupedPopulation random_population(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> mass(0.2, 1.0);
  std::vector<Group> groups;
  for (int i = 0; i < m; ++i) {
    groups.push_back(Group{"G" + std::to_string(i + 1), mass(rng),
                           random_dist(rng, 6)});
  }
  return GroupedPopulation(std::move(groups));
}

int verify_command() {
  struct Case {
    GroupedPopulation pop;
    double capacity;
  };
  std::vector<Case> cases;
  cases.push_back(
      {GroupedPopulation(
           {Group{"S1", 0.5, ScoreDistribution({{0.2, 0.8}, {0.8, 0.2}})},
            Group{"S2", 0.5, ScoreDistribution({{0.1, 0.8}, {0.4, 0.2}})}}),
       0.2});
  std::mt19937_64 rng(20260810);
  for (int i = 0; i < 6; ++i) {
    const int m = 2 + (i % 2);
    auto pop = random_population(rng, m);
    std::uniform_real_distribution<double> cap(0.05, 0.4);
    cases.push_back({std::move(pop), cap(rng)});
  }

  const struct {
    Regime regime;
    OracleObjective objective;
  } pairs[] = {
      {Regime::utility_max, OracleObjective::tp},
      {Regime::max_min, OracleObjective::min_tp},
      {Regime::proportional, OracleObjective::prop},
      {Regime::equal_opportunity, OracleObjective::eo_ratio},
      {Regime::achievable_eo, OracleObjective::aeo_ratio},
  };

  bool all_ok = true;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& c = cases[ci];
    for (const auto& pair : pairs) {
      const SolveResult got = solve(c.pop, c.capacity, pair.regime);
      double solver_value = 0.0;
      switch (pair.objective) {
        case OracleObjective::tp:
          solver_value = got.global_tp;
          break;
        case OracleObjective::min_tp:
          solver_value =
              *std::min_element(got.group_tp.begin(), got.group_tp.end());
          break;
        case OracleObjective::prop:
          solver_value = prop_value(got.policy, c.pop);
          break;
        case OracleObjective::eo_ratio: {
          solver_value = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < c.pop.size(); ++i) {
            solver_value = std::min(
                solver_value, got.group_tp[i] / c.pop.base_rate(i));
          }
          break;
        }
        case OracleObjective::aeo_ratio: {
          solver_value = std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < c.pop.size(); ++i) {
            solver_value = std::min(
                solver_value,
                got.group_tp[i] / achievable_tp(c.pop, i, c.capacity));
          }
          break;
        }
      }
      const OracleResult coarse =
          oracle_solve(c.pop, GridSpec{201, c.capacity}, pair.objective);
      const OracleResult fine =
          oracle_solve(c.pop, GridSpec{401, c.capacity}, pair.objective);
      // No grid point may beat the solver, and refining the grid must not
      // widen the gap to the solver's optimum.
      const double gap_coarse = solver_value - coarse.value;
      const double gap_fine = solver_value - fine.value;
      const bool ok = gap_coarse >= -1e-9 && gap_fine >= -1e-9 &&
                      gap_fine <= gap_coarse + 1e-12;
      std::cout << (ok ? "PASS" : "FAIL") << " case " << ci << " "
                << regime_name(pair.regime) << ": solver=" << solver_value
                << " oracle=" << fine.value << '\n';
      all_ok = all_ok && ok;
    }
  }
  std::cout << (all_ok ? "verify: all checks passed"
                       : "verify: some checks FAILED")
            << '\n';
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_ALL, "C");
  CLI::App app{"Capacity-constrained fair allocation over risk-scored "
               "grouped populations"};
  app.require_subcommand(1);

  CliOverrides cli;
  auto add_shared = [&](CLI::App* cmd) {
    cmd->add_option("--config", cli.config_path, "JSON scenario config");
    cmd->add_option("--capacity", cli.capacities,
                    "capacity value(s), overrides config");
    cmd->add_option("--regime", cli.regimes,
                    "comma-separated regimes, overrides config");
    cmd->add_option("--out", cli.out_dir, "output directory");
    cmd->add_option("--seed", cli.seed, "RNG seed");
    cmd->add_option("--bins", cli.bins, "discretization bins");
    cmd->add_option("--preset", cli.preset, "population preset fig1|fig2|fig3");
    cmd->add_option("--csv", cli.csv, "population CSV path");
  };

  auto* run = app.add_subcommand("run", "solve one capacity, emit CSV reports");
  add_shared(run);
  auto* sweep = app.add_subcommand("sweep", "solve a capacity list");
  add_shared(sweep);
  auto* verify =
      app.add_subcommand("verify", "solver-vs-oracle checks on bundled instances");

  CLI11_PARSE(app, argc, argv);

  if (verify->parsed()) {
    return verify_command();
  }
  return run_command(cli, sweep->parsed());
}
