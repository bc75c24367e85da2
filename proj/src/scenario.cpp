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

#include "faircap/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "faircap/fairness.hpp"

namespace faircap {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

FigurePreset preset_from_name(const std::string& name) {
  if (name == "fig1") return FigurePreset::fig1;
  if (name == "fig2") return FigurePreset::fig2;
  if (name == "fig3") return FigurePreset::fig3;
  throw ConfigError("unknown preset '" + name + "' (expected fig1|fig2|fig3)");
}

std::string flags_to_string(unsigned flags) {
  std::string out;
  const auto append = [&](const char* name) {
    if (!out.empty()) out += ';';
    out += name;
  };
  if (flags & solve_flags::boundary) append("boundary");
  if (flags & solve_flags::saturated) append("saturated");
  if (flags & solve_flags::excluded_group) append("excluded_group");
  return out;
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  ScenarioConfig cfg;
  try {
    if (doc.contains("population")) {
      const auto& pop = doc.at("population");
      if (pop.contains("csv")) {
        cfg.csv_path = pop.at("csv").get<std::string>();
      }
      if (pop.contains("preset")) {
        cfg.preset = preset_from_name(pop.at("preset").get<std::string>());
      }
      if (pop.contains("groups")) {
        for (const auto& g : pop.at("groups")) {
          InlineGroupSpec spec;
          spec.name = g.at("name").get<std::string>();
          spec.weight = g.at("weight").get<double>();
          spec.mean = g.at("mean").get<double>();
          spec.variance = g.at("variance").get<double>();
          cfg.inline_groups.push_back(std::move(spec));
        }
      }
    }
    if (doc.contains("capacity")) {
      cfg.capacities.push_back(doc.at("capacity").get<double>());
    }
    if (doc.contains("capacities")) {
      for (const auto& c : doc.at("capacities")) {
        cfg.capacities.push_back(c.get<double>());
      }
    }
    if (doc.contains("regimes")) {
      for (const auto& r : doc.at("regimes")) {
        const auto name = r.get<std::string>();
        const auto regime = regime_from_name(name);
        if (!regime) {
          throw ConfigError("unknown regime '" + name + "'");
        }
        cfg.regimes.push_back(*regime);
      }
    }
    if (doc.contains("bins")) cfg.bins = doc.at("bins").get<int>();
    if (doc.contains("hist_bins")) cfg.hist_bins = doc.at("hist_bins").get<int>();
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("out")) cfg.out_dir = doc.at("out").get<std::string>();
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

void validate_config(const ScenarioConfig& config) {
  int sources = 0;
  if (config.csv_path) ++sources;
  if (config.preset) ++sources;
  if (!config.inline_groups.empty()) ++sources;
  if (sources != 1) {
    throw ConfigError("exactly one population source required "
                      "(csv, preset or inline groups)");
  }
  if (config.capacities.empty()) {
    throw ConfigError("at least one capacity required");
  }
  for (double c : config.capacities) {
    if (!(c >= 0.0 && c <= 1.0)) {
      throw ConfigError("capacities must lie in [0,1]");
    }
  }
  if (config.regimes.empty()) {
    throw ConfigError("at least one regime required");
  }
  if (config.bins < 2) {
    throw ConfigError("bins must be >= 2");
  }
  if (config.hist_bins < 1) {
    throw ConfigError("hist_bins must be >= 1");
  }
  for (const auto& g : config.inline_groups) {
    if (g.name.empty()) throw ConfigError("inline group needs a name");
    if (!(g.weight > 0.0)) throw ConfigError("inline group weight must be > 0");
    if (!(g.variance > 0.0)) {
      throw ConfigError("inline group variance must be > 0");
    }
  }
}

namespace {

GroupedPopulation build_population(const ScenarioConfig& config) {
  if (config.preset) {
    return make_figure_population(*config.preset, config.bins);
  }
  if (config.csv_path) {
    auto loaded = load_csv(*config.csv_path);
    if (std::holds_alternative<GroupedPopulation>(loaded)) {
      return std::get<GroupedPopulation>(std::move(loaded));
    }
    return std::get<LabeledDataset>(loaded).to_population();
  }
  std::vector<Group> groups;
  for (const auto& g : config.inline_groups) {
    groups.push_back(
        Group{g.name, g.weight, discretize({g.mean, g.variance, config.bins})});
  }
  return GroupedPopulation(std::move(groups));
}

void write_histogram(const GroupedPopulation& pop, int hist_bins,
                     std::ofstream& out) {
  out << "group,bin_lo,bin_hi,mass\n";
  for (const auto& g : pop.groups()) {
    std::vector<double> mass(static_cast<std::size_t>(hist_bins), 0.0);
    const auto& values = g.dist.values();
    const auto& weights = g.dist.weights();
    for (std::size_t k = 0; k < values.size(); ++k) {
      auto bin = static_cast<std::size_t>(values[k] * hist_bins);
      bin = std::min(bin, static_cast<std::size_t>(hist_bins - 1));
      mass[bin] += weights[k];
    }
    for (int b = 0; b < hist_bins; ++b) {
      out << g.name << ',' << fmt(static_cast<double>(b) / hist_bins) << ','
          << fmt(static_cast<double>(b + 1) / hist_bins) << ','
          << fmt(mass[static_cast<std::size_t>(b)]) << '\n';
    }
  }
}

}  // namespace

RunOutcome run_scenario(const ScenarioConfig& config) {
  RunOutcome outcome;
  validate_config(config);

  const GroupedPopulation pop = build_population(config);

  // Deterministic order: capacities ascending with duplicates dropped,
  // regimes by name ascending.
  std::vector<double> capacities = config.capacities;
  std::sort(capacities.begin(), capacities.end());
  const auto last = std::unique(capacities.begin(), capacities.end());
  if (last != capacities.end()) {
    outcome.warnings.push_back("duplicate capacities removed");
    capacities.erase(last, capacities.end());
  }
  std::vector<Regime> regimes = config.regimes;
  std::sort(regimes.begin(), regimes.end(), [](Regime a, Regime b) {
    return std::string_view(regime_name(a)) < regime_name(b);
  });
  const auto rlast = std::unique(regimes.begin(), regimes.end());
  if (rlast != regimes.end()) {
    outcome.warnings.push_back("duplicate regimes removed");
    regimes.erase(rlast, regimes.end());
  }

  std::filesystem::create_directories(config.out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(config.out_dir) / name).string();
  };

  std::ofstream alloc(path("allocations.csv"), std::ios::binary);
  std::ofstream fair(path("fairness.csv"), std::ios::binary);
  std::ofstream pof(path("pof.csv"), std::ios::binary);
  std::ofstream hist(path("histogram.csv"), std::ios::binary);
  if (!alloc || !fair || !pof || !hist) {
    throw ConfigError("cannot open output files under " + config.out_dir);
  }

  alloc << "capacity,regime,global_capacity,global_tp,iterations,residual,"
           "flags";
  for (const auto& g : pop.groups()) {
    alloc << ",t_" << g.name << ",gamma_" << g.name << ",cap_" << g.name
          << ",tp_" << g.name;
  }
  alloc << '\n';
  fair << "capacity,regime," << report_csv_header(pop) << '\n';
  pof << "capacity,regime,multiplicative,additive\n";

  for (double c : capacities) {
    const double tp_opt = solve_utility_max(pop, c).global_tp;
    for (Regime regime : regimes) {
      SolveResult result;
      try {
        result = solve(pop, c, regime);
      } catch (const std::exception& e) {
        outcome.warnings.push_back(std::string(regime_name(regime)) + " at c=" +
                                   fmt(c) + " skipped: " + e.what());
        continue;
      }
      if (result.flags != 0) {
        outcome.warnings.push_back(std::string(regime_name(regime)) + " at c=" +
                                   fmt(c) + ": " +
                                   flags_to_string(result.flags));
      }

      alloc << fmt(c) << ',' << regime_name(regime) << ','
            << fmt(result.global_capacity) << ',' << fmt(result.global_tp)
            << ',' << result.iterations << ',' << fmt(result.residual) << ','
            << flags_to_string(result.flags);
      for (std::size_t i = 0; i < pop.size(); ++i) {
        alloc << ',' << fmt(result.policy[i].threshold) << ','
              << fmt(result.policy[i].tie_gamma) << ','
              << fmt(result.group_capacity[i]) << ','
              << fmt(result.group_tp[i]);
      }
      alloc << '\n';

      fair << fmt(c) << ',' << regime_name(regime) << ','
           << report_csv_row(make_report(result.policy, pop)) << '\n';

      const double additive = tp_opt - result.global_tp;
      double multiplicative = 1.0;
      if (result.global_tp > 0.0) {
        multiplicative = tp_opt / result.global_tp;
      } else if (tp_opt > 0.0) {
        multiplicative = std::numeric_limits<double>::infinity();
      }
      pof << fmt(c) << ',' << regime_name(regime) << ',' << fmt(multiplicative)
          << ',' << fmt(additive) << '\n';
    }
  }

  write_histogram(pop, config.hist_bins, hist);

  outcome.files_written = {path("allocations.csv"), path("fairness.csv"),
                           path("pof.csv"), path("histogram.csv")};
  return outcome;
}

}  // namespace faircap
