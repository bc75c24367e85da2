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

#ifndef FAIRCAP_SCENARIO_HPP
#define FAIRCAP_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "faircap/population.hpp"
#include "faircap/solvers.hpp"

namespace faircap {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InlineGroupSpec {
  std::string name;
  double weight = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Declarative experiment description. Exactly one population source must
/// be set; capacities lie in [0,1]; regimes must be non-empty.
struct ScenarioConfig {
  std::optional<std::string> csv_path;
  std::optional<FigurePreset> preset;
  std::vector<InlineGroupSpec> inline_groups;

  std::vector<double> capacities;
  std::vector<Regime> regimes;
  int bins = 10000;
  int hist_bins = 200;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

/// Parses a JSON config document. Throws ConfigError with a diagnostic.
ScenarioConfig parse_config(const std::string& json_text);

/// Validates cross-field constraints; throws ConfigError.
void validate_config(const ScenarioConfig& config);

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> files_written;
};

/// Runs every (capacity, regime) pair and writes allocations.csv,
/// fairness.csv, pof.csv and histogram.csv into the output directory.
/// Duplicate capacities are dropped with a warning; rows are ordered by
/// capacity ascending then regime name ascending.
RunOutcome run_scenario(const ScenarioConfig& config);

}  // namespace faircap

#endif
