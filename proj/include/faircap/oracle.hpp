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

#ifndef FAIRCAP_ORACLE_HPP
#define FAIRCAP_ORACLE_HPP

#include <functional>
#include <vector>

#include "faircap/population.hpp"

namespace faircap {

/// Brute-force grid over within-group capacity splits at a fixed global
/// capacity. Splits satisfy sum rho_i c_i = capacity exactly (the last
/// group's share is solved from the remainder).
struct GridSpec {
  int steps = 2;       // grid points per enumerated group, >= 2
  double capacity = 0.0;
};

/// Calls `fn` for every feasible split; enumeration order is lexicographic.
/// Throws std::length_error for populations with more than 4 groups.
void for_each_split(const GroupedPopulation& pop, const GridSpec& grid,
                    const std::function<void(const std::vector<double>&)>& fn);

std::vector<std::vector<double>> enumerate_splits(const GroupedPopulation& pop,
                                                  const GridSpec& grid);

enum class OracleObjective { tp, min_tp, prop, eo_ratio, aeo_ratio };

struct OracleResult {
  std::vector<double> split;
  double value = 0.0;
};

/// Exhaustive argmax over the enumerated splits, each evaluated through the
/// policy layer (thresholds solved per group, TP counted analytically).
/// Ties resolve to the lexicographically smallest split. Throws
/// std::domain_error when the feasible set is empty.
OracleResult oracle_solve(const GroupedPopulation& pop, const GridSpec& grid,
                          OracleObjective objective);

}  // namespace faircap

#endif
