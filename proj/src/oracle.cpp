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

#include "faircap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "faircap/fairness.hpp"
#include "faircap/policy.hpp"

namespace faircap {

namespace {

constexpr std::size_t kMaxGroups = 4;

void check_grid(const GroupedPopulation& pop, const GridSpec& grid) {
  if (pop.size() > kMaxGroups) {
    throw std::length_error("oracle enumeration is limited to 4 groups");
  }
  if (grid.steps < 2) {
    throw std::invalid_argument("grid needs at least 2 steps per group");
  }
  if (!(grid.capacity >= 0.0 && grid.capacity <= 1.0)) {
    throw std::domain_error("capacity must lie in [0,1]");
  }
}

void recurse(const GroupedPopulation& pop, int steps, std::size_t i,
             double remaining, std::vector<double>& split,
             const std::function<void(const std::vector<double>&)>& fn) {
  const std::size_t m = pop.size();
  if (i + 1 == m) {
    const double u = remaining / pop.group(i).weight;
    if (u >= -1e-12 && u <= 1.0 + 1e-12) {
      split[i] = std::clamp(u, 0.0, 1.0);
      fn(split);
    }
    return;
  }
  // Feasible range for this group's within-capacity given that the rest can
  // absorb at most their full mass.
  double tail_mass = 0.0;
  for (std::size_t j = i + 1; j < m; ++j) {
    tail_mass += pop.group(j).weight;
  }
  const double rho = pop.group(i).weight;
  const double lo = std::max(0.0, (remaining - tail_mass) / rho);
  const double hi = std::min(1.0, remaining / rho);
  if (lo > hi) {
    return;
  }
  for (int s = 0; s < steps; ++s) {
    const double frac = static_cast<double>(s) / (steps - 1);
    const double u = lo + frac * (hi - lo);
    split[i] = u;
    recurse(pop, steps, i + 1, remaining - rho * u, split, fn);
  }
}

}  // namespace

void for_each_split(const GroupedPopulation& pop, const GridSpec& grid,
                    const std::function<void(const std::vector<double>&)>& fn) {
  check_grid(pop, grid);
  double max_budget = 0.0;
  for (const auto& g : pop.groups()) {
    max_budget += g.weight;
  }
  if (grid.capacity > max_budget + 1e-12) {
    return;  // infeasible: even full allocation cannot reach the capacity
  }
  std::vector<double> split(pop.size(), 0.0);
  recurse(pop, grid.steps, 0, grid.capacity, split, fn);
}

std::vector<std::vector<double>> enumerate_splits(const GroupedPopulation& pop,
                                                  const GridSpec& grid) {
  std::vector<std::vector<double>> out;
  for_each_split(pop, grid, [&](const std::vector<double>& s) {
    out.push_back(s);
  });
  return out;
}

OracleResult oracle_solve(const GroupedPopulation& pop, const GridSpec& grid,
                          OracleObjective objective) {
  std::vector<double> targets;  // denominators for the ratio objectives
  if (objective == OracleObjective::eo_ratio) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const double b = pop.base_rate(i);
      if (!(b > 0.0)) {
        throw std::domain_error("eo_ratio oracle needs positive base rates");
      }
      targets.push_back(b);
    }
  } else if (objective == OracleObjective::aeo_ratio) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const double a = achievable_tp(pop, i, grid.capacity);
      if (!(a > 0.0)) {
        throw std::domain_error("aeo_ratio oracle needs positive achievable TP");
      }
      targets.push_back(a);
    }
  }

  OracleResult best;
  best.value = -std::numeric_limits<double>::infinity();
  bool found = false;

  for_each_split(pop, grid, [&](const std::vector<double>& split) {
    std::vector<GroupThreshold> thresholds;
    thresholds.reserve(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
      thresholds.push_back(
          solve_threshold_for_capacity(pop.group(i).dist, split[i]));
    }
    const GroupThresholdPolicy policy(std::move(thresholds));
    const auto tp = tp_count(policy, pop);

    double value = 0.0;
    switch (objective) {
      case OracleObjective::tp:
        value = tp.global;
        break;
      case OracleObjective::min_tp:
        value = *std::min_element(tp.per_group.begin(), tp.per_group.end());
        break;
      case OracleObjective::prop: {
        for (std::size_t i = 0; i < pop.size(); ++i) {
          if (!(tp.per_group[i] > 0.0)) {
            value = -std::numeric_limits<double>::infinity();
            break;
          }
          value += pop.group(i).weight * std::log(tp.per_group[i]);
        }
        break;
      }
      case OracleObjective::eo_ratio:
      case OracleObjective::aeo_ratio: {
        value = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pop.size(); ++i) {
          value = std::min(value, tp.per_group[i] / targets[i]);
        }
        break;
      }
    }
    // Strict improvement keeps the first (lexicographically smallest) split.
    if (!found || value > best.value) {
      best.split = split;
      best.value = value;
      found = true;
    }
  });

  if (!found) {
    throw std::domain_error("no feasible split on the grid");
  }
  return best;
}

}  // namespace faircap
