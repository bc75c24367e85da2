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

#ifndef FAIRCAP_SOLVERS_HPP
#define FAIRCAP_SOLVERS_HPP

#include <optional>
#include <string_view>
#include <vector>

#include "faircap/policy.hpp"
#include "faircap/population.hpp"

namespace faircap {

enum class Regime {
  utility_max,
  max_min,
  equal_opportunity,
  proportional,
  achievable_eo,
};

const char* regime_name(Regime regime);
std::optional<Regime> regime_from_name(std::string_view name);
std::vector<Regime> all_regimes();

namespace solve_flags {
// Equalization hit a feasibility boundary; leftover budget was spent on the
// remaining highest scores instead.
constexpr unsigned boundary = 1u;
// The fairness target saturated below the requested capacity; leftover
// budget was parked on zero-marginal mass.
constexpr unsigned saturated = 2u;
// Groups with no positive scores were excluded from the objective.
constexpr unsigned excluded_group = 4u;
}  // namespace solve_flags

struct SolveResult {
  GroupThresholdPolicy policy;
  std::vector<double> group_capacity;  // within-group capacities c_i
  std::vector<double> group_tp;        // per-group conditional TP H_i
  double global_capacity = 0.0;
  double global_tp = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |sum rho_i c_i - requested capacity|
  unsigned flags = 0;
};

/// Maximal-TP allocation at capacity c: a single threshold over the pooled
/// score distribution, tie mass split pro rata across groups.
SolveResult solve_utility_max(const GroupedPopulation& pop, double c);

/// Maximizes the minimum per-group TP by bisecting on the common TP value
/// and inverting each group's capacity-vs-TP curve. On non-degenerate
/// instances all per-group TPs come out equal.
SolveResult solve_max_min(const GroupedPopulation& pop, double c);

/// Maximizes global TP subject to equal TP_i / base_rate_i across groups
/// (bisection on the common ratio). Throws std::domain_error on a zero
/// base rate.
SolveResult solve_equal_opportunity(const GroupedPopulation& pop, double c);

/// Maximizes sum_i rho_i ln TP_i at capacity c by bisecting on the common
/// multiplier lambda of the optimality condition t_i(c_i)/H_i(c_i) = lambda;
/// groups with no positive scores receive zero capacity and are flagged.
SolveResult solve_proportional(const GroupedPopulation& pop, double c);

/// Maximizes global TP subject to equal TP_i / A_i across groups, where A_i
/// is the achievable TP with the whole budget concentrated on group i.
/// Throws std::domain_error when some A_i is zero.
SolveResult solve_achievable_eo(const GroupedPopulation& pop, double c);

SolveResult solve(const GroupedPopulation& pop, double c, Regime regime);

struct PriceOfFairness {
  double multiplicative = 1.0;  // +infinity when the constrained TP is zero
  double additive = 0.0;
};

PriceOfFairness price_of_fairness(const GroupedPopulation& pop, double c,
                                  Regime regime);

}  // namespace faircap

#endif
