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

#ifndef FAIRCAP_FAIRNESS_HPP
#define FAIRCAP_FAIRNESS_HPP

#include <string>
#include <vector>

#include "faircap/policy.hpp"
#include "faircap/population.hpp"

namespace faircap {

/// max over group pairs of |E[f|S_i] - E[f|S_j]| (0 for a single group).
double dp_gap(const GroupThresholdPolicy& policy,
              const GroupedPopulation& pop);

/// max over group pairs of |TP_i/b_i - TP_j/b_j|, the simulated-distribution
/// form of E[f | y=1, S_i]. Throws std::domain_error on a zero base rate.
double eo_gap(const GroupThresholdPolicy& policy,
              const GroupedPopulation& pop);

/// Normalized proportional fairness value sum_i rho_i ln E[f p | S_i]
/// (natural log); -infinity when any per-group TP is zero.
double prop_value(const GroupThresholdPolicy& policy,
                  const GroupedPopulation& pop);

struct KlDecomposition {
  double kl = 0.0;      // D_KL(Q_S || Q_f), +infinity when some Q_f(i) = 0
  double log_tp = 0.0;  // ln of the global TP
};

/// Splits the proportional value as prop = -kl + log_tp, with
/// Q_S(i) = rho_i and Q_f(i) = rho_i TP_i / TP. Throws std::domain_error
/// when the global TP is zero.
KlDecomposition kl_decomposition(const GroupThresholdPolicy& policy,
                                 const GroupedPopulation& pop);

/// Whether d1's tail probabilities weakly dominate d2's for every r >= t0,
/// checked exactly at the union of both supports.
bool tail_dominance(const ScoreDistribution& d1, const ScoreDistribution& d2,
                    double t0);

/// Gap version: the dominance margin is at least eta on [t0, t_M] and plain
/// dominance holds beyond t_M.
bool tail_dominance_with_gap(const ScoreDistribution& d1,
                             const ScoreDistribution& d2, double t0,
                             double t_M, double eta);

/// Sufficient non-degeneracy check within the threshold-policy class:
/// c stays below every group weight and each group's bottom (1-c) mass has
/// positive conditional mean, so extra capacity always adds true positives.
bool non_degenerate(const GroupedPopulation& pop, double c);

/// Achievable true positive count of a group when the entire global budget
/// c is concentrated on it: H_i(min(1, c/rho_i)).
double achievable_tp(const GroupedPopulation& pop, std::size_t group,
                     double c);
double achievable_tp(const GroupedPopulation& pop, std::string_view group,
                     double c);

struct FairnessReport {
  double global_capacity = 0.0;
  std::vector<double> group_capacity;
  double global_tp = 0.0;
  std::vector<double> group_tp;
  double min_group_tp = 0.0;
  double dp = 0.0;
  double eo = 0.0;  // NaN when a base rate is zero
  double prop = 0.0;
  bool prop_finite = true;
  double kl = 0.0;
  double log_tp = 0.0;
  // Whether the first group tail-dominates group i+1 at t0 = 0.
  std::vector<bool> first_dominates;
  // Per-group calibration errors; empty unless labeled samples were given.
  std::vector<double> calibration;
};

FairnessReport make_report(const GroupThresholdPolicy& policy,
                           const GroupedPopulation& pop);
FairnessReport make_report(const GroupThresholdPolicy& policy,
                           const GroupedPopulation& pop,
                           const LabeledDataset& samples);

/// Flat CSV serialization of a report (stable column order).
std::string report_csv_header(const GroupedPopulation& pop,
                              bool with_calibration = false);
std::string report_csv_row(const FairnessReport& report);

}  // namespace faircap

#endif
