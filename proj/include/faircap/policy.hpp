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

#ifndef FAIRCAP_POLICY_HPP
#define FAIRCAP_POLICY_HPP

#include <vector>

#include "faircap/population.hpp"
#include "faircap/score_dist.hpp"

namespace faircap {

/// One group's randomized threshold: allocate with probability 1 above the
/// threshold, tie_gamma at it, 0 below.
struct GroupThreshold {
  double threshold = 1.0;
  double tie_gamma = 0.0;
};

/// tau(score) for a single group's threshold.
inline double allocation_prob(const GroupThreshold& t, double score) {
  if (score > t.threshold) return 1.0;
  if (score == t.threshold) return t.tie_gamma;
  return 0.0;
}

/// Per-group randomized thresholds, aligned with a population's group order.
class GroupThresholdPolicy {
public:
  GroupThresholdPolicy() = default;
  explicit GroupThresholdPolicy(std::vector<GroupThreshold> thresholds);

  std::size_t size() const { return thresholds_.size(); }
  const GroupThreshold& operator[](std::size_t i) const {
    return thresholds_.at(i);
  }
  const std::vector<GroupThreshold>& thresholds() const { return thresholds_; }

private:
  std::vector<GroupThreshold> thresholds_;
};

/// The randomized threshold with E[tau(u)] = c under dist:
/// t = q(1-c), gamma = (c - 1 + F(t)) / Pr[u = t] (0 when no atom sits at t).
/// Exact for every c in [0,1].
GroupThreshold solve_threshold_for_capacity(const ScoreDistribution& dist,
                                            double capacity);

struct GroupwiseValue {
  double global = 0.0;
  std::vector<double> per_group;  // conditional on the group
};

/// Capacity E[f] and per-group conditional capacities E[f | S_i].
GroupwiseValue capacity(const GroupThresholdPolicy& policy,
                        const GroupedPopulation& pop);

/// True positive count E[f(x) p(x)] on the simulated distribution
/// (unnormalized), plus per-group conditional counts.
GroupwiseValue tp_count(const GroupThresholdPolicy& policy,
                        const GroupedPopulation& pop);

/// Label-based true positive count over weighted samples; global value is
/// normalized by total sample mass, per-group values condition on the group.
GroupwiseValue tp_count_empirical(const GroupThresholdPolicy& policy,
                                  const LabeledDataset& data);

/// Binary loss table l(decision, outcome); the diagonal must be zero.
struct BinaryLoss {
  double l00 = 0.0;
  double l01 = 0.0;  // miss: decide 0, outcome 1
  double l10 = 0.0;  // false alarm: decide 1, outcome 0
  double l11 = 0.0;
};

/// E[f l(1,y) + (1-f) l(0,y)] with y ~ Bernoulli(p(x)).
double expected_loss(const GroupThresholdPolicy& policy,
                     const GroupedPopulation& pop, const BinaryLoss& loss);

/// Same, evaluated on weighted labeled samples (normalized by total mass).
double expected_loss(const GroupThresholdPolicy& policy,
                     const LabeledDataset& data, const BinaryLoss& loss);

/// Per-group calibration error: sum over distinct score values r of
/// |E[(y - r) 1(p = r) | S_i]|. Throws std::domain_error on an empty group.
double calibration_error(const LabeledDataset& data, std::size_t group);

/// Piecewise-linear map from within-group capacity to true positive count
/// for one score distribution. Capacity consumes mass from the top score
/// down; segment slopes are the score values, so the curve is concave and
/// nondecreasing. Backbone of every allocation solver.
class TpCurve {
public:
  explicit TpCurve(const ScoreDistribution& dist);

  /// H(u): TP at within-group capacity u in [0,1].
  double tp(double cap) const;

  /// Largest attainable TP (the distribution mean).
  double max_tp() const { return tps_.back(); }

  /// Minimal capacity with H(u) >= tp; +infinity when tp > max_tp().
  double capacity_for_tp(double tp) const;

  /// Score value being consumed on the segment containing `cap`
  /// (left-continuous; the top value at cap = 0).
  double marginal_value(double cap) const;

  /// Capacity that exhausts all strictly positive scores.
  double positive_mass() const;

  /// Minimal capacity u with marginal_value(u)/tp(u) <= lambda. For
  /// lambda = 0 this is positive_mass(). Requires max_tp() > 0.
  double capacity_for_marginal_ratio(double lambda) const;

private:
  // Index k covers the top-k atoms: caps_[k] is their mass, tps_[k] their
  // TP contribution; vals_[k-1] is the k-th value from the top.
  std::vector<double> caps_;
  std::vector<double> tps_;
  std::vector<double> vals_;
};

}  // namespace faircap

#endif
