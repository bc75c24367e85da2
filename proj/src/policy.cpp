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

#include "faircap/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace faircap {

namespace {

void check_policy_covers(const GroupThresholdPolicy& policy, std::size_t m) {
  if (policy.size() != m) {
    throw std::out_of_range("policy does not cover all groups");
  }
}

void check_loss(const BinaryLoss& loss) {
  if (loss.l00 != 0.0 || loss.l11 != 0.0) {
    throw std::invalid_argument("loss table diagonal must be zero");
  }
  if (loss.l01 < 0.0 || loss.l10 < 0.0) {
    throw std::invalid_argument("loss table entries must be nonnegative");
  }
}

double group_capacity(const GroupThreshold& t, const ScoreDistribution& d) {
  return d.tail_prob(t.threshold) + t.tie_gamma * d.mass_at(t.threshold);
}

double group_tp(const GroupThreshold& t, const ScoreDistribution& d) {
  return d.tail_expectation(t.threshold) +
         t.tie_gamma * t.threshold * d.mass_at(t.threshold);
}

}  // namespace

GroupThresholdPolicy::GroupThresholdPolicy(
    std::vector<GroupThreshold> thresholds)
    : thresholds_(std::move(thresholds)) {
  for (const auto& t : thresholds_) {
    if (!(t.threshold >= 0.0 && t.threshold <= 1.0)) {
      throw std::invalid_argument("thresholds must lie in [0,1]");
    }
    if (!(t.tie_gamma >= 0.0 && t.tie_gamma <= 1.0)) {
      throw std::invalid_argument("tie mass must lie in [0,1]");
    }
  }
}

GroupThreshold solve_threshold_for_capacity(const ScoreDistribution& dist,
                                            double capacity) {
  if (!(capacity >= 0.0 && capacity <= 1.0)) {
    throw std::domain_error("capacity must lie in [0,1]");
  }
  const std::size_t idx = dist.quantile_index(1.0 - capacity);
  const double t = dist.values()[idx];
  const double atom = dist.weights()[idx];
  const double cdf_at_t = dist.cum_weight(idx);
  double gamma = 0.0;
  if (atom > 0.0) {
    gamma = (capacity - 1.0 + cdf_at_t) / atom;
    gamma = std::clamp(gamma, 0.0, 1.0);
  }
  return GroupThreshold{t, gamma};
}

GroupwiseValue capacity(const GroupThresholdPolicy& policy,
                        const GroupedPopulation& pop) {
  check_policy_covers(policy, pop.size());
  GroupwiseValue out;
  out.per_group.resize(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    out.per_group[i] = group_capacity(policy[i], pop.group(i).dist);
    out.global += pop.group(i).weight * out.per_group[i];
  }
  return out;
}

GroupwiseValue tp_count(const GroupThresholdPolicy& policy,
                        const GroupedPopulation& pop) {
  check_policy_covers(policy, pop.size());
  GroupwiseValue out;
  out.per_group.resize(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    out.per_group[i] = group_tp(policy[i], pop.group(i).dist);
    out.global += pop.group(i).weight * out.per_group[i];
  }
  return out;
}

GroupwiseValue tp_count_empirical(const GroupThresholdPolicy& policy,
                                  const LabeledDataset& data) {
  check_policy_covers(policy, data.group_names.size());
  std::vector<double> tp_mass(data.group_names.size(), 0.0);
  std::vector<double> mass(data.group_names.size(), 0.0);
  for (const auto& r : data.rows) {
    mass[r.group] += r.weight;
    if (r.label != 0) {
      tp_mass[r.group] += r.weight * allocation_prob(policy[r.group], r.score);
    }
  }
  GroupwiseValue out;
  out.per_group.resize(data.group_names.size());
  double total = 0.0;
  double total_tp = 0.0;
  for (std::size_t i = 0; i < tp_mass.size(); ++i) {
    out.per_group[i] = mass[i] > 0.0 ? tp_mass[i] / mass[i] : 0.0;
    total += mass[i];
    total_tp += tp_mass[i];
  }
  out.global = total > 0.0 ? total_tp / total : 0.0;
  return out;
}

double expected_loss(const GroupThresholdPolicy& policy,
                     const GroupedPopulation& pop, const BinaryLoss& loss) {
  check_loss(loss);
  check_policy_covers(policy, pop.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& g = pop.group(i);
    const auto& values = g.dist.values();
    const auto& weights = g.dist.weights();
    double group_acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double f = allocation_prob(policy[i], values[k]);
      const double p = values[k];
      group_acc += weights[k] * (f * loss.l10 * (1.0 - p) +
                                 (1.0 - f) * loss.l01 * p);
    }
    acc += g.weight * group_acc;
  }
  return acc;
}

double expected_loss(const GroupThresholdPolicy& policy,
                     const LabeledDataset& data, const BinaryLoss& loss) {
  check_loss(loss);
  check_policy_covers(policy, data.group_names.size());
  double acc = 0.0;
  double mass = 0.0;
  for (const auto& r : data.rows) {
    const double f = allocation_prob(policy[r.group], r.score);
    const double miss = r.label != 0 ? loss.l01 : 0.0;
    const double alarm = r.label == 0 ? loss.l10 : 0.0;
    acc += r.weight * (f * alarm + (1.0 - f) * miss);
    mass += r.weight;
  }
  return mass > 0.0 ? acc / mass : 0.0;
}

double calibration_error(const LabeledDataset& data, std::size_t group) {
  if (group >= data.group_names.size()) {
    throw std::out_of_range("unknown group index");
  }
  // Per distinct score r: mass-weighted (y - r), conditioned on the group.
  std::map<double, double> dev;
  double group_mass = 0.0;
  for (const auto& r : data.rows) {
    if (r.group != group) continue;
    group_mass += r.weight;
    dev[r.score] += r.weight * (static_cast<double>(r.label) - r.score);
  }
  if (!(group_mass > 0.0)) {
    throw std::domain_error("group has no samples: " +
                            data.group_names[group]);
  }
  double err = 0.0;
  for (const auto& [score, d] : dev) {
    err += std::abs(d);
  }
  return err / group_mass;
}

TpCurve::TpCurve(const ScoreDistribution& dist) {
  const std::size_t n = dist.size();
  caps_.resize(n + 1);
  tps_.resize(n + 1);
  vals_.resize(n);
  caps_[0] = 0.0;
  tps_[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t atom = n - k;  // k-th value from the top
    vals_[k - 1] = dist.values()[atom];
    if (atom == 0) {
      caps_[k] = 1.0;
      tps_[k] = dist.mean();
    } else {
      caps_[k] = 1.0 - dist.cum_weight(atom - 1);
      tps_[k] = dist.tail_expectation(dist.values()[atom - 1]);
    }
  }
}

double TpCurve::tp(double cap) const {
  if (!(cap >= 0.0 && cap <= 1.0)) {
    throw std::domain_error("capacity must lie in [0,1]");
  }
  auto it = std::lower_bound(caps_.begin(), caps_.end(), cap);
  std::size_t k = static_cast<std::size_t>(it - caps_.begin());
  if (k == 0) {
    return 0.0;
  }
  // Segment k covers (caps_[k-1], caps_[k]]; interpolate on the atom value.
  return tps_[k - 1] + (cap - caps_[k - 1]) * vals_[k - 1];
}

double TpCurve::capacity_for_tp(double tp) const {
  if (tp <= 0.0) {
    return 0.0;
  }
  if (tp > tps_.back()) {
    return std::numeric_limits<double>::infinity();
  }
  auto it = std::lower_bound(tps_.begin(), tps_.end(), tp);
  std::size_t k = static_cast<std::size_t>(it - tps_.begin());
  // tps_[k-1] < tp <= tps_[k]; the segment slope vals_[k-1] is positive here.
  return caps_[k - 1] + (tp - tps_[k - 1]) / vals_[k - 1];
}

double TpCurve::marginal_value(double cap) const {
  if (!(cap >= 0.0 && cap <= 1.0)) {
    throw std::domain_error("capacity must lie in [0,1]");
  }
  if (cap == 0.0) {
    return vals_.front();
  }
  auto it = std::lower_bound(caps_.begin(), caps_.end(), cap);
  std::size_t k = static_cast<std::size_t>(it - caps_.begin());
  return vals_[k - 1];
}

double TpCurve::positive_mass() const {
  // Atoms are consumed top-down; only a trailing zero-valued atom (if any)
  // contributes nothing.
  for (std::size_t k = vals_.size(); k > 0; --k) {
    if (vals_[k - 1] > 0.0) {
      return caps_[k];
    }
  }
  return 0.0;
}

double TpCurve::capacity_for_marginal_ratio(double lambda) const {
  if (!(max_tp() > 0.0)) {
    throw std::domain_error("ratio inversion needs positive attainable TP");
  }
  if (lambda < 0.0) {
    throw std::domain_error("marginal ratio must be nonnegative");
  }
  if (lambda == 0.0) {
    return positive_mass();
  }
  // psi(u) = marginal_value(u)/tp(u) decreases within segments and jumps
  // down at segment ends; scan for the first segment whose end value drops
  // to lambda or below, then invert the within-segment hyperbola.
  for (std::size_t k = 1; k < caps_.size(); ++k) {
    const double v = vals_[k - 1];
    if (v <= 0.0) {
      // Zero-valued tail: psi = 0 <= lambda from here on.
      return caps_[k - 1];
    }
    const double end_psi = v / tps_[k];
    if (end_psi <= lambda) {
      // Solve v / (tps_[k-1] + (u - caps_[k-1]) v) = lambda within segment.
      const double u =
          caps_[k - 1] + (v / lambda - tps_[k - 1]) / v;
      return std::clamp(u, caps_[k - 1], caps_[k]);
    }
  }
  return 1.0;  // psi stays above lambda everywhere; the whole group qualifies
}

}  // namespace faircap
