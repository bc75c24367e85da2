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

#include "faircap/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace faircap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_pairwise_gap(const std::vector<double>& xs) {
  if (xs.size() < 2) {
    return 0.0;
  }
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return *hi - *lo;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

double dp_gap(const GroupThresholdPolicy& policy,
              const GroupedPopulation& pop) {
  return max_pairwise_gap(capacity(policy, pop).per_group);
}

double eo_gap(const GroupThresholdPolicy& policy,
              const GroupedPopulation& pop) {
  const auto tp = tp_count(policy, pop);
  std::vector<double> rates(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double b = pop.base_rate(i);
    if (!(b > 0.0)) {
      throw std::domain_error("equal opportunity needs positive base rates");
    }
    rates[i] = tp.per_group[i] / b;
  }
  return max_pairwise_gap(rates);
}

double prop_value(const GroupThresholdPolicy& policy,
                  const GroupedPopulation& pop) {
  const auto tp = tp_count(policy, pop);
  double acc = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (!(tp.per_group[i] > 0.0)) {
      return -kInf;
    }
    acc += pop.group(i).weight * std::log(tp.per_group[i]);
  }
  return acc;
}

KlDecomposition kl_decomposition(const GroupThresholdPolicy& policy,
                                 const GroupedPopulation& pop) {
  const auto tp = tp_count(policy, pop);
  if (!(tp.global > 0.0)) {
    throw std::domain_error("KL decomposition needs positive global TP");
  }
  KlDecomposition out;
  out.log_tp = std::log(tp.global);
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double qs = pop.group(i).weight;
    const double qf = qs * tp.per_group[i] / tp.global;
    if (!(qf > 0.0)) {
      out.kl = kInf;
      return out;
    }
    out.kl += qs * std::log(qs / qf);
  }
  return out;
}

bool tail_dominance(const ScoreDistribution& d1, const ScoreDistribution& d2,
                    double t0) {
  if (!(t0 >= 0.0 && t0 <= 1.0)) {
    throw std::domain_error("t0 must lie in [0,1]");
  }
  return tail_dominance_with_gap(d1, d2, t0, t0, 0.0);
}

bool tail_dominance_with_gap(const ScoreDistribution& d1,
                             const ScoreDistribution& d2, double t0,
                             double t_M, double eta) {
  if (!(0.0 <= t0 && t0 <= t_M && t_M <= 1.0)) {
    throw std::domain_error("dominance range must satisfy 0 <= t0 <= t_M <= 1");
  }
  if (eta < 0.0) {
    throw std::domain_error("dominance gap must be nonnegative");
  }
  // Both tail functions are right-constant step functions of r, so checking
  // at t0, t_M and every support point of either distribution is exact.
  std::vector<double> breakpoints{t0, t_M};
  for (double v : d1.values()) {
    if (v >= t0) breakpoints.push_back(v);
  }
  for (double v : d2.values()) {
    if (v >= t0) breakpoints.push_back(v);
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());
  for (double r : breakpoints) {
    const double gap = d1.tail_prob(r) - d2.tail_prob(r);
    const double required = (r >= t0 && r <= t_M) ? eta : 0.0;
    if (gap < required) {
      return false;
    }
  }
  return true;
}

bool non_degenerate(const GroupedPopulation& pop, double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::domain_error("capacity must lie in [0,1]");
  }
  for (const auto& g : pop.groups()) {
    if (!(c < g.weight)) {
      return false;
    }
    // Conditional mean of the bottom (1-c) mass.
    double remaining = 1.0 - c;
    double mean_mass = 0.0;
    for (std::size_t k = 0; k < g.dist.size() && remaining > 0.0; ++k) {
      const double take = std::min(g.dist.weights()[k], remaining);
      mean_mass += take * g.dist.values()[k];
      remaining -= take;
    }
    if (!(mean_mass > 0.0)) {
      return false;
    }
  }
  return true;
}

double achievable_tp(const GroupedPopulation& pop, std::size_t group,
                     double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::domain_error("capacity must lie in [0,1]");
  }
  const auto& g = pop.group(group);
  TpCurve curve(g.dist);
  const double cap = std::min(1.0, c / g.weight);
  return std::min(curve.tp(cap), curve.max_tp());
}

double achievable_tp(const GroupedPopulation& pop, std::string_view group,
                     double c) {
  return achievable_tp(pop, pop.index_of(group), c);
}

namespace {

FairnessReport build_report(const GroupThresholdPolicy& policy,
                            const GroupedPopulation& pop,
                            const LabeledDataset* samples) {
  FairnessReport rep;
  const auto cap = capacity(policy, pop);
  const auto tp = tp_count(policy, pop);
  rep.global_capacity = cap.global;
  rep.group_capacity = cap.per_group;
  rep.global_tp = tp.global;
  rep.group_tp = tp.per_group;
  rep.min_group_tp =
      *std::min_element(tp.per_group.begin(), tp.per_group.end());
  rep.dp = dp_gap(policy, pop);
  bool base_rates_positive = true;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    base_rates_positive = base_rates_positive && pop.base_rate(i) > 0.0;
  }
  rep.eo = base_rates_positive ? eo_gap(policy, pop)
                               : std::numeric_limits<double>::quiet_NaN();
  rep.prop = prop_value(policy, pop);
  rep.prop_finite = std::isfinite(rep.prop);
  if (tp.global > 0.0) {
    const auto kl = kl_decomposition(policy, pop);
    rep.kl = kl.kl;
    rep.log_tp = kl.log_tp;
  } else {
    rep.kl = kInf;
    rep.log_tp = -kInf;
  }
  for (std::size_t i = 1; i < pop.size(); ++i) {
    rep.first_dominates.push_back(
        tail_dominance(pop.group(0).dist, pop.group(i).dist, 0.0));
  }
  if (samples != nullptr) {
    for (std::size_t i = 0; i < samples->group_names.size(); ++i) {
      rep.calibration.push_back(calibration_error(*samples, i));
    }
  }
  return rep;
}

}  // namespace

FairnessReport make_report(const GroupThresholdPolicy& policy,
                           const GroupedPopulation& pop) {
  return build_report(policy, pop, nullptr);
}

FairnessReport make_report(const GroupThresholdPolicy& policy,
                           const GroupedPopulation& pop,
                           const LabeledDataset& samples) {
  return build_report(policy, pop, &samples);
}

std::string report_csv_header(const GroupedPopulation& pop,
                              bool with_calibration) {
  std::string out =
      "global_capacity,global_tp,min_group_tp,dp_gap,eo_gap,prop_value,"
      "prop_finite,kl,log_tp";
  for (const auto& g : pop.groups()) {
    out += ",cap_" + g.name + ",tp_" + g.name;
  }
  for (std::size_t i = 1; i < pop.size(); ++i) {
    out += ",dom_" + pop.group(0).name + "_over_" + pop.group(i).name;
  }
  if (with_calibration) {
    for (const auto& g : pop.groups()) {
      out += ",calib_" + g.name;
    }
  }
  return out;
}

std::string report_csv_row(const FairnessReport& report) {
  std::string out = format_double(report.global_capacity);
  out += "," + format_double(report.global_tp);
  out += "," + format_double(report.min_group_tp);
  out += "," + format_double(report.dp);
  out += "," + format_double(report.eo);
  out += "," + format_double(report.prop);
  out += std::string(",") + (report.prop_finite ? "1" : "0");
  out += "," + format_double(report.kl);
  out += "," + format_double(report.log_tp);
  for (std::size_t i = 0; i < report.group_capacity.size(); ++i) {
    out += "," + format_double(report.group_capacity[i]);
    out += "," + format_double(report.group_tp[i]);
  }
  for (bool d : report.first_dominates) {
    out += std::string(",") + (d ? "1" : "0");
  }
  for (double c : report.calibration) {
    out += "," + format_double(c);
  }
  return out;
}

}  // namespace faircap
