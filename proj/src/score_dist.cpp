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

#include "faircap/score_dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace faircap {

namespace {

constexpr double kDropWeight = 1e-15;

// Compensated (Kahan) running sum; the prefix arrays feed capacity
// identities that must hold to ~1e-12 even with 10^4 support points.
class KahanSum {
public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0,1]");
  }
}

}  // namespace

ScoreDistribution::ScoreDistribution(
    std::vector<std::pair<double, double>> support) {
  if (support.empty()) {
    throw std::invalid_argument("score distribution needs at least one atom");
  }
  std::sort(support.begin(), support.end());
  for (const auto& [value, weight] : support) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument("score values must lie in [0,1]");
    }
    if (!(weight > 0.0)) {
      throw std::invalid_argument("score weights must be positive");
    }
  }

  // Merge duplicate values, drop negligible mass, renormalize.
  std::vector<double> vals;
  std::vector<double> wts;
  vals.reserve(support.size());
  wts.reserve(support.size());
  for (const auto& [value, weight] : support) {
    if (!vals.empty() && vals.back() == value) {
      wts.back() += weight;
    } else {
      vals.push_back(value);
      wts.push_back(weight);
    }
  }
  KahanSum total;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (wts[i] >= kDropWeight) {
      total.add(wts[i]);
    }
  }
  if (!(total.value() > 0.0)) {
    throw std::invalid_argument("score distribution has no usable mass");
  }
  const double norm = total.value();
  values_.reserve(vals.size());
  weights_.reserve(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (wts[i] >= kDropWeight) {
      values_.push_back(vals[i]);
      weights_.push_back(wts[i] / norm);
    }
  }

  cum_w_.resize(values_.size());
  cum_vw_.resize(values_.size());
  KahanSum w_sum;
  KahanSum vw_sum;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    w_sum.add(weights_[i]);
    vw_sum.add(values_[i] * weights_[i]);
    cum_w_[i] = w_sum.value();
    cum_vw_[i] = vw_sum.value();
  }
  cum_w_.back() = 1.0;
}

ScoreDistribution ScoreDistribution::point_mass(double value) {
  return ScoreDistribution({{value, 1.0}});
}

std::ptrdiff_t ScoreDistribution::index_at_or_below(double t) const {
  auto it = std::upper_bound(values_.begin(), values_.end(), t);
  return static_cast<std::ptrdiff_t>(it - values_.begin()) - 1;
}

double ScoreDistribution::cdf(double t) const {
  check_unit_interval(t, "cdf argument");
  const std::ptrdiff_t idx = index_at_or_below(t);
  return idx < 0 ? 0.0 : cum_w_[static_cast<std::size_t>(idx)];
}

std::size_t ScoreDistribution::quantile_index(double kappa) const {
  check_unit_interval(kappa, "quantile argument");
  if (kappa == 0.0) {
    return 0;
  }
  auto it = std::lower_bound(cum_w_.begin(), cum_w_.end(), kappa);
  if (it == cum_w_.end()) {
    return values_.size() - 1;
  }
  return static_cast<std::size_t>(it - cum_w_.begin());
}

double ScoreDistribution::quantile(double kappa) const {
  return values_[quantile_index(kappa)];
}

double ScoreDistribution::tail_prob(double t) const {
  return 1.0 - cdf(t);
}

double ScoreDistribution::mass_at(double value) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), value);
  if (it == values_.end() || *it != value) {
    return 0.0;
  }
  return weights_[static_cast<std::size_t>(it - values_.begin())];
}

double ScoreDistribution::tail_expectation(double t) const {
  check_unit_interval(t, "tail threshold");
  const std::ptrdiff_t idx = index_at_or_below(t);
  const double below = idx < 0 ? 0.0 : cum_vw_[static_cast<std::size_t>(idx)];
  return mean() - below;
}

double ScoreDistribution::tail_expectation(double t, double t_M) const {
  check_unit_interval(t, "tail threshold");
  check_unit_interval(t_M, "tail upper bound");
  if (t > t_M) {
    throw std::domain_error("tail interval requires t <= t_M");
  }
  const std::ptrdiff_t lo = index_at_or_below(t);
  const std::ptrdiff_t hi = index_at_or_below(t_M);
  const double below_lo = lo < 0 ? 0.0 : cum_vw_[static_cast<std::size_t>(lo)];
  const double below_hi = hi < 0 ? 0.0 : cum_vw_[static_cast<std::size_t>(hi)];
  return below_hi - below_lo;
}

double quantile_integral(const ScoreDistribution& dist, double lo, double hi) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
    throw std::domain_error("quantile integral bounds must satisfy 0<=lo<=hi<=1");
  }
  // q is constant at values()[i] on the probability interval
  // (cum_{i-1}, cum_i]; the integral is the exact overlap-weighted sum.
  const auto& values = dist.values();
  KahanSum acc;
  double prev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cur = dist.cum_weight(i);
    const double a = std::max(prev, lo);
    const double b = std::min(cur, hi);
    if (b > a) {
      acc.add((b - a) * values[i]);
    }
    prev = cur;
  }
  return acc.value();
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

ScoreDistribution discretize(const ClippedGaussianSpec& spec) {
  if (!(spec.variance > 0.0)) {
    throw std::domain_error("clipped Gaussian variance must be positive");
  }
  if (spec.bins < 2) {
    throw std::domain_error("clipped Gaussian needs at least 2 bins");
  }
  const double sigma = std::sqrt(spec.variance);
  const int bins = spec.bins;

  std::vector<std::pair<double, double>> support;
  support.reserve(static_cast<std::size_t>(bins) + 2);

  const double mass_below = normal_cdf((0.0 - spec.mean) / sigma);
  if (mass_below > 0.0) {
    support.emplace_back(0.0, mass_below);
  }
  double prev_cdf = mass_below;
  for (int j = 0; j < bins; ++j) {
    const double hi_edge = static_cast<double>(j + 1) / bins;
    const double hi_cdf = normal_cdf((hi_edge - spec.mean) / sigma);
    const double mass = hi_cdf - prev_cdf;
    prev_cdf = hi_cdf;
    if (mass > 0.0) {
      support.emplace_back((static_cast<double>(j) + 0.5) / bins, mass);
    }
  }
  const double mass_above = 1.0 - prev_cdf;
  if (mass_above > 0.0) {
    support.emplace_back(1.0, mass_above);
  }
  return ScoreDistribution(std::move(support));
}

}  // namespace faircap
