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

#ifndef FAIRCAP_TESTS_HELPERS_HPP
#define FAIRCAP_TESTS_HELPERS_HPP

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "faircap/policy.hpp"
#include "faircap/population.hpp"
#include "faircap/score_dist.hpp"

namespace faircap::testing {

// D_A = {0.1: 0.5, 0.3: 0.3, 0.6: 0.2}
inline ScoreDistribution dist_a() {
  return ScoreDistribution({{0.1, 0.5}, {0.3, 0.3}, {0.6, 0.2}});
}

// Two equal groups; S1 = {0.2: 0.8, 0.8: 0.2}, S2 = {0.1: 0.8, 0.4: 0.2}.
inline GroupedPopulation g2_population() {
  return GroupedPopulation(
      {Group{"S1", 0.5, ScoreDistribution({{0.2, 0.8}, {0.8, 0.2}})},
       Group{"S2", 0.5, ScoreDistribution({{0.1, 0.8}, {0.4, 0.2}})}});
}

struct RandomDistOptions {
  int min_atoms = 1;
  int max_atoms = 8;
  double min_value = 0.0;
  double max_value = 1.0;
};

inline ScoreDistribution random_dist(std::mt19937_64& rng,
                                     const RandomDistOptions& opts = {}) {
  std::uniform_int_distribution<int> n_atoms(opts.min_atoms, opts.max_atoms);
  std::uniform_real_distribution<double> value(opts.min_value, opts.max_value);
  std::uniform_real_distribution<double> mass(0.05, 1.0);
  const int n = n_atoms(rng);
  std::vector<std::pair<double, double>> support;
  support.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    support.emplace_back(value(rng), mass(rng));
  }
  return ScoreDistribution(std::move(support));
}

inline GroupedPopulation random_population(std::mt19937_64& rng, int m,
                                           const RandomDistOptions& opts = {}) {
  std::uniform_real_distribution<double> mass(0.2, 1.0);
  std::vector<Group> groups;
  groups.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    groups.push_back(
        Group{"G" + std::to_string(i + 1), mass(rng), random_dist(rng, opts)});
  }
  return GroupedPopulation(std::move(groups));
}

// Random policy with thresholds drawn from each group's support (plus the
// open top) and uniform tie masses.
inline GroupThresholdPolicy random_policy(std::mt19937_64& rng,
                                          const GroupedPopulation& pop) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GroupThreshold> ts;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& values = pop.group(i).dist.values();
    std::uniform_int_distribution<std::size_t> pick(0, values.size());
    const std::size_t idx = pick(rng);
    const double t = idx == values.size() ? 1.0 : values[idx];
    ts.push_back(GroupThreshold{t, unit(rng)});
  }
  return GroupThresholdPolicy(std::move(ts));
}

// Direct support summation of E[1(u > t) u], independent of the library's
// prefix-sum path.
inline double brute_tail_expectation(const ScoreDistribution& d, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.values()[i] > t) {
      acc += d.values()[i] * d.weights()[i];
    }
  }
  return acc;
}

inline double brute_interval_expectation(const ScoreDistribution& d, double t,
                                         double t_M) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.values()[i] > t && d.values()[i] <= t_M) {
      acc += d.values()[i] * d.weights()[i];
    }
  }
  return acc;
}

// Per-point evaluation of a policy's capacity and TP, bypassing the
// cumulative-sum machinery.
inline double brute_group_capacity(const GroupThreshold& t,
                                   const ScoreDistribution& d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d.weights()[i] * allocation_prob(t, d.values()[i]);
  }
  return acc;
}

inline double brute_group_tp(const GroupThreshold& t,
                             const ScoreDistribution& d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    acc += d.weights()[i] * d.values()[i] * allocation_prob(t, d.values()[i]);
  }
  return acc;
}

// Closed-form mean of a Gaussian clipped to [0,1]:
// mu (Phi(b) - Phi(a)) + Phi(-b) + sigma (phi(a) - phi(b)),
// a = -mu/sigma, b = (1-mu)/sigma.
inline double clipped_gaussian_mean(double mu, double variance) {
  const double sigma = std::sqrt(variance);
  const double a = (0.0 - mu) / sigma;
  const double b = (1.0 - mu) / sigma;
  const auto phi = [](double z) {
    return 0.39894228040143268 * std::exp(-0.5 * z * z);
  };
  return mu * (normal_cdf(b) - normal_cdf(a)) + (1.0 - normal_cdf(b)) +
         sigma * (phi(a) - phi(b));
}

}  // namespace faircap::testing

#endif
