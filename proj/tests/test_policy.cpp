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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "faircap/policy.hpp"
#include "helpers.hpp"

using namespace faircap;
using namespace faircap::testing;

TEST_CASE("threshold solving on the running example") {
  const auto d = dist_a();

  const auto a = solve_threshold_for_capacity(d, 0.2);
  CHECK(a.threshold == 0.3);
  CHECK(a.tie_gamma == 0.0);

  const auto b = solve_threshold_for_capacity(d, 0.35);
  CHECK(b.threshold == 0.3);
  CHECK(b.tie_gamma == doctest::Approx(0.5).epsilon(1e-12));

  const auto full = solve_threshold_for_capacity(d, 1.0);
  CHECK(allocation_prob(full, 0.1) == 1.0);
  CHECK(allocation_prob(full, 0.6) == 1.0);

  const auto none = solve_threshold_for_capacity(d, 0.0);
  CHECK(brute_group_capacity(none, d) == 0.0);

  CHECK_THROWS_AS(solve_threshold_for_capacity(d, 1.5), std::domain_error);
}

TEST_CASE("solved thresholds hit the requested capacity exactly") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomDistOptions opts;
  opts.max_atoms = 30;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = random_dist(rng, opts);
    const double c = unit(rng);
    const auto t = solve_threshold_for_capacity(d, c);
    const double achieved =
        d.tail_prob(t.threshold) + t.tie_gamma * d.mass_at(t.threshold);
    CHECK(std::abs(achieved - c) <= 1e-12);
  }
}

TEST_CASE("capacity evaluation on small instances") {
  const GroupedPopulation single({Group{"A", 1.0, dist_a()}});
  const GroupThresholdPolicy p({GroupThreshold{0.3, 0.5}});
  const auto cap = capacity(p, single);
  CHECK(cap.global == doctest::Approx(0.35).epsilon(1e-14));

  const GroupThresholdPolicy zero({GroupThreshold{1.0, 0.0}});
  CHECK(capacity(zero, single).global == 0.0);

  const auto g2 = g2_population();
  const GroupThresholdPolicy both(
      {GroupThreshold{0.2, 0.0}, GroupThreshold{0.1, 0.0}});
  const auto cap2 = capacity(both, g2);
  CHECK(cap2.per_group[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(cap2.per_group[1] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(cap2.global == doctest::Approx(0.2).epsilon(1e-14));

  CHECK_THROWS_AS(capacity(p, g2), std::out_of_range);
}

TEST_CASE("tp_count on small instances") {
  const auto g2 = g2_population();
  // Within-group capacities (0.2, 0.2): thresholds take the top atoms.
  const GroupThresholdPolicy both(
      {GroupThreshold{0.2, 0.0}, GroupThreshold{0.1, 0.0}});
  const auto tp = tp_count(both, g2);
  CHECK(tp.per_group[0] == doctest::Approx(0.16).epsilon(1e-13));
  CHECK(tp.per_group[1] == doctest::Approx(0.08).epsilon(1e-13));
  CHECK(tp.global == doctest::Approx(0.12).epsilon(1e-13));

  const GroupedPopulation single({Group{"A", 1.0, dist_a()}});
  const GroupThresholdPolicy half({GroupThreshold{0.3, 0.5}});
  CHECK(tp_count(half, single).global ==
        doctest::Approx(0.165).epsilon(1e-13));

  const GroupThresholdPolicy zero(
      {GroupThreshold{1.0, 0.0}, GroupThreshold{1.0, 0.0}});
  CHECK(tp_count(zero, g2).global == 0.0);
}

TEST_CASE("capacity and tp match per-point evaluation on random policies") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto pop = random_population(rng, 1 + trial % 3);
    const auto policy = random_policy(rng, pop);
    const auto cap = capacity(policy, pop);
    const auto tp = tp_count(policy, pop);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      CHECK(std::abs(cap.per_group[i] -
                     brute_group_capacity(policy[i], pop.group(i).dist)) <=
            1e-12);
      CHECK(std::abs(tp.per_group[i] -
                     brute_group_tp(policy[i], pop.group(i).dist)) <= 1e-12);
    }
  }
}

TEST_CASE("expected loss reduces to b + c - 2T for the 0/1 loss") {
  std::mt19937_64 rng(17);
  const BinaryLoss zero_one{0.0, 1.0, 1.0, 0.0};
  for (int trial = 0; trial < 200; ++trial) {
    const auto pop = random_population(rng, 1 + trial % 3);
    const auto policy = random_policy(rng, pop);
    const double loss = expected_loss(policy, pop, zero_one);
    const double b = pop.mean_score();
    const double c = capacity(policy, pop).global;
    const double t = tp_count(policy, pop).global;
    CHECK(std::abs(loss - (b + c - 2.0 * t)) <= 1e-12);
  }
}

TEST_CASE("expected loss edge cases") {
  // Separable distribution: every positive individual above the threshold.
  const GroupedPopulation sep(
      {Group{"A", 1.0, ScoreDistribution({{0.0, 0.7}, {1.0, 0.3}})}});
  const GroupThresholdPolicy perfect({GroupThreshold{0.5, 0.0}});
  CHECK(expected_loss(perfect, sep, {0.0, 1.0, 1.0, 0.0}) == 0.0);

  // Empty policy loses exactly the base rate under symmetric unit loss.
  const GroupedPopulation single({Group{"A", 1.0, dist_a()}});
  const GroupThresholdPolicy empty({GroupThreshold{1.0, 0.0}});
  CHECK(expected_loss(empty, single, {0.0, 1.0, 1.0, 0.0}) ==
        doctest::Approx(single.mean_score()).epsilon(1e-13));

  CHECK_THROWS_AS(expected_loss(empty, single, {0.5, 1.0, 1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(expected_loss(empty, single, {0.0, 1.0, 1.0, 0.1}),
                  std::invalid_argument);
}

TEST_CASE("max TP and min loss pick the same policy at fixed capacity") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pop = random_population(rng, 2);
    const double c = 0.05 + 0.4 * unit(rng);

    // Policy family: all within-group capacity splits on a grid.
    std::vector<GroupThresholdPolicy> family;
    const double rho1 = pop.group(0).weight;
    const double rho2 = pop.group(1).weight;
    for (int s = 0; s <= 20; ++s) {
      const double lo = std::max(0.0, (c - rho2) / rho1);
      const double hi = std::min(1.0, c / rho1);
      const double u1 = lo + (hi - lo) * s / 20.0;
      const double u2 = (c - rho1 * u1) / rho2;
      if (u2 < 0.0 || u2 > 1.0) continue;
      family.push_back(GroupThresholdPolicy(
          {solve_threshold_for_capacity(pop.group(0).dist, u1),
           solve_threshold_for_capacity(pop.group(1).dist, u2)}));
    }
    REQUIRE(!family.empty());

    std::size_t best_tp = 0;
    for (std::size_t i = 1; i < family.size(); ++i) {
      if (tp_count(family[i], pop).global >
          tp_count(family[best_tp], pop).global) {
        best_tp = i;
      }
    }
    for (int lt = 0; lt < 3; ++lt) {
      const BinaryLoss loss{0.0, 0.1 + unit(rng), 0.1 + unit(rng), 0.0};
      double min_loss = expected_loss(family[0], pop, loss);
      for (const auto& p : family) {
        min_loss = std::min(min_loss, expected_loss(p, pop, loss));
      }
      CHECK(expected_loss(family[best_tp], pop, loss) <= min_loss + 1e-12);
    }
  }
}

TEST_CASE("calibration error on hand-checkable datasets") {
  LabeledDataset flat;
  flat.group_names = {"A"};
  for (int i = 0; i < 4; ++i) {
    flat.rows.push_back(LabeledSample{0.5, 0, 1, 0.25});
  }
  CHECK(calibration_error(flat, 0) == doctest::Approx(0.5).epsilon(1e-14));

  LabeledDataset exact;
  exact.group_names = {"A"};
  exact.rows.push_back(LabeledSample{0.0, 0, 0, 0.5});
  exact.rows.push_back(LabeledSample{1.0, 0, 1, 0.5});
  CHECK(calibration_error(exact, 0) == 0.0);

  LabeledDataset empty;
  empty.group_names = {"A", "B"};
  empty.rows.push_back(LabeledSample{0.5, 0, 1, 1.0});
  CHECK_THROWS_AS(calibration_error(empty, 1), std::domain_error);
}

TEST_CASE("calibration error of simulated labels shrinks with sample size") {
  const auto pop = g2_population();
  const auto small = simulate_labels(pop, 2000, 5);
  const auto large = simulate_labels(pop, 200000, 5);
  const double err_small =
      calibration_error(small, 0) + calibration_error(small, 1);
  const double err_large =
      calibration_error(large, 0) + calibration_error(large, 1);
  CHECK(err_large < err_small);
  CHECK(err_large < 0.02);
}

TEST_CASE("empirical TP deviates from analytic TP by at most the calibration error") {
  // Deterministic miscalibration: per score r the labels average to
  // r + shift instead of r, encoded as weighted 0/1 rows.
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pop = random_population(rng, 2);
    LabeledDataset data;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      data.group_names.push_back(pop.group(i).name);
    }
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const auto& d = pop.group(i).dist;
      for (std::size_t k = 0; k < d.size(); ++k) {
        const double r = d.values()[k];
        const double shift = 0.2 * (unit(rng) - 0.5);
        const double mu = std::clamp(r + shift, 0.0, 1.0);
        const double w = pop.group(i).weight * d.weights()[k];
        if (mu > 0.0) {
          data.rows.push_back(
              LabeledSample{r, static_cast<std::uint32_t>(i), 1, w * mu});
        }
        if (mu < 1.0) {
          data.rows.push_back(LabeledSample{r, static_cast<std::uint32_t>(i),
                                            0, w * (1.0 - mu)});
        }
      }
    }
    const auto policy = random_policy(rng, pop);
    const auto analytic = tp_count(policy, pop);
    const auto empirical = tp_count_empirical(policy, data);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const double alpha = calibration_error(data, i);
      CHECK(std::abs(empirical.per_group[i] - analytic.per_group[i]) <=
            alpha + 1e-12);
    }
  }
}

TEST_CASE("TpCurve agrees with threshold evaluation") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_dist(rng);
    const TpCurve curve(d);
    for (int k = 0; k < 10; ++k) {
      const double u = unit(rng);
      const auto t = solve_threshold_for_capacity(d, u);
      CHECK(std::abs(curve.tp(u) - brute_group_tp(t, d)) <= 1e-12);
    }
    CHECK(curve.max_tp() == doctest::Approx(d.mean()).epsilon(1e-13));
  }
}

TEST_CASE("TpCurve inversion returns the minimal capacity") {
  // Zero atom creates a plateau: inverting at the plateau TP must stop at
  // the positive mass, not beyond.
  const ScoreDistribution d({{0.0, 0.5}, {0.4, 0.3}, {0.8, 0.2}});
  const TpCurve curve(d);
  CHECK(curve.positive_mass() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(curve.capacity_for_tp(curve.max_tp()) ==
        doctest::Approx(0.5).epsilon(1e-13));
  CHECK(curve.capacity_for_tp(0.16) == doctest::Approx(0.2).epsilon(1e-13));
  CHECK(curve.capacity_for_tp(0.0) == 0.0);
  CHECK(std::isinf(curve.capacity_for_tp(curve.max_tp() + 0.01)));

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rd = random_dist(rng);
    const TpCurve rc(rd);
    const double mu = unit(rng) * rc.max_tp();
    const double cap = rc.capacity_for_tp(mu);
    CHECK(rc.tp(cap) >= mu - 1e-12);
    if (cap > 1e-9) {
      CHECK(rc.tp(cap - 1e-9) < mu + 1e-12);
    }
  }
}

TEST_CASE("TpCurve marginal ratio inversion is consistent") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomDistOptions opts;
  opts.min_value = 0.05;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_dist(rng, opts);
    const TpCurve curve(d);
    const double lambda = 0.5 + 20.0 * unit(rng);
    const double u = curve.capacity_for_marginal_ratio(lambda);
    if (u > 0.0 && u < 1.0) {
      // psi at u (left) is >= lambda, psi just beyond is <= lambda.
      const double psi_left = curve.marginal_value(u) / curve.tp(u);
      CHECK(psi_left >= lambda - 1e-9);
      const double eps = 1e-9;
      const double psi_right = curve.marginal_value(std::min(1.0, u + eps)) /
                               curve.tp(std::min(1.0, u + eps));
      CHECK(psi_right <= lambda + 1e-6);
    }
  }
}
