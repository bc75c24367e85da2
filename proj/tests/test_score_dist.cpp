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

#include <cmath>
#include <random>

#include "faircap/score_dist.hpp"
#include "helpers.hpp"

using namespace faircap;
using namespace faircap::testing;

TEST_CASE("construction merges duplicates and normalizes") {
  ScoreDistribution d({{0.3, 1.0}, {0.1, 1.0}, {0.3, 2.0}});
  CHECK(d.size() == 2);
  CHECK(d.values()[0] == 0.1);
  CHECK(d.values()[1] == 0.3);
  CHECK(d.weights()[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(d.weights()[1] == doctest::Approx(0.75).epsilon(1e-14));

  CHECK_THROWS_AS(ScoreDistribution({{1.2, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ScoreDistribution({{0.5, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(ScoreDistribution({}), std::invalid_argument);
}

TEST_CASE("cdf on the running example") {
  const auto d = dist_a();
  CHECK(d.cdf(0.3) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(d.cdf(0.2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ScoreDistribution::point_mass(0.5).cdf(1.0) == 1.0);
  CHECK(d.cdf(1.0) == 1.0);
  CHECK_THROWS_AS(d.cdf(-0.1), std::domain_error);
  CHECK_THROWS_AS(d.cdf(1.1), std::domain_error);
}

TEST_CASE("quantile on the running example") {
  const auto d = dist_a();
  CHECK(d.quantile(0.5) == 0.1);
  CHECK(d.quantile(0.6) == 0.3);
  CHECK(ScoreDistribution::point_mass(0.5).quantile(0.7) == 0.5);
  CHECK(d.quantile(0.0) == 0.1);  // smallest support value
  CHECK(d.quantile(1.0) == 0.6);
  CHECK_THROWS_AS(d.quantile(-0.1), std::domain_error);
  CHECK_THROWS_AS(d.quantile(1.5), std::domain_error);
}

TEST_CASE("tail expectations on the running example") {
  const auto d = dist_a();
  CHECK(d.tail_expectation(0.3) == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(d.tail_expectation(0.1, 0.3) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(d.tail_expectation(1.0) == 0.0);
  CHECK_THROWS_AS(d.tail_expectation(0.5, 0.2), std::domain_error);
}

TEST_CASE("quantile-integral identities hold exactly on random distributions") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomDistOptions opts;
  opts.max_atoms = 50;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = random_dist(rng, opts);
    const double t = unit(rng);
    double t_M = unit(rng);
    if (t_M < t) t_M = t;

    // E[1(u>t) u] = int_{F(t)}^1 q and the bounded-interval analogue.
    const double lhs1 = d.tail_expectation(t);
    const double rhs1 = quantile_integral(d, d.cdf(t), 1.0);
    CHECK(std::abs(lhs1 - rhs1) <= 1e-12);
    CHECK(std::abs(lhs1 - brute_tail_expectation(d, t)) <= 1e-12);

    const double lhs2 = d.tail_expectation(t, t_M);
    const double rhs2 = quantile_integral(d, d.cdf(t), d.cdf(t_M));
    CHECK(std::abs(lhs2 - rhs2) <= 1e-12);
    CHECK(std::abs(lhs2 - brute_interval_expectation(d, t, t_M)) <= 1e-12);
  }
}

TEST_CASE("quantile integral dominates the rectangle bound") {
  // int_{F(t)}^phi q(r) dr >= (phi - F(t)) t for phi in [F(t), 1].
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = random_dist(rng);
    const double t = unit(rng);
    const double ft = d.cdf(t);
    const double phi = ft + (1.0 - ft) * unit(rng);
    const double integral = quantile_integral(d, ft, phi);
    CHECK(integral >= (phi - ft) * t - 1e-15);
  }
}

TEST_CASE("cdf and quantile are monotone and mutually consistent") {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = random_dist(rng);
    double prev_f = -1.0;
    double prev_q = -1.0;
    for (int k = 0; k <= 40; ++k) {
      const double x = k / 40.0;
      const double f = d.cdf(x);
      const double q = d.quantile(x);
      CHECK(f >= prev_f);
      CHECK(q >= prev_q);
      prev_f = f;
      prev_q = q;
      // q(F(t)) <= t wherever F(t) > 0 (at F = 0 the quantile is pinned to
      // the smallest support value by definition), F(q(kappa)) >= kappa.
      if (f > 0.0) {
        CHECK(d.quantile(f) <= x + 1e-15);
      }
      CHECK(d.cdf(d.quantile(x)) >= x - 1e-15);
    }
  }
}

TEST_CASE("discretize concentrates a near-degenerate Gaussian") {
  const auto d = discretize({0.5, 1e-12, 100});
  // All but a vanishing sliver of mass sits in the bin containing 0.5.
  double near = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::abs(d.values()[i] - 0.5) < 0.01) {
      near += d.weights()[i];
    }
  }
  CHECK(near > 0.999999);
  CHECK(d.mean() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("discretize matches the closed-form clipped mean") {
  const auto d = discretize({0.05, 0.01, 1000});
  const double expected = clipped_gaussian_mean(0.05, 0.01);
  CHECK(d.mean() == doctest::Approx(expected).epsilon(1e-6));
  CHECK(d.mean() > 0.05);  // left clipping lifts the mean

  const auto d2 = discretize({0.05, 0.0001, 2000});
  CHECK(d2.mean() ==
        doctest::Approx(clipped_gaussian_mean(0.05, 0.0001)).epsilon(1e-6));
}

TEST_CASE("discretize piles clipped mass into endpoint atoms") {
  const auto d = discretize({-1.0, 0.0001, 100});
  CHECK(d.values()[0] == 0.0);
  CHECK(d.weights()[0] >= 0.999);

  const auto up = discretize({2.0, 0.0001, 100});
  CHECK(up.values().back() == 1.0);
  CHECK(up.weights().back() >= 0.999);

  double total = 0.0;
  const auto mid = discretize({0.3, 0.2, 64});
  for (double w : mid.weights()) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(discretize({0.5, -1.0, 100}), std::domain_error);
  CHECK_THROWS_AS(discretize({0.5, 0.1, 1}), std::domain_error);
}
