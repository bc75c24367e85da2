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

#ifndef FAIRCAP_SCORE_DIST_HPP
#define FAIRCAP_SCORE_DIST_HPP

#include <cstddef>
#include <utility>
#include <vector>

namespace faircap {

/// Discrete weighted distribution of predictor scores on [0,1].
///
/// The support is kept sorted with strictly increasing values; weights are
/// strictly positive and sum to one. Duplicate values passed to the
/// constructor are merged, weights below 1e-15 are dropped, and the result
/// is renormalized. All step-function arithmetic (CDF, quantile, tail
/// expectations) is exact over the support; no quadrature is involved.
///
/// Instances are immutable after construction and safe to share across
/// threads.
class ScoreDistribution {
public:
  /// Builds a distribution from (value, weight) pairs. Values must lie in
  /// [0,1] and weights must be positive; the total mass is normalized to 1.
  explicit ScoreDistribution(std::vector<std::pair<double, double>> support);

  static ScoreDistribution point_mass(double value);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }

  /// F(t) = Pr[u <= t]. Right-continuous step function with cdf(1) = 1.
  /// Throws std::domain_error for t outside [0,1].
  double cdf(double t) const;

  /// q(kappa) = inf{t : F(t) >= kappa}; for kappa = 0 returns the smallest
  /// support value. Throws std::domain_error for kappa outside [0,1].
  double quantile(double kappa) const;

  /// Pr[u > t].
  double tail_prob(double t) const;

  /// Probability mass at exactly `value` (0 if not a support point).
  double mass_at(double value) const;

  /// E[1(u > t) * u].
  double tail_expectation(double t) const;

  /// E[1(t < u <= t_M) * u]. Requires t <= t_M.
  double tail_expectation(double t, double t_M) const;

  /// E[u].
  double mean() const { return cum_vw_.empty() ? 0.0 : cum_vw_.back(); }

  /// Index of the largest support value <= t, or -1 when t is below the
  /// whole support.
  std::ptrdiff_t index_at_or_below(double t) const;

  /// Index of the support value returned by quantile(kappa).
  std::size_t quantile_index(double kappa) const;

  /// Cumulative mass up to and including support index i.
  double cum_weight(std::size_t i) const { return cum_w_[i]; }

private:
  std::vector<double> values_;
  std::vector<double> weights_;
  std::vector<double> cum_w_;   // inclusive prefix mass, last entry exactly 1
  std::vector<double> cum_vw_;  // inclusive prefix of value*mass
};

/// Exact integral of the quantile function over [lo, hi] in probability
/// space, evaluated as a piecewise-constant sum over the support.
double quantile_integral(const ScoreDistribution& dist, double lo, double hi);

/// A Gaussian clipped to [0,1] and discretized: interior mass lands on bin
/// midpoints, clipped-below mass becomes an atom at 0 and clipped-above mass
/// an atom at 1.
struct ClippedGaussianSpec {
  double mean = 0.0;      // pre-clip mean
  double variance = 1.0;  // pre-clip variance, must be > 0
  int bins = 10000;       // number of interior bins, must be >= 2
};

ScoreDistribution discretize(const ClippedGaussianSpec& spec);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace faircap

#endif
