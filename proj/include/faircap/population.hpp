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

#ifndef FAIRCAP_POPULATION_HPP
#define FAIRCAP_POPULATION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "faircap/score_dist.hpp"

namespace faircap {

struct Group {
  std::string name;
  double weight = 0.0;  // Pr[x in S_i]
  ScoreDistribution dist;
};

/// A population partitioned into m disjoint groups, each carrying a score
/// distribution. Group weights are positive and sum to 1 (normalized on
/// construction); group order is preserved as given.
class GroupedPopulation {
public:
  explicit GroupedPopulation(std::vector<Group> groups);

  std::size_t size() const { return groups_.size(); }
  const Group& group(std::size_t i) const { return groups_.at(i); }
  const std::vector<Group>& groups() const { return groups_; }

  /// Index of the named group; throws std::out_of_range if absent.
  std::size_t index_of(std::string_view name) const;

  /// Base rate of group i on the simulated distribution: E[p(x) | x in S_i].
  double base_rate(std::size_t i) const { return group(i).dist.mean(); }
  double base_rate(std::string_view name) const {
    return base_rate(index_of(name));
  }

  /// Population-level mean score, sum of rho_i * base_rate_i.
  double mean_score() const;

  /// Mixture of all group distributions weighted by group mass.
  ScoreDistribution pooled() const;

private:
  std::vector<Group> groups_;
};

struct LabeledSample {
  double score = 0.0;
  std::uint32_t group = 0;  // index into the owning dataset's group table
  std::uint8_t label = 0;
  double weight = 0.0;
};

/// Weighted labeled samples plus the group-name table the samples index
/// into. Weights need not be normalized; evaluation conditions on totals.
struct LabeledDataset {
  std::vector<std::string> group_names;
  std::vector<LabeledSample> rows;

  double total_mass() const;
  double group_mass(std::size_t group) const;

  /// Population implied by the samples: scores and weights per group,
  /// labels ignored.
  GroupedPopulation to_population() const;
};

/// Draws n iid samples: group ~ rho, score ~ group distribution,
/// label ~ Bernoulli(score). Deterministic for a fixed seed; each sample
/// carries weight 1/n. Throws std::domain_error when n == 0.
LabeledDataset simulate_labels(const GroupedPopulation& pop, std::size_t n,
                               std::uint64_t seed);

/// Loads `group,score,weight` (population) or `group,score,weight,label`
/// (labeled samples) from a UTF-8 CSV file with a header row. Throws
/// CsvError naming the offending line on malformed input.
std::variant<GroupedPopulation, LabeledDataset> load_csv(
    const std::string& path);

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FigurePreset { fig1, fig2, fig3 };

/// The three simulated two-group populations used for figure reproduction:
/// clipped Gaussians with equal group weights. fig2 pre-clip means are
/// recovered by bisection so that both post-clip means equal 0.00235.
GroupedPopulation make_figure_population(FigurePreset which, int bins = 10000);

}  // namespace faircap

#endif
