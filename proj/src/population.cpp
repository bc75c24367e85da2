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

#include "faircap/population.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

namespace faircap {

namespace {

double canonical_uniform(std::mt19937_64& rng) {
  // 53-bit mantissa uniform in [0,1); identical across platforms.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && is_space(s[start])) ++start;
  return s.substr(start);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == ',') {
    out.emplace_back();
  }
  return out;
}

double parse_double(const std::string& text, const std::string& path,
                    std::size_t line_no, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw CsvError(path + ":" + std::to_string(line_no) + ": cannot parse " +
                   what + " '" + text + "'");
  }
}

}  // namespace

GroupedPopulation::GroupedPopulation(std::vector<Group> groups)
    : groups_(std::move(groups)) {
  if (groups_.empty()) {
    throw std::invalid_argument("population needs at least one group");
  }
  double total = 0.0;
  for (const auto& g : groups_) {
    if (g.name.empty()) {
      throw std::invalid_argument("group names must be non-empty");
    }
    if (!(g.weight > 0.0)) {
      throw std::invalid_argument("group weights must be positive");
    }
    total += g.weight;
  }
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    for (std::size_t j = i + 1; j < groups_.size(); ++j) {
      if (groups_[i].name == groups_[j].name) {
        throw std::invalid_argument("duplicate group name: " + groups_[i].name);
      }
    }
  }
  for (auto& g : groups_) {
    g.weight /= total;
  }
}

std::size_t GroupedPopulation::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    if (groups_[i].name == name) {
      return i;
    }
  }
  throw std::out_of_range("unknown group: " + std::string(name));
}

double GroupedPopulation::mean_score() const {
  double acc = 0.0;
  for (const auto& g : groups_) {
    acc += g.weight * g.dist.mean();
  }
  return acc;
}

ScoreDistribution GroupedPopulation::pooled() const {
  std::vector<std::pair<double, double>> support;
  for (const auto& g : groups_) {
    const auto& values = g.dist.values();
    const auto& weights = g.dist.weights();
    for (std::size_t i = 0; i < values.size(); ++i) {
      support.emplace_back(values[i], g.weight * weights[i]);
    }
  }
  return ScoreDistribution(std::move(support));
}

double LabeledDataset::total_mass() const {
  double acc = 0.0;
  for (const auto& r : rows) acc += r.weight;
  return acc;
}

double LabeledDataset::group_mass(std::size_t group) const {
  double acc = 0.0;
  for (const auto& r : rows) {
    if (r.group == group) acc += r.weight;
  }
  return acc;
}

GroupedPopulation LabeledDataset::to_population() const {
  std::vector<std::vector<std::pair<double, double>>> support(
      group_names.size());
  std::vector<double> mass(group_names.size(), 0.0);
  for (const auto& r : rows) {
    support.at(r.group).emplace_back(r.score, r.weight);
    mass.at(r.group) += r.weight;
  }
  std::vector<Group> groups;
  groups.reserve(group_names.size());
  for (std::size_t i = 0; i < group_names.size(); ++i) {
    if (support[i].empty()) {
      throw std::invalid_argument("group without samples: " + group_names[i]);
    }
    groups.push_back(
        Group{group_names[i], mass[i], ScoreDistribution(std::move(support[i]))});
  }
  return GroupedPopulation(std::move(groups));
}

LabeledDataset simulate_labels(const GroupedPopulation& pop, std::size_t n,
                               std::uint64_t seed) {
  if (n == 0) {
    throw std::domain_error("simulate_labels requires n >= 1");
  }
  std::mt19937_64 rng(seed);
  LabeledDataset out;
  out.group_names.reserve(pop.size());
  for (const auto& g : pop.groups()) {
    out.group_names.push_back(g.name);
  }
  out.rows.reserve(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ug = canonical_uniform(rng);
    std::uint32_t gi = 0;
    double acc = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      acc += pop.group(i).weight;
      if (ug < acc || i + 1 == pop.size()) {
        gi = static_cast<std::uint32_t>(i);
        break;
      }
    }
    // kappa in (0,1] so the inverse-CDF draw follows the group law exactly.
    const double kappa = 1.0 - canonical_uniform(rng);
    const double score = pop.group(gi).dist.quantile(kappa);
    const std::uint8_t label = canonical_uniform(rng) < score ? 1 : 0;
    out.rows.push_back(LabeledSample{score, gi, label, w});
  }
  return out;
}

std::variant<GroupedPopulation, LabeledDataset> load_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError("cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw CsvError(path + ": empty file");
  }
  const auto header = split_fields(line);
  const bool labeled =
      header.size() == 4 && header[0] == "group" && header[1] == "score" &&
      header[2] == "weight" && header[3] == "label";
  const bool plain = header.size() == 3 && header[0] == "group" &&
                     header[1] == "score" && header[2] == "weight";
  if (!labeled && !plain) {
    throw CsvError(path +
                   ":1: header must be 'group,score,weight' or "
                   "'group,score,weight,label'");
  }

  std::vector<std::string> group_order;
  std::map<std::string, std::uint32_t> group_index;
  LabeledDataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw CsvError(path + ":" + std::to_string(line_no) + ": expected " +
                     std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    }
    const std::string& name = fields[0];
    if (name.empty()) {
      throw CsvError(path + ":" + std::to_string(line_no) +
                     ": empty group name");
    }
    const double score = parse_double(fields[1], path, line_no, "score");
    const double weight = parse_double(fields[2], path, line_no, "weight");
    if (!(score >= 0.0 && score <= 1.0)) {
      throw CsvError(path + ":" + std::to_string(line_no) +
                     ": score must lie in [0,1]");
    }
    if (!(weight > 0.0)) {
      throw CsvError(path + ":" + std::to_string(line_no) +
                     ": weight must be positive");
    }
    std::uint8_t label = 0;
    if (labeled) {
      if (fields[3] == "0") {
        label = 0;
      } else if (fields[3] == "1") {
        label = 1;
      } else {
        throw CsvError(path + ":" + std::to_string(line_no) +
                       ": label must be 0 or 1");
      }
    }
    auto [it, inserted] = group_index.try_emplace(
        name, static_cast<std::uint32_t>(group_order.size()));
    if (inserted) {
      group_order.push_back(name);
    }
    data.rows.push_back(LabeledSample{score, it->second, label, weight});
  }
  if (data.rows.empty()) {
    throw CsvError(path + ": no data rows");
  }
  data.group_names = std::move(group_order);
  if (labeled) {
    return data;
  }
  return data.to_population();
}

namespace {

// Pre-clip mean whose clipped, discretized distribution hits the requested
// post-clip mean. Monotone in the pre-clip mean, so plain bisection.
double calibrate_preclip_mean(double target_mean, double variance, int bins) {
  double lo = -1.0;
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double mean = discretize({mid, variance, bins}).mean();
    if (mean < target_mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GroupedPopulation make_figure_population(FigurePreset which, int bins) {
  switch (which) {
    case FigurePreset::fig1: {
      return GroupedPopulation(
          {Group{"S1", 0.5, discretize({0.05, 0.02, bins})},
           Group{"S2", 0.5, discretize({0.05, 0.01, bins})}});
    }
    case FigurePreset::fig2: {
      const double m1 = calibrate_preclip_mean(0.00235, 5e-5, bins);
      const double m2 = calibrate_preclip_mean(0.00235, 5e-6, bins);
      return GroupedPopulation(
          {Group{"S1", 0.5, discretize({m1, 5e-5, bins})},
           Group{"S2", 0.5, discretize({m2, 5e-6, bins})}});
    }
    case FigurePreset::fig3: {
      return GroupedPopulation(
          {Group{"S1", 0.5, discretize({0.005, 5e-6, bins})},
           Group{"S2", 0.5, discretize({0.002, 8e-6, bins})}});
    }
  }
  throw std::invalid_argument("unknown figure preset");
}

}  // namespace faircap
