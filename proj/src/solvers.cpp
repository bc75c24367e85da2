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

#include "faircap/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "faircap/fairness.hpp"

namespace faircap {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kLeftoverTol = 1e-9;

void check_capacity(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw std::domain_error("capacity must lie in [0,1]");
  }
}

std::vector<TpCurve> build_curves(const GroupedPopulation& pop) {
  std::vector<TpCurve> curves;
  curves.reserve(pop.size());
  for (const auto& g : pop.groups()) {
    curves.emplace_back(g.dist);
  }
  return curves;
}

double weighted_budget(const GroupedPopulation& pop,
                       const std::vector<double>& u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    acc += pop.group(i).weight * u[i];
  }
  return acc;
}

// Spreads the (tiny) capacity mismatch c - sum(rho u) uniformly over the
// active groups, clamping at [0,1].
void correct_budget(const GroupedPopulation& pop, std::vector<double>& u,
                    const std::vector<bool>& active, double c) {
  for (int pass = 0; pass < 8; ++pass) {
    const double delta = c - weighted_budget(pop, u);
    if (std::abs(delta) <= 1e-16) {
      return;
    }
    double active_mass = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const bool movable = active[i] && (delta > 0.0 ? u[i] < 1.0 : u[i] > 0.0);
      if (movable) {
        active_mass += pop.group(i).weight;
      }
    }
    if (!(active_mass > 0.0)) {
      return;
    }
    const double step = delta / active_mass;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      const bool movable = active[i] && (delta > 0.0 ? u[i] < 1.0 : u[i] > 0.0);
      if (movable) {
        u[i] = std::clamp(u[i] + step, 0.0, 1.0);
      }
    }
  }
}

SolveResult finalize(const GroupedPopulation& pop, double c,
                     const std::vector<double>& u, int iterations,
                     unsigned flags) {
  std::vector<GroupThreshold> thresholds;
  thresholds.reserve(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    thresholds.push_back(solve_threshold_for_capacity(
        pop.group(i).dist, std::clamp(u[i], 0.0, 1.0)));
  }
  SolveResult out;
  out.policy = GroupThresholdPolicy(std::move(thresholds));
  const auto cap = capacity(out.policy, pop);
  const auto tp = tp_count(out.policy, pop);
  out.group_capacity = cap.per_group;
  out.group_tp = tp.per_group;
  out.global_capacity = cap.global;
  out.global_tp = tp.global;
  out.iterations = iterations;
  out.residual = std::abs(cap.global - c);
  out.flags = flags;
  return out;
}

SolveResult empty_solution(const GroupedPopulation& pop) {
  return finalize(pop, 0.0, std::vector<double>(pop.size(), 0.0), 0, 0);
}

// Remaining (unallocated) mass per atom once each group consumed its top
// u_i mass, flattened and sorted by descending score.
struct ResidualAtom {
  double value;
  double abs_mass;  // population-level mass
  std::size_t group;
};

std::vector<ResidualAtom> residual_atoms(const GroupedPopulation& pop,
                                         const std::vector<double>& u) {
  std::vector<ResidualAtom> atoms;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const auto& dist = pop.group(i).dist;
    double consumed = u[i];
    for (std::size_t k = dist.size(); k > 0; --k) {
      const double w = dist.weights()[k - 1];
      const double take = std::min(w, consumed);
      consumed -= take;
      const double left = w - take;
      if (left > 0.0) {
        atoms.push_back(
            ResidualAtom{dist.values()[k - 1], pop.group(i).weight * left, i});
      }
    }
  }
  std::sort(atoms.begin(), atoms.end(), [](const auto& a, const auto& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.group < b.group;
  });
  return atoms;
}

// Greedy utilitarian distribution of leftover budget over the residual mass.
void spend_leftover_greedy(const GroupedPopulation& pop,
                           std::vector<double>& u, double leftover) {
  for (const auto& atom : residual_atoms(pop, u)) {
    if (leftover <= 0.0) break;
    const double take = std::min(leftover, atom.abs_mass);
    u[atom.group] += take / pop.group(atom.group).weight;
    leftover -= take;
  }
  for (auto& v : u) {
    v = std::min(v, 1.0);
  }
}

// Parks leftover budget on capacity ranges that add no TP (each group's
// range [u_i, limit_i] must be a plateau of its TP curve).
void spend_leftover_plateau(const GroupedPopulation& pop,
                            std::vector<double>& u,
                            const std::vector<double>& limit, double leftover) {
  for (std::size_t i = 0; i < pop.size() && leftover > 0.0; ++i) {
    const double room = std::max(0.0, limit[i] - u[i]);
    const double take = std::min(room, leftover / pop.group(i).weight);
    u[i] += take;
    leftover -= take * pop.group(i).weight;
  }
}

}  // namespace

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::utility_max: return "utility_max";
    case Regime::max_min: return "max_min";
    case Regime::equal_opportunity: return "equal_opportunity";
    case Regime::proportional: return "proportional";
    case Regime::achievable_eo: return "achievable_eo";
  }
  return "unknown";
}

std::optional<Regime> regime_from_name(std::string_view name) {
  for (Regime r : all_regimes()) {
    if (name == regime_name(r)) {
      return r;
    }
  }
  return std::nullopt;
}

std::vector<Regime> all_regimes() {
  return {Regime::utility_max, Regime::max_min, Regime::equal_opportunity,
          Regime::proportional, Regime::achievable_eo};
}

SolveResult solve_utility_max(const GroupedPopulation& pop, double c) {
  check_capacity(c);
  const GroupThreshold pooled = solve_threshold_for_capacity(pop.pooled(), c);
  std::vector<GroupThreshold> thresholds(pop.size(), pooled);
  SolveResult out;
  out.policy = GroupThresholdPolicy(std::move(thresholds));
  const auto cap = capacity(out.policy, pop);
  const auto tp = tp_count(out.policy, pop);
  out.group_capacity = cap.per_group;
  out.group_tp = tp.per_group;
  out.global_capacity = cap.global;
  out.global_tp = tp.global;
  out.residual = std::abs(cap.global - c);
  return out;
}

SolveResult solve_max_min(const GroupedPopulation& pop, double c) {
  check_capacity(c);
  if (c == 0.0) {
    return empty_solution(pop);
  }
  const auto curves = build_curves(pop);
  const std::size_t m = pop.size();

  double mu_hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const double cap_max = std::min(1.0, c / pop.group(i).weight);
    mu_hi = std::min(mu_hi, curves[i].tp(cap_max));
  }

  const auto invert = [&](double mu, std::vector<double>& u) {
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = curves[i].capacity_for_tp(std::min(mu, curves[i].max_tp()));
    }
    return weighted_budget(pop, u);
  };

  std::vector<double> u(m, 0.0);
  int iterations = 0;
  unsigned flags = 0;
  if (invert(mu_hi, u) <= c) {
    // The minimum saturates below the budget; the remainder cannot raise it.
  } else {
    double lo = 0.0;
    double hi = mu_hi;
    for (; iterations < kMaxIterations; ++iterations) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (invert(mid, u) <= c) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    invert(lo, u);
  }

  const double leftover = c - weighted_budget(pop, u);
  if (leftover > kLeftoverTol) {
    spend_leftover_greedy(pop, u, leftover);
    flags |= solve_flags::boundary;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(curves[i].max_tp() > 0.0)) {
        flags |= solve_flags::excluded_group;
      }
    }
  }
  correct_budget(pop, u, std::vector<bool>(m, true), c);
  return finalize(pop, c, u, iterations, flags);
}

namespace {

// Shared ratio-equalization loop for equal opportunity (targets = base
// rates) and achievable equal opportunity (targets = achievable TPs).
SolveResult solve_common_ratio(const GroupedPopulation& pop, double c,
                               const std::vector<double>& targets,
                               const std::vector<double>& plateau_limit) {
  const auto curves = build_curves(pop);
  const std::size_t m = pop.size();

  const auto invert = [&](double r, std::vector<double>& u) {
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = curves[i].capacity_for_tp(
          std::min(r * targets[i], curves[i].max_tp()));
    }
    return weighted_budget(pop, u);
  };

  std::vector<double> u(m, 0.0);
  int iterations = 0;
  unsigned flags = 0;
  if (invert(1.0, u) <= c) {
    // Every group already reaches its full target; park the remainder on
    // zero-marginal mass so the ratios stay intact.
    const double leftover = c - weighted_budget(pop, u);
    if (leftover > kLeftoverTol) {
      flags |= solve_flags::saturated;
    }
    spend_leftover_plateau(pop, u, plateau_limit, leftover);
  } else {
    double lo = 0.0;
    double hi = 1.0;
    for (; iterations < kMaxIterations; ++iterations) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (invert(mid, u) <= c) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    invert(lo, u);
  }
  correct_budget(pop, u, std::vector<bool>(m, true), c);
  return finalize(pop, c, u, iterations, flags);
}

}  // namespace

SolveResult solve_equal_opportunity(const GroupedPopulation& pop, double c) {
  check_capacity(c);
  std::vector<double> targets(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    targets[i] = pop.base_rate(i);
    if (!(targets[i] > 0.0)) {
      throw std::domain_error("equal opportunity needs positive base rates");
    }
  }
  if (c == 0.0) {
    return empty_solution(pop);
  }
  // At full target the whole positive mass is allocated; anything above is
  // a zero-score plateau all the way to capacity 1.
  return solve_common_ratio(pop, c, targets,
                            std::vector<double>(pop.size(), 1.0));
}

SolveResult solve_achievable_eo(const GroupedPopulation& pop, double c) {
  check_capacity(c);
  std::vector<double> targets(pop.size());
  std::vector<double> limits(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    targets[i] = achievable_tp(pop, i, c);
    limits[i] = std::min(1.0, c / pop.group(i).weight);
    if (!(targets[i] > 0.0)) {
      throw std::domain_error(
          "achievable equal opportunity needs positive achievable TP");
    }
  }
  if (c == 0.0) {
    return empty_solution(pop);
  }
  // H_i is flat between the minimal capacity reaching A_i and the budget
  // cap c/rho_i, so padding inside [u_i, limit_i] preserves the ratios.
  return solve_common_ratio(pop, c, targets, limits);
}

SolveResult solve_proportional(const GroupedPopulation& pop, double c) {
  check_capacity(c);
  if (c == 0.0) {
    return empty_solution(pop);
  }
  const auto curves = build_curves(pop);
  const std::size_t m = pop.size();

  std::vector<bool> active(m);
  unsigned flags = 0;
  double active_mass = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    active[i] = curves[i].max_tp() > 0.0;
    if (active[i]) {
      active_mass += pop.group(i).weight;
    } else {
      flags |= solve_flags::excluded_group;
    }
  }

  std::vector<double> u(m, 0.0);
  if (!(active_mass > 0.0)) {
    // Nothing can produce TP; spread the budget uniformly to terminate.
    u.assign(m, c);
    return finalize(pop, c, u, 0, flags | solve_flags::boundary);
  }
  if (c > active_mass) {
    // The active groups cannot absorb the budget alone; fill them and dump
    // the excess on the excluded groups.
    double leftover = c - active_mass;
    for (std::size_t i = 0; i < m; ++i) {
      if (active[i]) {
        u[i] = 1.0;
      } else {
        const double take =
            std::min(1.0, leftover / pop.group(i).weight);
        u[i] = take;
        leftover -= take * pop.group(i).weight;
      }
    }
    return finalize(pop, c, u, 0, flags | solve_flags::boundary);
  }

  const auto invert = [&](double lambda, std::vector<double>& out) {
    double budget = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      out[i] = active[i] ? curves[i].capacity_for_marginal_ratio(lambda) : 0.0;
      budget += pop.group(i).weight * out[i];
    }
    return budget;
  };

  int iterations = 0;
  if (invert(0.0, u) <= c) {
    // All positive mass is already taken; spend the rest on zero plateaus.
    const double leftover = c - weighted_budget(pop, u);
    if (leftover > kLeftoverTol) {
      flags |= solve_flags::saturated;
    }
    std::vector<double> limits(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      limits[i] = active[i] ? 1.0 : 0.0;
    }
    spend_leftover_plateau(pop, u, limits, leftover);
  } else {
    double lambda_hi = 1.0;
    while (invert(lambda_hi, u) > c && lambda_hi < 1e300) {
      lambda_hi *= 2.0;
      ++iterations;
    }
    double lo = 0.0;  // budget(lo) > c
    double hi = lambda_hi;
    for (; iterations < kMaxIterations; ++iterations) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (invert(mid, u) > c) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    invert(hi, u);
  }
  correct_budget(pop, u, active, c);
  return finalize(pop, c, u, iterations, flags);
}

SolveResult solve(const GroupedPopulation& pop, double c, Regime regime) {
  switch (regime) {
    case Regime::utility_max: return solve_utility_max(pop, c);
    case Regime::max_min: return solve_max_min(pop, c);
    case Regime::equal_opportunity: return solve_equal_opportunity(pop, c);
    case Regime::proportional: return solve_proportional(pop, c);
    case Regime::achievable_eo: return solve_achievable_eo(pop, c);
  }
  throw std::invalid_argument("unknown regime");
}

PriceOfFairness price_of_fairness(const GroupedPopulation& pop, double c,
                                  Regime regime) {
  const double opt = solve_utility_max(pop, c).global_tp;
  const double constrained = solve(pop, c, regime).global_tp;
  PriceOfFairness out;
  out.additive = opt - constrained;
  if (constrained > 0.0) {
    out.multiplicative = opt / constrained;
  } else {
    out.multiplicative = opt > 0.0
                             ? std::numeric_limits<double>::infinity()
                             : 1.0;
  }
  return out;
}

}  // namespace faircap
