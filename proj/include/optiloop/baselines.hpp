// Copyright 2026 The OptiLoop Authors
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

// Reference strategies the control loop is compared against.

#ifndef OPTILOOP_BASELINES_HPP
#define OPTILOOP_BASELINES_HPP

#include <cstddef>
#include <string>

#include "optiloop/errors.hpp"
#include "optiloop/model.hpp"

namespace optiloop {

struct StrategyResult {
  std::string name;
  NetworkConfiguration configuration;
  EnergyBreakdown energy;
  std::size_t lp_solves = 0;
  bool exact = true;  // false for a budget-truncated oracle result
};

/// Everything on; flows minimize the traffic-dependent energy.
/// Throws InstanceInfeasible.
StrategyResult all_active(const Scenario& s);

/// Greedy three-stage placement: reuse a reachable deployed instance, else
/// deploy on the active node with the most spare compute, else switch on
/// the nearest idle node that can host. Throws InstanceInfeasible.
StrategyResult consolidation(const Scenario& s);

/// Thrown by exact_optimum() when the LP budget runs out.
class OracleBudgetExceeded : public BudgetExceeded {
 public:
  OracleBudgetExceeded(const std::string& what, bool has_best,
                       StrategyResult best)
      : BudgetExceeded(what), has_best_(has_best), best_(std::move(best)) {}

  bool has_best() const { return has_best_; }
  /// Best configuration found so far, flagged non-exact.
  const StrategyResult& best() const { return best_; }

 private:
  bool has_best_;
  StrategyResult best_;
};

/// Minimum-energy configuration by enumerating node sets in order of their
/// fixed cost, with at most `budget` LP solves (0: unlimited).
/// Throws OracleBudgetExceeded or InstanceInfeasible.
StrategyResult exact_optimum(const Scenario& s, std::size_t budget = 0);

/// Optimum of the LP with every binary relaxed to [0, 1].
double relaxed_bound(const Scenario& s);

/// Drops links without traffic, placements without processing and nodes
/// left with neither. Flows are unchanged.
void trim_unused(const Scenario& s, NetworkConfiguration& cfg);

}  // namespace optiloop

#endif  // OPTILOOP_BASELINES_HPP
