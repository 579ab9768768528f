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

// Per-strategy metrics and the demand-sweep experiment that produces them.

#ifndef OPTILOOP_METRICS_HPP
#define OPTILOOP_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optiloop/baselines.hpp"
#include "optiloop/model.hpp"
#include "optiloop/scenario.hpp"

namespace optiloop {

struct MetricsRow {
  std::uint64_t seed = 0;
  std::string strategy;
  double demand_factor = 1.0;
  EnergyBreakdown energy;
  double savings_vs_all_active = 0.0;
  double spare_ccat = 0.0;  // unused compute on active nodes
  double mean_hops = 0.0;   // link traversals per injected bit
  bool hops_defined = false;
  std::vector<std::size_t> vnf_instances;  // per VNF
  std::size_t active_nodes = 0;
  std::size_t active_links = 0;
  std::size_t lp_solves = 0;
  bool exact = true;
  double wall_time = 0.0;  // seconds
};

/// Throws BaselineMissing when `baseline` is null.
MetricsRow compute_metrics(const Scenario& s, const StrategyResult& r,
                           const StrategyResult* baseline);

inline const std::vector<std::string>& known_strategies() {
  static const std::vector<std::string> names{"all_active", "consolidation",
                                              "optiloop", "exact"};
  return names;
}

struct ExperimentConfig {
  // Either a fixed scenario or one generated per seed.
  std::optional<Scenario> scenario;
  std::optional<GeneratorParams> generator;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> factors{1.0};
  std::vector<std::string> strategies{known_strategies()};
  std::size_t rounds = 3;
  std::size_t oracle_budget = 0;  // 0: unlimited
  bool timing = false;
  // Control-loop phase records as JSON lines; null disables them.
  std::ostream* telemetry = nullptr;
};

/// One row per (seed, factor, strategy), in that nesting order. Strategy
/// errors propagate.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& config);

/// RFC 4180 CSV with a fixed header. The wall_time column is written only
/// when `timing` is set, so untimed output is reproducible byte for byte.
void write_csv(std::ostream& os, const std::vector<MetricsRow>& rows,
               const std::vector<std::string>& vnf_names, bool timing);

}  // namespace optiloop

#endif  // OPTILOOP_METRICS_HPP
