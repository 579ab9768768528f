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

// The control loop: start from everything active, then alternate a repair
// phase (activate elements until the current demand fits) and a saving
// phase (deactivate the least-used element while that stays feasible).

#ifndef OPTILOOP_OPTILOOP_HPP
#define OPTILOOP_OPTILOOP_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "optiloop/model.hpp"

namespace optiloop {

struct PhaseTelemetry {
  std::string phase;  // "initial", "fix_problems" or "save_energy"
  std::size_t round = 0;
  std::size_t lp_solves = 0;
  std::size_t activated = 0;
  std::size_t deactivated = 0;
  double energy_before = 0.0;
  double energy_after = 0.0;
};

/// One line of JSON, no trailing newline.
std::string to_json_line(const PhaseTelemetry& t);

struct LoopState {
  Scenario scenario;
  NetworkConfiguration current;
  std::uint64_t rng_seed = 0;
  std::mt19937_64 rng;

  std::size_t round = 0;
  std::size_t lp_solves = 0;
  std::size_t activations = 0;
  std::size_t deactivations = 0;
  // Energy before and after every accepted deactivation.
  std::vector<std::pair<double, double>> save_steps;
  std::vector<PhaseTelemetry> telemetry;
  // When set, each telemetry record is also written here as a JSON line.
  std::ostream* telemetry_sink = nullptr;
};

/// All binaries at 1, flows from one LP. Throws InstanceInfeasible.
NetworkConfiguration initial_solution(const Scenario& s,
                                      std::size_t* lp_solves = nullptr);

/// State holding initial_solution(s).
LoopState start_loop(const Scenario& s, std::uint64_t seed);

/// Activates links and placements, sampled in proportion to their relaxed
/// values, until the current binaries admit a feasible routing of the
/// current scenario. Throws InstanceInfeasible or RepairDiverged.
LoopState fix_problems(LoopState state);

/// Repeatedly switches off the active element with the smallest relaxed
/// value while the result stays feasible and no more expensive.
LoopState save_energy(LoopState state);

/// Called before each round; may replace state.scenario.
using ScenarioHook = std::function<void(std::size_t round, LoopState&)>;

LoopState run_loop(const Scenario& s, std::uint64_t seed, std::size_t rounds,
                   const ScenarioHook& hook = {},
                   std::ostream* telemetry_sink = nullptr);

/// Index drawn with probability proportional to `weights`. Zero weights are
/// never drawn unless all are zero, in which case the draw is uniform.
std::size_t sample_proportional(const std::vector<double>& weights,
                                std::mt19937_64& rng);

}  // namespace optiloop

#endif  // OPTILOOP_OPTILOOP_HPP
