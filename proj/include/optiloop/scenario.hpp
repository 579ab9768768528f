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

// Scenario files, synthetic scenario generation and demand scaling.

#ifndef OPTILOOP_SCENARIO_HPP
#define OPTILOOP_SCENARIO_HPP

#include <cstdint>
#include <string>

#include "optiloop/baselines.hpp"
#include "optiloop/model.hpp"

namespace optiloop {

// ---------------------------------------------------------------------------
// JSON documents

/// Throws ParseError (with line and column for syntax errors) or
/// ScenarioInvalid.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

std::string result_to_json(const Scenario& s, const StrategyResult& r);
/// Reads the configuration written by result_to_json(); energy is
/// recomputed from the flows. Throws ParseError.
StrategyResult parse_result(const Scenario& s, const std::string& text);

// ---------------------------------------------------------------------------
// vEPC chain

enum class ChiPreset {
  kStandard,  // chi(eNB, P/S-GW, MME) = 0.32
  kReduced,   // chi(eNB, P/S-GW, MME) = 0.2
};

/// Adds the four vEPC VNFs and, for every endpoint already present, the
/// chain's chi coefficients. VNF order: eNB, P/S-GW, MME, HSS.
void attach_vepc(LogicalGraph& lg, ChiPreset preset);

// ---------------------------------------------------------------------------
// Generators

struct GeneratorParams {
  std::size_t n_endpoints = 42;
  std::size_t n_nodes = 51;
  std::size_t attachments_per_endpoint = 2;
  double demand_min = 74e6;   // bit/s per endpoint
  double demand_max = 473e6;
  double downlink_fraction = 0.82;
  double endpoint_link_capacity = 10e9;
  double core_link_capacity = 100e9;
  double node_processing_capacity = 100e9;
  // Switching 40 Gbit/s takes a node's whole compute budget.
  double full_switching_rate = 40e9;
  std::size_t chords = 0;  // extra core links; 0 picks n_nodes / 2
  // Model each site as separate downlink and uplink logical endpoints.
  bool split_directions = false;
  ChiPreset chi = ChiPreset::kStandard;
  std::uint64_t rng_seed = 1;
  std::size_t max_retries = 20;
};

/// Ring-plus-chords core, endpoints attached to distinct nodes, uniform
/// demands, vEPC chain and the reference energy constants. Throws
/// GenerationFailed.
Scenario generate(const GeneratorParams& p);

struct ToyParams {
  std::size_t max_nodes = 4;
  std::size_t max_links = 8;  // including endpoint links
  std::size_t max_vnfs = 3;
  std::uint64_t rng_seed = 1;
};

/// Small random instance whose exact optimum is cheap to enumerate. Always
/// feasible with every element active.
Scenario generate_toy(const ToyParams& p);

/// Every ingress demand multiplied by `factor` (> 0).
Scenario scale_demand(const Scenario& s, double factor);

}  // namespace optiloop

#endif  // OPTILOOP_SCENARIO_HPP
