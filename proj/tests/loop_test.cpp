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


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "optiloop/errors.hpp"
#include "optiloop/optiloop.hpp"

using namespace optiloop;

namespace {

// e -> a, then two disjoint 1 Gbit/s paths a -> b -> d and a -> c -> d; the
// single VNF runs only at d. Capacities are sized so that at 0.8 Gbit/s
// every relaxed value on the essential elements exceeds those of a path.
Scenario two_path(double demand) {
  const double path_capacity = 1e9;
  Scenario s;
  s.logical.endpoints = {"e"};
  s.logical.vnfs = {{"f", 1.0, 0.0}};
  s.logical.ingress_demand[{0, 0}] = demand;
  s.physical.nodes = {{"a", 0.0, 0.0}, {"b", 0.0, 0.0}, {"c", 0.0, 0.0},
                      {"d", 1.7e9, 0.0}};
  s.physical.links = {
      {Vertex::endpoint(0), Vertex::node(0), 1.6e9, 0.0},
      {Vertex::node(0), Vertex::node(1), path_capacity, 0.0},
      {Vertex::node(1), Vertex::node(3), path_capacity, 0.0},
      {Vertex::node(0), Vertex::node(2), path_capacity, 0.0},
      {Vertex::node(2), Vertex::node(3), path_capacity, 0.0}};
  s.energy = {65.0, 0.0, 48e-9, 3.25e-9, 0.0};
  s.max_delay = {std::nullopt};
  return s;
}

// e -> n1 <-> n2; each node can process only 60% of the demand.
Scenario split_compute(double demand) {
  Scenario s = fixtures::single_vnf(demand, 0.6 * demand, 1e10);
  s.physical.nodes = {{"n1", 0.6 * demand, 0.0}, {"n2", 0.6 * demand, 0.0}};
  s.physical.links.push_back({Vertex::node(0), Vertex::node(1), 1e10, 0.0});
  s.physical.links.push_back({Vertex::node(1), Vertex::node(0), 1e10, 0.0});
  return s;
}

}  // namespace

TEST_CASE("initial solution is everything on with one LP") {
  const Scenario s = fixtures::vepc_two_node();
  std::size_t solves = 0;
  const NetworkConfiguration cfg = initial_solution(s, &solves);
  CHECK(solves == 1);
  CHECK(cfg.same_binaries(NetworkConfiguration::all_on(s)));
  CHECK(validate_configuration(s, cfg).empty());

  CHECK_THROWS_AS(initial_solution(fixtures::single_vnf(2e9, 1e10, 1e9)),
                  InstanceInfeasible);
}

TEST_CASE("repairing an already feasible configuration costs one LP") {
  const Scenario s = fixtures::vepc_two_node();
  LoopState st = start_loop(s, 7);
  const NetworkConfiguration before = st.current;
  const std::size_t solves = st.lp_solves;
  st = fix_problems(std::move(st));
  CHECK(st.lp_solves == solves + 1);
  CHECK(st.activations == 0);
  CHECK(st.current.same_binaries(before));
  REQUIRE(!st.telemetry.empty());
  CHECK(st.telemetry.back().phase == "fix_problems");
  CHECK(st.telemetry.back().lp_solves == 1);
}

TEST_CASE("capacity shortfall on one path activates the second path") {
  const Scenario low = two_path(0.8e9);
  LoopState st = start_loop(low, 3);
  // Keep only a -> b -> d.
  st.current.y[2] = 0;
  st.current.x[3] = 0;
  st.current.x[4] = 0;
  st = fix_problems(std::move(st));
  REQUIRE(validate_configuration(low, st.current).empty());
  CHECK(st.current.x[3] == 0);

  st.scenario = two_path(1.6e9);
  st = fix_problems(std::move(st));
  CHECK(validate_configuration(st.scenario, st.current).empty());
  CHECK(st.activations >= 1);
  CHECK(st.current.x[3] == 1);
  CHECK(st.current.x[4] == 1);
  CHECK(st.current.y[2] == 1);
}

TEST_CASE("compute shortfall deploys a second instance") {
  const Scenario s = split_compute(1e9);
  LoopState st = start_loop(s, 5);
  st.current.y[1] = 0;
  st.current.x[1] = 0;
  st.current.x[2] = 0;
  st.current.set_placed(1, 0, 1, false);
  st.current.tau.clear();
  st.current.transit.clear();
  st.current.processed.clear();
  st = fix_problems(std::move(st));
  CHECK(validate_configuration(s, st.current).empty());
  CHECK(st.current.deployed_instances() == 2);
  CHECK(st.current.y[1] == 1);
  CHECK(st.current.x[1] == 1);
}

TEST_CASE("an instance infeasible even with everything on is reported") {
  LoopState st = start_loop(fixtures::single_vnf(1e9, 1e10, 2e9), 1);
  st.scenario = fixtures::single_vnf(4e9, 1e10, 2e9);
  CHECK_THROWS_AS(fix_problems(std::move(st)), InstanceInfeasible);
}

TEST_CASE("the spare switch is switched off") {
  const Scenario s = fixtures::vepc_with_spare_switch();
  const LoopState st = run_loop(s, 11, 1);
  CHECK(st.current.y[2] == 0);
  CHECK(st.current.x[3] == 0);
  CHECK(st.current.x[4] == 0);
  CHECK(validate_configuration(s, st.current).empty());
  CHECK(energy_of(s, st.current).total() <
        energy_of(s, initial_solution(s)).total());
}

TEST_CASE("zero demand ends with nothing active") {
  const Scenario s = fixtures::vepc_with_spare_switch();
  const Scenario zero = [&] {
    Scenario z = s;
    z.logical.ingress_demand[{0, fixtures::kEnb}] = 0.0;
    return z;
  }();
  const LoopState st = run_loop(zero, 2, 1);
  CHECK(st.current.active_nodes() == 0);
  CHECK(st.current.active_links() == 0);
  CHECK(st.current.deployed_instances() == 0);
  CHECK(energy_of(zero, st.current).total() == 0.0);
}

TEST_CASE("same seed, same run") {
  const Scenario s = fixtures::vepc_with_spare_switch();
  const LoopState a = run_loop(s, 99, 3);
  const LoopState b = run_loop(s, 99, 3);
  CHECK(a.current.same_binaries(b.current));
  CHECK(a.current.tau == b.current.tau);
  CHECK(a.current.processed == b.current.processed);
  CHECK(a.lp_solves == b.lp_solves);
  REQUIRE(a.telemetry.size() == b.telemetry.size());
  for (std::size_t i = 0; i < a.telemetry.size(); ++i)
    CHECK(to_json_line(a.telemetry[i]) == to_json_line(b.telemetry[i]));
}

TEST_CASE("zero rounds return the initial solution") {
  const Scenario s = fixtures::vepc_with_spare_switch();
  const LoopState st = run_loop(s, 1, 0);
  CHECK(st.current.same_binaries(NetworkConfiguration::all_on(s)));
  CHECK(st.telemetry.size() == 1);
  CHECK(st.lp_solves == 1);
}

TEST_CASE("demand doubled by the hook is repaired") {
  const Scenario s = two_path(0.8e9);
  bool scaled = false;
  const LoopState st = run_loop(
      s, 4, 3, [&](std::size_t round, LoopState& state) {
        if (round == 2) {
          state.scenario = two_path(1.6e9);
          scaled = true;
        }
      });
  REQUIRE(scaled);
  CHECK(validate_configuration(st.scenario, st.current).empty());
  // Round one turns one path off; the doubled demand needs both.
  CHECK(st.activations >= 1);
  CHECK(st.current.active_links() == 5);
}

TEST_CASE("every accepted deactivation lowers or keeps the energy") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const LoopState st = run_loop(fixtures::vepc_with_spare_switch(), seed, 2);
    CHECK(!st.save_steps.empty());
    for (const auto& [before, after] : st.save_steps)
      CHECK(after <= before + 1e-9 * (1.0 + std::abs(before)));
  }
}

TEST_CASE("telemetry lines are JSON objects, one per phase") {
  std::ostringstream sink;
  const std::size_t rounds = 2;
  const LoopState st =
      run_loop(fixtures::vepc_with_spare_switch(), 8, rounds, {}, &sink);
  std::istringstream lines(sink.str());
  std::string line;
  std::size_t count = 0, solves = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("phase"));
    CHECK(j.contains("round"));
    CHECK(j.contains("energy_after"));
    solves += j.at("lp_solves").get<std::size_t>();
    ++count;
  }
  CHECK(count == 1 + 2 * rounds);
  CHECK(count == st.telemetry.size());
  CHECK(solves == st.lp_solves);
  CHECK(st.telemetry.front().phase == "initial");
}

TEST_CASE("proportional sampling follows the weights") {
  std::mt19937_64 rng(12345);
  const std::vector<double> w{0.1, 0.2, 0.0, 0.3, 0.4};
  const int draws = 10000;
  std::vector<int> hits(w.size(), 0);
  for (int i = 0; i < draws; ++i) ++hits[sample_proportional(w, rng)];
  CHECK(hits[2] == 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = w[i];
    const double sigma = std::sqrt(draws * p * (1.0 - p));
    CHECK(std::abs(hits[i] - draws * p) <= 3.0 * sigma + 1e-9);
  }

  std::vector<int> uniform(4, 0);
  for (int i = 0; i < draws; ++i)
    ++uniform[sample_proportional({0.0, 0.0, 0.0, 0.0}, rng)];
  for (int h : uniform) {
    const double sigma = std::sqrt(draws * 0.25 * 0.75);
    CHECK(std::abs(h - draws * 0.25) <= 3.0 * sigma);
  }
}

TEST_CASE("a configuration saturated on every element is left unchanged") {
  const Scenario s = fixtures::single_vnf(1e9, 1e9, 1e9);
  LoopState st = start_loop(s, 6);
  const NetworkConfiguration before = st.current;
  st = save_energy(std::move(st));
  CHECK(st.current.same_binaries(before));
  CHECK(st.deactivations == 0);
  CHECK(st.telemetry.back().lp_solves == 2);
}
