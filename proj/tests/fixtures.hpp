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

// Hand-built scenarios shared by the unit tests.

#ifndef OPTILOOP_TESTS_FIXTURES_HPP
#define OPTILOOP_TESTS_FIXTURES_HPP

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optiloop/model.hpp"

namespace fixtures {

using optiloop::ChiKey;
using optiloop::Index;
using optiloop::Link;
using optiloop::Scenario;
using optiloop::Vertex;

// VNF indices of the vEPC chain.
inline constexpr Index kEnb = 0, kGw = 1, kMme = 2, kHss = 3;

inline optiloop::LogicalGraph vepc_logical(double chi_gw_mme = 0.2) {
  optiloop::LogicalGraph lg;
  lg.endpoints = {"RRH"};
  lg.vnfs = {{"eNB", 1.0, 0.0}, {"P/S-GW", 1.0, 0.0}, {"MME", 1.0, 0.0},
             {"HSS", 1.0, 0.0}};
  lg.chi[{true, 0, kEnb, kGw}] = 1.0;
  lg.chi[{true, 0, kEnb, kMme}] = 0.3;
  lg.chi[{false, kEnb, kGw, kMme}] = chi_gw_mme;
  lg.chi[{false, kEnb, kMme, kHss}] = 1.0;
  lg.chi[{false, kGw, kMme, kHss}] = 1.0;
  return lg;
}

inline constexpr double kFixtureDemand = 1e8;

// RRH -> n1, n1 <-> n2; paper-experiment energy constants.
inline Scenario vepc_two_node(double demand = kFixtureDemand) {
  Scenario s;
  s.logical = vepc_logical();
  s.logical.ingress_demand[{0, kEnb}] = demand;
  s.physical.nodes = {{"n1", 1e10, 0.25}, {"n2", 1e10, 0.25}};
  s.physical.links = {{Vertex::endpoint(0), Vertex::node(0), 1e9, 0.0},
                      {Vertex::node(0), Vertex::node(1), 1e9, 0.0},
                      {Vertex::node(1), Vertex::node(0), 1e9, 0.0}};
  s.energy = {65.0, 0.0, 48e-9, 3.25e-9, 0.0};
  s.max_delay = {std::nullopt};
  return s;
}

// The fixture plus a switch-only node n3 hanging off n2.
inline Scenario vepc_with_spare_switch() {
  Scenario s = vepc_two_node();
  s.physical.nodes.push_back({"n3", 0.0, 0.25});
  s.physical.links.push_back({Vertex::node(1), Vertex::node(2), 1e9, 0.0});
  s.physical.links.push_back({Vertex::node(2), Vertex::node(1), 1e9, 0.0});
  return s;
}

// One endpoint, one VNF, one compute node; traffic is consumed where it is
// processed.
inline Scenario single_vnf(double demand, double k, double link_capacity) {
  Scenario s;
  s.logical.endpoints = {"e"};
  s.logical.vnfs = {{"f", 1.0, 0.0}};
  s.logical.ingress_demand[{0, 0}] = demand;
  s.physical.nodes = {{"c", k, 0.0}};
  s.physical.links = {{Vertex::endpoint(0), Vertex::node(0), link_capacity, 0.0}};
  s.energy = {65.0, 0.0, 48e-9, 3.25e-9, 0.0};
  s.max_delay = {std::nullopt};
  return s;
}

}  // namespace fixtures

#endif  // OPTILOOP_TESTS_FIXTURES_HPP
