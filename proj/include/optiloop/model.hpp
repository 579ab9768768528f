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

// Domain model: logical (service) graph, physical (B/F node) graph, energy
// model, and network configurations.
//
// Units used throughout: traffic in bit/s, compute in abstract units (VNF
// and switching costs are expressed per bit/s), power in watts.

#ifndef OPTILOOP_MODEL_HPP
#define OPTILOOP_MODEL_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace optiloop {

using Index = std::size_t;

/// A vertex of the physical graph: an endpoint or a B/F node.
struct Vertex {
  enum class Kind : std::uint8_t { kEndpoint, kNode };

  Kind kind = Kind::kNode;
  Index index = 0;

  static Vertex endpoint(Index e) { return {Kind::kEndpoint, e}; }
  static Vertex node(Index c) { return {Kind::kNode, c}; }

  bool is_endpoint() const { return kind == Kind::kEndpoint; }
  bool is_node() const { return kind == Kind::kNode; }

  auto operator<=>(const Vertex&) const = default;
};

/// Key of a chi coefficient. `prev` is either an endpoint (first processing
/// step) or a VNF.
struct ChiKey {
  bool prev_is_endpoint = false;
  Index prev = 0;
  Index at = 0;
  Index next = 0;

  auto operator<=>(const ChiKey&) const = default;
};

struct Vnf {
  std::string name;
  double compute_per_bit = 1.0;  // r(v)
  double delay = 0.0;            // D(v), seconds
};

struct LogicalGraph {
  std::vector<std::string> endpoints;
  std::vector<Vnf> vnfs;
  std::map<ChiKey, double> chi;
  // (endpoint, first VNF) -> bit/s
  std::map<std::pair<Index, Index>, double> ingress_demand;

  /// chi(v1, v2, v3); zero when absent.
  double chi_between(Index prev_vnf, Index at, Index next) const;
  /// chi(e, v2, v3); zero when absent.
  double chi_from_endpoint(Index endpoint, Index at, Index next) const;
  /// l(e, v); zero when absent.
  double demand(Index endpoint, Index vnf) const;
};

struct Node {
  std::string name;
  double compute_capacity = 0.0;       // k(c); zero for a pure switch
  double switch_compute_per_bit = 0.0;  // rho(c)
};

struct Link {
  Vertex from;
  Vertex to;
  double capacity = 0.0;  // bit/s
  double delay = 0.0;     // seconds
};

struct PhysicalGraph {
  std::vector<Node> nodes;
  std::vector<Link> links;
};

/// Affine energy model. Fixed costs are per active element, the rest are
/// linear in the carried traffic.
struct EnergyModel {
  double idle_power = 0.0;             // W per active node
  double placement_power = 0.0;        // W per deployed VNF instance
  double proc_power_per_unit = 0.0;    // W per compute unit/s of processing
  double switch_energy_per_bit = 0.0;  // J/bit leaving a node
  double link_energy_per_bit = 0.0;    // J/bit on any link
};

struct Scenario {
  LogicalGraph logical;
  PhysicalGraph physical;
  EnergyModel energy;
  // Per endpoint, seconds; nullopt is unbounded.
  std::vector<std::optional<double>> max_delay;
  bool delays_enabled = false;
  // Generator provenance (parameter name -> value); empty for hand-written
  // scenarios.
  std::vector<std::pair<std::string, double>> generator;

  std::size_t num_endpoints() const { return logical.endpoints.size(); }
  std::size_t num_vnfs() const { return logical.vnfs.size(); }
  std::size_t num_nodes() const { return physical.nodes.size(); }
  std::size_t num_links() const { return physical.links.size(); }

  std::string vertex_name(const Vertex& v) const;
  std::string link_name(Index l) const;
};

/// Throws ScenarioInvalid (or CyclicLogicalGraph) on the first broken
/// invariant.
void validate_scenario(const Scenario& s);

/// Adjacency lists of the physical graph.
struct Adjacency {
  std::vector<std::vector<Index>> node_in;   // links entering node c
  std::vector<std::vector<Index>> node_out;  // links leaving node c
  std::vector<std::vector<Index>> endpoint_out;
  std::vector<std::vector<Index>> endpoint_in;
};

Adjacency adjacency(const Scenario& s);

// ---------------------------------------------------------------------------
// Logical flows

/// (endpoint, previous VNF, next VNF). prev == next denotes unprocessed
/// traffic on its way from the endpoint to its first VNF.
struct FlowClass {
  Index endpoint = 0;
  Index prev = 0;
  Index next = 0;

  auto operator<=>(const FlowClass&) const = default;
};

/// l(e, v1, v2) for every endpoint and every ordered pair v1 != v2.
using LogicalFlows = std::map<FlowClass, double>;

/// Propagates ingress demand through the chi coefficients in topological
/// order. Throws CyclicLogicalGraph.
LogicalFlows derive_logical_flows(const LogicalGraph& lg);

/// VNFs of endpoint `e` in a topological order of its chi graph.
std::vector<Index> topological_vnf_order(const LogicalGraph& lg, Index e);

/// A commodity of endpoint e: traffic last processed at `prev` heading to
/// `next` (prev == next for first-hop traffic).
struct Commodity {
  Index prev = 0;
  Index next = 0;

  bool first_hop() const { return prev == next; }
  auto operator<=>(const Commodity&) const = default;
};

/// Commodities per endpoint. With `full` every (v1, v2) pair is listed;
/// otherwise only those carrying nonzero logical traffic.
std::vector<std::vector<Commodity>> commodities(const Scenario& s,
                                                const LogicalFlows& flows,
                                                bool full);

/// Output ratio of processing commodity `in` of endpoint `e` at in.next
/// toward `next`: chi(e, v, next) for first-hop traffic, chi(v1, v2, next)
/// otherwise.
double chi_effective(const LogicalGraph& lg, Index e, const Commodity& in,
                     Index next);

/// Reference magnitude (bit/s) used to normalize flow residuals: the
/// largest ingress demand, or 1 when there is none.
double flow_scale(const Scenario& s);

// ---------------------------------------------------------------------------
// Configurations

/// Index of a per-element flow: element is a link (tau) or a node (transit,
/// processed).
struct FlowKey {
  Index element = 0;
  Index endpoint = 0;
  Index prev = 0;
  Index next = 0;

  auto operator<=>(const FlowKey&) const = default;
};

using FlowMap = std::map<FlowKey, double>;

struct NetworkConfiguration {
  std::vector<std::uint8_t> x;      // per link
  std::vector<std::uint8_t> y;      // per node
  std::vector<std::uint8_t> delta;  // node-major, |C| x |V|
  FlowMap tau;
  FlowMap transit;
  FlowMap processed;

  static NetworkConfiguration all_off(const Scenario& s);
  static NetworkConfiguration all_on(const Scenario& s);

  bool placed(Index c, Index v, std::size_t num_vnfs) const {
    return delta[c * num_vnfs + v] != 0;
  }
  void set_placed(Index c, Index v, std::size_t num_vnfs, bool on) {
    delta[c * num_vnfs + v] = on ? 1 : 0;
  }

  std::size_t active_links() const;
  std::size_t active_nodes() const;
  std::size_t deployed_instances() const;

  bool same_binaries(const NetworkConfiguration& other) const {
    return x == other.x && y == other.y && delta == other.delta;
  }
};

/// Constraint families, numbered as in row names (eq1_..., eq9_...):
///   1  inflow at a node equals its transit plus processed traffic
///   2  outflow at a node equals transit plus chi-scaled processing output
///   3  an active link needs both node ends active
///   4  link capacity
///   5  a placement needs its node active
///   6  per-commodity processing is at most delta * k
///   7  node compute: processing plus rho * switched traffic <= k * y
///   8  end-to-end delay bound per endpoint
///   9  traffic injected by an endpoint equals its demand
struct Violation {
  int equation = 0;  // family 1..9; 0 for domain errors (negative or misplaced flow)
  std::string index;
  double residual = 0.0;  // normalized by flow_scale()
};

inline constexpr double kDefaultTolerance = 1e-6;

/// Checks every model constraint. Throws ShapeMismatch when the
/// configuration does not fit the scenario.
std::vector<Violation> validate_configuration(
    const Scenario& s, const NetworkConfiguration& cfg,
    double tol = kDefaultTolerance);

struct EnergyBreakdown {
  double placement = 0.0;   // E_0
  double processing = 0.0;  // E_proc
  double idle = 0.0;        // E_idle
  double switching = 0.0;   // E_sw
  double link = 0.0;        // E_link

  double total() const {
    return placement + processing + idle + switching + link;
  }
};

EnergyBreakdown energy_of(const Scenario& s, const NetworkConfiguration& cfg);

/// Left-hand side of the compute constraint at node c: processing plus
/// software switching load.
double compute_load(const Scenario& s, const NetworkConfiguration& cfg,
                    Index c);

}  // namespace optiloop

#endif  // OPTILOOP_MODEL_HPP
