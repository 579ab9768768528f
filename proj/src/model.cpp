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

#include "optiloop/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "optiloop/errors.hpp"

namespace optiloop {

namespace {

double lookup(const std::map<ChiKey, double>& chi, const ChiKey& key) {
  auto it = chi.find(key);
  return it == chi.end() ? 0.0 : it->second;
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

[[noreturn]] void invalid(const std::string& what) {
  throw ScenarioInvalid("invalid scenario: " + what);
}

}  // namespace

double LogicalGraph::chi_between(Index prev_vnf, Index at, Index next) const {
  return lookup(chi, ChiKey{false, prev_vnf, at, next});
}

double LogicalGraph::chi_from_endpoint(Index endpoint, Index at,
                                       Index next) const {
  return lookup(chi, ChiKey{true, endpoint, at, next});
}

double LogicalGraph::demand(Index endpoint, Index vnf) const {
  auto it = ingress_demand.find({endpoint, vnf});
  return it == ingress_demand.end() ? 0.0 : it->second;
}

std::string Scenario::vertex_name(const Vertex& v) const {
  return v.is_endpoint() ? logical.endpoints.at(v.index)
                         : physical.nodes.at(v.index).name;
}

std::string Scenario::link_name(Index l) const {
  const Link& link = physical.links.at(l);
  return vertex_name(link.from) + "->" + vertex_name(link.to);
}

void validate_scenario(const Scenario& s) {
  const auto& lg = s.logical;
  const auto& pg = s.physical;
  std::set<std::string> names;
  for (const auto& e : lg.endpoints) {
    if (e.empty()) invalid("empty endpoint name");
    if (!names.insert(e).second) invalid("duplicate vertex name '" + e + "'");
  }
  for (const auto& n : pg.nodes) {
    if (n.name.empty()) invalid("empty node name");
    if (!names.insert(n.name).second)
      invalid("duplicate vertex name '" + n.name + "'");
    if (!finite_nonneg(n.compute_capacity))
      invalid("node '" + n.name + "' has negative compute capacity");
    if (!finite_nonneg(n.switch_compute_per_bit))
      invalid("node '" + n.name + "' has negative switching cost");
  }
  std::set<std::string> vnf_names;
  for (const auto& v : lg.vnfs) {
    if (v.name.empty()) invalid("empty VNF name");
    if (!vnf_names.insert(v.name).second)
      invalid("duplicate VNF name '" + v.name + "'");
    if (!finite_nonneg(v.compute_per_bit) || !finite_nonneg(v.delay))
      invalid("VNF '" + v.name + "' has negative parameters");
  }

  const std::size_t ne = lg.endpoints.size();
  const std::size_t nv = lg.vnfs.size();
  for (const auto& [key, ratio] : lg.chi) {
    if ((key.prev_is_endpoint ? key.prev >= ne : key.prev >= nv) ||
        key.at >= nv || key.next >= nv)
      invalid("chi entry references an unknown vertex");
    if (!finite_nonneg(ratio)) invalid("negative chi ratio");
  }
  for (const auto& [key, rate] : lg.ingress_demand) {
    if (key.first >= ne || key.second >= nv)
      invalid("demand entry references an unknown vertex");
    if (!finite_nonneg(rate)) invalid("negative demand");
  }

  std::vector<bool> attached(ne, false);
  auto check_vertex = [&](const Vertex& v) {
    if (v.is_endpoint() ? v.index >= ne : v.index >= pg.nodes.size())
      invalid("link references an unknown vertex");
    if (v.is_endpoint()) attached[v.index] = true;
  };
  for (const auto& link : pg.links) {
    check_vertex(link.from);
    check_vertex(link.to);
    if (link.from == link.to) invalid("self-loop link");
    if (link.from.is_endpoint() && link.to.is_endpoint())
      invalid("endpoint-to-endpoint link");
    if (!(std::isfinite(link.capacity) && link.capacity > 0.0))
      invalid("link capacity must be positive");
    if (!finite_nonneg(link.delay)) invalid("negative link delay");
  }
  for (std::size_t e = 0; e < ne; ++e) {
    if (!attached[e])
      invalid("endpoint '" + lg.endpoints[e] + "' has no attached link");
  }
  if (s.max_delay.size() != ne) invalid("max_delay must list every endpoint");
  for (const auto& d : s.max_delay) {
    if (d && !finite_nonneg(*d)) invalid("negative max_delay");
  }
  const auto& en = s.energy;
  if (!finite_nonneg(en.idle_power) || !finite_nonneg(en.placement_power) ||
      !finite_nonneg(en.proc_power_per_unit) ||
      !finite_nonneg(en.switch_energy_per_bit) ||
      !finite_nonneg(en.link_energy_per_bit))
    invalid("energy parameters must be nonnegative");

  for (std::size_t e = 0; e < ne; ++e) topological_vnf_order(lg, e);
}

Adjacency adjacency(const Scenario& s) {
  Adjacency adj;
  adj.node_in.resize(s.num_nodes());
  adj.node_out.resize(s.num_nodes());
  adj.endpoint_in.resize(s.num_endpoints());
  adj.endpoint_out.resize(s.num_endpoints());
  for (Index l = 0; l < s.num_links(); ++l) {
    const Link& link = s.physical.links[l];
    (link.from.is_node() ? adj.node_out : adj.endpoint_out)[link.from.index]
        .push_back(l);
    (link.to.is_node() ? adj.node_in : adj.endpoint_in)[link.to.index]
        .push_back(l);
  }
  return adj;
}

std::vector<Index> topological_vnf_order(const LogicalGraph& lg, Index e) {
  const std::size_t nv = lg.vnfs.size();
  std::vector<std::set<Index>> succ(nv);
  for (const auto& [key, ratio] : lg.chi) {
    if (ratio <= 0.0) continue;
    if (key.prev_is_endpoint && key.prev != e) continue;
    succ[key.at].insert(key.next);
  }
  std::vector<std::size_t> indegree(nv, 0);
  for (const auto& out : succ)
    for (Index w : out) ++indegree[w];

  std::deque<Index> ready;
  for (Index v = 0; v < nv; ++v)
    if (indegree[v] == 0) ready.push_back(v);
  std::vector<Index> order;
  order.reserve(nv);
  while (!ready.empty()) {
    Index v = ready.front();
    ready.pop_front();
    order.push_back(v);
    for (Index w : succ[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != nv) {
    throw CyclicLogicalGraph("chi graph of endpoint '" +
                             (e < lg.endpoints.size() ? lg.endpoints[e]
                                                      : std::to_string(e)) +
                             "' contains a cycle");
  }
  return order;
}

LogicalFlows derive_logical_flows(const LogicalGraph& lg) {
  const std::size_t nv = lg.vnfs.size();
  LogicalFlows flows;
  for (Index e = 0; e < lg.endpoints.size(); ++e) {
    for (Index v1 = 0; v1 < nv; ++v1)
      for (Index v2 = 0; v2 < nv; ++v2)
        if (v1 != v2) flows[{e, v1, v2}] = 0.0;

    for (Index v2 : topological_vnf_order(lg, e)) {
      // Every flow entering v2 is final once v2 comes up in topological
      // order.
      const double ingress = lg.demand(e, v2);
      for (Index v3 = 0; v3 < nv; ++v3) {
        if (v3 == v2) continue;
        double out = ingress * lg.chi_from_endpoint(e, v2, v3);
        for (Index v1 = 0; v1 < nv; ++v1) {
          if (v1 == v2) continue;
          const double in = flows[{e, v1, v2}];
          if (in != 0.0) out += in * lg.chi_between(v1, v2, v3);
        }
        flows[{e, v2, v3}] = out;
      }
    }
  }
  return flows;
}

std::vector<std::vector<Commodity>> commodities(const Scenario& s,
                                                const LogicalFlows& flows,
                                                bool full) {
  const std::size_t nv = s.num_vnfs();
  std::vector<std::vector<Commodity>> out(s.num_endpoints());
  for (Index e = 0; e < s.num_endpoints(); ++e) {
    for (Index v1 = 0; v1 < nv; ++v1) {
      for (Index v2 = 0; v2 < nv; ++v2) {
        bool keep = full;
        if (!keep) {
          if (v1 == v2) {
            keep = s.logical.demand(e, v1) > 0.0;
          } else {
            auto it = flows.find({e, v1, v2});
            keep = it != flows.end() && it->second > 0.0;
          }
        }
        if (keep) out[e].push_back({v1, v2});
      }
    }
  }
  return out;
}

double chi_effective(const LogicalGraph& lg, Index e, const Commodity& in,
                     Index next) {
  return in.first_hop() ? lg.chi_from_endpoint(e, in.next, next)
                        : lg.chi_between(in.prev, in.next, next);
}

double flow_scale(const Scenario& s) {
  double scale = 0.0;
  for (const auto& [key, rate] : s.logical.ingress_demand)
    scale = std::max(scale, rate);
  return scale > 0.0 ? scale : 1.0;
}

NetworkConfiguration NetworkConfiguration::all_off(const Scenario& s) {
  NetworkConfiguration cfg;
  cfg.x.assign(s.num_links(), 0);
  cfg.y.assign(s.num_nodes(), 0);
  cfg.delta.assign(s.num_nodes() * s.num_vnfs(), 0);
  return cfg;
}

NetworkConfiguration NetworkConfiguration::all_on(const Scenario& s) {
  NetworkConfiguration cfg;
  cfg.x.assign(s.num_links(), 1);
  cfg.y.assign(s.num_nodes(), 1);
  cfg.delta.assign(s.num_nodes() * s.num_vnfs(), 1);
  return cfg;
}

std::size_t NetworkConfiguration::active_links() const {
  return static_cast<std::size_t>(std::count(x.begin(), x.end(), 1));
}

std::size_t NetworkConfiguration::active_nodes() const {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

std::size_t NetworkConfiguration::deployed_instances() const {
  return static_cast<std::size_t>(std::count(delta.begin(), delta.end(), 1));
}

namespace {

void check_shape(const Scenario& s, const NetworkConfiguration& cfg) {
  if (cfg.x.size() != s.num_links() || cfg.y.size() != s.num_nodes() ||
      cfg.delta.size() != s.num_nodes() * s.num_vnfs())
    throw ShapeMismatch("configuration binaries do not match the scenario");
  auto binary = [](const std::vector<std::uint8_t>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](std::uint8_t b) { return b <= 1; });
  };
  if (!binary(cfg.x) || !binary(cfg.y) || !binary(cfg.delta))
    throw ShapeMismatch("configuration binaries must be 0 or 1");
  auto check_keys = [&](const FlowMap& m, std::size_t elements,
                        const char* what) {
    for (const auto& [k, v] : m) {
      if (k.element >= elements || k.endpoint >= s.num_endpoints() ||
          k.prev >= s.num_vnfs() || k.next >= s.num_vnfs())
        throw ShapeMismatch(std::string(what) + " key out of range");
    }
  };
  check_keys(cfg.tau, s.num_links(), "tau");
  check_keys(cfg.transit, s.num_nodes(), "transit");
  check_keys(cfg.processed, s.num_nodes(), "processed");
}

double get(const FlowMap& m, const FlowKey& k) {
  auto it = m.find(k);
  return it == m.end() ? 0.0 : it->second;
}

}  // namespace

std::vector<Violation> validate_configuration(const Scenario& s,
                                              const NetworkConfiguration& cfg,
                                              double tol) {
  check_shape(s, cfg);
  const auto& lg = s.logical;
  const std::size_t nv = s.num_vnfs();
  const double scale = flow_scale(s);
  std::vector<Violation> out;

  auto name_of = [&](Index c, Index e, Index v1, Index v2) {
    std::ostringstream os;
    os << "c=" << s.physical.nodes[c].name << ",e=" << lg.endpoints[e]
       << ",v1=" << lg.vnfs[v1].name << ",v2=" << lg.vnfs[v2].name;
    return os.str();
  };
  auto report = [&](int eq, std::string index, double residual) {
    out.push_back({eq, std::move(index), residual});
  };

  // Domain: nonnegativity, and no flow through endpoints other than the
  // owning endpoint's first hop.
  auto check_nonneg = [&](const FlowMap& m, const char* what) {
    for (const auto& [k, v] : m)
      if (v / scale < -tol)
        report(0, std::string(what) + " negative", v / scale);
  };
  check_nonneg(cfg.tau, "tau");
  check_nonneg(cfg.transit, "transit");
  check_nonneg(cfg.processed, "processed");
  for (const auto& [k, v] : cfg.tau) {
    const Link& link = s.physical.links[k.element];
    bool allowed = true;
    if (link.to.is_endpoint()) allowed = false;
    if (link.from.is_endpoint() &&
        (link.from.index != k.endpoint || k.prev != k.next))
      allowed = false;
    if (!allowed && std::abs(v) / scale > tol)
      report(0, "tau on link " + s.link_name(k.element) + " not allowed",
             v / scale);
  }

  // Aggregate link flows by (node, endpoint, prev, next).
  std::map<FlowKey, double> inflow;
  std::map<FlowKey, double> outflow;
  std::vector<double> link_total(s.num_links(), 0.0);
  for (const auto& [k, v] : cfg.tau) {
    const Link& link = s.physical.links[k.element];
    link_total[k.element] += v;
    if (link.to.is_node()) inflow[{link.to.index, k.endpoint, k.prev, k.next}] += v;
    if (link.from.is_node())
      outflow[{link.from.index, k.endpoint, k.prev, k.next}] += v;
  }

  for (Index c = 0; c < s.num_nodes(); ++c) {
    for (Index e = 0; e < s.num_endpoints(); ++e) {
      for (Index v1 = 0; v1 < nv; ++v1) {
        for (Index v2 = 0; v2 < nv; ++v2) {
          const FlowKey key{c, e, v1, v2};
          // Family 1: inflow balance.
          const double r1 = get(inflow, key) - get(cfg.transit, key) -
                            get(cfg.processed, key);
          if (std::abs(r1) / scale > tol)
            report(1, name_of(c, e, v1, v2), r1 / scale);
          // Family 2, outflow balance: key is the outgoing commodity (v1 -> v2) at c.
          double produced = 0.0;
          for (Index v0 = 0; v0 < nv; ++v0) {
            const double p = get(cfg.processed, {c, e, v0, v1});
            if (p != 0.0)
              produced += p * chi_effective(lg, e, {v0, v1}, v2);
          }
          const double r2 =
              get(outflow, key) - get(cfg.transit, key) - produced;
          if (std::abs(r2) / scale > tol)
            report(2, name_of(c, e, v1, v2), r2 / scale);
          // Family 6: per-commodity processing cap.
          const double r6 =
              get(cfg.processed, key) -
              (cfg.placed(c, v2, nv) ? s.physical.nodes[c].compute_capacity
                                     : 0.0);
          if (r6 / scale > tol) report(6, name_of(c, e, v1, v2), r6 / scale);
        }
      }
    }
  }

  // Families 3 and 4: link ends active, link capacity.
  for (Index l = 0; l < s.num_links(); ++l) {
    const Link& link = s.physical.links[l];
    for (const Vertex& end : {link.from, link.to}) {
      if (end.is_node() && cfg.x[l] > cfg.y[end.index])
        report(3, "link=" + s.link_name(l) + ",end=" + s.vertex_name(end),
               1.0);
    }
    const double r4 = link_total[l] - cfg.x[l] * link.capacity;
    if (r4 / scale > tol) report(4, "link=" + s.link_name(l), r4 / scale);
  }

  // Families 5 and 7: placement needs node, node compute.
  for (Index c = 0; c < s.num_nodes(); ++c) {
    for (Index v = 0; v < nv; ++v) {
      if (cfg.placed(c, v, nv) && !cfg.y[c])
        report(5, "c=" + s.physical.nodes[c].name + ",v=" + lg.vnfs[v].name,
               1.0);
    }
    const double r7 =
        compute_load(s, cfg, c) - s.physical.nodes[c].compute_capacity;
    if (r7 / scale > tol) report(7, "c=" + s.physical.nodes[c].name, r7 / scale);
  }

  // Family 8: delay bound.
  if (s.delays_enabled) {
    for (Index e = 0; e < s.num_endpoints(); ++e) {
      if (!s.max_delay[e]) continue;
      double total_demand = 0.0;
      for (Index v = 0; v < nv; ++v) total_demand += lg.demand(e, v);
      if (total_demand <= 0.0) continue;
      double weighted = 0.0;
      for (const auto& [k, v] : cfg.tau)
        if (k.endpoint == e) weighted += s.physical.links[k.element].delay * v;
      for (const auto& [k, v] : cfg.processed)
        if (k.endpoint == e) weighted += lg.vnfs[k.next].delay * v;
      const double r8 = weighted - *s.max_delay[e] * total_demand;
      if (r8 / scale > tol) report(8, "e=" + lg.endpoints[e], r8 / scale);
    }
  }

  // Family 9: injected traffic matches demand.
  for (const auto& [key, rate] : lg.ingress_demand) {
    if (rate <= 0.0) continue;
    const auto [e, v] = key;
    double injected = 0.0;
    for (Index l = 0; l < s.num_links(); ++l) {
      const Link& link = s.physical.links[l];
      if (link.from == Vertex::endpoint(e))
        injected += get(cfg.tau, {l, e, v, v});
    }
    const double r9 = injected - rate;
    if (std::abs(r9) / scale > tol)
      report(9, "e=" + lg.endpoints[e] + ",v=" + lg.vnfs[v].name, r9 / scale);
  }
  return out;
}

double compute_load(const Scenario& s, const NetworkConfiguration& cfg,
                    Index c) {
  double load = 0.0;
  for (const auto& [k, v] : cfg.processed)
    if (k.element == c) load += s.logical.vnfs[k.next].compute_per_bit * v;
  double switched = 0.0;
  for (const auto& [k, v] : cfg.tau) {
    const Link& link = s.physical.links[k.element];
    if (link.from == Vertex::node(c)) switched += v;
  }
  return load + s.physical.nodes[c].switch_compute_per_bit * switched;
}

EnergyBreakdown energy_of(const Scenario& s, const NetworkConfiguration& cfg) {
  const EnergyModel& en = s.energy;
  EnergyBreakdown out;
  double active = 0.0;
  for (auto b : cfg.y) active += b;
  out.idle = en.idle_power * active;
  double deployed = 0.0;
  for (auto b : cfg.delta) deployed += b;
  out.placement = en.placement_power * deployed;
  double work = 0.0;
  for (const auto& [k, v] : cfg.processed)
    work += s.logical.vnfs[k.next].compute_per_bit * v;
  out.processing = en.proc_power_per_unit * work;
  double switched = 0.0;
  double carried = 0.0;
  for (const auto& [k, v] : cfg.tau) {
    carried += v;
    if (s.physical.links[k.element].from.is_node()) switched += v;
  }
  out.switching = en.switch_energy_per_bit * switched;
  out.link = en.link_energy_per_bit * carried;
  return out;
}

}  // namespace optiloop
