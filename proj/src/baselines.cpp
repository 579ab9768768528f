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

#include "optiloop/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>

#include "optiloop/lp_core.hpp"

namespace optiloop {

namespace {

std::optional<StrategyResult> route_fixed(const Scenario& s,
                                          NetworkConfiguration cfg,
                                          const std::string& name) {
  const LpProblem p = build_problem(s, fixed_modes(s, cfg));
  const LpSolution sol = solve(p);
  if (!sol.feasible()) return std::nullopt;
  assign_flows(cfg, p, sol);
  StrategyResult r{name, std::move(cfg), {}, 1, true};
  r.energy = energy_of(s, r.configuration);
  return r;
}

// Processing energy is the same for every feasible configuration: each
// logical flow is processed exactly once.
double processing_energy(const Scenario& s) {
  double work = 0.0;
  for (const auto& [key, rate] : s.logical.ingress_demand)
    work += rate * s.logical.vnfs[key.second].compute_per_bit;
  for (const auto& [cls, rate] : derive_logical_flows(s.logical))
    work += rate * s.logical.vnfs[cls.next].compute_per_bit;
  return s.energy.proc_power_per_unit * work;
}

}  // namespace

StrategyResult all_active(const Scenario& s) {
  auto r = route_fixed(s, NetworkConfiguration::all_on(s), "all_active");
  if (!r)
    throw InstanceInfeasible("all_active: instance has no feasible routing");
  return *r;
}

double relaxed_bound(const Scenario& s) {
  const LpSolution sol = solve(build_problem(s));
  if (!sol.feasible())
    throw InstanceInfeasible("relaxed problem is infeasible");
  return sol.objective_value;
}

void trim_unused(const Scenario& s, NetworkConfiguration& cfg) {
  const std::size_t nv = s.num_vnfs();
  std::vector<double> carried(s.num_links(), 0.0);
  for (const auto& [k, v] : cfg.tau) carried[k.element] += v;
  for (Index l = 0; l < s.num_links(); ++l)
    if (carried[l] <= 0.0) cfg.x[l] = 0;
  std::vector<std::vector<double>> work(s.num_nodes(),
                                        std::vector<double>(nv, 0.0));
  for (const auto& [k, v] : cfg.processed) work[k.element][k.next] += v;
  for (Index c = 0; c < s.num_nodes(); ++c)
    for (Index v = 0; v < nv; ++v)
      if (work[c][v] <= 0.0) cfg.set_placed(c, v, nv, false);
  std::vector<bool> needed(s.num_nodes(), false);
  for (Index l = 0; l < s.num_links(); ++l) {
    if (!cfg.x[l]) continue;
    const Link& link = s.physical.links[l];
    if (link.from.is_node()) needed[link.from.index] = true;
    if (link.to.is_node()) needed[link.to.index] = true;
  }
  for (Index c = 0; c < s.num_nodes(); ++c) {
    for (Index v = 0; v < nv; ++v)
      if (cfg.placed(c, v, nv)) needed[c] = true;
    if (!needed[c]) cfg.y[c] = 0;
  }
}

StrategyResult exact_optimum(const Scenario& s, std::size_t budget) {
  const std::size_t nc = s.num_nodes();
  const std::size_t nv = s.num_vnfs();
  if (nc > 20) throw BudgetExceeded("exact_optimum: too many nodes to enumerate");
  const EnergyModel& en = s.energy;
  const double proc = processing_energy(s);

  // VNFs that carry traffic need at least one instance each.
  std::vector<bool> loaded(nv, false);
  for (const auto& [key, rate] : s.logical.ingress_demand)
    if (rate > 0.0) loaded[key.second] = true;
  for (const auto& [cls, rate] : derive_logical_flows(s.logical))
    if (rate > 0.0) loaded[cls.next] = true;
  const double min_placement =
      en.placement_power *
      static_cast<double>(std::count(loaded.begin(), loaded.end(), true));

  std::vector<std::uint32_t> masks(std::size_t{1} << nc);
  std::iota(masks.begin(), masks.end(), 0u);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) {
                     return std::popcount(a) < std::popcount(b);
                   });

  std::optional<StrategyResult> best;
  std::size_t solves = 0;
  auto better = [&](const StrategyResult& r) {
    return !best || r.energy.total() < best->energy.total() - 1e-12;
  };
  auto spend = [&]() {
    if (budget != 0 && solves >= budget) {
      StrategyResult partial;
      if (best) {
        partial = *best;
        partial.exact = false;
        partial.lp_solves = solves;
      }
      throw OracleBudgetExceeded(
          "exact_optimum: LP budget of " + std::to_string(budget) +
              " exhausted",
          best.has_value(), partial);
    }
    ++solves;
  };

  for (std::uint32_t mask : masks) {
    const double idle = en.idle_power * std::popcount(mask);
    const double bound = idle + min_placement + proc;
    if (best && bound >= best->energy.total() - 1e-9) break;

    NetworkConfiguration cfg = NetworkConfiguration::all_off(s);
    for (Index c = 0; c < nc; ++c) cfg.y[c] = (mask >> c) & 1u;
    for (Index l = 0; l < s.num_links(); ++l) {
      const Link& link = s.physical.links[l];
      const bool from_ok = link.from.is_endpoint() || cfg.y[link.from.index];
      const bool to_ok = link.to.is_endpoint() || cfg.y[link.to.index];
      cfg.x[l] = from_ok && to_ok;
    }
    std::vector<std::pair<Index, Index>> hosts;  // (node, vnf) candidates
    for (Index c = 0; c < nc; ++c)
      if (cfg.y[c] && s.physical.nodes[c].compute_capacity > 0.0)
        for (Index v = 0; v < nv; ++v) hosts.emplace_back(c, v);

    if (en.placement_power == 0.0) {
      for (const auto& [c, v] : hosts) cfg.set_placed(c, v, nv, true);
      spend();
      auto r = route_fixed(s, cfg, "exact");
      if (r && better(*r)) best = std::move(r);
      continue;
    }
    // Placement subsets in order of size.
    if (hosts.size() > 24)
      throw BudgetExceeded("exact_optimum: too many placements to enumerate");
    std::vector<std::uint32_t> pm(std::size_t{1} << hosts.size());
    std::iota(pm.begin(), pm.end(), 0u);
    std::stable_sort(pm.begin(), pm.end(), [](std::uint32_t a, std::uint32_t b) {
      return std::popcount(a) < std::popcount(b);
    });
    for (std::uint32_t sub : pm) {
      const double lb = idle + en.placement_power * std::popcount(sub) + proc;
      if (best && lb >= best->energy.total() - 1e-9) break;
      NetworkConfiguration trial = cfg;
      for (std::size_t h = 0; h < hosts.size(); ++h)
        if ((sub >> h) & 1u)
          trial.set_placed(hosts[h].first, hosts[h].second, nv, true);
      spend();
      auto r = route_fixed(s, trial, "exact");
      if (r && better(*r)) best = std::move(r);
    }
  }
  if (!best) throw InstanceInfeasible("exact_optimum: no feasible configuration");
  trim_unused(s, best->configuration);
  best->energy = energy_of(s, best->configuration);
  best->lp_solves = solves;
  best->exact = true;
  return *best;
}

// ---------------------------------------------------------------------------
// Consolidation

namespace {

class Consolidator {
 public:
  explicit Consolidator(const Scenario& s)
      : s_(s), nv_(s.num_vnfs()), adj_(adjacency(s)) {
    st_.cfg = NetworkConfiguration::all_off(s);
    for (const Node& n : s.physical.nodes)
      st_.compute.push_back(n.compute_capacity);
    for (const Link& l : s.physical.links) st_.capacity.push_back(l.capacity);
  }

  NetworkConfiguration run() {
    const LogicalFlows flows = derive_logical_flows(s_.logical);
    std::vector<Index> endpoints(s_.num_endpoints());
    std::iota(endpoints.begin(), endpoints.end(), 0);
    std::sort(endpoints.begin(), endpoints.end(), [&](Index a, Index b) {
      return s_.logical.endpoints[a] < s_.logical.endpoints[b];
    });
    for (Index e : endpoints) serve_endpoint(e, flows);
    return st_.cfg;
  }

 private:
  struct Origin {
    bool endpoint;
    Index index;
    auto operator<=>(const Origin&) const = default;
  };
  struct Inflow {
    Origin from;
    double amount;
  };
  // Residual resources and binaries; copied for tentative placements.
  struct State {
    NetworkConfiguration cfg;
    std::vector<double> compute;
    std::vector<double> capacity;
    // Bits of one endpoint's traffic processed per (node, VNF); a single
    // commodity may not exceed the node's compute capacity in bits.
    std::map<std::pair<Index, Index>, double> bits;
  };
  // Input load of one VNF processed per host.
  using Portions = std::map<Index, double>;

  void serve_endpoint(Index e, const LogicalFlows& flows) {
    st_.bits.clear();
    std::vector<Portions> served(nv_);
    for (Index v : topological_vnf_order(s_.logical, e)) {
      // Each predecessor's output leaves from the hosts that processed it,
      // in proportion to their share of its input.
      std::map<Origin, double> by_origin;
      if (const double d = s_.logical.demand(e, v); d > 0.0) by_origin[{true, e}] += d;
      for (Index u = 0; u < nv_; ++u) {
        auto it = flows.find({e, u, v});
        if (it == flows.end() || it->second <= 0.0) continue;
        double total = 0.0;
        for (const auto& [h, a] : served[u]) total += a;
        for (const auto& [h, a] : served[u])
          by_origin[{false, h}] += it->second * a / total;
      }
      std::vector<Inflow> inflows;
      for (const auto& [o, a] : by_origin)
        if (a > 0.0) inflows.push_back({o, a});
      if (!inflows.empty()) served[v] = place(e, v, inflows);
    }
  }

  double per_bit(Index v) const { return s_.logical.vnfs[v].compute_per_bit; }

  // Hop-shortest path (at least one link) from `o` to node `target` over
  // links with residual capacity for `load`; only active links when
  // `active_only`.
  std::optional<std::vector<Index>> path(const State& st, const Origin& o,
                                         Index target, double load,
                                         bool active_only) const {
    const std::size_t nc = s_.num_nodes();
    std::vector<long> via(nc, -1);  // link used to reach node
    std::vector<bool> seen(nc, false);
    std::deque<Index> queue;
    auto usable = [&](Index l) {
      const Link& link = s_.physical.links[l];
      if (active_only && !st.cfg.x[l]) return false;
      if (link.to.is_endpoint()) return false;
      return st.capacity[l] >= load * (1.0 - 1e-12);
    };
    auto visit = [&](Index l) {
      if (!usable(l)) return;
      const Index n = s_.physical.links[l].to.index;
      if (seen[n]) return;
      seen[n] = true;
      via[n] = static_cast<long>(l);
      queue.push_back(n);
    };
    for (Index l : o.endpoint ? adj_.endpoint_out[o.index] : adj_.node_out[o.index])
      visit(l);
    while (!queue.empty() && !seen[target]) {
      const Index n = queue.front();
      queue.pop_front();
      for (Index l : adj_.node_out[n]) visit(l);
    }
    if (!seen[target]) return std::nullopt;
    // Walk back to the first link leaving the origin. The origin node itself
    // may be the target (a round trip through a neighbour).
    const Vertex start = o.endpoint ? Vertex::endpoint(o.index) : Vertex::node(o.index);
    std::vector<Index> links;
    Index n = target;
    while (true) {
      const Index l = static_cast<Index>(via[n]);
      links.push_back(l);
      const Vertex& from = s_.physical.links[l].from;
      if (from == start) break;
      n = from.index;
      if (links.size() > s_.num_links()) return std::nullopt;
    }
    std::reverse(links.begin(), links.end());
    return links;
  }

  // Largest share of `load` that fits along `links` into `target`.
  double max_share(const State& st, const std::vector<Index>& links,
                   Index target, Index v, double load) const {
    double share = load;
    std::vector<double> need(s_.num_nodes(), 0.0);
    need[target] += per_bit(v);
    for (Index l : links) {
      share = std::min(share, st.capacity[l]);
      const Vertex& from = s_.physical.links[l].from;
      if (from.is_node())
        need[from.index] += s_.physical.nodes[from.index].switch_compute_per_bit;
    }
    for (Index c = 0; c < s_.num_nodes(); ++c)
      if (need[c] > 0.0) share = std::min(share, std::max(0.0, st.compute[c]) / need[c]);
    auto it = st.bits.find({target, v});
    const double used = it == st.bits.end() ? 0.0 : it->second;
    return std::min(share, std::max(0.0, s_.physical.nodes[target].compute_capacity - used));
  }

  void commit(State& st, const std::vector<Index>& links, Index target,
              Index v, double load) const {
    st.compute[target] -= per_bit(v) * load;
    st.bits[{target, v}] += load;
    st.cfg.y[target] = 1;
    st.cfg.set_placed(target, v, nv_, true);
    for (Index l : links) {
      const Link& link = s_.physical.links[l];
      st.capacity[l] -= load;
      st.cfg.x[l] = 1;
      if (link.from.is_node()) {
        st.cfg.y[link.from.index] = 1;
        st.compute[link.from.index] -=
            s_.physical.nodes[link.from.index].switch_compute_per_bit * load;
      }
      if (link.to.is_node()) st.cfg.y[link.to.index] = 1;
    }
  }

  // Routes every inflow to `target` on a copy of the state, over active
  // links when possible. Returns the copy and the hops used.
  std::optional<std::pair<State, std::size_t>> route_all(
      const std::vector<Inflow>& inflows, Index target, Index v,
      bool active_links_only) const {
    State trial = st_;
    std::size_t hops = 0;
    for (const Inflow& in : inflows) {
      bool done = false;
      for (bool active_only : {true, false}) {
        if (!active_only && active_links_only) break;
        auto p = path(trial, in.from, target, in.amount, active_only);
        if (!p) continue;
        if (max_share(trial, *p, target, v, in.amount) < in.amount * (1.0 - 1e-9))
          continue;
        commit(trial, *p, target, v, in.amount);
        hops += p->size();
        done = true;
        break;
      }
      if (!done) return std::nullopt;
    }
    return std::make_pair(std::move(trial), hops);
  }

  // Three-stage placement of the whole load on one host.
  std::optional<Index> place_whole(Index v, const std::vector<Inflow>& inflows) {
    double load = 0.0;
    for (const Inflow& in : inflows) load += in.amount;
    const double work = per_bit(v) * load;
    const std::size_t nc = s_.num_nodes();

    auto nearest = [&](auto&& eligible, bool active_links_only)
        -> std::optional<Index> {
      std::optional<std::pair<State, std::size_t>> best;
      Index host = 0;
      for (Index c = 0; c < nc; ++c) {
        if (!eligible(c)) continue;
        auto r = route_all(inflows, c, v, active_links_only);
        if (r && (!best || r->second < best->second)) {
          best = std::move(r);
          host = c;
        }
      }
      if (!best) return std::nullopt;
      st_ = std::move(best->first);
      return host;
    };

    // Stage 1: an existing instance reachable over active links.
    if (auto c = nearest([&](Index c) { return st_.cfg.placed(c, v, nv_); }, true))
      return c;

    // Stage 2: the active node with the most residual compute.
    std::vector<Index> active;
    for (Index c = 0; c < nc; ++c)
      if (st_.cfg.y[c] && st_.compute[c] >= work) active.push_back(c);
    std::stable_sort(active.begin(), active.end(), [&](Index a, Index b) {
      return st_.compute[a] > st_.compute[b];
    });
    for (Index c : active) {
      if (auto r = route_all(inflows, c, v, false)) {
        st_ = std::move(r->first);
        return c;
      }
    }

    // Stage 3: the nearest inactive node that can host.
    return nearest(
        [&](Index c) { return !st_.cfg.y[c] && st_.compute[c] >= work; }, false);
  }

  Portions place(Index e, Index v, const std::vector<Inflow>& inflows) {
    if (auto c = place_whole(v, inflows)) {
      double load = 0.0;
      for (const Inflow& in : inflows) load += in.amount;
      return {{*c, load}};
    }
    // No single host takes the whole load: split each inflow, filling
    // existing instances first, then active nodes, then inactive ones.
    Portions out;
    const std::size_t max_pieces = 4 * (s_.num_nodes() + s_.num_links());
    for (const Inflow& in : inflows) {
      const double tiny = 1e-9 * in.amount;
      double remaining = in.amount;
      for (std::size_t piece = 0; remaining > tiny && piece < max_pieces; ++piece) {
        if (auto c = place_whole(v, {{in.from, remaining}})) {
          out[*c] += remaining;
          remaining = 0.0;
          break;
        }
        std::vector<Index> best_links;
        Index best_target = 0;
        double best = 0.0;
        for (int group = 0; group < 3 && best <= tiny; ++group) {
          for (Index c = 0; c < s_.num_nodes(); ++c) {
            const bool placed = st_.cfg.placed(c, v, nv_);
            const bool in_group = group == 0   ? placed
                                  : group == 1 ? st_.cfg.y[c] && !placed
                                               : !st_.cfg.y[c];
            if (!in_group) continue;
            for (bool active_only : {true, false}) {
              auto p = path(st_, in.from, c, tiny, active_only);
              if (!p) continue;
              const double share = max_share(st_, *p, c, v, remaining);
              if (share > best * (1.0 + 1e-12)) {
                best = share;
                best_links = *p;
                best_target = c;
              }
            }
          }
        }
        if (best <= tiny) break;
        commit(st_, best_links, best_target, v, best);
        out[best_target] += best;
        remaining -= best;
      }
      if (remaining > tiny)
        throw InstanceInfeasible("consolidation: no node can host " +
                                 s_.logical.vnfs[v].name + " for endpoint " +
                                 s_.logical.endpoints[e]);
    }
    return out;
  }

  const Scenario& s_;
  std::size_t nv_;
  Adjacency adj_;
  State st_;
};

}  // namespace

StrategyResult consolidation(const Scenario& s) {
  NetworkConfiguration cfg = Consolidator(s).run();
  if (auto r = route_fixed(s, cfg, "consolidation")) return *r;
  // The greedy reservations ignore some of the return trips the routing
  // needs; open every link between active nodes and try again.
  for (Index l = 0; l < s.num_links(); ++l) {
    const Link& link = s.physical.links[l];
    const bool from_ok = link.from.is_endpoint() || cfg.y[link.from.index];
    const bool to_ok = link.to.is_endpoint() || cfg.y[link.to.index];
    if (from_ok && to_ok) cfg.x[l] = 1;
  }
  if (auto r = route_fixed(s, cfg, "consolidation")) {
    r->lp_solves = 2;
    return *r;
  }
  throw InstanceInfeasible(
      "consolidation: greedy placement admits no feasible routing, even with "
      "every link between active nodes enabled");
}

}  // namespace optiloop
