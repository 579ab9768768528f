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

#include "optiloop/optiloop.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"
#include "optiloop/errors.hpp"
#include "optiloop/lp_core.hpp"

namespace optiloop {

std::string to_json_line(const PhaseTelemetry& t) {
  nlohmann::ordered_json j;
  j["phase"] = t.phase;
  j["round"] = t.round;
  j["lp_solves"] = t.lp_solves;
  j["activated"] = t.activated;
  j["deactivated"] = t.deactivated;
  j["energy_before"] = t.energy_before;
  j["energy_after"] = t.energy_after;
  return j.dump();
}

std::size_t sample_proportional(const std::vector<double>& weights,
                                std::mt19937_64& rng) {
  if (weights.empty()) throw Error("sample_proportional: no candidates");
  std::vector<double> w(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::isfinite(weights[i]) && weights[i] > 0.0 ? weights[i] : 0.0;
    total += w[i];
  }
  if (total <= 0.0) {
    std::uniform_int_distribution<std::size_t> pick(0, w.size() - 1);
    return pick(rng);
  }
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  return pick(rng);
}

namespace {

void record(LoopState& st, PhaseTelemetry t) {
  if (st.telemetry_sink) *st.telemetry_sink << to_json_line(t) << '\n';
  st.telemetry.push_back(std::move(t));
}

// Solves the LP with every binary fixed to `cfg`; on success copies the
// flows into `cfg`.
bool route(const Scenario& s, NetworkConfiguration& cfg, std::size_t& solves) {
  const LpProblem p = build_problem(s, fixed_modes(s, cfg));
  const LpSolution sol = solve(p);
  ++solves;
  if (!sol.feasible()) return false;
  assign_flows(cfg, p, sol);
  return true;
}

void activate_node(NetworkConfiguration& cfg, const Vertex& v) {
  if (v.is_node()) cfg.y[v.index] = 1;
}

}  // namespace

NetworkConfiguration initial_solution(const Scenario& s,
                                      std::size_t* lp_solves) {
  NetworkConfiguration cfg = NetworkConfiguration::all_on(s);
  std::size_t solves = 0;
  const bool ok = route(s, cfg, solves);
  if (lp_solves) *lp_solves += solves;
  if (!ok)
    throw InstanceInfeasible(
        "no routing exists even with every node, link and placement active");
  return cfg;
}

LoopState start_loop(const Scenario& s, std::uint64_t seed) {
  LoopState st;
  st.scenario = s;
  st.rng_seed = seed;
  st.rng.seed(seed);
  st.current = initial_solution(s, &st.lp_solves);
  return st;
}

LoopState fix_problems(LoopState st) {
  const Scenario& s = st.scenario;
  const std::size_t nv = s.num_vnfs();
  const std::size_t cap = s.num_links() + s.num_nodes() * nv;
  NetworkConfiguration cfg = st.current;
  PhaseTelemetry t{"fix_problems", st.round, 0, 0, 0,
                   energy_of(s, st.current).total(), 0.0};

  while (true) {
    const LpProblem fixed = build_problem(s, fixed_modes(s, cfg));
    const LpSolution sol = solve(fixed);
    ++t.lp_solves;
    if (sol.feasible()) {
      assign_flows(cfg, fixed, sol);
      break;
    }
    const IisReport iis = compute_iis(fixed);
    bool acted = false;

    auto relaxed_solve = [&](bool links, bool placements) {
      LpProblem q = fixed;
      for (Index l = 0; l < s.num_links(); ++l)
        if (links && !cfg.x[l]) q.set_mode(VarRef::link(l), VarMode::relaxed());
      for (Index c = 0; c < s.num_nodes(); ++c) {
        if (!cfg.y[c]) q.set_mode(VarRef::node(c), VarMode::relaxed());
        for (Index v = 0; v < nv; ++v)
          if (placements && !cfg.placed(c, v, nv))
            q.set_mode(VarRef::placement(c, v), VarMode::relaxed());
      }
      ++t.lp_solves;
      return std::make_pair(q, solve(q));
    };

    // Links and placements that are off, with their relaxed values.
    struct Candidate {
      bool link;
      Index a, b;
    };
    auto sample = [&](const LpProblem& q, const LpSolution& rs, bool links,
                      bool placements) {
      std::vector<Candidate> cands;
      std::vector<double> weights;
      if (links)
        for (Index l = 0; l < s.num_links(); ++l)
          if (!cfg.x[l]) {
            cands.push_back({true, l, 0});
            weights.push_back(q.value(rs, VarRef::link(l)));
          }
      if (placements)
        for (Index c = 0; c < s.num_nodes(); ++c)
          for (Index v = 0; v < nv; ++v)
            if (!cfg.placed(c, v, nv)) {
              cands.push_back({false, c, v});
              weights.push_back(q.value(rs, VarRef::placement(c, v)));
            }
      if (cands.empty()) return false;
      const Candidate& pick = cands[sample_proportional(weights, st.rng)];
      if (pick.link) {
        const Link& link = s.physical.links[pick.a];
        cfg.x[pick.a] = 1;
        activate_node(cfg, link.from);
        activate_node(cfg, link.to);
      } else {
        cfg.set_placed(pick.a, pick.b, nv, true);
        cfg.y[pick.a] = 1;
      }
      ++t.activated;
      return true;
    };

    if (iis.contains(4)) {
      auto [q, rs] = relaxed_solve(true, false);
      if (rs.feasible()) acted |= sample(q, rs, true, false);
    }
    if (iis.contains(7) || iis.contains(6)) {
      auto [q, rs] = relaxed_solve(false, true);
      if (rs.feasible()) acted |= sample(q, rs, false, true);
    }
    if (!acted) {
      auto [q, rs] = relaxed_solve(true, true);
      if (!rs.feasible())
        throw InstanceInfeasible(
            "demand cannot be served even with every inactive element "
            "available");
      if (!sample(q, rs, true, true))
        throw InstanceInfeasible("no inactive element left to activate");
    }
    if (t.activated > cap)
      throw RepairDiverged("repair exceeded its activation cap of " +
                           std::to_string(cap));
  }

  st.current = std::move(cfg);
  st.lp_solves += t.lp_solves;
  st.activations += t.activated;
  t.energy_after = energy_of(s, st.current).total();
  record(st, std::move(t));
  return st;
}

LoopState save_energy(LoopState st) {
  const Scenario& s = st.scenario;
  const std::size_t nv = s.num_vnfs();
  NetworkConfiguration cfg = st.current;
  double energy = energy_of(s, cfg).total();
  PhaseTelemetry t{"save_energy", st.round, 0, 0, 0, energy, 0.0};
  const std::size_t cap =
      cfg.active_links() + cfg.active_nodes() + cfg.deployed_instances();

  for (std::size_t step = 0; step < cap; ++step) {
    // Inactive binaries stay at 0, active ones are relaxed.
    ModeMap modes = fixed_modes(s, cfg);
    for (auto& [v, m] : modes)
      if (m.value == 1.0) m = VarMode::relaxed();
    const LpProblem p = build_problem(s, modes);
    const LpSolution sol = solve(p);
    ++t.lp_solves;
    if (!sol.feasible()) break;

    // Smallest relaxed value among active elements; ties favour links, then
    // nodes, then placements, then the lower index.
    enum class Kind { kNone, kLink, kNode, kPlacement } kind = Kind::kNone;
    Index a = 0, b = 0;
    double best = 0.0;
    auto consider = [&](Kind k, Index i, Index j, double value) {
      if (kind == Kind::kNone || value < best) {
        kind = k;
        a = i;
        b = j;
        best = value;
      }
    };
    for (Index l = 0; l < s.num_links(); ++l)
      if (cfg.x[l]) consider(Kind::kLink, l, 0, p.value(sol, VarRef::link(l)));
    for (Index c = 0; c < s.num_nodes(); ++c)
      if (cfg.y[c]) consider(Kind::kNode, c, 0, p.value(sol, VarRef::node(c)));
    for (Index c = 0; c < s.num_nodes(); ++c)
      for (Index v = 0; v < nv; ++v)
        if (cfg.placed(c, v, nv))
          consider(Kind::kPlacement, c, v,
                   p.value(sol, VarRef::placement(c, v)));
    if (kind == Kind::kNone) break;

    NetworkConfiguration probe = cfg;
    std::size_t removed = 1;
    if (kind == Kind::kLink) {
      probe.x[a] = 0;
    } else if (kind == Kind::kPlacement) {
      probe.set_placed(a, b, nv, false);
    } else {
      probe.y[a] = 0;
      for (Index l = 0; l < s.num_links(); ++l) {
        const Link& link = s.physical.links[l];
        if (probe.x[l] && (link.from == Vertex::node(a) || link.to == Vertex::node(a))) {
          probe.x[l] = 0;
          ++removed;
        }
      }
      for (Index v = 0; v < nv; ++v)
        if (probe.placed(a, v, nv)) {
          probe.set_placed(a, v, nv, false);
          ++removed;
        }
    }
    if (!route(s, probe, t.lp_solves)) break;
    const double after = energy_of(s, probe).total();
    if (after > energy + 1e-9 * std::max(1.0, std::abs(energy))) break;
    st.save_steps.emplace_back(energy, after);
    cfg = std::move(probe);
    energy = after;
    t.deactivated += removed;
  }

  st.current = std::move(cfg);
  st.lp_solves += t.lp_solves;
  st.deactivations += t.deactivated;
  t.energy_after = energy;
  record(st, std::move(t));
  return st;
}

LoopState run_loop(const Scenario& s, std::uint64_t seed, std::size_t rounds,
                   const ScenarioHook& hook, std::ostream* telemetry_sink) {
  LoopState st = start_loop(s, seed);
  st.telemetry_sink = telemetry_sink;
  const double e0 = energy_of(s, st.current).total();
  record(st, {"initial", 0, st.lp_solves, 0, 0, e0, e0});
  for (std::size_t r = 0; r < rounds; ++r) {
    st.round = r + 1;
    if (hook) hook(r, st);
    st = fix_problems(std::move(st));
    st = save_energy(std::move(st));
  }
  return st;
}

}  // namespace optiloop
