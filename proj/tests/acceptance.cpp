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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "independent_check.hpp"
#include "optiloop/baselines.hpp"
#include "optiloop/errors.hpp"
#include "optiloop/lp_core.hpp"
#include "optiloop/metrics.hpp"
#include "optiloop/optiloop.hpp"
#include "optiloop/scenario.hpp"

using namespace optiloop;

namespace {

constexpr double kRelTol = 1e-5;
constexpr std::size_t kToyInstances = 50;
constexpr std::size_t kLoopRounds = 3;

bool leq(double a, double b) {
  return a <= b + kRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? 0.0 : sum / v.size();
}

double spare_ccat(const Scenario& s, const NetworkConfiguration& cfg) {
  double spare = 0.0;
  for (Index c = 0; c < s.num_nodes(); ++c)
    if (cfg.y[c]) spare += s.physical.nodes[c].compute_capacity - compute_load(s, cfg, c);
  return spare;
}

// Everything the toy-instance criteria need, computed once.
struct ToyRecord {
  Scenario scenario;
  double relaxed = 0, exact = 0, loop = 0, all = 0, consolidation = 0;
  double spare_exact = 0, spare_loop = 0, spare_consolidation = 0;
  // False when the greedy dead-ends; such instances drop out of every
  // comparison against consolidation.
  bool consolidation_ok = false;
};

struct ToyRun {
  std::vector<ToyRecord> records;
  double seconds = 0.0;
  std::string error;
};

ToyRun run_toy_set() {
  ToyRun run;
  const auto start = std::chrono::steady_clock::now();
  try {
    for (std::size_t i = 0; i < kToyInstances; ++i) {
      ToyParams tp;
      tp.rng_seed = 1000 + i;
      ToyRecord r;
      r.scenario = generate_toy(tp);
      const Scenario& s = r.scenario;
      r.relaxed = relaxed_bound(s);
      const StrategyResult ex = exact_optimum(s);
      r.exact = ex.energy.total();
      r.spare_exact = spare_ccat(s, ex.configuration);
      const LoopState st = run_loop(s, tp.rng_seed, kLoopRounds);
      r.loop = energy_of(s, st.current).total();
      r.spare_loop = spare_ccat(s, st.current);
      r.all = all_active(s).energy.total();
      try {
        const StrategyResult co = consolidation(s);
        r.consolidation = co.energy.total();
        r.spare_consolidation = spare_ccat(s, co.configuration);
        r.consolidation_ok = true;
      } catch (const InstanceInfeasible&) {
      }
      run.records.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------

Outcome oracle_sandwich(const ToyRun& run) {
  if (!run.error.empty()) return {false, "error: " + run.error};
  std::size_t bad = 0;
  std::ostringstream first;
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    const ToyRecord& r = run.records[i];
    const bool ok = leq(r.relaxed, r.exact) && leq(r.exact, r.loop) && leq(r.loop, r.all);
    if (!ok && bad++ == 0)
      first << " first violation #" << i << ": relaxed " << r.relaxed << " exact "
            << r.exact << " loop " << r.loop << " all " << r.all;
  }
  std::ostringstream d;
  d << run.records.size() << " instances, " << bad << " violations, "
    << run.seconds << " s" << first.str();
  return {bad == 0 && run.records.size() >= 50 && run.seconds < 300.0, d.str()};
}

Outcome near_optimality(const ToyRun& run) {
  if (!run.error.empty()) return {false, "error: " + run.error};
  std::vector<double> ratio, loop, cons;
  for (const ToyRecord& r : run.records) {
    ratio.push_back(r.exact > 0 ? r.loop / r.exact : (r.loop > 0 ? INFINITY : 1.0));
    if (!r.consolidation_ok) continue;
    loop.push_back(r.loop);
    cons.push_back(r.consolidation);
  }
  const double mr = median(ratio), ml = median(loop), mc = median(cons);
  std::ostringstream d;
  d << "median loop/exact " << mr << " over " << ratio.size()
    << "; on the " << cons.size() << " instances consolidation solves: median loop "
    << ml << " W, median consolidation " << mc << " W";
  return {mr <= 1.10 && leq(ml, mc) && !cons.empty(), d.str()};
}

Outcome spare_ccat_order(const ToyRun& run) {
  if (!run.error.empty()) return {false, "error: " + run.error};
  std::vector<double> ex, lo, co;
  for (const ToyRecord& r : run.records) {
    if (!r.consolidation_ok) continue;
    ex.push_back(r.spare_exact);
    lo.push_back(r.spare_loop);
    co.push_back(r.spare_consolidation);
  }
  const double me = mean(ex), ml = mean(lo), mc = mean(co);
  std::ostringstream d;
  d << ex.size() << " instances, mean spare compute: consolidation " << mc
    << ", loop " << ml << ", exact " << me;
  return {leq(ml, mc) && leq(me, ml) && !ex.empty(), d.str()};
}

Outcome feasibility_safety() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t runs = 0, checks = 0, bad = 0, skipped_infeasible = 0;
  std::string first;
  std::vector<Scenario> pool;
  for (std::size_t i = 0; i < 40; ++i) {
    ToyParams tp;
    tp.rng_seed = 5000 + i;
    pool.push_back(generate_toy(tp));
  }
  pool.push_back(fixtures::vepc_two_node());
  pool.push_back(fixtures::vepc_with_spare_switch());

  std::mt19937_64 rng(20261019);
  std::uniform_real_distribution<double> factor(0.4, 2.5);
  auto audit = [&](const Scenario& s, const NetworkConfiguration& cfg,
                   const std::string& where) {
    ++checks;
    const auto v = validate_configuration(s, cfg, 1e-6);
    const auto w = check::violations(s, cfg, 1e-6);
    if (!v.empty() || !w.empty()) {
      if (bad++ == 0) first = where;
    }
  };
  for (std::size_t k = 0; k < 1000; ++k) {
    const Scenario& s0 = pool[k % pool.size()];
    const std::uint64_t seed = 77 + k;
    const double f = factor(rng);
    LoopState st = start_loop(s0, seed);
    ++runs;
    audit(st.scenario, st.current, "initial");
    for (std::size_t round = 1; round <= 3; ++round) {
      st.round = round;
      if (round == 2) {
        // Mid-run demand change; an infeasible rescale is replaced by a
        // feasible one since no configuration can serve it.
        Scenario scaled = scale_demand(s0, f);
        try {
          initial_solution(scaled);
        } catch (const InstanceInfeasible&) {
          ++skipped_infeasible;
          scaled = scale_demand(s0, 1.0 / f);
        }
        st.scenario = std::move(scaled);
      }
      st = fix_problems(std::move(st));
      audit(st.scenario, st.current, "fix_problems");
      st = save_energy(std::move(st));
      audit(st.scenario, st.current, "save_energy");
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << runs << " runs, " << checks << " phase boundaries, " << bad
    << " violations, " << skipped_infeasible << " rescales inverted, " << secs << " s";
  if (bad) d << ", first at " << first;
  return {bad == 0 && runs == 1000, d.str()};
}

Outcome flow_conservation() {
  LogicalGraph lg = fixtures::vepc_logical(0.2);
  lg.ingress_demand[{0, fixtures::kEnb}] = 1.0;
  const LogicalFlows f = derive_logical_flows(lg);
  using fixtures::kEnb, fixtures::kGw, fixtures::kMme, fixtures::kHss;
  const LogicalFlows expected{{{0, kEnb, kGw}, 1.0},
                              {{0, kEnb, kMme}, 0.3},
                              {{0, kGw, kMme}, 0.2},
                              {{0, kMme, kHss}, 0.5}};
  LogicalFlows nonzero;
  for (const auto& [k, v] : f)
    if (v != 0.0) nonzero[k] = v;
  std::ostringstream d;
  d << nonzero.size() << " nonzero logical flows";
  return {nonzero == expected, d.str()};
}

Outcome energy_arithmetic() {
  // One active node idling, 1 Gbit/s switched out of it, 1 Gbit/s processed.
  const Scenario s = fixtures::vepc_two_node();
  NetworkConfiguration cfg = NetworkConfiguration::all_off(s);
  cfg.y[0] = 1;
  cfg.x[1] = 1;
  cfg.set_placed(0, fixtures::kEnb, s.num_vnfs(), true);
  cfg.tau[{1, 0, fixtures::kEnb, fixtures::kGw}] = 1e9;
  cfg.processed[{0, 0, fixtures::kEnb, fixtures::kEnb}] = 1e9;
  const EnergyBreakdown e = energy_of(s, cfg);
  std::ostringstream d;
  d.precision(17);
  d << "total " << e.total() << " W (idle " << e.idle << ", switching "
    << e.switching << ", processing " << e.processing << ")";
  return {std::abs(e.total() - 116.25) <= 1e-9, d.str()};
}

Outcome iis_contract() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t cases = 0, family_ok = 0, removal_ok = 0;
  auto check_case = [&](const Scenario& s, int family) {
    ++cases;
    const LpProblem p = build_problem(s, fixed_modes(s, NetworkConfiguration::all_on(s)));
    const IisReport iis = compute_iis(p);
    if (iis.contains(family)) ++family_ok;
    bool minimal = !rows_feasible(p, iis.rows);
    for (std::size_t drop = 0; minimal && drop < iis.rows.size(); ++drop) {
      std::vector<std::size_t> rest = iis.rows;
      rest.erase(rest.begin() + drop);
      minimal = rows_feasible(p, rest);
    }
    if (minimal) ++removal_ok;
  };
  for (int i = 0; i < 50; ++i) {
    // Capacity-starved: an attachment link or the core link is too thin.
    const double demand = 1e8 * (1.0 + 9.0 * u(rng));
    Scenario s = i % 2 ? fixtures::single_vnf(demand, 10.0 * demand, demand * (0.2 + 0.7 * u(rng)))
                       : fixtures::vepc_two_node(demand);
    if (i % 2 == 0) {
      // n1 only forwards, so all processing crosses the thin core link.
      s.physical.nodes[0].compute_capacity = 0.0;
      s.physical.nodes[0].switch_compute_per_bit = 0.0;
      s.physical.nodes[1].compute_capacity = 20.0 * demand;
      s.physical.links[1].capacity = demand * (0.1 + 0.8 * u(rng));
    }
    check_case(s, 4);
  }
  for (int i = 0; i < 50; ++i) {
    // Compute-starved: total compute below the processing load.
    const double demand = 1e8 * (1.0 + 9.0 * u(rng));
    Scenario s = i % 2 ? fixtures::single_vnf(demand, demand * (0.2 + 0.7 * u(rng)), 10.0 * demand)
                       : fixtures::vepc_two_node(demand);
    if (i % 2 == 0) {
      const double k = demand * (0.3 + 0.6 * u(rng));
      for (Node& n : s.physical.nodes) n.compute_capacity = k;
      for (Link& l : s.physical.links) l.capacity = 100.0 * demand;
    }
    check_case(s, 7);
  }
  std::ostringstream d;
  d << cases << " instances, family present in " << family_ok
    << ", irreducible in " << removal_ok;
  return {cases == 100 && family_ok == 100 && removal_ok == 100, d.str()};
}

Outcome determinism() {
  ExperimentConfig config;
  GeneratorParams gp;
  gp.n_endpoints = 2;
  gp.n_nodes = 4;
  config.generator = gp;
  config.seeds = {3, 4};
  config.factors = {0.5, 1.0, 2.0};
  config.rounds = 2;
  auto render = [&]() {
    const std::vector<MetricsRow> rows = run_experiment(config);
    std::vector<std::string> names;
    GeneratorParams p = gp;
    p.rng_seed = config.seeds.front();
    for (const Vnf& v : generate(p).logical.vnfs) names.push_back(v.name);
    std::ostringstream os;
    write_csv(os, rows, names, false);
    return os.str();
  };
  const std::string a = render(), b = render();
  std::ostringstream d;
  d << a.size() << " bytes, " << std::count(a.begin(), a.end(), '\n') << " lines";
  return {a == b && !a.empty(), d.str()};
}

Outcome zero_demand() {
  Scenario s = fixtures::vepc_with_spare_switch();
  s.logical.ingress_demand.clear();
  LoopState st = start_loop(s, 9);
  st = save_energy(std::move(st));
  const double e = energy_of(s, st.current).total();
  std::ostringstream d;
  d << "final energy " << e << " W, " << st.current.active_nodes() << " nodes, "
    << st.current.active_links() << " links, " << st.current.deployed_instances()
    << " placements active";
  return {e == 0.0, d.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  ToyRun toys;
  bool toys_ready = false;
  auto toy_set = [&]() -> const ToyRun& {
    if (!toys_ready) {
      toys = run_toy_set();
      toys_ready = true;
    }
    return toys;
  };
  const std::vector<Criterion> criteria{
      {1, "oracle sandwich on toy instances", [&] { return oracle_sandwich(toy_set()); }},
      {2, "loop near-optimal and below consolidation", [&] { return near_optimality(toy_set()); }},
      {3, "feasibility at every phase boundary", feasibility_safety},
      {4, "logical flow propagation on the vEPC chain", flow_conservation},
      {5, "energy arithmetic fixture", energy_arithmetic},
      {6, "IIS minimality and expected family", iis_contract},
      {7, "spare compute ordering", [&] { return spare_ccat_order(toy_set()); }},
      {8, "byte-identical CSV on rerun", determinism},
      {9, "zero demand saves everything", zero_demand},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.2f s) -- %s\n", o.pass ? "PASS" : "FAIL",
                c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
