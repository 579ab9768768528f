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

#include "optiloop/metrics.hpp"

#include <chrono>
#include <ostream>

#include "optiloop/errors.hpp"
#include "optiloop/optiloop.hpp"
#include "optiloop/simplex.hpp"

namespace optiloop {

MetricsRow compute_metrics(const Scenario& s, const StrategyResult& r,
                           const StrategyResult* baseline) {
  if (!baseline) throw BaselineMissing("no all-active baseline for savings");
  const NetworkConfiguration& cfg = r.configuration;
  MetricsRow m;
  m.strategy = r.name;
  m.energy = r.energy;
  const double base = baseline->energy.total();
  m.savings_vs_all_active = base > 0.0 ? 1.0 - r.energy.total() / base : 0.0;

  for (Index c = 0; c < s.num_nodes(); ++c)
    if (cfg.y[c])
      m.spare_ccat += s.physical.nodes[c].compute_capacity - compute_load(s, cfg, c);

  double injected = 0.0, carried = 0.0;
  for (const auto& [key, rate] : s.logical.ingress_demand) injected += rate;
  for (const auto& [key, rate] : cfg.tau) carried += rate;
  m.hops_defined = injected > 0.0;
  m.mean_hops = m.hops_defined ? carried / injected : 0.0;

  const std::size_t nv = s.num_vnfs();
  m.vnf_instances.assign(nv, 0);
  for (Index c = 0; c < s.num_nodes(); ++c)
    for (Index v = 0; v < nv; ++v)
      if (cfg.placed(c, v, nv)) ++m.vnf_instances[v];
  m.active_nodes = cfg.active_nodes();
  m.active_links = cfg.active_links();
  m.lp_solves = r.lp_solves;
  m.exact = r.exact;
  return m;
}

namespace {

StrategyResult run_strategy(const std::string& name, const Scenario& s,
                            const ExperimentConfig& config, std::uint64_t seed) {
  if (name == "all_active") return all_active(s);
  if (name == "consolidation") return consolidation(s);
  if (name == "exact") return exact_optimum(s, config.oracle_budget);
  if (name == "optiloop") {
    const LoopState st = run_loop(s, seed, config.rounds, {}, config.telemetry);
    StrategyResult r;
    r.name = "optiloop";
    r.configuration = st.current;
    r.energy = energy_of(s, st.current);
    r.lp_solves = st.lp_solves;
    return r;
  }
  throw Error("unknown strategy \"" + name + "\"");
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config) {
  if (!config.scenario && !config.generator)
    throw Error("experiment needs a scenario or generator parameters");
  for (const std::string& name : config.strategies) {
    bool known = false;
    for (const std::string& k : known_strategies()) known = known || k == name;
    if (!known) throw Error("unknown strategy \"" + name + "\"");
  }
  std::vector<MetricsRow> rows;
  for (std::uint64_t seed : config.seeds) {
    Scenario base;
    if (config.scenario) {
      base = *config.scenario;
    } else {
      GeneratorParams p = *config.generator;
      p.rng_seed = seed;
      base = generate(p);
    }
    for (double factor : config.factors) {
      const Scenario s = scale_demand(base, factor);
      const StrategyResult baseline = all_active(s);
      for (const std::string& name : config.strategies) {
        const auto start = std::chrono::steady_clock::now();
        const StrategyResult r =
            name == "all_active" ? baseline : run_strategy(name, s, config, seed);
        const auto stop = std::chrono::steady_clock::now();
        MetricsRow m = compute_metrics(s, r, &baseline);
        m.seed = seed;
        m.demand_factor = factor;
        m.wall_time = std::chrono::duration<double>(stop - start).count();
        rows.push_back(std::move(m));
      }
    }
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<MetricsRow>& rows,
               const std::vector<std::string>& vnf_names, bool timing) {
  using lp::format_double;
  os << "seed,strategy,demand_factor,total_energy,E_idle,E_0,E_proc,E_sw,"
        "E_link,savings_vs_all_active,spare_ccat,mean_hops,hops_defined";
  for (const std::string& v : vnf_names) os << ',' << csv_field("instances_" + v);
  os << ",active_nodes,active_links,lp_solves,exact";
  if (timing) os << ",wall_time";
  os << "\r\n";
  for (const MetricsRow& m : rows) {
    os << m.seed << ',' << csv_field(m.strategy) << ','
       << format_double(m.demand_factor) << ','
       << format_double(m.energy.total()) << ','
       << format_double(m.energy.idle) << ','
       << format_double(m.energy.placement) << ','
       << format_double(m.energy.processing) << ','
       << format_double(m.energy.switching) << ','
       << format_double(m.energy.link) << ','
       << format_double(m.savings_vs_all_active) << ','
       << format_double(m.spare_ccat) << ',' << format_double(m.mean_hops)
       << ',' << (m.hops_defined ? 1 : 0);
    for (std::size_t v = 0; v < vnf_names.size(); ++v)
      os << ',' << (v < m.vnf_instances.size() ? m.vnf_instances[v] : 0);
    os << ',' << m.active_nodes << ',' << m.active_links << ','
       << m.lp_solves << ',' << (m.exact ? 1 : 0);
    if (timing) os << ',' << format_double(m.wall_time);
    os << "\r\n";
  }
}

}  // namespace optiloop
