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


#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "optiloop/baselines.hpp"
#include "optiloop/errors.hpp"
#include "optiloop/lp_core.hpp"
#include "optiloop/metrics.hpp"
#include "optiloop/optiloop.hpp"
#include "optiloop/scenario.hpp"

namespace optiloop::cli {

namespace {

struct Options {
  std::string scenario;
  bool generate = false;
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds;
  std::size_t endpoints = 42;
  std::size_t nodes = 51;
  bool split_directions = false;
  std::vector<double> factors{1.0};
  std::vector<std::string> strategies{known_strategies()};
  std::string strategy = "optiloop";
  std::size_t rounds = 3;
  std::size_t oracle_budget = 0;
  bool timing = false;
  bool relaxed = false;
  std::string out;
};

GeneratorParams generator_params(const Options& o) {
  GeneratorParams p;
  p.n_endpoints = o.endpoints;
  p.n_nodes = o.nodes;
  p.split_directions = o.split_directions;
  p.rng_seed = o.seed;
  return p;
}

Scenario input_scenario(const Options& o) {
  if (!o.scenario.empty()) return load_scenario(o.scenario);
  return generate(generator_params(o));
}

// Writes `text` to the --out file, or to `out` when none is given.
void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error("cannot write " + o.out);
  f << text;
  if (!f) throw Error("cannot write " + o.out);
}

void add_source_options(CLI::App* cmd, Options& o) {
  auto* file = cmd->add_option("--scenario", o.scenario, "Scenario JSON file");
  auto* gen = cmd->add_flag("--generate", o.generate,
                            "Generate a scenario instead of reading one");
  file->excludes(gen);
  gen->excludes(file);
  cmd->add_option("--endpoints", o.endpoints, "Generated endpoints")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--nodes", o.nodes, "Generated B/F nodes")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--split-directions", o.split_directions,
                "Separate downlink and uplink endpoints per site");
}

int cmd_run(const Options& o, std::ostream& out, std::ostream& err,
            LogLevel level) {
  ExperimentConfig config;
  if (o.generate) {
    config.generator = generator_params(o);
  } else {
    config.scenario = load_scenario(o.scenario);
  }
  config.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
  config.factors = o.factors;
  config.strategies = o.strategies;
  config.rounds = o.rounds;
  config.oracle_budget = o.oracle_budget;
  config.timing = o.timing;
  if (level == LogLevel::kDebug) config.telemetry = &err;

  const std::vector<MetricsRow> rows = run_experiment(config);
  const Scenario first = config.scenario
                             ? *config.scenario
                             : generate([&] {
                                 GeneratorParams p = *config.generator;
                                 p.rng_seed = config.seeds.front();
                                 return p;
                               }());
  std::vector<std::string> names;
  for (const Vnf& v : first.logical.vnfs) names.push_back(v.name);
  std::ostringstream csv;
  write_csv(csv, rows, names, o.timing);
  emit(o, out, csv.str());
  if (level != LogLevel::kQuiet)
    err << "optiloop: " << rows.size() << " rows\n";
  return kSuccess;
}

int cmd_generate(const Options& o, std::ostream& out) {
  emit(o, out, scenario_to_json(generate(generator_params(o))));
  return kSuccess;
}

int cmd_solve(const Options& o, std::ostream& out, std::ostream& err,
              LogLevel level) {
  const Scenario s = input_scenario(o);
  StrategyResult r;
  if (o.strategy == "all_active") {
    r = all_active(s);
  } else if (o.strategy == "consolidation") {
    r = consolidation(s);
  } else if (o.strategy == "exact") {
    r = exact_optimum(s, o.oracle_budget);
  } else {
    const LoopState st = run_loop(s, o.seed, o.rounds, {},
                                  level == LogLevel::kDebug ? &err : nullptr);
    r.name = "optiloop";
    r.configuration = st.current;
    r.energy = energy_of(s, st.current);
    r.lp_solves = st.lp_solves;
  }
  emit(o, out, result_to_json(s, r));
  if (level != LogLevel::kQuiet)
    err << "optiloop: " << r.name << " " << r.energy.total() << " W\n";
  return kSuccess;
}

int cmd_lp(const Options& o, std::ostream& out) {
  const Scenario s = input_scenario(o);
  const LpProblem p =
      o.relaxed ? build_problem(s)
                : build_problem(s, fixed_modes(s, NetworkConfiguration::all_on(s)));
  std::ostringstream text;
  write_lp(text, p);
  emit(o, out, text.str());
  return kSuccess;
}

}  // namespace

LogLevel log_level_from_env() {
  const char* v = std::getenv("OPTILOOP_LOG");
  if (!v) return LogLevel::kQuiet;
  const std::string s(v);
  if (s == "debug") return LogLevel::kDebug;
  if (s == "info") return LogLevel::kInfo;
  return LogLevel::kQuiet;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err, LogLevel level) {
  CLI::App app{"Energy-aware VNF placement and routing"};
  app.name("optiloop");
  app.require_subcommand(1);
  Options o;

  auto* run_cmd = app.add_subcommand(
      "run", "Run strategies over a demand sweep and write metrics as CSV");
  add_source_options(run_cmd, o);
  run_cmd->add_option("--seed", o.seed, "Seed for the loop and the generator");
  run_cmd->add_option("--seeds", o.seeds, "Several seeds")->delimiter(',');
  run_cmd->add_option("--factors", o.factors, "Demand factors")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--strategies", o.strategies, "Strategies to run")
      ->delimiter(',')
      ->check(CLI::IsMember(known_strategies()));
  run_cmd->add_option("--rounds", o.rounds, "Control-loop rounds");
  run_cmd->add_option("--oracle-budget", o.oracle_budget,
                      "LP budget of the exact strategy (0: unlimited)");
  run_cmd->add_flag("--timing", o.timing, "Add a wall_time column");
  run_cmd->add_option("--out", o.out, "CSV output file (default: stdout)");

  auto* gen_cmd = app.add_subcommand("generate", "Write a generated scenario");
  gen_cmd->add_option("--seed", o.seed, "Generator seed");
  gen_cmd->add_option("--endpoints", o.endpoints, "Endpoints")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--nodes", o.nodes, "B/F nodes")->check(CLI::PositiveNumber);
  gen_cmd->add_flag("--split-directions", o.split_directions,
                    "Separate downlink and uplink endpoints per site");
  gen_cmd->add_option("--out", o.out, "JSON output file (default: stdout)");

  auto* solve_cmd =
      app.add_subcommand("solve", "Run one strategy and write its result as JSON");
  add_source_options(solve_cmd, o);
  solve_cmd->add_option("--seed", o.seed, "Seed for the loop and the generator");
  solve_cmd->add_option("--strategy", o.strategy, "Strategy")
      ->check(CLI::IsMember(known_strategies()));
  solve_cmd->add_option("--rounds", o.rounds, "Control-loop rounds");
  solve_cmd->add_option("--oracle-budget", o.oracle_budget,
                        "LP budget of the exact strategy (0: unlimited)");
  solve_cmd->add_option("--out", o.out, "JSON output file (default: stdout)");

  auto* lp_cmd = app.add_subcommand(
      "lp", "Write the LP with every binary fixed to 1, or relaxed");
  add_source_options(lp_cmd, o);
  lp_cmd->add_option("--seed", o.seed, "Generator seed");
  lp_cmd->add_flag("--relaxed", o.relaxed, "Relax the binaries to [0, 1]");
  lp_cmd->add_option("--out", o.out, "LP output file (default: stdout)");

  // CLI11 parses in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kFailure;
  }

  try {
    for (CLI::App* cmd : {run_cmd, solve_cmd, lp_cmd})
      if (cmd->parsed() && o.scenario.empty() && !o.generate)
        throw CLI::RequiredError("--scenario or --generate");
    if (run_cmd->parsed()) return cmd_run(o, out, err, level);
    if (gen_cmd->parsed()) return cmd_generate(o, out);
    if (solve_cmd->parsed()) return cmd_solve(o, out, err, level);
    return cmd_lp(o, out);
  } catch (const CLI::Error& e) {
    err << "optiloop: " << e.what() << '\n';
    return kFailure;
  } catch (const ParseError& e) {
    err << "optiloop: parse error: " << e.what() << '\n';
    return kParseError;
  } catch (const ScenarioInvalid& e) {
    err << "optiloop: invalid scenario: " << e.what() << '\n';
    return kParseError;
  } catch (const InstanceInfeasible& e) {
    err << "optiloop: infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const BudgetExceeded& e) {
    err << "optiloop: budget exceeded: " << e.what() << '\n';
    return kBudgetExceeded;
  } catch (const std::exception& e) {
    err << "optiloop: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace optiloop::cli
