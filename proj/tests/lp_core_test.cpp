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

#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "optiloop/errors.hpp"
#include "optiloop/lp_core.hpp"

using namespace optiloop;

namespace {

LpProblem all_fixed(const Scenario& s, double value) {
  NetworkConfiguration cfg = value > 0.5 ? NetworkConfiguration::all_on(s)
                                         : NetworkConfiguration::all_off(s);
  return build_problem(s, fixed_modes(s, cfg));
}

void check_iis_minimal(const LpProblem& p, const IisReport& iis) {
  CHECK_FALSE(rows_feasible(p, iis.rows));
  for (std::size_t k = 0; k < iis.rows.size(); ++k) {
    std::vector<std::size_t> rest = iis.rows;
    rest.erase(rest.begin() + static_cast<long>(k));
    CHECK(rows_feasible(p, rest));
  }
}

}  // namespace

TEST_CASE("constraint counts match closed-form tallies on the full index") {
  const Scenario s = fixtures::vepc_two_node();
  const LpProblem p = build_problem(
      s, fixed_modes(s, NetworkConfiguration::all_on(s)), {.full_index = true});
  const std::size_t C = 2, E = 1, V = 4;
  CHECK(p.count(1) == C * E * V * V);
  CHECK(p.count(2) == C * E * V * V);
  CHECK(p.count(6) == C * E * V * V);
  CHECK(p.count(3) == 5);  // node ends: RRH->n1 has one, n1<->n2 two each
  CHECK(p.count(4) == 3);
  CHECK(p.count(5) == C * V);
  CHECK(p.count(7) == C);
  CHECK(p.count(8) == 0);
  CHECK(p.count(9) == 1);
}

TEST_CASE("all-ones fixture optimum equals the hand-derived routing") {
  const Scenario s = fixtures::vepc_two_node();
  const LpProblem p = all_fixed(s, 1.0);
  const LpSolution sol = solve(p);
  REQUIRE(sol.feasible());
  // Idle 2 x 65 W, 3L processed at 48 nJ/bit, 2L switched at 3.25 nJ/bit.
  const double L = fixtures::kFixtureDemand;
  const double expected = 130.0 + 3 * L * 48e-9 + 2 * L * 3.25e-9;
  CHECK(sol.objective_value == doctest::Approx(expected).epsilon(1e-9));

  NetworkConfiguration cfg = NetworkConfiguration::all_on(s);
  assign_flows(cfg, p, sol);
  CHECK(validate_configuration(s, cfg).empty());
  CHECK(energy_of(s, cfg).total() == doctest::Approx(expected).epsilon(1e-9));

  const LpSolution full = solve(build_problem(
      s, fixed_modes(s, NetworkConfiguration::all_on(s)), {.full_index = true}));
  REQUIRE(full.feasible());
  CHECK(full.objective_value == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("zero demand with everything off is feasible at zero cost") {
  const Scenario s = fixtures::vepc_two_node(0.0);
  const LpSolution sol = solve(all_fixed(s, 0.0));
  REQUIRE(sol.feasible());
  CHECK(sol.objective_value == 0.0);
}

TEST_CASE("compute starvation is infeasible with the compute row in the IIS") {
  const Scenario s = fixtures::single_vnf(2e9, 1e9, 1e10);
  const LpProblem p = all_fixed(s, 1.0);
  CHECK_FALSE(solve(p).feasible());
  const IisReport iis = compute_iis(p);
  CHECK(iis.contains(7));
  check_iis_minimal(p, iis);
}

TEST_CASE("capacity starvation puts the link row in the IIS") {
  const Scenario s = fixtures::single_vnf(2e9, 1e10, 1e9);
  const LpProblem p = all_fixed(s, 1.0);
  const IisReport iis = compute_iis(p);
  CHECK(iis.contains(4));
  check_iis_minimal(p, iis);
  CHECK_THROWS_AS(compute_iis(all_fixed(fixtures::vepc_two_node(), 1.0)),
                  NotInfeasible);
}

TEST_CASE("two contradictory rows form the whole IIS") {
  lp::LinearProgram prog;
  prog.add_column(0.0, lp::kInfinity, 0.0);
  prog.add_row({{0, 1.0}}, lp::Sense::kGreaterEqual, 3.0);
  prog.add_row({{0, 1.0}}, lp::Sense::kLessEqual, 1.0);
  prog.add_row({{0, 1.0}}, lp::Sense::kLessEqual, 10.0);
  CHECK(iis_rows(prog, {}) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("fix and relax") {
  const Scenario s = fixtures::vepc_two_node();
  const LpProblem p = build_problem(s);
  const VarRef x = VarRef::link(1);
  CHECK(p.mode(x) == VarMode::relaxed());
  const LpProblem f = fix(p, x, 1.0);
  CHECK(f.mode(x) == VarMode::fixed(1.0));
  CHECK(p.mode(x) == VarMode::relaxed());
  CHECK(relax(f, x).mode(x) == VarMode::relaxed());
  CHECK_THROWS_AS(fix(p, VarRef::transit(0, 0, 0, 1), 1.0), InvalidMode);
  CHECK_THROWS_AS(fix(p, x, 0.5), InvalidMode);
  CHECK_THROWS_AS(build_problem(s, {{VarRef::tau(1, 0, 0, 1),
                                     VarMode::relaxed()}}),
                  InvalidMode);

  // Forcing a link on pulls up the relaxed y of both its ends.
  const LpSolution sol = solve(f);
  REQUIRE(sol.feasible());
  CHECK(f.value(sol, VarRef::node(0)) >= 1.0 - 1e-9);
  CHECK(f.value(sol, VarRef::node(1)) >= 1.0 - 1e-9);
}

TEST_CASE("fixing a feasible configuration reproduces its feasibility") {
  const Scenario s = fixtures::vepc_two_node();
  NetworkConfiguration cfg = NetworkConfiguration::all_off(s);
  const std::size_t nv = s.num_vnfs();
  cfg.x = {1, 1, 1};
  cfg.y = {1, 1};
  cfg.set_placed(0, fixtures::kEnb, nv, true);
  cfg.set_placed(0, fixtures::kMme, nv, true);
  cfg.set_placed(1, fixtures::kGw, nv, true);
  cfg.set_placed(1, fixtures::kHss, nv, true);
  const LpProblem p = build_problem(s, fixed_modes(s, cfg));
  const LpSolution sol = solve(p);
  REQUIRE(sol.feasible());
  assign_flows(cfg, p, sol);
  CHECK(validate_configuration(s, cfg).empty());
  CHECK(sol.objective_value ==
        doctest::Approx(energy_of(s, cfg).total()).epsilon(1e-9));

  // The relaxed problem is a lower bound.
  const LpSolution relaxed = solve(build_problem(s));
  REQUIRE(relaxed.feasible());
  CHECK(relaxed.objective_value <= sol.objective_value + 1e-9);

  // Taking n2 away leaves no exit for traffic produced at n1.
  NetworkConfiguration lone = cfg;
  lone.y[1] = 0;
  lone.x = {1, 0, 0};
  for (Index v = 0; v < nv; ++v) {
    lone.set_placed(1, v, nv, false);
    lone.set_placed(0, v, nv, true);
  }
  const LpProblem q = build_problem(s, fixed_modes(s, lone));
  CHECK_FALSE(solve(q).feasible());
  check_iis_minimal(q, compute_iis(q));
}

TEST_CASE("identical problems solve identically") {
  const Scenario s = fixtures::vepc_with_spare_switch();
  const LpProblem p = build_problem(s);
  const LpSolution a = solve(p);
  const LpSolution b = solve(p);
  REQUIRE(a.feasible());
  CHECK(a.values == b.values);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("lp dump names rows after their source equation") {
  const Scenario s = fixtures::vepc_two_node();
  std::ostringstream os;
  write_lp(os, all_fixed(s, 1.0));
  const std::string text = os.str();
  CHECK(text.find("eq4_link_n1_n2:") != std::string::npos);
  CHECK(text.find("eq9_endpoint_RRH_eNB:") != std::string::npos);
  CHECK(text.find("eq7_node_n2:") != std::string::npos);
  CHECK(text.find("x_RRH_n1 = 1") != std::string::npos);
  CHECK(text.find("P_S_GW") != std::string::npos);
}
