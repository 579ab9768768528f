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

#include "optiloop/lp_core.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "optiloop/errors.hpp"

namespace optiloop {

struct LpProblem::Structure {
  lp::LinearProgram base;  // flow columns in units of `scale`
  std::vector<VarRef> vars;
  std::map<VarRef, std::size_t> column_of;
  std::size_t num_binaries = 0;
  std::vector<ConstraintId> ids;
  std::map<int, std::size_t> per_equation;
  double scale = 1.0;

  // Names for LP dumps.
  std::vector<std::string> endpoint_names;
  std::vector<std::string> vnf_names;
  std::vector<std::string> node_names;
  std::vector<std::string> link_names;  // "from_to"
  std::vector<Vertex> link_from;
  std::vector<Vertex> link_to;
};

namespace {

const VarMode kContinuousMode = VarMode::continuous();

void check_mode(const VarRef& v, const VarMode& m) {
  if (!v.binary())
    throw InvalidMode("flow variables are always continuous");
  if (m.kind == VarMode::Kind::kFixed && m.value != 0.0 && m.value != 1.0)
    throw InvalidMode("binary variables can only be fixed to 0 or 1");
}

std::string vertex_label(const LpProblem::Structure& st, const Vertex& v);

}  // namespace

const std::vector<VarRef>& LpProblem::variables() const {
  return structure_->vars;
}

bool LpProblem::declared(const VarRef& v) const {
  return structure_->column_of.count(v) != 0;
}

std::size_t LpProblem::column(const VarRef& v) const {
  auto it = structure_->column_of.find(v);
  if (it == structure_->column_of.end())
    throw InvalidMode("variable not declared in this problem");
  return it->second;
}

const VarMode& LpProblem::mode(const VarRef& v) const {
  const std::size_t col = column(v);
  return col < structure_->num_binaries ? modes_[col] : kContinuousMode;
}

std::size_t LpProblem::num_constraints() const {
  return structure_->ids.size();
}

const ConstraintId& LpProblem::constraint_id(std::size_t row) const {
  return structure_->ids.at(row);
}

std::size_t LpProblem::count(int equation) const {
  auto it = structure_->per_equation.find(equation);
  return it == structure_->per_equation.end() ? 0 : it->second;
}

double LpProblem::flow_scale() const { return structure_->scale; }

lp::LinearProgram LpProblem::program() const {
  lp::LinearProgram out = structure_->base;
  for (std::size_t j = 0; j < structure_->num_binaries; ++j) {
    const VarMode& m = modes_[j];
    switch (m.kind) {
      case VarMode::Kind::kFixed:
        out.lower[j] = out.upper[j] = m.value;
        break;
      case VarMode::Kind::kRelaxed:
        out.lower[j] = 0.0;
        out.upper[j] = 1.0;
        break;
      case VarMode::Kind::kContinuous:
        out.lower[j] = 0.0;
        out.upper[j] = lp::kInfinity;
        break;
    }
  }
  return out;
}

void LpProblem::set_mode(const VarRef& v, const VarMode& mode) {
  check_mode(v, mode);
  modes_[column(v)] = mode;
}

double LpProblem::value(const LpSolution& sol, const VarRef& v) const {
  auto it = structure_->column_of.find(v);
  if (it == structure_->column_of.end() || sol.values.empty()) return 0.0;
  return sol.values[it->second];
}

namespace {

std::string vertex_label(const LpProblem::Structure& st, const Vertex& v) {
  return v.is_endpoint() ? st.endpoint_names[v.index]
                         : st.node_names[v.index];
}

std::string flow_suffix(const LpProblem::Structure& st, Index e, Index v1,
                        Index v2) {
  return st.endpoint_names[e] + "_" + st.vnf_names[v1] + "_" +
         st.vnf_names[v2];
}

}  // namespace

std::string LpProblem::column_name(std::size_t col) const {
  const Structure& st = *structure_;
  const VarRef& v = st.vars.at(col);
  const auto& i = v.idx;
  switch (v.kind) {
    case VarKind::kLink:
      return "x_" + st.link_names[i[0]];
    case VarKind::kNode:
      return "y_" + st.node_names[i[0]];
    case VarKind::kPlacement:
      return "delta_" + st.node_names[i[0]] + "_" + st.vnf_names[i[1]];
    case VarKind::kTau:
      return "tau_" + st.link_names[i[0]] + "_" +
             flow_suffix(st, i[1], i[2], i[3]);
    case VarKind::kTransit:
      return "t_" + st.node_names[i[0]] + "_" +
             flow_suffix(st, i[1], i[2], i[3]);
    case VarKind::kProcessed:
      return "p_" + st.node_names[i[0]] + "_" +
             flow_suffix(st, i[1], i[2], i[3]);
  }
  return "v" + std::to_string(col);
}

std::string LpProblem::row_name(std::size_t row) const {
  const Structure& st = *structure_;
  const ConstraintId& id = st.ids.at(row);
  const auto& i = id.idx;
  const std::string eq = "eq" + std::to_string(id.equation) + "_";
  switch (id.equation) {
    case 1:
    case 2:
    case 6:
      return eq + "node_" + st.node_names[i[0]] + "_" +
             flow_suffix(st, i[1], i[2], i[3]);
    case 3:
      return eq + "link_" + st.link_names[i[0]] + "_" +
             vertex_label(st, id.side == 0 ? st.link_from[i[0]]
                                           : st.link_to[i[0]]);
    case 4:
      return eq + "link_" + st.link_names[i[0]];
    case 5:
      return eq + "node_" + st.node_names[i[0]] + "_" + st.vnf_names[i[1]];
    case 7:
      return eq + "node_" + st.node_names[i[0]];
    case 8:
      return eq + "endpoint_" + st.endpoint_names[i[0]];
    case 9:
      return eq + "endpoint_" + st.endpoint_names[i[0]] + "_" +
             st.vnf_names[i[1]];
    default:
      return eq + std::to_string(row);
  }
}

LpProblem build_problem(const Scenario& s, const ModeMap& modes,
                        const BuildOptions& opts) {
  const LogicalGraph& lg = s.logical;
  const std::size_t nv = s.num_vnfs();
  const std::size_t nc = s.num_nodes();
  const std::size_t ne = s.num_endpoints();
  const Adjacency adj = adjacency(s);
  const LogicalFlows flows = derive_logical_flows(lg);
  const auto comms = commodities(s, flows, opts.full_index);

  auto st = std::make_shared<LpProblem::Structure>();
  const double S = flow_scale(s);
  st->scale = S;
  for (const auto& n : lg.endpoints) st->endpoint_names.push_back(n);
  for (const auto& v : lg.vnfs) st->vnf_names.push_back(v.name);
  for (const auto& n : s.physical.nodes) st->node_names.push_back(n.name);
  for (const Link& l : s.physical.links) {
    st->link_from.push_back(l.from);
    st->link_to.push_back(l.to);
  }
  for (Index l = 0; l < s.num_links(); ++l)
    st->link_names.push_back(vertex_label(*st, st->link_from[l]) + "_" +
                             vertex_label(*st, st->link_to[l]));

  lp::LinearProgram& prog = st->base;
  auto add_var = [&](const VarRef& v, double lo, double up, double cost) {
    const std::size_t col = prog.add_column(lo, up, cost);
    st->vars.push_back(v);
    st->column_of.emplace(v, col);
    return col;
  };

  const EnergyModel& en = s.energy;
  for (Index l = 0; l < s.num_links(); ++l) add_var(VarRef::link(l), 0, 1, 0);
  for (Index c = 0; c < nc; ++c)
    add_var(VarRef::node(c), 0, 1, en.idle_power);
  for (Index c = 0; c < nc; ++c)
    for (Index v = 0; v < nv; ++v)
      add_var(VarRef::placement(c, v), 0, 1, en.placement_power);
  st->num_binaries = prog.num_columns();

  // Flow columns.
  const double link_cost = en.link_energy_per_bit * S;
  const double switch_cost = en.switch_energy_per_bit * S;
  for (Index l = 0; l < s.num_links(); ++l) {
    const Link& link = s.physical.links[l];
    if (link.to.is_endpoint()) continue;
    const double cost =
        link_cost + (link.from.is_node() ? switch_cost : 0.0);
    for (Index e = 0; e < ne; ++e) {
      if (link.from.is_endpoint() && link.from.index != e) continue;
      for (const Commodity& k : comms[e]) {
        if (link.from.is_endpoint() && !k.first_hop()) continue;
        add_var(VarRef::tau(l, e, k.prev, k.next), 0, lp::kInfinity, cost);
      }
    }
  }
  for (Index c = 0; c < nc; ++c) {
    const bool computes =
        opts.full_index || s.physical.nodes[c].compute_capacity > 0.0;
    for (Index e = 0; e < ne; ++e) {
      for (const Commodity& k : comms[e]) {
        add_var(VarRef::transit(c, e, k.prev, k.next), 0, lp::kInfinity, 0);
        if (computes)
          add_var(VarRef::processed(c, e, k.prev, k.next), 0, lp::kInfinity,
                  en.proc_power_per_unit * lg.vnfs[k.next].compute_per_bit *
                      S);
      }
    }
  }

  auto col = [&](const VarRef& v) -> long {
    auto it = st->column_of.find(v);
    return it == st->column_of.end() ? -1 : static_cast<long>(it->second);
  };
  auto add_row = [&](ConstraintId id, std::vector<lp::Term> terms,
                     lp::Sense sense, double rhs) {
    prog.add_row(std::move(terms), sense, rhs);
    st->ids.push_back(id);
    ++st->per_equation[id.equation];
  };
  auto push = [&](std::vector<lp::Term>& terms, const VarRef& v, double coef) {
    const long j = col(v);
    if (j >= 0) terms.push_back({static_cast<std::size_t>(j), coef});
  };

  // Families 1, 2 and 6 per node and commodity.
  for (Index c = 0; c < nc; ++c) {
    for (Index e = 0; e < ne; ++e) {
      for (const Commodity& k : comms[e]) {
        std::vector<lp::Term> in;
        for (Index l : adj.node_in[c]) push(in, VarRef::tau(l, e, k.prev, k.next), 1.0);
        push(in, VarRef::transit(c, e, k.prev, k.next), -1.0);
        push(in, VarRef::processed(c, e, k.prev, k.next), -1.0);
        add_row({1, {c, e, k.prev, k.next}}, std::move(in), lp::Sense::kEqual,
                0.0);

        std::vector<lp::Term> out;
        for (Index l : adj.node_out[c])
          push(out, VarRef::tau(l, e, k.prev, k.next), 1.0);
        push(out, VarRef::transit(c, e, k.prev, k.next), -1.0);
        for (const Commodity& src : comms[e]) {
          if (src.next != k.prev) continue;
          const double ratio = chi_effective(lg, e, src, k.next);
          if (ratio != 0.0)
            push(out, VarRef::processed(c, e, src.prev, src.next), -ratio);
        }
        add_row({2, {c, e, k.prev, k.next}}, std::move(out),
                lp::Sense::kEqual, 0.0);

        const long pj = col(VarRef::processed(c, e, k.prev, k.next));
        if (pj >= 0) {
          std::vector<lp::Term> cap{
              {static_cast<std::size_t>(pj), 1.0},
              {st->column_of.at(VarRef::placement(c, k.next)),
               -s.physical.nodes[c].compute_capacity / S}};
          add_row({6, {c, e, k.prev, k.next}}, std::move(cap),
                  lp::Sense::kLessEqual, 0.0);
        }
      }
    }
  }

  // Families 3 and 4 per link.
  for (Index l = 0; l < s.num_links(); ++l) {
    const Link& link = s.physical.links[l];
    const std::size_t xj = st->column_of.at(VarRef::link(l));
    int side = 0;
    for (const Vertex& end : {link.from, link.to}) {
      if (end.is_node())
        add_row({3, {l, 0, 0, 0}, side},
                {{xj, 1.0}, {st->column_of.at(VarRef::node(end.index)), -1.0}},
                lp::Sense::kLessEqual, 0.0);
      ++side;
    }
    std::vector<lp::Term> terms;
    for (Index e = 0; e < ne; ++e)
      for (const Commodity& k : comms[e])
        push(terms, VarRef::tau(l, e, k.prev, k.next), 1.0);
    terms.push_back({xj, -link.capacity / S});
    add_row({4, {l, 0, 0, 0}}, std::move(terms), lp::Sense::kLessEqual, 0.0);
  }

  // Families 5 and 7 per node.
  for (Index c = 0; c < nc; ++c) {
    const std::size_t yj = st->column_of.at(VarRef::node(c));
    for (Index v = 0; v < nv; ++v)
      add_row({5, {c, v, 0, 0}},
              {{st->column_of.at(VarRef::placement(c, v)), 1.0}, {yj, -1.0}},
              lp::Sense::kLessEqual, 0.0);
    const Node& node = s.physical.nodes[c];
    std::vector<lp::Term> terms;
    for (Index e = 0; e < ne; ++e) {
      for (const Commodity& k : comms[e]) {
        push(terms, VarRef::processed(c, e, k.prev, k.next),
             lg.vnfs[k.next].compute_per_bit);
        if (node.switch_compute_per_bit != 0.0)
          for (Index l : adj.node_out[c])
            push(terms, VarRef::tau(l, e, k.prev, k.next),
                 node.switch_compute_per_bit);
      }
    }
    add_row({7, {c, 0, 0, 0}}, std::move(terms), lp::Sense::kLessEqual,
            node.compute_capacity / S);
  }

  // Family 8 per endpoint with a finite bound.
  if (s.delays_enabled) {
    for (Index e = 0; e < ne; ++e) {
      if (!s.max_delay[e]) continue;
      double total = 0.0;
      for (Index v = 0; v < nv; ++v) total += lg.demand(e, v);
      if (total <= 0.0) continue;
      std::vector<lp::Term> terms;
      for (std::size_t j = st->num_binaries; j < prog.num_columns(); ++j) {
        const VarRef& v = st->vars[j];
        if (v.idx[1] != e) continue;
        if (v.kind == VarKind::kTau) {
          const double d = s.physical.links[v.idx[0]].delay;
          if (d != 0.0) terms.push_back({j, d});
        } else if (v.kind == VarKind::kProcessed) {
          const double d = lg.vnfs[v.idx[3]].delay;
          if (d != 0.0) terms.push_back({j, d});
        }
      }
      add_row({8, {e, 0, 0, 0}}, std::move(terms), lp::Sense::kLessEqual,
              *s.max_delay[e] * total / S);
    }
  }

  // Family 9 per positive ingress demand.
  for (const auto& [key, rate] : lg.ingress_demand) {
    if (rate <= 0.0) continue;
    const auto [e, v] = key;
    std::vector<lp::Term> terms;
    for (Index l : adj.endpoint_out[e]) push(terms, VarRef::tau(l, e, v, v), 1.0);
    add_row({9, {e, v, 0, 0}}, std::move(terms), lp::Sense::kEqual, rate / S);
  }

  LpProblem p;
  p.structure_ = st;
  p.modes_.assign(st->num_binaries, VarMode::relaxed());
  for (const auto& [v, m] : modes) p.set_mode(v, m);
  return p;
}

LpProblem fix(const LpProblem& p, const VarRef& v, double value) {
  LpProblem out = p;
  out.set_mode(v, VarMode::fixed(value));
  return out;
}

LpProblem relax(const LpProblem& p, const VarRef& v) {
  LpProblem out = p;
  out.set_mode(v, VarMode::relaxed());
  return out;
}

LpSolution solve(const LpProblem& p) {
  const lp::SimplexResult r = lp::solve(p.program());
  LpSolution out;
  out.status = r.status;
  if (r.status != lp::Status::kOptimal) return out;
  out.objective_value = r.objective;
  out.values = r.values;
  const double S = p.flow_scale();
  for (std::size_t j = 0; j < out.values.size(); ++j)
    if (!p.variables()[j].binary()) out.values[j] *= S;
  out.row_duals = r.row_duals;
  return out;
}

namespace {

// The rows `keep` of `full`, with columns that appear in none of them
// dropped. Dropped columns only carry bounds, which are always satisfiable.
lp::LinearProgram restrict_rows(const lp::LinearProgram& full,
                                const std::vector<std::size_t>& keep) {
  lp::LinearProgram out;
  std::unordered_map<std::size_t, std::size_t> remap;
  for (std::size_t i : keep) {
    const lp::Row& row = full.rows[i];
    std::vector<lp::Term> terms;
    terms.reserve(row.terms.size());
    for (const lp::Term& t : row.terms) {
      auto [it, inserted] = remap.emplace(t.column, out.num_columns());
      if (inserted)
        out.add_column(full.lower[t.column], full.upper[t.column], 0.0);
      terms.push_back({it->second, t.coef});
    }
    out.add_row(std::move(terms), row.sense, row.rhs);
  }
  return out;
}

bool feasible_subset(const lp::LinearProgram& full,
                     const std::vector<std::size_t>& keep) {
  lp::SimplexOptions opts;
  opts.feasibility_only = true;
  return lp::is_feasible(restrict_rows(full, keep), opts);
}

}  // namespace

bool rows_feasible(const LpProblem& p, const std::vector<std::size_t>& rows) {
  return feasible_subset(p.program(), rows);
}

std::vector<std::size_t> iis_rows(const lp::LinearProgram& prog,
                                  const std::vector<std::size_t>& group_of,
                                  const std::vector<int>& keep_priority) {
  lp::SimplexOptions opts;
  opts.feasibility_only = true;
  const lp::SimplexResult r = lp::solve(prog, opts);
  if (r.status != lp::Status::kInfeasible)
    throw NotInfeasible("problem is feasible; no IIS exists");
  auto priority = [&](std::size_t row) {
    return keep_priority.empty() ? 0 : keep_priority.at(row);
  };

  // Start from the Farkas support plus every prioritized row.
  std::vector<std::size_t> current;
  double peak = 0.0;
  for (double y : r.farkas) peak = std::max(peak, std::abs(y));
  for (std::size_t i = 0; i < r.farkas.size(); ++i)
    if (std::abs(r.farkas[i]) > 1e-9 * peak || priority(i) > 0)
      current.push_back(i);
  if (current.empty() || feasible_subset(prog, current)) {
    current.resize(prog.num_rows());
    for (std::size_t i = 0; i < current.size(); ++i) current[i] = i;
  }

  // Deletion filter, first over groups, then over single rows, trying
  // low-priority rows first. Each removal that keeps the system infeasible
  // is permanent.
  if (!group_of.empty()) {
    std::map<std::pair<int, std::size_t>, std::vector<std::size_t>> groups;
    std::map<std::size_t, int> group_priority;
    for (std::size_t i : current)
      group_priority[group_of.at(i)] =
          std::max(group_priority[group_of.at(i)], priority(i));
    for (std::size_t i : current)
      groups[{group_priority[group_of.at(i)], group_of.at(i)}].push_back(i);
    if (groups.size() > 1) {
      for (const auto& [key, members] : groups) {
        std::vector<std::size_t> trial;
        std::set_difference(current.begin(), current.end(), members.begin(),
                            members.end(), std::back_inserter(trial));
        if (!trial.empty() && !feasible_subset(prog, trial))
          current = std::move(trial);
      }
    }
  }
  std::vector<std::size_t> order = current;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return priority(a) < priority(b);
                   });
  for (std::size_t row : order) {
    std::vector<std::size_t> trial;
    for (std::size_t i : current)
      if (i != row) trial.push_back(i);
    if (!trial.empty() && !feasible_subset(prog, trial))
      current = std::move(trial);
  }
  return current;
}

IisReport compute_iis(const LpProblem& p) {
  // Group rows by (equation, primary index).
  std::map<std::pair<int, Index>, std::size_t> group_ids;
  std::vector<std::size_t> group_of(p.num_constraints());
  for (std::size_t i = 0; i < group_of.size(); ++i) {
    const ConstraintId& id = p.constraint_id(i);
    group_of[i] =
        group_ids.emplace(std::make_pair(id.equation, id.idx[0]),
                          group_ids.size())
            .first->second;
  }
  // Capacity and compute rows are what the repair loop reads, so when
  // several subsystems exist the filter keeps those.
  std::vector<int> keep_priority(p.num_constraints(), 0);
  for (std::size_t i = 0; i < keep_priority.size(); ++i) {
    const int eq = p.constraint_id(i).equation;
    if (eq == 4 || eq == 7) keep_priority[i] = 1;
  }
  IisReport out;
  out.rows = iis_rows(p.program(), group_of, keep_priority);
  for (std::size_t i : out.rows) {
    out.members.push_back(p.constraint_id(i));
    out.families.insert(p.constraint_id(i).equation);
  }
  return out;
}

void write_lp(std::ostream& os, const LpProblem& p) {
  auto unique_names = [](std::vector<std::string> names) {
    std::map<std::string, int> seen;
    for (auto& n : names) {
      n = lp::sanitize_lp_name(n);
      const int k = seen[n]++;
      if (k > 0) n += "_" + std::to_string(k);
    }
    return names;
  };
  std::vector<std::string> cols, rows;
  for (std::size_t j = 0; j < p.variables().size(); ++j)
    cols.push_back(p.column_name(j));
  for (std::size_t i = 0; i < p.num_constraints(); ++i)
    rows.push_back(p.row_name(i));
  lp::write_lp_format(os, p.program(), unique_names(cols), unique_names(rows));
}

ModeMap fixed_modes(const Scenario& s, const NetworkConfiguration& cfg) {
  ModeMap out;
  for (Index l = 0; l < s.num_links(); ++l)
    out[VarRef::link(l)] = VarMode::fixed(cfg.x[l]);
  for (Index c = 0; c < s.num_nodes(); ++c) {
    out[VarRef::node(c)] = VarMode::fixed(cfg.y[c]);
    for (Index v = 0; v < s.num_vnfs(); ++v)
      out[VarRef::placement(c, v)] =
          VarMode::fixed(cfg.placed(c, v, s.num_vnfs()) ? 1.0 : 0.0);
  }
  return out;
}

void assign_flows(NetworkConfiguration& cfg, const LpProblem& p,
                  const LpSolution& sol) {
  cfg.tau.clear();
  cfg.transit.clear();
  cfg.processed.clear();
  if (sol.values.empty()) return;
  const double floor = 1e-11 * p.flow_scale();
  const auto& vars = p.variables();
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const VarRef& v = vars[j];
    const double val = sol.values[j];
    if (v.binary() || val <= floor) continue;
    const FlowKey key{v.idx[0], v.idx[1], v.idx[2], v.idx[3]};
    switch (v.kind) {
      case VarKind::kTau: cfg.tau[key] = val; break;
      case VarKind::kTransit: cfg.transit[key] = val; break;
      case VarKind::kProcessed: cfg.processed[key] = val; break;
      default: break;
    }
  }
}

}  // namespace optiloop
