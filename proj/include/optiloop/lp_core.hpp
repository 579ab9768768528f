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

// The joint activation / placement / routing model as a linear program.
//
// Every binary decision (link active, node active, VNF deployed) carries a
// mode: fixed to 0 or 1, or relaxed to [0, 1]. Flow variables are always
// continuous and nonnegative. With every binary fixed or relaxed the model
// is an LP, which is all the control loop ever solves.
//
// Flow variables are expressed internally in units of flow_scale() bit/s;
// LpSolution reports them back in bit/s.

#ifndef OPTILOOP_LP_CORE_HPP
#define OPTILOOP_LP_CORE_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "optiloop/model.hpp"
#include "optiloop/simplex.hpp"

namespace optiloop {

enum class VarKind : std::uint8_t {
  kLink,       // x(l)
  kNode,       // y(c)
  kPlacement,  // delta(c, v)
  kTau,        // tau(l, e, v1, v2)
  kTransit,    // t(c, e, v1, v2)
  kProcessed,  // p(c, e, v1, v2)
};

struct VarRef {
  VarKind kind = VarKind::kLink;
  std::array<Index, 4> idx{};

  static VarRef link(Index l) { return {VarKind::kLink, {l, 0, 0, 0}}; }
  static VarRef node(Index c) { return {VarKind::kNode, {c, 0, 0, 0}}; }
  static VarRef placement(Index c, Index v) {
    return {VarKind::kPlacement, {c, v, 0, 0}};
  }
  static VarRef tau(Index l, Index e, Index v1, Index v2) {
    return {VarKind::kTau, {l, e, v1, v2}};
  }
  static VarRef transit(Index c, Index e, Index v1, Index v2) {
    return {VarKind::kTransit, {c, e, v1, v2}};
  }
  static VarRef processed(Index c, Index e, Index v1, Index v2) {
    return {VarKind::kProcessed, {c, e, v1, v2}};
  }

  bool binary() const {
    return kind == VarKind::kLink || kind == VarKind::kNode ||
           kind == VarKind::kPlacement;
  }

  auto operator<=>(const VarRef&) const = default;
};

struct VarMode {
  enum class Kind : std::uint8_t { kFixed, kRelaxed, kContinuous };

  Kind kind = Kind::kRelaxed;
  double value = 0.0;  // only meaningful when fixed

  static VarMode fixed(double v) { return {Kind::kFixed, v}; }
  static VarMode relaxed() { return {Kind::kRelaxed, 0.0}; }
  static VarMode continuous() { return {Kind::kContinuous, 0.0}; }

  bool operator==(const VarMode&) const = default;
};

using ModeMap = std::map<VarRef, VarMode>;

/// Constraint family (1..9, see Violation) plus its index tuple. For family
/// 3, `side` distinguishes the x <= y(from) and x <= y(to) halves.
struct ConstraintId {
  int equation = 0;
  std::array<Index, 4> idx{};
  int side = 0;

  auto operator<=>(const ConstraintId&) const = default;
};

struct BuildOptions {
  // Emit every (endpoint, v1, v2) commodity instead of only those that carry
  // logical traffic. Both give the same optimum; the pruned form is smaller.
  bool full_index = false;
};

class LpProblem;

struct LpSolution {
  lp::Status status = lp::Status::kInfeasible;
  double objective_value = 0.0;  // W
  std::vector<double> values;    // aligned with LpProblem::variables(), bit/s
  std::vector<double> row_duals;

  bool feasible() const { return status == lp::Status::kOptimal; }
};

class LpProblem {
 public:
  const std::vector<VarRef>& variables() const;
  bool declared(const VarRef& v) const;
  std::size_t column(const VarRef& v) const;  // throws InvalidMode
  const VarMode& mode(const VarRef& v) const;

  std::size_t num_constraints() const;
  const ConstraintId& constraint_id(std::size_t row) const;
  /// Number of emitted constraints of the given family.
  std::size_t count(int equation) const;

  double flow_scale() const;

  /// The LP with column bounds reflecting the current modes.
  lp::LinearProgram program() const;
  std::string column_name(std::size_t col) const;
  std::string row_name(std::size_t row) const;

  /// In-place mode change, validated like fix()/relax().
  void set_mode(const VarRef& v, const VarMode& mode);

  /// Value of `v` in `sol` (bit/s for flows); 0 when undeclared.
  double value(const LpSolution& sol, const VarRef& v) const;

  struct Structure;  // opaque, shared between copies

 private:
  friend LpProblem build_problem(const Scenario&, const ModeMap&,
                                 const BuildOptions&);
  std::shared_ptr<const Structure> structure_;
  std::vector<VarMode> modes_;
};

/// Emits constraint families 1-9 and the energy objective for `s`. Binaries not
/// listed in `modes` default to relaxed. Throws InvalidMode when `modes`
/// assigns a flow variable or a non-binary fixed value.
LpProblem build_problem(const Scenario& s, const ModeMap& modes = {},
                        const BuildOptions& opts = {});

LpProblem fix(const LpProblem& p, const VarRef& v, double value);
LpProblem relax(const LpProblem& p, const VarRef& v);

/// Throws SolverStall on numeric failure.
LpSolution solve(const LpProblem& p);

struct IisReport {
  std::vector<ConstraintId> members;
  std::vector<std::size_t> rows;  // row indices into the problem
  std::set<int> families;

  bool contains(int equation) const { return families.count(equation) != 0; }
};

/// Irreducible inconsistent subsystem of the rows (column bounds, i.e. the
/// fixed/relaxed modes, are always kept). Throws NotInfeasible.
IisReport compute_iis(const LpProblem& p);

/// Row indices of an irreducible infeasible subsystem of `prog`, found by a
/// deletion filter over `group_of` groups (may be empty) and then over
/// single rows. Rows with a higher `keep_priority` (may be empty) are tried
/// for deletion last, so they survive when several subsystems exist.
/// Throws NotInfeasible.
std::vector<std::size_t> iis_rows(const lp::LinearProgram& prog,
                                  const std::vector<std::size_t>& group_of,
                                  const std::vector<int>& keep_priority = {});

/// True when the given subset of rows (with all column bounds) is feasible.
bool rows_feasible(const LpProblem& p, const std::vector<std::size_t>& rows);

/// CPLEX LP dump; row names look like "eq4_link_n1_n2".
void write_lp(std::ostream& os, const LpProblem& p);

/// Fixed modes for every binary of `cfg`.
ModeMap fixed_modes(const Scenario& s, const NetworkConfiguration& cfg);

/// Replaces the flows of `cfg` by those of `sol`.
void assign_flows(NetworkConfiguration& cfg, const LpProblem& p,
                  const LpSolution& sol);

}  // namespace optiloop

#endif  // OPTILOOP_LP_CORE_HPP
