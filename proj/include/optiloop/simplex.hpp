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

// Dense bounded-variable primal simplex.
//
// Solves   min c'x   s.t.   rows (<=, >=, =),   lower <= x <= upper
// with a two-phase method (artificial variables in phase one), Dantzig
// pricing and a Bland fallback after a run of degenerate pivots. Rows are
// equilibrated before solving. Intended for desk-scale problems (a few
// thousand rows at most); the tableau is stored densely.

#ifndef OPTILOOP_SIMPLEX_HPP
#define OPTILOOP_SIMPLEX_HPP

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace optiloop::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct Term {
  std::size_t column = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};

struct LinearProgram {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> cost;
  std::vector<Row> rows;

  std::size_t num_columns() const { return cost.size(); }
  std::size_t num_rows() const { return rows.size(); }

  std::size_t add_column(double lo, double up, double c) {
    lower.push_back(lo);
    upper.push_back(up);
    cost.push_back(c);
    return cost.size() - 1;
  }
  std::size_t add_row(std::vector<Term> terms, Sense sense, double rhs) {
    rows.push_back({std::move(terms), sense, rhs});
    return rows.size() - 1;
  }

  /// Copy restricted to the given rows (columns unchanged).
  LinearProgram with_rows(const std::vector<std::size_t>& keep) const;
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

const char* to_string(Status s);

struct SimplexOptions {
  double feasibility_tol = 1e-7;  // phase-one optimum above this: infeasible
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 0;  // 0: derived from the problem size
  std::size_t degenerate_before_bland = 50;
  bool feasibility_only = false;   // stop after phase one
};

struct SimplexResult {
  Status status = Status::kInfeasible;
  std::vector<double> values;  // per column (empty unless optimal/feasible)
  double objective = 0.0;
  // Row multipliers y with reduced costs c - A'y; for a minimization,
  // y <= 0 on binding <= rows and y >= 0 on binding >= rows.
  std::vector<double> row_duals;
  // Phase-one multipliers when infeasible; rows with nonzero entries form an
  // infeasible subsystem.
  std::vector<double> farkas;
  double infeasibility = 0.0;
  std::size_t iterations = 0;
};

/// Throws SolverStall when the iteration cap is exceeded.
SimplexResult solve(const LinearProgram& lp, const SimplexOptions& opts = {});

/// True when the feasible region is nonempty (phase one only).
bool is_feasible(const LinearProgram& lp, const SimplexOptions& opts = {});

/// Writes `lp` in CPLEX LP text format. Names must already be valid LP
/// identifiers; use sanitize_lp_name() otherwise.
void write_lp_format(std::ostream& os, const LinearProgram& lp,
                     const std::vector<std::string>& column_names,
                     const std::vector<std::string>& row_names);

std::string sanitize_lp_name(const std::string& raw);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace optiloop::lp

#endif  // OPTILOOP_SIMPLEX_HPP
