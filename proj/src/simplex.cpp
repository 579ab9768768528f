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

#include "optiloop/simplex.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>

#include <Eigen/Dense>

#include "optiloop/errors.hpp"

namespace optiloop::lp {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr double kDropTol = 1e-14;
constexpr double kHarrisTol = 1e-9;
// Pivots between rebuilds of the tableau from the original rows.
constexpr std::size_t kReinvertEvery = 100;
constexpr double kRelativePivotTol = 1e-7;

enum class VarState : std::uint8_t { kBasic, kLower, kUpper, kFree };

class Tableau {
 public:
  Tableau(const LinearProgram& lp, const SimplexOptions& opts);

  SimplexResult run();

 private:
  enum class Outcome { kOptimal, kUnbounded };

  double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }

  Outcome iterate();
  void pivot(std::size_t r, std::size_t q);
  void compute_reduced_costs();
  void recompute_basic_values();
  void reinvert();
  void drive_out_artificials();
  std::vector<double> row_multipliers() const;
  double phase_one_infeasibility() const;

  const LinearProgram& lp_;
  SimplexOptions opts_;
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::size_t ncols_ = 0;
  std::size_t width_ = 0;

  std::vector<double> t_;
  std::vector<double> t0_;  // initial tableau; its starting basis is I
  std::vector<double> lo_, up_, cost_, phase_two_cost_, value_, d_;
  std::vector<VarState> state_;
  std::vector<bool> artificial_;
  std::vector<std::size_t> basis_;
  std::vector<double> beta_;

  std::vector<double> row_sign_, row_scale_, art_sign_;
  std::vector<std::size_t> slack_col_, art_col_;

  std::size_t iterations_ = 0;
  std::size_t max_iterations_ = 0;
};

Tableau::Tableau(const LinearProgram& lp, const SimplexOptions& opts)
    : lp_(lp), opts_(opts) {
  m_ = lp.num_rows();
  n_ = lp.num_columns();

  row_sign_.assign(m_, 1.0);
  row_scale_.assign(m_, 1.0);
  art_sign_.assign(m_, 1.0);
  slack_col_.assign(m_, kNone);
  art_col_.assign(m_, kNone);

  ncols_ = n_;
  for (std::size_t i = 0; i < m_; ++i) {
    const Row& row = lp.rows[i];
    if (row.sense == Sense::kGreaterEqual) row_sign_[i] = -1.0;
    double biggest = 0.0;
    for (const Term& term : row.terms)
      biggest = std::max(biggest, std::abs(term.coef));
    if (biggest > 0.0) row_scale_[i] = 1.0 / biggest;
    if (row.sense != Sense::kEqual) slack_col_[i] = ncols_++;
  }

  // Nonbasic starting point of the structural columns.
  value_.assign(n_, 0.0);
  state_.assign(n_, VarState::kLower);
  for (std::size_t j = 0; j < n_; ++j) {
    if (std::isfinite(lp.lower[j])) {
      value_[j] = lp.lower[j];
      state_[j] = VarState::kLower;
    } else if (std::isfinite(lp.upper[j])) {
      value_[j] = lp.upper[j];
      state_[j] = VarState::kUpper;
    } else {
      state_[j] = VarState::kFree;
    }
  }

  std::vector<double> residual(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    const Row& row = lp.rows[i];
    const double f = row_sign_[i] * row_scale_[i];
    double r = f * row.rhs;
    for (const Term& term : row.terms) r -= f * term.coef * value_[term.column];
    residual[i] = r;
    const bool slack_fits = slack_col_[i] != kNone && r >= 0.0;
    if (!slack_fits) {
      art_col_[i] = ncols_++;
      art_sign_[i] = r >= 0.0 ? 1.0 : -1.0;
    }
  }

  width_ = ncols_ + 1;
  t_.assign(m_ * width_, 0.0);
  lo_.assign(ncols_, 0.0);
  up_.assign(ncols_, kInfinity);
  phase_two_cost_.assign(ncols_, 0.0);
  artificial_.assign(ncols_, false);
  value_.resize(ncols_, 0.0);
  state_.resize(ncols_, VarState::kLower);
  for (std::size_t j = 0; j < n_; ++j) {
    lo_[j] = lp.lower[j];
    up_[j] = lp.upper[j];
    phase_two_cost_[j] = lp.cost[j];
  }

  basis_.assign(m_, kNone);
  beta_.assign(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    const Row& row = lp.rows[i];
    const double f = row_sign_[i] * row_scale_[i];
    for (const Term& term : row.terms) at(i, term.column) += f * term.coef;
    at(i, ncols_) = f * row.rhs;
    if (slack_col_[i] != kNone) at(i, slack_col_[i]) = 1.0;
    if (art_col_[i] != kNone) {
      at(i, art_col_[i]) = art_sign_[i];
      artificial_[art_col_[i]] = true;
      // Bring the artificial column to unit form.
      if (art_sign_[i] < 0.0)
        for (std::size_t j = 0; j < width_; ++j) at(i, j) = -at(i, j);
      basis_[i] = art_col_[i];
      beta_[i] = std::abs(residual[i]);
    } else {
      basis_[i] = slack_col_[i];
      beta_[i] = residual[i];
    }
    state_[basis_[i]] = VarState::kBasic;
  }
  t0_ = t_;

  max_iterations_ = opts.max_iterations != 0
                        ? opts.max_iterations
                        : std::max<std::size_t>(20000, 50 * (m_ + ncols_));
}

void Tableau::compute_reduced_costs() {
  d_ = cost_;
  for (std::size_t i = 0; i < m_; ++i) {
    const double cb = cost_[basis_[i]];
    if (cb == 0.0) continue;
    const double* row = &t_[i * width_];
    for (std::size_t j = 0; j < ncols_; ++j) d_[j] -= cb * row[j];
  }
  for (std::size_t i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
}

void Tableau::recompute_basic_values() {
  for (std::size_t i = 0; i < m_; ++i) {
    const double* row = &t_[i * width_];
    double v = row[ncols_];
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (state_[j] != VarState::kBasic && value_[j] != 0.0)
        v -= row[j] * value_[j];
    }
    beta_[i] = v;
  }
}

void Tableau::reinvert() {
  if (m_ == 0) return;
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> t0(t0_.data(), m_, width_);
  Eigen::MatrixXd basis(m_, m_);
  for (std::size_t i = 0; i < m_; ++i) basis.col(i) = t0.col(basis_[i]);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
  if (!(lu.rcond() > 1e-13))
    throw SolverStall("simplex basis became numerically singular");
  Eigen::Map<RowMajor> t(t_.data(), m_, width_);
  t = lu.solve(t0);
  for (std::size_t i = 0; i < m_; ++i) {
    for (std::size_t j = 0; j < width_; ++j)
      if (std::abs(at(i, j)) < kDropTol) at(i, j) = 0.0;
    for (std::size_t k = 0; k < m_; ++k) at(k, basis_[i]) = k == i ? 1.0 : 0.0;
  }
  compute_reduced_costs();
  recompute_basic_values();
}

void Tableau::pivot(std::size_t r, std::size_t q) {
  double* prow = &t_[r * width_];
  const double inv = 1.0 / prow[q];
  std::vector<std::size_t> nz;
  nz.reserve(64);
  for (std::size_t j = 0; j < width_; ++j) {
    if (prow[j] == 0.0) continue;
    prow[j] *= inv;
    if (std::abs(prow[j]) < kDropTol) {
      prow[j] = 0.0;
      continue;
    }
    nz.push_back(j);
  }
  prow[q] = 1.0;
  for (std::size_t i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = &t_[i * width_];
    const double f = row[q];
    if (f == 0.0) continue;
    for (std::size_t j : nz) {
      double v = row[j] - f * prow[j];
      row[j] = std::abs(v) < kDropTol ? 0.0 : v;
    }
    row[q] = 0.0;
  }
  const double dq = d_[q];
  if (dq != 0.0) {
    for (std::size_t j : nz)
      if (j < ncols_) d_[j] -= dq * prow[j];
    d_[q] = 0.0;
  }
}

Tableau::Outcome Tableau::iterate() {
  std::size_t degenerate_run = 0;
  bool bland = false;
  std::vector<double> column(m_);
  for (;;) {
    if (++iterations_ > max_iterations_)
      throw SolverStall("simplex exceeded " + std::to_string(max_iterations_) +
                        " iterations");

    // Pricing.
    std::size_t q = kNone;
    double best = 0.0;
    double dir = 0.0;
    for (std::size_t j = 0; j < ncols_; ++j) {
      const VarState st = state_[j];
      if (st == VarState::kBasic || lo_[j] == up_[j]) continue;
      const double dj = d_[j];
      double cand_dir = 0.0;
      if (st == VarState::kLower && dj < -opts_.optimality_tol)
        cand_dir = 1.0;
      else if (st == VarState::kUpper && dj > opts_.optimality_tol)
        cand_dir = -1.0;
      else if (st == VarState::kFree && std::abs(dj) > opts_.optimality_tol)
        cand_dir = dj < 0.0 ? 1.0 : -1.0;
      if (cand_dir == 0.0) continue;
      if (bland) {
        q = j;
        dir = cand_dir;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
        dir = cand_dir;
      }
    }
    if (q == kNone) return Outcome::kOptimal;

    double column_max = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      column[i] = at(i, q);
      column_max = std::max(column_max, std::abs(column[i]));
    }
    // Pivots far below the column's largest entry lose the basis' rank.
    const double pivot_min =
        std::max(opts_.pivot_tol, kRelativePivotTol * column_max);

    // Ratio test (two-pass Harris unless in Bland mode).
    auto room = [&](std::size_t i, double g) {
      const std::size_t b = basis_[i];
      return g > 0.0 ? beta_[i] - lo_[b] : up_[b] - beta_[i];
    };
    auto bounded = [&](std::size_t i, double g) {
      const std::size_t b = basis_[i];
      return g > 0.0 ? std::isfinite(lo_[b]) : std::isfinite(up_[b]);
    };
    std::size_t leave = kNone;
    double theta = kInfinity;
    if (bland) {
      for (std::size_t i = 0; i < m_; ++i) {
        const double g = dir * column[i];
        if (std::abs(g) <= pivot_min || !bounded(i, g)) continue;
        const double ratio = std::max(0.0, room(i, g)) / std::abs(g);
        if (ratio < theta - 1e-12 ||
            (ratio <= theta + 1e-12 && leave != kNone &&
             basis_[i] < basis_[leave])) {
          theta = std::min(theta, ratio);
          leave = i;
        }
      }
    } else {
      double limit = kInfinity;
      for (std::size_t i = 0; i < m_; ++i) {
        const double g = dir * column[i];
        if (std::abs(g) <= pivot_min || !bounded(i, g)) continue;
        limit = std::min(limit, (std::max(0.0, room(i, g)) + kHarrisTol) /
                                    std::abs(g));
      }
      double biggest = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        const double g = dir * column[i];
        if (std::abs(g) <= pivot_min || !bounded(i, g)) continue;
        const double ratio = std::max(0.0, room(i, g)) / std::abs(g);
        if (ratio <= limit && std::abs(g) > biggest) {
          biggest = std::abs(g);
          leave = i;
          theta = ratio;
        }
      }
    }

    const double flip = up_[q] - lo_[q];
    const bool do_flip = std::isfinite(flip) && flip <= theta;
    if (!do_flip && leave == kNone) return Outcome::kUnbounded;
    if (do_flip) theta = flip;

    if (theta <= 1e-12) {
      if (++degenerate_run >= opts_.degenerate_before_bland) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    for (std::size_t i = 0; i < m_; ++i)
      if (column[i] != 0.0) beta_[i] -= theta * dir * column[i];

    if (do_flip) {
      if (state_[q] == VarState::kLower) {
        state_[q] = VarState::kUpper;
        value_[q] = up_[q];
      } else {
        state_[q] = VarState::kLower;
        value_[q] = lo_[q];
      }
      continue;
    }

    const std::size_t out = basis_[leave];
    const double entering_value = value_[q] + dir * theta;
    const double g = dir * column[leave];
    if (g > 0.0) {
      state_[out] = VarState::kLower;
      value_[out] = lo_[out];
    } else {
      state_[out] = VarState::kUpper;
      value_[out] = up_[out];
    }
    pivot(leave, q);
    basis_[leave] = q;
    state_[q] = VarState::kBasic;
    value_[q] = 0.0;
    beta_[leave] = entering_value;

    if (iterations_ % kReinvertEvery == 0) reinvert();
  }
}

void Tableau::drive_out_artificials() {
  for (std::size_t i = 0; i < m_; ++i) {
    if (!artificial_[basis_[i]]) continue;
    std::size_t best = kNone;
    double biggest = 1e-7;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (state_[j] == VarState::kBasic || artificial_[j]) continue;
      if (std::abs(at(i, j)) > biggest) {
        biggest = std::abs(at(i, j));
        best = j;
      }
    }
    if (best == kNone) continue;  // redundant row
    const std::size_t out = basis_[i];
    const double entering_value = value_[best];
    pivot(i, best);
    basis_[i] = best;
    state_[best] = VarState::kBasic;
    value_[best] = 0.0;
    state_[out] = VarState::kLower;
    value_[out] = 0.0;
    beta_[i] = entering_value;
  }
}

double Tableau::phase_one_infeasibility() const {
  double w = 0.0;
  for (std::size_t i = 0; i < m_; ++i)
    if (artificial_[basis_[i]]) w += std::max(0.0, beta_[i]);
  return w;
}

std::vector<double> Tableau::row_multipliers() const {
  std::vector<double> y(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    double scaled = 0.0;
    if (slack_col_[i] != kNone) {
      const std::size_t s = slack_col_[i];
      scaled = cost_[s] - d_[s];
    } else {
      const std::size_t a = art_col_[i];
      scaled = (cost_[a] - d_[a]) / art_sign_[i];
    }
    y[i] = scaled * row_scale_[i] * row_sign_[i];
  }
  return y;
}

SimplexResult Tableau::run() {
  SimplexResult result;

  // Phase one: minimize the sum of artificials.
  cost_.assign(ncols_, 0.0);
  bool any_artificial = false;
  for (std::size_t j = 0; j < ncols_; ++j) {
    if (artificial_[j]) {
      cost_[j] = 1.0;
      any_artificial = true;
    }
  }
  if (any_artificial) {
    compute_reduced_costs();
    iterate();
    reinvert();
    result.infeasibility = phase_one_infeasibility();
    if (result.infeasibility > opts_.feasibility_tol) {
      result.status = Status::kInfeasible;
      result.farkas = row_multipliers();
      result.iterations = iterations_;
      return result;
    }
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (!artificial_[j]) continue;
      lo_[j] = up_[j] = 0.0;
      if (state_[j] != VarState::kBasic) {
        state_[j] = VarState::kLower;
        value_[j] = 0.0;
      }
    }
    drive_out_artificials();
  }

  auto extract = [&] {
    reinvert();
    result.values.assign(n_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      if (state_[j] != VarState::kBasic) result.values[j] = value_[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t b = basis_[i];
      const double slack = 1e-6 * (1.0 + std::abs(beta_[i]));
      if (beta_[i] < lo_[b] - slack || beta_[i] > up_[b] + slack)
        throw SolverStall("simplex lost primal feasibility");
      if (b < n_) result.values[b] = beta_[i];
    }
    result.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      result.objective += lp_.cost[j] * result.values[j];
  };

  if (opts_.feasibility_only) {
    result.status = Status::kOptimal;
    extract();
    result.iterations = iterations_;
    return result;
  }

  cost_ = phase_two_cost_;
  compute_reduced_costs();
  const Outcome outcome = iterate();
  result.iterations = iterations_;
  if (outcome == Outcome::kUnbounded) {
    result.status = Status::kUnbounded;
    return result;
  }
  result.status = Status::kOptimal;
  extract();
  compute_reduced_costs();
  result.row_duals = row_multipliers();
  return result;
}

}  // namespace

LinearProgram LinearProgram::with_rows(
    const std::vector<std::size_t>& keep) const {
  LinearProgram out;
  out.lower = lower;
  out.upper = upper;
  out.cost = cost;
  out.rows.reserve(keep.size());
  for (std::size_t i : keep) out.rows.push_back(rows.at(i));
  return out;
}

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kInfeasible:
      return "infeasible";
    case Status::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

SimplexResult solve(const LinearProgram& lp, const SimplexOptions& opts) {
  Tableau tableau(lp, opts);
  return tableau.run();
}

bool is_feasible(const LinearProgram& lp, const SimplexOptions& opts) {
  SimplexOptions o = opts;
  o.feasibility_only = true;
  return solve(lp, o).status != Status::kInfeasible;
}

std::string sanitize_lp_name(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char ch : raw) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  if (out.empty() || (out[0] >= '0' && out[0] <= '9') || out[0] == '.')
    out.insert(out.begin(), '_');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_lp_format(std::ostream& os, const LinearProgram& lp,
                     const std::vector<std::string>& column_names,
                     const std::vector<std::string>& row_names) {
  auto write_terms = [&](const std::vector<Term>& terms) {
    bool first = true;
    for (const Term& term : terms) {
      if (term.coef == 0.0) continue;
      const double c = term.coef;
      if (first) {
        os << (c < 0 ? "- " : "");
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      os << format_double(std::abs(c)) << ' ' << column_names[term.column];
      first = false;
    }
    if (first) os << "0 " << column_names.front();
  };

  os << "\\ optiloop model\nMinimize\n obj: ";
  std::vector<Term> objective;
  for (std::size_t j = 0; j < lp.num_columns(); ++j)
    if (lp.cost[j] != 0.0) objective.push_back({j, lp.cost[j]});
  if (lp.num_columns() == 0) {
    os << "0\n";
  } else {
    write_terms(objective);
    os << '\n';
  }
  os << "Subject To\n";
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    const Row& row = lp.rows[i];
    os << ' ' << row_names[i] << ": ";
    if (lp.num_columns() == 0) {
      os << "0";
    } else {
      write_terms(row.terms);
    }
    switch (row.sense) {
      case Sense::kLessEqual:
        os << " <= ";
        break;
      case Sense::kGreaterEqual:
        os << " >= ";
        break;
      case Sense::kEqual:
        os << " = ";
        break;
    }
    os << format_double(row.rhs) << '\n';
  }
  os << "Bounds\n";
  for (std::size_t j = 0; j < lp.num_columns(); ++j) {
    const double lo = lp.lower[j];
    const double up = lp.upper[j];
    const std::string& name = column_names[j];
    if (lo == up) {
      os << ' ' << name << " = " << format_double(lo) << '\n';
    } else if (lo == 0.0 && !std::isfinite(up)) {
      continue;  // LP-format default
    } else {
      os << ' ' << (std::isfinite(lo) ? format_double(lo) : "-inf") << " <= "
         << name << " <= " << (std::isfinite(up) ? format_double(up) : "+inf")
         << '\n';
    }
  }
  os << "End\n";
}

}  // namespace optiloop::lp
