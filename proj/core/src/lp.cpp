// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpro {

std::size_t LpProblem::add_variable(std::string name, double lower, double upper)
{
  variables_.push_back({std::move(name), lower, upper});
  return variables_.size() - 1;
}

std::size_t LpProblem::add_constraint(std::vector<LpTerm> terms, Sense sense, double rhs,
                                      std::string label)
{
  constraints_.push_back({std::move(terms), sense, rhs, std::move(label)});
  return constraints_.size() - 1;
}

void LpProblem::set_objective(std::vector<LpTerm> terms, double constant)
{
  objective_ = std::move(terms);
  objective_constant_ = constant;
}

void LpProblem::set_bounds(std::size_t variable, double lower, double upper)
{
  variables_.at(variable).lower = lower;
  variables_.at(variable).upper = upper;
}

double LpProblem::evaluate_objective(std::span<const double> values) const
{
  double z = objective_constant_;
  for (const LpTerm& t : objective_) {
    z += t.coefficient * values[t.variable];
  }
  return z;
}

double LpProblem::max_violation(std::span<const double> values) const
{
  double worst = 0.0;
  for (std::size_t j = 0; j < variables_.size(); ++j) {
    worst = std::max(worst, variables_[j].lower - values[j]);
    worst = std::max(worst, values[j] - variables_[j].upper);
  }
  for (const LpConstraint& c : constraints_) {
    double lhs = 0.0;
    for (const LpTerm& t : c.terms) {
      lhs += t.coefficient * values[t.variable];
    }
    switch (c.sense) {
      case Sense::kLessEqual:
        worst = std::max(worst, lhs - c.rhs);
        break;
      case Sense::kGreaterEqual:
        worst = std::max(worst, c.rhs - lhs);
        break;
      case Sense::kEqual:
        worst = std::max(worst, std::abs(lhs - c.rhs));
        break;
    }
  }
  return worst;
}

std::string_view to_string(LpStatus status)
{
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "?";
}

namespace {

// Entries whose magnitude falls below this are treated as structural zeros.
constexpr double kDropTolerance = 1e-13;
// Ratio-test candidates must exceed this; the chosen pivot must also clear
// SimplexTolerances::pivot or the solve aborts.
constexpr double kCandidateTolerance = 1e-12;
// Nonzero needed to pivot a zero-level artificial out of the basis.
constexpr double kDriveOutTolerance = 1e-9;

struct Entry
{
  int col;
  double val;
};

using SparseRow = std::vector<Entry>;

double coefficient(const SparseRow& row, int col)
{
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const Entry& e, int c) { return e.col < c; });
  return (it != row.end() && it->col == col) ? it->val : 0.0;
}

// out = a + factor * b, dropping `skip` and near-zero results. Columns that
// are nonzero in `out` but absent from `a` are appended to `fill`.
void axpy(const SparseRow& a, double factor, const SparseRow& b, int skip, SparseRow& out,
          std::vector<int>& fill)
{
  out.clear();
  out.reserve(a.size() + b.size());
  auto ia = a.begin();
  auto ib = b.begin();
  auto emit = [&](int col, double v) {
    if (col != skip && std::abs(v) > kDropTolerance) {
      out.push_back({col, v});
      return true;
    }
    return false;
  };
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->col < ib->col)) {
      emit(ia->col, ia->val);
      ++ia;
    } else if (ia == a.end() || ib->col < ia->col) {
      if (emit(ib->col, factor * ib->val)) {
        fill.push_back(ib->col);
      }
      ++ib;
    } else {
      emit(ia->col, ia->val + factor * ib->val);
      ++ia;
      ++ib;
    }
  }
}

// Where an original variable lives in the nonnegative y-space:
// x = offset + sign * y[col] - (col2 >= 0 ? y[col2] : 0).
struct ColumnMap
{
  int col = -1;
  int col2 = -1;
  double sign = 1.0;
  double offset = 0.0;
};

class Tableau
{
 public:
  Tableau(const LpProblem& problem, const SimplexOptions& options)
      : problem_(problem), options_(options)
  {
    build();
  }

  LpSolution solve();

 private:
  void build();
  int add_row(SparseRow row, double rhs, int origin);
  void pivot(int r, int c, const std::vector<std::pair<int, double>>& column);
  // Also compacts the column's row list.
  void gather_column(int c, std::vector<std::pair<int, double>>& column);
  // Returns false when optimal; sets `unbounded` when no leaving row exists.
  bool iterate(bool& unbounded);
  void load_phase_one_costs();
  void load_phase_two_costs();
  void drive_out_artificials();
  std::string describe_row(int r) const;

  const LpProblem& problem_;
  const SimplexOptions& options_;

  std::vector<ColumnMap> map_;
  int structural_ = 0;
  int num_cols_ = 0;
  int first_artificial_ = 0;

  std::vector<SparseRow> rows_;
  std::vector<double> rhs_;
  std::vector<int> basis_;
  std::vector<char> active_;
  // Constraint index for constraint rows, -(j + 1) for the bound row of variable j.
  std::vector<int> origin_;
  std::vector<int> artificial_of_constraint_;

  std::vector<double> cost_;
  double value_ = 0.0;
  std::vector<char> can_enter_;
  std::vector<char> is_basic_;

  std::vector<double> phase_two_cost_;
  double phase_two_constant_ = 0.0;

  // Rows that may hold a nonzero in each column; may contain stale entries.
  std::vector<std::vector<int>> col_rows_;
  std::vector<int> stamp_;
  int stamp_gen_ = 0;

  std::size_t iterations_ = 0;
  SparseRow scratch_;
  std::vector<int> fill_;
};

int Tableau::add_row(SparseRow row, double rhs, int origin)
{
  rows_.push_back(std::move(row));
  rhs_.push_back(rhs);
  basis_.push_back(-1);
  active_.push_back(1);
  origin_.push_back(origin);
  return static_cast<int>(rows_.size()) - 1;
}

void Tableau::build()
{
  const auto& vars = problem_.variables();
  const auto& cons = problem_.constraints();
  for (const LpConstraint& c : cons) {
    for (const LpTerm& t : c.terms) {
      if (t.variable >= vars.size()) {
        throw Error(std::string(codes::kBadLp), c.label, "constraint references unknown variable");
      }
      if (!std::isfinite(t.coefficient)) {
        throw Error(std::string(codes::kBadLp), c.label, "non-finite coefficient");
      }
    }
    if (!std::isfinite(c.rhs)) {
      throw Error(std::string(codes::kBadLp), c.label, "non-finite right-hand side");
    }
  }

  map_.resize(vars.size());
  int next = 0;
  std::vector<std::pair<int, double>> bound_rows;  // (variable, width)
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const LpVariable& v = vars[j];
    if (v.lower > v.upper || std::isnan(v.lower) || std::isnan(v.upper)) {
      throw Error(std::string(codes::kBadLp), v.name, "empty variable bounds");
    }
    ColumnMap& m = map_[j];
    m.col = next++;
    if (std::isfinite(v.lower)) {
      m.offset = v.lower;
      if (std::isfinite(v.upper)) {
        bound_rows.emplace_back(static_cast<int>(j), v.upper - v.lower);
      }
    } else if (std::isfinite(v.upper)) {
      m.offset = v.upper;
      m.sign = -1.0;
    } else {
      m.col2 = next++;
    }
  }
  structural_ = next;

  // Rows in y-space, normalized to rhs >= 0.
  struct Pending
  {
    SparseRow row;
    double rhs;
    Sense sense;
    int origin;
  };
  std::vector<Pending> pending;
  pending.reserve(cons.size() + bound_rows.size());
  std::vector<std::pair<int, double>> dense;
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const LpConstraint& c = cons[i];
    double rhs = c.rhs;
    dense.clear();
    for (const LpTerm& t : c.terms) {
      const ColumnMap& m = map_[t.variable];
      rhs -= t.coefficient * m.offset;
      dense.emplace_back(m.col, t.coefficient * m.sign);
      if (m.col2 >= 0) {
        dense.emplace_back(m.col2, -t.coefficient);
      }
    }
    std::sort(dense.begin(), dense.end());
    SparseRow row;
    for (const auto& [col, val] : dense) {
      if (!row.empty() && row.back().col == col) {
        row.back().val += val;
      } else {
        row.push_back({col, val});
      }
    }
    std::erase_if(row, [](const Entry& e) { return e.val == 0.0; });
    pending.push_back({std::move(row), rhs, c.sense, static_cast<int>(i)});
  }
  for (const auto& [j, width] : bound_rows) {
    pending.push_back({SparseRow{{map_[j].col, 1.0}}, width, Sense::kLessEqual, -(j + 1)});
  }

  int slack_count = 0;
  int artificial_count = 0;
  for (Pending& p : pending) {
    if (p.rhs < 0.0) {
      p.rhs = -p.rhs;
      for (Entry& e : p.row) {
        e.val = -e.val;
      }
      if (p.sense == Sense::kLessEqual) {
        p.sense = Sense::kGreaterEqual;
      } else if (p.sense == Sense::kGreaterEqual) {
        p.sense = Sense::kLessEqual;
      }
    }
    if (p.sense != Sense::kEqual) {
      ++slack_count;
    }
    if (p.sense != Sense::kLessEqual) {
      ++artificial_count;
    }
  }

  first_artificial_ = structural_ + slack_count;
  num_cols_ = first_artificial_ + artificial_count;
  artificial_of_constraint_.assign(cons.size(), -1);
  is_basic_.assign(num_cols_, 0);
  can_enter_.assign(num_cols_, 1);

  int slack = structural_;
  int artificial = first_artificial_;
  rows_.reserve(pending.size());
  for (Pending& p : pending) {
    SparseRow row = std::move(p.row);
    int basic = -1;
    if (p.sense == Sense::kLessEqual) {
      row.push_back({slack, 1.0});
      basic = slack++;
    } else if (p.sense == Sense::kGreaterEqual) {
      row.push_back({slack++, -1.0});
    }
    if (p.sense != Sense::kLessEqual) {
      row.push_back({artificial, 1.0});
      can_enter_[artificial] = 0;
      if (p.origin >= 0) {
        artificial_of_constraint_[p.origin] = artificial;
      }
      basic = artificial++;
    }
    const int r = add_row(std::move(row), p.rhs, p.origin);
    basis_[r] = basic;
    is_basic_[basic] = 1;
  }

  col_rows_.assign(num_cols_, {});
  for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
    for (const Entry& e : rows_[i]) {
      col_rows_[e.col].push_back(i);
    }
  }
  stamp_.assign(rows_.size(), 0);

  // Objective in y-space.
  phase_two_cost_.assign(num_cols_, 0.0);
  phase_two_constant_ = problem_.objective_constant();
  for (const LpTerm& t : problem_.objective()) {
    const ColumnMap& m = map_.at(t.variable);
    phase_two_constant_ += t.coefficient * m.offset;
    phase_two_cost_[m.col] += t.coefficient * m.sign;
    if (m.col2 >= 0) {
      phase_two_cost_[m.col2] -= t.coefficient;
    }
  }
}

void Tableau::gather_column(int c, std::vector<std::pair<int, double>>& column)
{
  column.clear();
  ++stamp_gen_;
  std::vector<int>& list = col_rows_[c];
  std::size_t keep = 0;
  for (const int i : list) {
    if (!active_[i] || stamp_[i] == stamp_gen_) {
      continue;
    }
    const double a = coefficient(rows_[i], c);
    if (a != 0.0) {
      stamp_[i] = stamp_gen_;
      list[keep++] = i;
      column.emplace_back(i, a);
    }
  }
  list.resize(keep);
  std::sort(column.begin(), column.end());
}

void Tableau::pivot(int r, int c, const std::vector<std::pair<int, double>>& column)
{
  SparseRow& pr = rows_[r];
  const double inv = 1.0 / coefficient(pr, c);
  for (Entry& e : pr) {
    e.val = (e.col == c) ? 1.0 : e.val * inv;
  }
  rhs_[r] *= inv;
  if (rhs_[r] < 0.0) {
    rhs_[r] = 0.0;
  }

  for (const auto& [i, a] : column) {
    if (i == r) {
      continue;
    }
    fill_.clear();
    axpy(rows_[i], -a, pr, c, scratch_, fill_);
    rows_[i].swap(scratch_);
    for (const int col : fill_) {
      col_rows_[col].push_back(i);
    }
    rhs_[i] -= a * rhs_[r];
    if (rhs_[i] < 0.0) {
      // Round-off only; ratio test keeps rhs >= 0 in exact arithmetic.
      rhs_[i] = 0.0;
    }
  }

  const double dc = cost_[c];
  if (dc != 0.0) {
    for (const Entry& e : pr) {
      cost_[e.col] -= dc * e.val;
    }
    cost_[c] = 0.0;
    value_ += dc * rhs_[r];
  }

  is_basic_[basis_[r]] = 0;
  basis_[r] = c;
  is_basic_[c] = 1;
  ++iterations_;
}

std::string Tableau::describe_row(int r) const
{
  const int origin = origin_[r];
  if (origin >= 0) {
    const std::string& label = problem_.constraints()[origin].label;
    return "constraint " + std::to_string(origin) + (label.empty() ? "" : " (" + label + ")");
  }
  return "bound of " + problem_.variables()[-origin - 1].name;
}

bool Tableau::iterate(bool& unbounded)
{
  unbounded = false;
  const double opt_tol = options_.tolerances.optimality;
  int entering = -1;
  for (int j = 0; j < num_cols_; ++j) {
    if (can_enter_[j] && !is_basic_[j] && cost_[j] < -opt_tol) {
      entering = j;
      break;
    }
  }
  if (entering < 0) {
    return false;
  }

  static thread_local std::vector<std::pair<int, double>> column;
  gather_column(entering, column);

  int leave = -1;
  double best = 0.0;
  double leave_coeff = 0.0;
  for (const auto& [i, a] : column) {
    if (a <= kCandidateTolerance) {
      continue;
    }
    const double ratio = rhs_[i] / a;
    if (leave < 0) {
      leave = i;
      best = ratio;
      leave_coeff = a;
      continue;
    }
    const double tie = 1e-12 * (1.0 + std::abs(best));
    if (ratio < best - tie || (ratio <= best + tie && basis_[i] < basis_[leave])) {
      leave = i;
      best = std::min(best, ratio);
      leave_coeff = a;
    }
  }
  if (leave < 0) {
    unbounded = true;
    return false;
  }
  if (leave_coeff < options_.tolerances.pivot) {
    throw Error(std::string(codes::kDegeneratePivot), describe_row(leave),
                "pivot magnitude below tolerance");
  }
  if (iterations_ >= options_.max_iterations) {
    throw Error(std::string(codes::kIterationLimit), "",
                "simplex exceeded " + std::to_string(options_.max_iterations) + " pivots");
  }
  pivot(leave, entering, column);
  return true;
}

void Tableau::load_phase_one_costs()
{
  cost_.assign(num_cols_, 0.0);
  value_ = 0.0;
  for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
    if (basis_[i] < first_artificial_) {
      continue;
    }
    value_ += rhs_[i];
    for (const Entry& e : rows_[i]) {
      if (e.col < first_artificial_) {
        cost_[e.col] -= e.val;
      }
    }
  }
}

void Tableau::drive_out_artificials()
{
  for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
    if (!active_[i] || basis_[i] < first_artificial_) {
      continue;
    }
    rhs_[i] = 0.0;
    int best = -1;
    double magnitude = kDriveOutTolerance;
    for (const Entry& e : rows_[i]) {
      if (e.col < first_artificial_ && std::abs(e.val) > magnitude) {
        best = e.col;
        magnitude = std::abs(e.val);
      }
    }
    if (best < 0) {
      active_[i] = 0;  // redundant row
      is_basic_[basis_[i]] = 0;
      continue;
    }
    static thread_local std::vector<std::pair<int, double>> column;
    gather_column(best, column);
    pivot(i, best, column);
  }
}

void Tableau::load_phase_two_costs()
{
  cost_ = phase_two_cost_;
  value_ = phase_two_constant_;
  for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
    if (!active_[i]) {
      continue;
    }
    const double cb = phase_two_cost_[basis_[i]];
    if (cb == 0.0) {
      continue;
    }
    value_ += cb * rhs_[i];
    for (const Entry& e : rows_[i]) {
      cost_[e.col] -= cb * e.val;
    }
  }
  for (int j = first_artificial_; j < num_cols_; ++j) {
    can_enter_[j] = 0;
  }
}

LpSolution Tableau::solve()
{
  LpSolution solution;
  bool unbounded = false;

  load_phase_one_costs();
  while (iterate(unbounded)) {
  }
  // Phase 1 is bounded below by zero; `unbounded` cannot be set here.
  if (value_ > options_.tolerances.feasibility) {
    solution.status = LpStatus::kInfeasible;
    solution.infeasibility = value_;
    solution.residuals.assign(problem_.constraints().size(), 0.0);
    for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
      if (active_[i] && basis_[i] >= first_artificial_ && origin_[i] >= 0) {
        solution.residuals[origin_[i]] = rhs_[i];
      }
    }
    solution.iterations = iterations_;
    return solution;
  }

  drive_out_artificials();
  load_phase_two_costs();
  while (iterate(unbounded)) {
  }
  solution.iterations = iterations_;
  if (unbounded) {
    solution.status = LpStatus::kUnbounded;
    return solution;
  }

  std::vector<double> y(num_cols_, 0.0);
  for (int i = 0; i < static_cast<int>(rows_.size()); ++i) {
    if (active_[i]) {
      y[basis_[i]] = rhs_[i];
    }
  }
  const auto& vars = problem_.variables();
  solution.values.resize(vars.size());
  for (std::size_t j = 0; j < vars.size(); ++j) {
    const ColumnMap& m = map_[j];
    double x = m.offset + m.sign * y[m.col];
    if (m.col2 >= 0) {
      x -= y[m.col2];
    }
    solution.values[j] = std::clamp(x, vars[j].lower, vars[j].upper);
  }
  solution.status = LpStatus::kOptimal;
  solution.objective = problem_.evaluate_objective(solution.values);
  return solution;
}

}  // namespace

LpSolution lp_solve(const LpProblem& problem, const SimplexOptions& options)
{
  Tableau tableau(problem, options);
  return tableau.solve();
}

}  // namespace qpro
