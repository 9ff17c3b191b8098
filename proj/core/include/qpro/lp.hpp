// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qpro/diagnostic.hpp"
#include "qpro/model.hpp"

namespace qpro {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

struct LpVariable
{
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
};

struct LpTerm
{
  std::size_t variable = 0;
  double coefficient = 0.0;
};

struct LpConstraint
{
  std::vector<LpTerm> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  std::string label;
};

/// minimize  c'x + constant  subject to  rows (<=, >=, =)  and  lower <= x <= upper.
class LpProblem
{
 public:
  std::size_t add_variable(std::string name, double lower = 0.0, double upper = kInfinity);
  std::size_t add_constraint(std::vector<LpTerm> terms, Sense sense, double rhs,
                             std::string label = {});
  void set_objective(std::vector<LpTerm> terms, double constant = 0.0);

  void set_bounds(std::size_t variable, double lower, double upper);

  const std::vector<LpVariable>& variables() const { return variables_; }
  const std::vector<LpConstraint>& constraints() const { return constraints_; }
  const std::vector<LpTerm>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }

  double evaluate_objective(std::span<const double> values) const;
  // Largest violation over all rows and bounds (0 when feasible).
  double max_violation(std::span<const double> values) const;

 private:
  std::vector<LpVariable> variables_;
  std::vector<LpConstraint> constraints_;
  std::vector<LpTerm> objective_;
  double objective_constant_ = 0.0;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

std::string_view to_string(LpStatus status);

struct LpSolution
{
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> values;
  double objective = 0.0;
  // Phase-1 optimum when infeasible: total artificial mass left in the basis.
  double infeasibility = 0.0;
  // Per constraint phase-1 residual (same order as LpProblem::constraints()),
  // filled only when infeasible.
  std::vector<double> residuals;
  std::size_t iterations = 0;
};

struct SimplexOptions
{
  SimplexTolerances tolerances;
  std::size_t max_iterations = 5'000'000;
};

/// Two-phase primal simplex with Bland's rule.
///
/// Throws Error(DEGENERATE_PIVOT) when the selected pivot magnitude falls
/// below tolerances.pivot; the error entity names the offending constraint.
LpSolution lp_solve(const LpProblem& problem, const SimplexOptions& options = {});

}  // namespace qpro
