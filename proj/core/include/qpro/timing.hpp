// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpro/lp.hpp"
#include "qpro/model.hpp"

namespace qpro {

enum class ConstraintKind { kSetup, kHold };

enum class VarKind { kDelta, kPeriod, kSlack, kLatency };

struct Variable
{
  VarKind kind = VarKind::kDelta;
  int index = 0;  // row boundary for kDelta, unused otherwise

  auto operator<=>(const Variable&) const = default;
};

std::string to_string(const Variable& variable);

struct VariableValues
{
  std::span<const double> deltas;
  double period = 0.0;
  double slack = 0.0;
  double latency = 0.0;
};

struct LinearTerm
{
  std::vector<std::pair<Variable, double>> coefficients;
  double constant = 0.0;

  double evaluate(const VariableValues& values) const;
};

/// One setup or hold inequality of a connection from row `from_row` to `to_row`:
///
///   lhs(delta, S) - timing(T)  (>= | <=)  rhs
///
/// where lhs is the sum of the crossed row deltas with -S (setup) or +S (hold),
/// timing is the connection's combined setup or hold function of the period,
/// and rhs = prop - delta_clk.
struct TimingConstraint
{
  ConstraintKind kind = ConstraintKind::kSetup;
  std::size_t connection = 0;
  std::string connection_id;
  int from_row = 0;
  int to_row = 0;
  Sense sense = Sense::kGreaterEqual;
  LinearTerm lhs;
  PiecewiseLinear timing;
  double rhs = 0.0;

  double lhs_value(const VariableValues& values) const;
  // Nonnegative iff satisfied: lhs - rhs for setup, rhs - lhs for hold.
  double margin(const VariableValues& values) const;
};

struct TimingBounds
{
  double s_min = 0.0;
  double s_max = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double delta_max = 0.0;
};

struct TimingConstraintSet
{
  int num_rows = 0;
  std::vector<TimingConstraint> constraints;
  // L - sum(delta) = 0.
  LinearTerm latency_definition;
  TimingBounds bounds;
  std::vector<double> breakpoints;
  HoldMode hold_mode = HoldMode::kResetDelay;

  std::size_t num_deltas() const { return num_rows > 1 ? static_cast<std::size_t>(num_rows - 1) : 0; }
};

double delta_clk(const Gate& src, const Gate& dst);
double delta_clk(const Circuit& circuit, const Connection& connection);

// c2q(src) + setup(dst)
PiecewiseLinear setup_function(const CellTiming& src, const CellTiming& dst);
// c2q(src) + rd(src) - hold(dst); rd is replaced by T in dlplace mode.
PiecewiseLinear hold_function(const CellTiming& src, const CellTiming& dst, HoldMode mode);

/// Builds one setup and one hold constraint per connection, the latency
/// definition, and the slack/period/delta boxes.
///
/// Throws Error(INVALID_CIRCUIT) for circuits that fail validation and
/// Error(UNSUPPORTED_SKIP) for connections spanning more than config.max_span rows.
TimingConstraintSet build_constraints(const Circuit& circuit, const CellLibrary& library,
                                      const OptimizationConfig& config);

struct ConnectionSlack
{
  std::size_t connection = 0;
  std::string src;
  std::string dst;
  double setup_slack_ps = 0.0;
  double hold_slack_ps = 0.0;

  bool operator==(const ConnectionSlack&) const = default;
};

struct SlackReport
{
  std::vector<ConnectionSlack> entries;
  std::optional<double> min_slack_ps;  // empty when the circuit has no connections
  std::vector<std::string> worst;

  bool operator==(const SlackReport&) const = default;
};

/// Setup and hold slacks of every connection straight from the clock-arrival
/// definitions, clk(g) = clock_offset(g) + sum of row deltas before row(g).
///
/// Throws Error(SCHEMA_MISMATCH) when the schedule has the wrong number of
/// row deltas, Error(DOMAIN_ERROR) for a period outside the library range.
SlackReport sta_check(const Circuit& circuit, const CellLibrary& library,
                      const Schedule& schedule, HoldMode hold_mode);

}  // namespace qpro
