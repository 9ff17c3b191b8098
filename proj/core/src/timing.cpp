// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/timing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace qpro {

std::string to_string(const Variable& variable)
{
  switch (variable.kind) {
    case VarKind::kDelta:
      return "delta_" + std::to_string(variable.index);
    case VarKind::kPeriod:
      return "T";
    case VarKind::kSlack:
      return "S";
    case VarKind::kLatency:
      return "L";
  }
  return "?";
}

double LinearTerm::evaluate(const VariableValues& values) const
{
  double sum = constant;
  for (const auto& [var, coeff] : coefficients) {
    switch (var.kind) {
      case VarKind::kDelta:
        sum += coeff * values.deltas[static_cast<std::size_t>(var.index)];
        break;
      case VarKind::kPeriod:
        sum += coeff * values.period;
        break;
      case VarKind::kSlack:
        sum += coeff * values.slack;
        break;
      case VarKind::kLatency:
        sum += coeff * values.latency;
        break;
    }
  }
  return sum;
}

double TimingConstraint::lhs_value(const VariableValues& values) const
{
  return lhs.evaluate(values) - timing(values.period);
}

double TimingConstraint::margin(const VariableValues& values) const
{
  const double value = lhs_value(values);
  return kind == ConstraintKind::kSetup ? value - rhs : rhs - value;
}

double delta_clk(const Gate& src, const Gate& dst)
{
  return dst.clock_offset_ps - src.clock_offset_ps;
}

double delta_clk(const Circuit& circuit, const Connection& connection)
{
  GateLookup lookup(circuit);
  return delta_clk(lookup.at(connection.src), lookup.at(connection.dst));
}

PiecewiseLinear setup_function(const CellTiming& src, const CellTiming& dst)
{
  return src.c2q + dst.setup;
}

PiecewiseLinear hold_function(const CellTiming& src, const CellTiming& dst, HoldMode mode)
{
  if (mode == HoldMode::kDlplace) {
    const std::span<const double> bp = src.c2q.breakpoints();
    return src.c2q + PiecewiseLinear::identity({bp.begin(), bp.end()}) - dst.hold;
  }
  return src.c2q + src.rd - dst.hold;
}

TimingConstraintSet build_constraints(const Circuit& circuit, const CellLibrary& library,
                                      const OptimizationConfig& config)
{
  if (auto diagnostics = validate_circuit(circuit, library); has_errors(diagnostics)) {
    throw Error(std::string(codes::kInvalidCircuit), std::move(diagnostics));
  }
  if (auto diagnostics = validate_config(config); has_errors(diagnostics)) {
    throw Error(std::string(codes::kInvalidConfig), std::move(diagnostics));
  }

  TimingConstraintSet set;
  set.num_rows = circuit.num_rows;
  set.hold_mode = config.hold_mode;
  set.breakpoints = library.breakpoints_ps;

  const double bp_lo = library.breakpoints_ps.front();
  const double bp_hi = library.breakpoints_ps.back();
  set.bounds.s_min = config.s_min;
  set.bounds.s_max = config.s_max;
  set.bounds.t_min = std::clamp(config.t_min_override.value_or(library.min_supported_period()),
                                bp_lo, bp_hi);
  set.bounds.t_max = std::clamp(config.t_max_override.value_or(library.t_max_ps), bp_lo, bp_hi);
  set.bounds.delta_max = config.delta_max;

  set.latency_definition.coefficients.push_back({Variable{VarKind::kLatency, 0}, 1.0});
  for (std::size_t r = 0; r < set.num_deltas(); ++r) {
    set.latency_definition.coefficients.push_back(
        {Variable{VarKind::kDelta, static_cast<int>(r)}, -1.0});
  }

  // Combined timing functions are shared by every connection with the same cell pair.
  std::map<std::pair<std::string_view, std::string_view>,
           std::pair<PiecewiseLinear, PiecewiseLinear>>
      functions;
  GateLookup lookup(circuit);
  set.constraints.reserve(2 * circuit.connections.size());
  for (std::size_t ci = 0; ci < circuit.connections.size(); ++ci) {
    const Connection& conn = circuit.connections[ci];
    const Gate& src = lookup.at(conn.src);
    const Gate& dst = lookup.at(conn.dst);
    const std::string id = connection_id(conn);
    const int span = dst.row - src.row;
    if (span > config.max_span) {
      throw Error(std::string(codes::kUnsupportedSkip), id,
                  "connection spans " + std::to_string(span) + " rows; maximum is "
                      + std::to_string(config.max_span));
    }

    auto key = std::make_pair(std::string_view(src.cell), std::string_view(dst.cell));
    auto it = functions.find(key);
    if (it == functions.end()) {
      const CellTiming& src_timing = library.cell(src.cell);
      const CellTiming& dst_timing = library.cell(dst.cell);
      it = functions
               .emplace(key, std::make_pair(setup_function(src_timing, dst_timing),
                                            hold_function(src_timing, dst_timing,
                                                          config.hold_mode)))
               .first;
    }

    const double rhs = propagation_delay(conn, library) - delta_clk(src, dst);
    LinearTerm crossed;
    for (int r = src.row; r < dst.row; ++r) {
      crossed.coefficients.push_back({Variable{VarKind::kDelta, r}, 1.0});
    }

    TimingConstraint setup;
    setup.kind = ConstraintKind::kSetup;
    setup.connection = ci;
    setup.connection_id = id;
    setup.from_row = src.row;
    setup.to_row = dst.row;
    setup.sense = Sense::kGreaterEqual;
    setup.lhs = crossed;
    setup.lhs.coefficients.push_back({Variable{VarKind::kSlack, 0}, -1.0});
    setup.timing = it->second.first;
    setup.rhs = rhs;

    TimingConstraint hold = setup;
    hold.kind = ConstraintKind::kHold;
    hold.sense = Sense::kLessEqual;
    hold.lhs.coefficients.back().second = 1.0;
    hold.timing = it->second.second;

    set.constraints.push_back(std::move(setup));
    set.constraints.push_back(std::move(hold));
  }
  return set;
}

SlackReport sta_check(const Circuit& circuit, const CellLibrary& library,
                      const Schedule& schedule, HoldMode hold_mode)
{
  const std::size_t expected = circuit.num_rows > 1 ? static_cast<std::size_t>(circuit.num_rows - 1) : 0;
  if (schedule.row_deltas_ps.size() != expected) {
    throw Error(std::string(codes::kSchemaMismatch), circuit.name,
                "schedule has " + std::to_string(schedule.row_deltas_ps.size())
                    + " row deltas; circuit needs " + std::to_string(expected));
  }

  // Cumulative inserted delay ahead of each row.
  std::vector<double> inserted(static_cast<std::size_t>(std::max(circuit.num_rows, 1)), 0.0);
  for (std::size_t r = 1; r < inserted.size(); ++r) {
    inserted[r] = inserted[r - 1] + schedule.row_deltas_ps[r - 1];
  }

  const double period = schedule.period_ps;
  GateLookup lookup(circuit);
  SlackReport report;
  report.entries.reserve(circuit.connections.size());
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < circuit.connections.size(); ++ci) {
    const Connection& conn = circuit.connections[ci];
    const Gate& src = lookup.at(conn.src);
    const Gate& dst = lookup.at(conn.dst);
    const CellTiming& src_timing = library.cell(src.cell);
    const CellTiming& dst_timing = library.cell(dst.cell);

    const double clk_i = src.clock_offset_ps + inserted[static_cast<std::size_t>(src.row)];
    const double clk_j = dst.clock_offset_ps + inserted[static_cast<std::size_t>(dst.row)];
    const double c2q = pwl_eval(src_timing.c2q, period);
    const double setup = pwl_eval(dst_timing.setup, period);
    const double hold = pwl_eval(dst_timing.hold, period);
    const double rd = hold_mode == HoldMode::kDlplace ? period : pwl_eval(src_timing.rd, period);
    const double prop = propagation_delay(conn, library);

    // clk_i + c2q_i + prop_ij <= clk_j - setup_j
    const double setup_slack = (clk_j - setup) - (clk_i + c2q + prop);
    // clk_i + c2q_i + prop_ij + rd_i >= clk_j + hold_j
    const double hold_slack = (clk_i + c2q + prop + rd) - (clk_j + hold);

    report.entries.push_back({ci, conn.src, conn.dst, setup_slack, hold_slack});
    worst = std::min({worst, setup_slack, hold_slack});
  }
  if (!report.entries.empty()) {
    report.min_slack_ps = worst;
    for (const ConnectionSlack& e : report.entries) {
      if (std::min(e.setup_slack_ps, e.hold_slack_ps) <= worst) {
        report.worst.push_back(e.src + "->" + e.dst);
      }
    }
  }
  return report;
}

}  // namespace qpro
