// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qpro/lp.hpp"
#include "qpro/model.hpp"
#include "qpro/timing.hpp"

namespace qpro {

// Lower end of a segment interval that sits on a breakpoint belongs to the
// previous segment; the LP approaches it from above by this much.
inline constexpr double kOpenBoundaryOffset = 1e-6;

/// The affine piece of every timing function active on one period interval.
struct SegmentRestriction
{
  std::size_t index = 0;
  double period_lo = 0.0;
  double period_hi = 0.0;
  bool pruned = false;
  // forms[i] is constraint i's timing function on this segment.
  std::vector<Segment> forms;
};

// One restriction per breakpoint interval, intersected with the period bounds.
std::vector<SegmentRestriction> restrict_segments(const TimingConstraintSet& constraints);

struct StageObjective
{
  double period = 0.0;
  double slack = 0.0;  // coefficient on S in the minimized objective
  double latency = 0.0;
};

struct StageBounds
{
  std::optional<double> period_max;
  std::optional<double> latency_max;
  std::optional<double> slack_min;
};

/// LP of one segment. Variables are delta_0.., T, S in that order; latency is
/// the sum of the deltas.
struct SegmentLp
{
  LpProblem problem;
  std::size_t period = 0;
  std::size_t slack = 0;
  // LP row -> index into TimingConstraintSet::constraints, or npos for the
  // latency bound.
  std::vector<std::size_t> row_constraint;
  // Constraints dropped because another row of the same shape dominates them
  // on the segment interval.
  std::size_t dominated = 0;
};

SegmentLp build_segment_lp(const TimingConstraintSet& constraints, const SegmentRestriction& segment,
                           const StageObjective& objective, const StageBounds& bounds = {});

// Weighted objective tau*T - sigma*S + lambda*L on one segment.
LpSolution solve_segment(const TimingConstraintSet& constraints, const SegmentRestriction& segment,
                         const OptimizationConfig& config);

struct ConstraintResidual
{
  std::size_t constraint = 0;
  std::string label;
  double residual = 0.0;
};

/// Thrown when every segment is infeasible. Carries the phase-1 residuals of
/// the least-violating segment, largest first.
class InfeasibleError : public Error
{
 public:
  InfeasibleError(std::size_t segment, double infeasibility, std::vector<ConstraintResidual> residuals);

  std::size_t segment() const { return segment_; }
  double infeasibility() const { return infeasibility_; }
  const std::vector<ConstraintResidual>& residuals() const { return residuals_; }

 private:
  std::size_t segment_;
  double infeasibility_;
  std::vector<ConstraintResidual> residuals_;
};

struct SegmentOutcome
{
  std::size_t stage = 0;
  std::size_t segment = 0;
  bool pruned = false;
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::size_t lp_rows = 0;
  std::size_t iterations = 0;
};

struct OptimizationTrace
{
  std::vector<SegmentOutcome> outcomes;
  std::size_t segments = 0;
  std::size_t lp_solves = 0;
  std::size_t stages = 0;
};

/// Solves the clock-schedule program by enumerating linearization segments.
///
/// Weighted mode solves each segment once and keeps the smallest objective.
/// Lexicographic mode optimizes config.priority in order, fixing each
/// criterion within config.fix_tolerance before the next. Ties between
/// segments go to the lower index.
///
/// Throws InfeasibleError when no segment admits a schedule and
/// Error(NO_SEGMENT) when the period bounds leave no segment at all.
Schedule optimize_schedule(const TimingConstraintSet& constraints, const CellLibrary& library,
                           const OptimizationConfig& config, OptimizationTrace* trace = nullptr);

struct ExploreRow
{
  OptimizationConfig config;
  std::optional<Schedule> schedule;
  std::optional<double> min_slack_ps;
  std::string error;
};

// Runs optimize_schedule per configuration; failures are recorded per row.
std::vector<ExploreRow> explore(const Circuit& circuit, const CellLibrary& library,
                                const std::vector<OptimizationConfig>& configs);

}  // namespace qpro
