// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace qpro {

namespace {

constexpr std::size_t kNoConstraint = static_cast<std::size_t>(-1);
constexpr std::size_t kReportedResiduals = 10;

bool better(double candidate, double incumbent)
{
  return candidate < incumbent - 1e-9 * std::max(1.0, std::abs(incumbent));
}

struct Candidate
{
  std::size_t constraint;
  double slope;     // on T
  double constant;  // bound at T = 0
};

// Setup rows want the largest bound, hold rows the smallest. Returns true when
// `a` makes `b` redundant over [lo, hi].
bool dominates(const Candidate& a, const Candidate& b, bool setup, double lo, double hi)
{
  const double a_lo = a.constant + a.slope * lo;
  const double a_hi = a.constant + a.slope * hi;
  const double b_lo = b.constant + b.slope * lo;
  const double b_hi = b.constant + b.slope * hi;
  if (setup) {
    if (a_lo < b_lo || a_hi < b_hi) {
      return false;
    }
    return a_lo > b_lo || a_hi > b_hi || a.constraint < b.constraint;
  }
  if (a_lo > b_lo || a_hi > b_hi) {
    return false;
  }
  return a_lo < b_lo || a_hi < b_hi || a.constraint < b.constraint;
}

Schedule to_schedule(const SegmentLp& lp, const LpSolution& solution, std::size_t num_deltas,
                     std::size_t segment)
{
  Schedule schedule;
  schedule.period_ps = solution.values[lp.period];
  schedule.slack_ps = solution.values[lp.slack];
  schedule.segment_index = segment;
  schedule.row_deltas_ps.resize(num_deltas);
  double latency = 0.0;
  for (std::size_t r = 0; r < num_deltas; ++r) {
    const double delta = std::max(0.0, solution.values[r]);
    schedule.row_deltas_ps[r] = delta;
    latency += delta;
  }
  schedule.latency_ps = latency;
  return schedule;
}

std::string constraint_label(const TimingConstraint& c)
{
  return std::string(c.kind == ConstraintKind::kSetup ? "setup " : "hold ") + c.connection_id;
}

}  // namespace

std::vector<SegmentRestriction> restrict_segments(const TimingConstraintSet& constraints)
{
  const auto& bp = constraints.breakpoints;
  std::vector<SegmentRestriction> out;
  if (bp.size() < 2) {
    return out;
  }
  const double t_min = constraints.bounds.t_min;
  const double t_max = constraints.bounds.t_max;
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    SegmentRestriction seg;
    seg.index = k;
    seg.period_lo = t_min > bp[k] ? t_min : bp[k] + kOpenBoundaryOffset;
    seg.period_hi = std::min(bp[k + 1], t_max);
    seg.pruned = seg.period_lo > seg.period_hi;
    seg.forms.reserve(constraints.constraints.size());
    for (const TimingConstraint& c : constraints.constraints) {
      seg.forms.push_back(c.timing.segments()[k]);
    }
    out.push_back(std::move(seg));
  }
  return out;
}

SegmentLp build_segment_lp(const TimingConstraintSet& constraints, const SegmentRestriction& segment,
                           const StageObjective& objective, const StageBounds& bounds)
{
  SegmentLp lp;
  LpProblem& p = lp.problem;
  const std::size_t num_deltas = constraints.num_deltas();
  const TimingBounds& box = constraints.bounds;

  for (std::size_t r = 0; r < num_deltas; ++r) {
    p.add_variable("delta_" + std::to_string(r), 0.0, box.delta_max);
  }
  double period_hi = segment.period_hi;
  if (bounds.period_max) {
    period_hi = std::min(period_hi, *bounds.period_max);
  }
  lp.period = p.add_variable("T", segment.period_lo, period_hi);
  lp.slack = p.add_variable("S", std::max(box.s_min, bounds.slack_min.value_or(box.s_min)),
                            box.s_max);

  // Rows that share kind and row span differ only in their bound as a
  // function of T; keep the ones that can bind somewhere on the segment.
  std::unordered_map<std::uint64_t, std::size_t> group_of;
  std::vector<std::vector<Candidate>> groups;
  std::vector<bool> group_is_setup;
  for (std::size_t i = 0; i < constraints.constraints.size(); ++i) {
    const TimingConstraint& c = constraints.constraints[i];
    const bool setup = c.kind == ConstraintKind::kSetup;
    const std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.from_row)) << 33)
                              | (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.to_row)) << 1)
                              | (setup ? 1U : 0U);
    auto [it, inserted] = group_of.emplace(key, groups.size());
    if (inserted) {
      groups.emplace_back();
      group_is_setup.push_back(setup);
    }
    // setup: sum - S - a T >= rhs + b ; hold: sum + S - a T <= rhs + b
    const Segment& form = segment.forms[i];
    Candidate cand{i, form.slope, c.rhs + form.intercept};
    std::vector<Candidate>& group = groups[it->second];
    auto same_slope = std::find_if(group.begin(), group.end(), [&](const Candidate& other) {
      return other.slope == cand.slope;
    });
    if (same_slope == group.end()) {
      group.push_back(cand);
    } else {
      const bool replace = setup ? cand.constant > same_slope->constant
                                 : cand.constant < same_slope->constant;
      if (replace) {
        *same_slope = cand;
      }
      ++lp.dominated;
    }
  }

  std::vector<std::size_t> kept;
  kept.reserve(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const std::vector<Candidate>& group = groups[g];
    for (std::size_t a = 0; a < group.size(); ++a) {
      bool redundant = false;
      for (std::size_t b = 0; b < group.size() && !redundant; ++b) {
        redundant = b != a && dominates(group[b], group[a], group_is_setup[g], segment.period_lo,
                                        period_hi);
      }
      if (redundant) {
        ++lp.dominated;
      } else {
        kept.push_back(group[a].constraint);
      }
    }
  }
  std::sort(kept.begin(), kept.end());

  // A single-row hold constraint that caps delta_r below delta_max everywhere
  // on the segment makes the explicit upper bound redundant.
  const double slack_lo = p.variables()[lp.slack].lower;
  for (std::size_t i : kept) {
    const TimingConstraint& c = constraints.constraints[i];
    if (c.kind != ConstraintKind::kHold || c.to_row - c.from_row != 1) {
      continue;
    }
    const Segment& form = segment.forms[i];
    const double cap = c.rhs + std::max(form.at(segment.period_lo), form.at(period_hi)) - slack_lo;
    if (cap <= box.delta_max) {
      p.set_bounds(static_cast<std::size_t>(c.from_row), 0.0, kInfinity);
    }
  }

  for (std::size_t i : kept) {
    const TimingConstraint& c = constraints.constraints[i];
    const Segment& form = segment.forms[i];
    std::vector<LpTerm> terms;
    terms.reserve(static_cast<std::size_t>(c.to_row - c.from_row) + 2);
    for (int r = c.from_row; r < c.to_row; ++r) {
      terms.push_back({static_cast<std::size_t>(r), 1.0});
    }
    const bool setup = c.kind == ConstraintKind::kSetup;
    terms.push_back({lp.slack, setup ? -1.0 : 1.0});
    if (form.slope != 0.0) {
      terms.push_back({lp.period, -form.slope});
    }
    p.add_constraint(std::move(terms), c.sense, c.rhs + form.intercept, constraint_label(c));
    lp.row_constraint.push_back(i);
  }

  // Latency is the sum of the deltas. It only gets a (dense) row once it is
  // bounded, which keeps the tableau sparse in the other stages.
  if (bounds.latency_max) {
    std::vector<LpTerm> latency_row;
    latency_row.reserve(num_deltas);
    for (std::size_t r = 0; r < num_deltas; ++r) {
      latency_row.push_back({r, 1.0});
    }
    p.add_constraint(std::move(latency_row), Sense::kLessEqual, *bounds.latency_max, "latency");
    lp.row_constraint.push_back(kNoConstraint);
  }

  std::vector<LpTerm> cost;
  if (objective.period != 0.0) {
    cost.push_back({lp.period, objective.period});
  }
  if (objective.slack != 0.0) {
    cost.push_back({lp.slack, objective.slack});
  }
  if (objective.latency != 0.0) {
    for (std::size_t r = 0; r < num_deltas; ++r) {
      cost.push_back({r, objective.latency});
    }
  }
  p.set_objective(std::move(cost));
  return lp;
}

LpSolution solve_segment(const TimingConstraintSet& constraints, const SegmentRestriction& segment,
                         const OptimizationConfig& config)
{
  const SegmentLp lp = build_segment_lp(constraints, segment,
                                        {config.tau, -config.sigma, config.lambda});
  return lp_solve(lp.problem, SimplexOptions{config.tolerances});
}

InfeasibleError::InfeasibleError(std::size_t segment, double infeasibility,
                                 std::vector<ConstraintResidual> residuals)
    : Error(std::string(codes::kInfeasible), "segment " + std::to_string(segment),
            [&] {
              std::ostringstream msg;
              msg << "no feasible schedule in any segment; least-violating segment "
                  << segment << " has phase-1 residual " << infeasibility;
              for (const ConstraintResidual& r : residuals) {
                msg << "; " << r.label << " (" << r.residual << ")";
              }
              return msg.str();
            }()),
      segment_(segment),
      infeasibility_(infeasibility),
      residuals_(std::move(residuals))
{
}

namespace {

struct StageResult
{
  std::optional<std::size_t> best;
  std::optional<SegmentLp> best_lp;
  LpSolution best_solution;
  // Least-violating infeasible segment, for diagnostics.
  std::optional<std::size_t> least_violating;
  LpSolution least_solution;
  std::optional<SegmentLp> least_lp;
};

StageResult run_stage(const TimingConstraintSet& constraints,
                      const std::vector<SegmentRestriction>& segments,
                      const StageObjective& objective, const StageBounds& bounds,
                      const OptimizationConfig& config, std::size_t stage,
                      OptimizationTrace* trace)
{
  StageResult result;
  for (const SegmentRestriction& seg : segments) {
    SegmentOutcome outcome;
    outcome.stage = stage;
    outcome.segment = seg.index;
    const double hi = bounds.period_max ? std::min(seg.period_hi, *bounds.period_max) : seg.period_hi;
    if (seg.pruned || seg.period_lo > hi) {
      outcome.pruned = true;
      if (trace) {
        trace->outcomes.push_back(outcome);
      }
      continue;
    }
    SegmentLp lp = build_segment_lp(constraints, seg, objective, bounds);
    LpSolution solution = lp_solve(lp.problem, SimplexOptions{config.tolerances});
    outcome.status = solution.status;
    outcome.objective = solution.status == LpStatus::kOptimal ? solution.objective
                                                              : solution.infeasibility;
    outcome.lp_rows = lp.problem.constraints().size();
    outcome.iterations = solution.iterations;
    if (trace) {
      trace->outcomes.push_back(outcome);
      ++trace->lp_solves;
    }
    if (solution.status == LpStatus::kUnbounded) {
      throw Error(std::string(codes::kBadLp), "segment " + std::to_string(seg.index),
                  "segment program is unbounded");
    }
    if (solution.status == LpStatus::kInfeasible) {
      if (!result.least_violating || solution.infeasibility < result.least_solution.infeasibility) {
        result.least_violating = seg.index;
        result.least_solution = std::move(solution);
        result.least_lp = std::move(lp);
      }
      continue;
    }
    if (!result.best || better(solution.objective, result.best_solution.objective)) {
      result.best = seg.index;
      result.best_solution = std::move(solution);
      result.best_lp = std::move(lp);
    }
  }
  return result;
}

[[noreturn]] void throw_infeasible(const TimingConstraintSet& constraints, StageResult& stage)
{
  if (!stage.least_violating) {
    throw Error(std::string(codes::kNoSegment), "",
                "period bounds leave no linearization segment to solve");
  }
  std::vector<ConstraintResidual> residuals;
  const LpSolution& s = stage.least_solution;
  for (std::size_t row = 0; row < s.residuals.size(); ++row) {
    if (s.residuals[row] <= 0.0) {
      continue;
    }
    const std::size_t ci = stage.least_lp->row_constraint[row];
    if (ci == kNoConstraint) {
      residuals.push_back({ci, "latency", s.residuals[row]});
    } else {
      residuals.push_back({ci, constraint_label(constraints.constraints[ci]), s.residuals[row]});
    }
  }
  std::stable_sort(residuals.begin(), residuals.end(),
                   [](const ConstraintResidual& a, const ConstraintResidual& b) {
                     return a.residual > b.residual;
                   });
  if (residuals.size() > kReportedResiduals) {
    residuals.resize(kReportedResiduals);
  }
  throw InfeasibleError(*stage.least_violating, s.infeasibility, std::move(residuals));
}

StageObjective unit_objective(Criterion criterion)
{
  switch (criterion) {
    case Criterion::kPeriod:
      return {1.0, 0.0, 0.0};
    case Criterion::kLatency:
      return {0.0, 0.0, 1.0};
    case Criterion::kSlack:
      return {0.0, -1.0, 0.0};
  }
  return {};
}

}  // namespace

Schedule optimize_schedule(const TimingConstraintSet& constraints, const CellLibrary& library,
                           const OptimizationConfig& config, OptimizationTrace* trace)
{
  if (auto diagnostics = validate_config(config); has_errors(diagnostics)) {
    throw Error(std::string(codes::kInvalidConfig), std::move(diagnostics));
  }
  if (constraints.breakpoints != library.breakpoints_ps) {
    throw Error(std::string(codes::kSharedBreakpointsRequired), "",
                "constraint set was built against a different library");
  }
  const std::vector<SegmentRestriction> segments = restrict_segments(constraints);
  if (trace) {
    trace->segments = segments.size();
  }

  if (config.priority_mode == PriorityMode::kWeighted) {
    StageResult stage = run_stage(constraints, segments, {config.tau, -config.sigma, config.lambda},
                                  {}, config, 0, trace);
    if (trace) {
      trace->stages = 1;
    }
    if (!stage.best) {
      throw_infeasible(constraints, stage);
    }
    return to_schedule(*stage.best_lp, stage.best_solution, constraints.num_deltas(), *stage.best);
  }

  StageBounds bounds;
  std::optional<Schedule> schedule;
  std::size_t stage_index = 0;
  for (Criterion criterion : config.priority) {
    StageResult stage = run_stage(constraints, segments, unit_objective(criterion), bounds, config,
                                  stage_index++, trace);
    if (!stage.best) {
      throw_infeasible(constraints, stage);
    }
    const LpSolution& s = stage.best_solution;
    switch (criterion) {
      case Criterion::kPeriod:
        bounds.period_max = s.values[stage.best_lp->period] + config.fix_tolerance;
        break;
      case Criterion::kLatency: {
        const std::size_t n = constraints.num_deltas();
        bounds.latency_max = std::accumulate(s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(n), 0.0)
                             + config.fix_tolerance;
        break;
      }
      case Criterion::kSlack:
        bounds.slack_min = s.values[stage.best_lp->slack] - config.fix_tolerance;
        break;
    }
    schedule = to_schedule(*stage.best_lp, s, constraints.num_deltas(), *stage.best);
  }
  if (trace) {
    trace->stages = stage_index;
  }
  return *schedule;
}

std::vector<ExploreRow> explore(const Circuit& circuit, const CellLibrary& library,
                                const std::vector<OptimizationConfig>& configs)
{
  std::vector<ExploreRow> rows;
  rows.reserve(configs.size());
  for (const OptimizationConfig& config : configs) {
    ExploreRow row;
    row.config = config;
    try {
      const TimingConstraintSet tcs = build_constraints(circuit, library, config);
      Schedule schedule = optimize_schedule(tcs, library, config);
      row.min_slack_ps = sta_check(circuit, library, schedule, config.hold_mode).min_slack_ps;
      row.schedule = std::move(schedule);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace qpro
