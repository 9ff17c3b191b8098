// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qpro {

namespace {

constexpr double kJumpTolerance = 1e-9;
constexpr int kResetSamplesPerSegment = 100;

std::string describe_interval(double lo, double hi)
{
  std::ostringstream out;
  out << "(" << lo << ", " << hi << "]";
  return out.str();
}

void check_breakpoints(const std::vector<double>& breakpoints)
{
  if (breakpoints.size() < 2) {
    throw Error(std::string(codes::kBadBreakpoints), "", "need at least two breakpoints");
  }
  if (!std::isfinite(breakpoints.front()) || breakpoints.front() < 0.0) {
    throw Error(std::string(codes::kBadBreakpoints), "", "first breakpoint must be >= 0");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || !(breakpoints[i] > breakpoints[i - 1])) {
      throw Error(std::string(codes::kBadBreakpoints), "", "breakpoints must be strictly increasing");
    }
  }
}

}  // namespace

PiecewiseLinear::PiecewiseLinear(std::vector<double> breakpoints, std::vector<Segment> segments)
    : breakpoints_(std::move(breakpoints)), segments_(std::move(segments))
{
  check_breakpoints(breakpoints_);
  if (segments_.size() + 1 != breakpoints_.size()) {
    std::ostringstream msg;
    msg << segments_.size() << " segments for " << breakpoints_.size() << " breakpoints";
    throw Error(std::string(codes::kArityMismatch), "", msg.str());
  }
  for (const Segment& s : segments_) {
    if (!std::isfinite(s.slope) || !std::isfinite(s.intercept)) {
      throw Error(std::string(codes::kBadValue), "", "non-finite segment coefficient");
    }
  }
}

PiecewiseLinear PiecewiseLinear::constant(std::vector<double> breakpoints, double value)
{
  std::vector<Segment> segments(breakpoints.size() > 0 ? breakpoints.size() - 1 : 0,
                                Segment{0.0, value});
  return PiecewiseLinear(std::move(breakpoints), std::move(segments));
}

PiecewiseLinear PiecewiseLinear::identity(std::vector<double> breakpoints)
{
  std::vector<Segment> segments(breakpoints.size() > 0 ? breakpoints.size() - 1 : 0,
                                Segment{1.0, 0.0});
  return PiecewiseLinear(std::move(breakpoints), std::move(segments));
}

std::size_t PiecewiseLinear::segment_index(double t) const
{
  if (segments_.empty() || !(t > breakpoints_.front()) || !(t <= breakpoints_.back())) {
    if (segments_.empty()) {
      throw Error(std::string(codes::kDomain), "", "evaluating an empty function");
    }
    throw Error(std::string(codes::kDomain), "",
                "period " + std::to_string(t) + " outside "
                    + describe_interval(breakpoints_.front(), breakpoints_.back()));
  }
  // First breakpoint >= t closes the owning segment.
  auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), t);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewiseLinear::operator()(double t) const
{
  return segments_[segment_index(t)].at(t);
}

double PiecewiseLinear::max_jump() const
{
  double jump = 0.0;
  for (std::size_t k = 0; k + 1 < segments_.size(); ++k) {
    const double at = breakpoints_[k + 1];
    jump = std::max(jump, std::abs(segments_[k].at(at) - segments_[k + 1].at(at)));
  }
  return jump;
}

PiecewiseLinear PiecewiseLinear::operator+(const PiecewiseLinear& other) const
{
  if (breakpoints_ != other.breakpoints_) {
    throw Error(std::string(codes::kSharedBreakpointsRequired), "",
                "cannot combine functions over different breakpoints");
  }
  std::vector<Segment> sum(segments_.size());
  for (std::size_t k = 0; k < sum.size(); ++k) {
    sum[k] = {segments_[k].slope + other.segments_[k].slope,
              segments_[k].intercept + other.segments_[k].intercept};
  }
  return PiecewiseLinear(breakpoints_, std::move(sum));
}

PiecewiseLinear PiecewiseLinear::operator-(const PiecewiseLinear& other) const
{
  if (breakpoints_ != other.breakpoints_) {
    throw Error(std::string(codes::kSharedBreakpointsRequired), "",
                "cannot combine functions over different breakpoints");
  }
  std::vector<Segment> diff(segments_.size());
  for (std::size_t k = 0; k < diff.size(); ++k) {
    diff[k] = {segments_[k].slope - other.segments_[k].slope,
               segments_[k].intercept - other.segments_[k].intercept};
  }
  return PiecewiseLinear(breakpoints_, std::move(diff));
}

double pwl_eval(const PiecewiseLinear& f, double t) { return f(t); }

const CellTiming& CellLibrary::cell(std::string_view name) const
{
  auto it = cells.find(name);
  if (it == cells.end()) {
    throw Error(std::string(codes::kUnknownCell), std::string(name), "cell type not in library");
  }
  return it->second;
}

bool CellLibrary::has_cell(std::string_view name) const { return cells.find(name) != cells.end(); }

double CellLibrary::min_supported_period() const
{
  double period = t_min_ps;
  if (max_frequency_ghz > 0.0) {
    period = std::max(period, 1000.0 / max_frequency_ghz);
  }
  return period;
}

std::vector<Diagnostic> validate_library(const CellLibrary& library)
{
  std::vector<Diagnostic> out;
  auto error = [&](std::string_view code, std::string entity, std::string message) {
    out.push_back({std::string(code), std::move(entity), std::move(message), Severity::kError});
  };
  auto warn = [&](std::string_view code, std::string entity, std::string message) {
    out.push_back({std::string(code), std::move(entity), std::move(message), Severity::kWarning});
  };

  if (library.cells.empty()) {
    error(codes::kEmptyLibrary, "", "library defines no cells");
  }
  const auto& bp = library.breakpoints_ps;
  bool breakpoints_ok = bp.size() >= 2 && bp.front() >= 0.0;
  for (std::size_t i = 1; breakpoints_ok && i < bp.size(); ++i) {
    breakpoints_ok = bp[i] > bp[i - 1];
  }
  if (!breakpoints_ok) {
    error(codes::kBadBreakpoints, "", "breakpoints must be >= 0 and strictly increasing");
  }
  if (!(library.l_buffer_um > 0.0) || !(library.l_max_drive_um > library.l_buffer_um)) {
    error(codes::kBadLibraryConstant, "l_max_drive_um",
          "require l_max_drive_um > l_buffer_um > 0");
  }
  if (!(library.prop_ps_per_um > 0.0)) {
    error(codes::kBadLibraryConstant, "prop_ps_per_um", "must be positive");
  }
  if (!(library.t_min_ps > 0.0) || !(library.t_max_ps > library.t_min_ps)) {
    error(codes::kBadLibraryConstant, "t_min_ps", "require 0 < t_min_ps < t_max_ps");
  }
  if (!(library.max_frequency_ghz > 0.0)) {
    error(codes::kBadLibraryConstant, "max_frequency_ghz", "must be positive");
  }
  if (breakpoints_ok
      && (bp.front() > library.t_min_ps || bp.back() < library.t_max_ps)) {
    error(codes::kBreakpointsDontSpan, "",
          "breakpoints must cover [t_min_ps, t_max_ps]");
  }

  for (const auto& [name, timing] : library.cells) {
    const std::pair<const char*, const PiecewiseLinear*> functions[] = {
        {"c2q", &timing.c2q}, {"setup", &timing.setup}, {"hold", &timing.hold}, {"rd", &timing.rd}};
    bool shared = true;
    for (const auto& [fname, f] : functions) {
      const std::string entity = name + "." + fname;
      if (f->empty() || !std::equal(f->breakpoints().begin(), f->breakpoints().end(), bp.begin(),
                                    bp.end())) {
        error(codes::kSharedBreakpointsRequired, entity,
              "function does not use the library breakpoints");
        shared = false;
        continue;
      }
      if (f->max_jump() > kJumpTolerance) {
        warn(codes::kDiscontinuous, entity, "discontinuous at an interior breakpoint");
      }
    }
    if (!shared || !breakpoints_ok) {
      continue;
    }
    // rd(T) < T on the modeled range.
    const double lo_range = library.t_min_ps;
    const double hi_range = library.t_max_ps;
    bool reported = false;
    for (std::size_t k = 0; k + 1 < bp.size() && !reported; ++k) {
      const double lo = std::max(bp[k], lo_range);
      const double hi = std::min(bp[k + 1], hi_range);
      if (hi < lo) {
        continue;
      }
      for (int i = 1; i <= kResetSamplesPerSegment && !reported; ++i) {
        const double t = lo + (hi - lo) * i / kResetSamplesPerSegment;
        const double rd = timing.rd.segments()[k].at(t);
        if (rd >= t) {
          warn(codes::kResetExceedsPeriod, name + ".rd",
               "rd(" + std::to_string(t) + ") = " + std::to_string(rd) + " >= period");
          reported = true;
        }
      }
    }
  }
  return out;
}

std::string connection_id(const Connection& connection)
{
  return connection.src + "->" + connection.dst;
}

double propagation_delay(const Connection& connection, const CellLibrary& library)
{
  if (connection.prop_ps) {
    return *connection.prop_ps;
  }
  return connection.length_um * library.prop_ps_per_um;
}

GateLookup::GateLookup(const Circuit& circuit) : circuit_(&circuit)
{
  index_.reserve(circuit.gates.size());
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    index_.emplace(circuit.gates[i].id, i);
  }
}

std::optional<std::size_t> GateLookup::find(std::string_view id) const
{
  auto it = index_.find(id);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

const Gate& GateLookup::at(std::string_view id) const { return circuit_->gates[index(id)]; }

std::size_t GateLookup::index(std::string_view id) const
{
  auto found = find(id);
  if (!found) {
    throw Error(std::string(codes::kUnknownGate), std::string(id), "no such gate");
  }
  return *found;
}

std::vector<Diagnostic> validate_structure(const Circuit& circuit)
{
  std::vector<Diagnostic> out;
  auto error = [&](std::string_view code, std::string entity, std::string message) {
    out.push_back({std::string(code), std::move(entity), std::move(message), Severity::kError});
  };

  if (circuit.num_rows < 0) {
    error(codes::kBadValue, "num_rows", "must be >= 0");
  }
  std::unordered_map<std::string_view, std::size_t> seen;
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const Gate& g = circuit.gates[i];
    if (g.id.empty()) {
      error(codes::kBadValue, "", "gate with empty id");
    }
    if (!seen.emplace(g.id, i).second) {
      error(codes::kDuplicateId, g.id, "gate id appears more than once");
    }
    if (g.row < 0 || g.row >= circuit.num_rows) {
      error(codes::kRowOutOfRange, g.id,
            "row " + std::to_string(g.row) + " not in [0, " + std::to_string(circuit.num_rows)
                + ")");
    }
    if (!std::isfinite(g.clock_offset_ps)) {
      error(codes::kBadValue, g.id, "clock offset must be finite");
    }
  }

  for (const Connection& c : circuit.connections) {
    const std::string id = connection_id(c);
    auto src = seen.find(c.src);
    auto dst = seen.find(c.dst);
    if (src == seen.end()) {
      error(codes::kUnknownGate, id, "unknown source gate '" + c.src + "'");
    }
    if (dst == seen.end()) {
      error(codes::kUnknownGate, id, "unknown sink gate '" + c.dst + "'");
    }
    if (src != seen.end() && dst != seen.end()) {
      const int from = circuit.gates[src->second].row;
      const int to = circuit.gates[dst->second].row;
      if (to <= from) {
        error(codes::kNonmonotoneRow, id,
              "sink row " + std::to_string(to) + " must exceed source row "
                  + std::to_string(from));
      }
    }
    if (!std::isfinite(c.length_um) || c.length_um < 0.0) {
      error(codes::kBadValue, id, "length must be finite and >= 0");
    }
    if (c.prop_ps && (!std::isfinite(*c.prop_ps) || *c.prop_ps < 0.0)) {
      error(codes::kBadValue, id, "prop_ps must be finite and >= 0");
    }
  }

  // Serpentine order is list order within a row.
  std::unordered_map<int, const Gate*> last_in_row;
  for (const Gate& g : circuit.gates) {
    auto [it, inserted] = last_in_row.emplace(g.row, &g);
    if (!inserted) {
      if (g.clock_offset_ps < it->second->clock_offset_ps) {
        out.push_back({std::string(codes::kClockOffsetOrder), g.id,
                       "clock offset decreases along row " + std::to_string(g.row),
                       Severity::kWarning});
      }
      it->second = &g;
    }
  }
  return out;
}

std::vector<Diagnostic> validate_circuit(const Circuit& circuit, const CellLibrary& library)
{
  std::vector<Diagnostic> out = validate_structure(circuit);
  for (const Gate& g : circuit.gates) {
    if (!library.has_cell(g.cell)) {
      out.push_back({std::string(codes::kUnknownCell), g.id,
                     "cell type '" + g.cell + "' not in library", Severity::kError});
    }
  }
  for (const Connection& c : circuit.connections) {
    if (c.length_um > library.l_max_drive_um) {
      out.push_back({std::string(codes::kLengthExceedsDrive), connection_id(c),
                     "length " + std::to_string(c.length_um) + " um exceeds l_max_drive "
                         + std::to_string(library.l_max_drive_um) + " um",
                     Severity::kError});
    }
  }
  return out;
}

std::string_view to_string(HoldMode mode)
{
  return mode == HoldMode::kResetDelay ? "reset-delay" : "dlplace";
}

std::string_view to_string(Criterion criterion)
{
  switch (criterion) {
    case Criterion::kPeriod:
      return "period";
    case Criterion::kLatency:
      return "latency";
    case Criterion::kSlack:
      return "slack";
  }
  return "?";
}

std::optional<HoldMode> parse_hold_mode(std::string_view text)
{
  if (text == "reset-delay") {
    return HoldMode::kResetDelay;
  }
  if (text == "dlplace") {
    return HoldMode::kDlplace;
  }
  return std::nullopt;
}

std::optional<Criterion> parse_criterion(std::string_view text)
{
  if (text == "period") {
    return Criterion::kPeriod;
  }
  if (text == "latency") {
    return Criterion::kLatency;
  }
  if (text == "slack") {
    return Criterion::kSlack;
  }
  return std::nullopt;
}

std::vector<Diagnostic> validate_config(const OptimizationConfig& config)
{
  std::vector<Diagnostic> out;
  auto error = [&](std::string entity, std::string message) {
    out.push_back({std::string(codes::kInvalidConfig), std::move(entity), std::move(message),
                   Severity::kError});
  };
  if (!(config.s_min <= config.s_max)) {
    error("s_min", "s_min must not exceed s_max");
  }
  if (!(config.tau >= 0.0) || !(config.sigma >= 0.0) || !(config.lambda >= 0.0)) {
    error("weights", "weights must be nonnegative");
  }
  if (config.priority_mode == PriorityMode::kWeighted && config.tau == 0.0
      && config.sigma == 0.0 && config.lambda == 0.0) {
    error("weights", "at least one weight must be positive");
  }
  if (config.priority_mode == PriorityMode::kLexicographic) {
    std::set<Criterion> unique(config.priority.begin(), config.priority.end());
    if (config.priority.empty() || unique.size() != config.priority.size()) {
      error("priority", "priority must list distinct criteria");
    }
  }
  if (config.t_min_override && config.t_max_override
      && !(*config.t_min_override <= *config.t_max_override)) {
    error("t_min", "t_min override exceeds t_max override");
  }
  if (!(config.delta_max > 0.0)) {
    error("delta_max", "must be positive");
  }
  if (config.max_span < 1) {
    error("max_span", "must be >= 1");
  }
  if (!(config.fix_tolerance >= 0.0)) {
    error("fix_tolerance", "must be >= 0");
  }
  const SimplexTolerances& tol = config.tolerances;
  if (!(tol.feasibility > 0.0) || !(tol.optimality > 0.0) || !(tol.pivot > 0.0)) {
    error("tolerances", "simplex tolerances must be positive");
  }
  return out;
}

}  // namespace qpro
