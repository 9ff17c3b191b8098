// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "qpro/diagnostic.hpp"

// Domain types shared by the whole toolkit. Units: ps, um, GHz.

namespace qpro {

inline constexpr std::string_view kBufferCell = "buffer";

struct Segment
{
  double slope = 0.0;      // ps/ps
  double intercept = 0.0;  // ps

  double at(double t) const { return slope * t + intercept; }
  bool operator==(const Segment&) const = default;
};

/// Piecewise-linear function of the clock period.
///
/// Segment k covers (breakpoints[k], breakpoints[k+1]]; a period that falls
/// exactly on an interior breakpoint belongs to the lower-indexed segment.
class PiecewiseLinear
{
 public:
  PiecewiseLinear() = default;
  // Throws Error(ARITY_MISMATCH | BAD_BREAKPOINTS).
  PiecewiseLinear(std::vector<double> breakpoints, std::vector<Segment> segments);

  static PiecewiseLinear constant(std::vector<double> breakpoints, double value);
  static PiecewiseLinear identity(std::vector<double> breakpoints);

  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const Segment> segments() const { return segments_; }
  std::size_t segment_count() const { return segments_.size(); }
  bool empty() const { return segments_.empty(); }

  double lower() const { return breakpoints_.front(); }
  double upper() const { return breakpoints_.back(); }

  // Throws Error(DOMAIN_ERROR) outside (lower, upper].
  std::size_t segment_index(double t) const;
  double operator()(double t) const;

  // Largest |left limit - right value| over interior breakpoints.
  double max_jump() const;

  // Pointwise sum/difference; both operands must share breakpoints.
  PiecewiseLinear operator+(const PiecewiseLinear& other) const;
  PiecewiseLinear operator-(const PiecewiseLinear& other) const;

  bool operator==(const PiecewiseLinear&) const = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<Segment> segments_;
};

double pwl_eval(const PiecewiseLinear& f, double t);

struct CellTiming
{
  PiecewiseLinear c2q;
  PiecewiseLinear setup;
  PiecewiseLinear hold;
  PiecewiseLinear rd;

  bool operator==(const CellTiming&) const = default;
};

struct CellLibrary
{
  std::vector<double> breakpoints_ps;
  std::map<std::string, CellTiming, std::less<>> cells;
  double l_max_drive_um = 0.0;
  double l_buffer_um = 0.0;
  double prop_ps_per_um = 0.0;
  double t_min_ps = 0.0;
  double t_max_ps = 0.0;
  double max_frequency_ghz = 0.0;

  // Throws Error(UNKNOWN_CELL).
  const CellTiming& cell(std::string_view name) const;
  bool has_cell(std::string_view name) const;
  // Smallest period the library supports: max(t_min, 1000 / max_frequency).
  double min_supported_period() const;

  bool operator==(const CellLibrary&) const = default;
};

// Library invariants; warnings for discontinuities and rd >= T on a sampled grid.
std::vector<Diagnostic> validate_library(const CellLibrary& library);

struct Gate
{
  std::string id;
  std::string cell;
  int row = 0;
  double clock_offset_ps = 0.0;

  bool operator==(const Gate&) const = default;
};

struct Connection
{
  std::string src;
  std::string dst;
  double length_um = 0.0;
  std::optional<double> prop_ps;

  bool operator==(const Connection&) const = default;
};

struct Circuit
{
  std::string name;
  int num_rows = 0;
  std::vector<Gate> gates;
  std::vector<Connection> connections;

  bool operator==(const Circuit&) const = default;
};

std::string connection_id(const Connection& connection);

// Explicit prop_ps wins over length * prop_ps_per_um.
double propagation_delay(const Connection& connection, const CellLibrary& library);

/// Id -> index map over a circuit's gates. The circuit must outlive it.
class GateLookup
{
 public:
  explicit GateLookup(const Circuit& circuit);

  std::optional<std::size_t> find(std::string_view id) const;
  // Throws Error(UNKNOWN_GATE).
  const Gate& at(std::string_view id) const;
  std::size_t index(std::string_view id) const;

 private:
  const Circuit* circuit_;
  std::unordered_map<std::string_view, std::size_t> index_;
};

// Structural checks that need no library (ids, rows, row monotonicity).
std::vector<Diagnostic> validate_structure(const Circuit& circuit);
// Full check against a library. Empty iff every invariant holds.
std::vector<Diagnostic> validate_circuit(const Circuit& circuit, const CellLibrary& library);

struct Schedule
{
  double period_ps = 0.0;
  std::vector<double> row_deltas_ps;
  double slack_ps = 0.0;
  double latency_ps = 0.0;
  std::size_t segment_index = 0;

  bool operator==(const Schedule&) const = default;
};

inline double frequency_ghz(double period_ps) { return 1000.0 / period_ps; }

enum class HoldMode { kResetDelay, kDlplace };
enum class PriorityMode { kWeighted, kLexicographic };
enum class Criterion { kPeriod, kLatency, kSlack };

std::string_view to_string(HoldMode mode);
std::string_view to_string(Criterion criterion);
std::optional<HoldMode> parse_hold_mode(std::string_view text);
std::optional<Criterion> parse_criterion(std::string_view text);

struct SimplexTolerances
{
  double feasibility = 1e-7;
  double optimality = 1e-9;
  double pivot = 1e-11;

  bool operator==(const SimplexTolerances&) const = default;
};

struct OptimizationConfig
{
  double tau = 1.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double s_min = 0.0;
  double s_max = 50.0;
  std::optional<double> t_min_override;
  std::optional<double> t_max_override;
  HoldMode hold_mode = HoldMode::kResetDelay;
  PriorityMode priority_mode = PriorityMode::kLexicographic;
  std::vector<Criterion> priority = {Criterion::kPeriod, Criterion::kLatency, Criterion::kSlack};
  double delta_max = 10000.0;
  int max_span = 2;
  double fix_tolerance = 1e-6;
  SimplexTolerances tolerances;

  bool operator==(const OptimizationConfig&) const = default;
};

std::vector<Diagnostic> validate_config(const OptimizationConfig& config);

}  // namespace qpro
