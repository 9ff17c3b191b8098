// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/generate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <utility>

namespace qpro {
namespace {

PiecewiseLinear pwl(const std::vector<double>& bp, std::vector<Segment> segments)
{
  return PiecewiseLinear(bp, std::move(segments));
}

// std::uniform_real_distribution is implementation-defined; this is not.
class Rng
{
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
  std::size_t below(std::size_t n) { return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n))); }
  bool chance(double p) { return uniform() < p; }
  // Uniform on (0, hi].
  double positive(double hi) { return hi * (1.0 - uniform()); }

 private:
  std::mt19937_64 engine_;
};

struct Budget
{
  double offset_step = 0.0;   // row base advance
  double offset_width = 0.0;  // spread of offsets within a row
  double length_cap = 0.0;
};

Budget feasible_budget(const CellLibrary& lib)
{
  const double t = std::clamp(lib.t_max_ps, lib.breakpoints_ps.front(), lib.breakpoints_ps.back());
  double setup_hi = -std::numeric_limits<double>::infinity();
  double hold_lo = std::numeric_limits<double>::infinity();
  for (const auto& [src_name, src] : lib.cells) {
    for (const auto& [dst_name, dst] : lib.cells) {
      setup_hi = std::max(setup_hi, src.c2q(t) + dst.setup(t));
      hold_lo = std::min(hold_lo, src.c2q(t) + src.rd(t) - dst.hold(t));
    }
  }
  // With every delta at setup_hi + b, single-row windows need
  // hold_lo - setup_hi >= 2b and skip connections hold_lo - 2 setup_hi >= 3.5b.
  const double b = 0.25 * std::min((hold_lo - setup_hi) / 2.0, (hold_lo - 2.0 * setup_hi) / 3.5);
  if (!(b > 0.0)) {
    throw Error(std::string(codes::kBadValue), "library",
                "timing windows too narrow to generate a schedulable circuit");
  }
  return {b / 2.0, b / 2.0, std::min(lib.l_max_drive_um, b / lib.prop_ps_per_um)};
}

}  // namespace

CellLibrary default_library()
{
  const std::vector<double> bp = {100, 200, 300, 500};
  CellLibrary lib;
  lib.breakpoints_ps = bp;
  lib.l_max_drive_um = 500;
  lib.l_buffer_um = 40;
  lib.prop_ps_per_um = 0.01;
  lib.t_min_ps = 150;
  lib.t_max_ps = 500;
  lib.max_frequency_ghz = 5;

  const std::pair<const char*, double> cells[] = {
      {"buffer", 0.0}, {"majority3", 1.0}, {"splitter2", 0.4}, {"splitter3", 0.6}, {"splitter4", 0.8}};
  for (const auto& [name, extra] : cells) {
    CellTiming t;
    t.c2q = pwl(bp, {{0.02, 6 + extra}, {0.015, 7 + extra}, {0.01, 8.5 + extra}});
    const double half = extra / 2;
    t.setup = pwl(bp, {{0.01, 3 + half}, {0.01, 3 + half}, {0.01, 3 + half}});
    t.hold = pwl(bp, {{0.01, 3 + half}, {0.01, 3 + half}, {0.01, 3 + half}});
    t.rd = pwl(bp, {{0.36, 0}, {0.4, -8}, {0.3, 22}});
    lib.cells.emplace(name, std::move(t));
  }
  return lib;
}

CellLibrary reference_library()
{
  const std::vector<double> bp = {0, 100, 300};
  CellLibrary lib;
  lib.breakpoints_ps = bp;
  lib.l_max_drive_um = 100;
  lib.l_buffer_um = 10;
  lib.prop_ps_per_um = 0.05;
  lib.t_min_ps = 100;
  lib.t_max_ps = 300;
  lib.max_frequency_ghz = 10;
  for (const char* name : {"buffer", "majority3", "splitter2"}) {
    CellTiming t;
    t.c2q = PiecewiseLinear::constant(bp, 10);
    t.setup = PiecewiseLinear::constant(bp, 5);
    t.hold = PiecewiseLinear::constant(bp, 5);
    t.rd = pwl(bp, {{0.3, 6}, {0.36, 0}});
    lib.cells.emplace(name, std::move(t));
  }
  return lib;
}

Circuit generate_circuit(const GeneratorOptions& options, const CellLibrary& library)
{
  if (options.rows < 1 || options.width < 1) {
    throw Error(std::string(codes::kBadValue), "generator", "rows and width must be >= 1");
  }
  if (!(options.chain_prob >= 0 && options.chain_prob <= 1 && options.skip_prob >= 0
        && options.skip_prob <= 1)) {
    throw Error(std::string(codes::kBadValue), "generator", "probabilities must lie in [0, 1]");
  }
  if (auto diagnostics = validate_library(library); has_errors(diagnostics)) {
    throw Error(std::string(codes::kInvalidLibrary), std::move(diagnostics));
  }
  std::vector<std::string> logic_cells;
  for (const auto& [name, timing] : library.cells) {
    if (name != kBufferCell) {
      logic_cells.push_back(name);
    }
  }
  if (logic_cells.empty() || !library.has_cell(kBufferCell)) {
    throw Error(std::string(codes::kBadValue), "library", "need a buffer cell and at least one logic cell");
  }

  Budget budget;
  if (options.adversarial) {
    const double t = library.t_max_ps;
    double window = 0.0;
    for (const auto& [name, timing] : library.cells) {
      window = std::max(window, timing.rd(std::clamp(t, library.breakpoints_ps.front(),
                                                     library.breakpoints_ps.back())));
    }
    budget = {0.0, window, library.l_max_drive_um};
  } else {
    budget = feasible_budget(library);
  }

  Rng rng(options.seed);
  const auto rows = static_cast<std::size_t>(options.rows);
  const auto width = static_cast<std::size_t>(options.width);

  Circuit circuit;
  circuit.name = "gen_r" + std::to_string(options.rows) + "_w" + std::to_string(options.width) + "_s"
                 + std::to_string(options.seed);
  circuit.num_rows = options.rows;

  std::vector<std::vector<Gate>> by_row(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < width; ++i) {
      by_row[r].push_back({"g" + std::to_string(r) + "_" + std::to_string(i),
                           logic_cells[rng.below(logic_cells.size())], static_cast<int>(r), 0.0});
    }
  }
  const auto logic_id = [&](std::size_t r, std::size_t i) -> const std::string& { return by_row[r][i].id; };
  const auto length = [&] { return rng.positive(budget.length_cap); };

  std::set<std::pair<std::string, std::string>> seen;
  const auto connect = [&](const std::string& src, const std::string& dst) {
    if (seen.emplace(src, dst).second) {
      circuit.connections.push_back({src, dst, length(), std::nullopt});
    }
  };

  std::size_t buffer_count = 0;
  std::vector<std::size_t> order(width);
  for (std::size_t r = 0; r + 1 < rows; ++r) {
    for (std::size_t j = 0; j < width; ++j) {
      // Partial Fisher-Yates picks 1..3 distinct fanins from the row above.
      const std::size_t fanin = 1 + rng.below(std::min<std::size_t>(3, width));
      for (std::size_t k = 0; k < width; ++k) {
        order[k] = k;
      }
      for (std::size_t k = 0; k < fanin; ++k) {
        std::swap(order[k], order[k + rng.below(width - k)]);
        connect(logic_id(r, order[k]), logic_id(r + 1, j));
      }
    }
    for (std::size_t i = 0; i < width; ++i) {
      if (r + 2 < rows && rng.chance(options.chain_prob)) {
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(4, rows - r - 2));
        const std::string sink = logic_id(r + k + 1, rng.below(width));
        std::string prev = logic_id(r, i);
        for (std::size_t b = 1; b <= k; ++b) {
          Gate buffer{"b" + std::to_string(buffer_count++), std::string(kBufferCell), static_cast<int>(r + b), 0.0};
          circuit.connections.push_back({prev, buffer.id, length(), std::nullopt});
          prev = buffer.id;
          by_row[r + b].push_back(std::move(buffer));
        }
        circuit.connections.push_back({prev, sink, length(), std::nullopt});
      }
      if (r + 2 < rows && rng.chance(options.skip_prob)) {
        connect(logic_id(r, i), logic_id(r + 2, rng.below(width)));
      }
    }
  }

  for (std::size_t r = 0; r < rows; ++r) {
    const double base = static_cast<double>(r) * budget.offset_step;
    std::vector<double> offsets(by_row[r].size());
    for (double& o : offsets) {
      o = base + budget.offset_width * rng.uniform();
    }
    std::sort(offsets.begin(), offsets.end());
    for (std::size_t i = 0; i < offsets.size(); ++i) {
      by_row[r][i].clock_offset_ps = offsets[i];
      circuit.gates.push_back(std::move(by_row[r][i]));
    }
  }
  return circuit;
}

}  // namespace qpro
