// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "oracles.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace qpro::testing {

std::size_t brute_force_removal(const std::vector<double>& lengths, const std::vector<int>& rows,
                                double l_buffer, double l_max, int max_span)
{
  const std::size_t m = lengths.size() - 1;
  std::size_t best = 0;
  for (std::uint32_t removed = 0; removed < (1u << m); ++removed) {
    const auto count = static_cast<std::size_t>(std::popcount(removed));
    if (count <= best) {
      continue;
    }
    bool ok = true;
    std::size_t prev = 0;
    double run = lengths[0];
    for (std::size_t node = 1; node <= m + 1 && ok; ++node) {
      const bool gone = node <= m && ((removed >> (node - 1)) & 1u);
      if (gone) {
        run += l_buffer + lengths[node];
        continue;
      }
      ok = run <= l_max;
      if (ok && max_span > 0 && node > prev + 1) {
        ok = rows[node] - rows[prev] <= max_span;
      }
      prev = node;
      if (node <= m) {
        run = lengths[node];
      }
    }
    if (ok) {
      best = count;
    }
  }
  return best;
}

RandomChain random_chain(Gen& gen, int max_buffers)
{
  RandomChain c;
  const int m = gen.integer(0, max_buffers);
  c.l_buffer = gen.integer(0, 20);
  c.l_max = gen.integer(40, 300);
  const int longest = static_cast<int>(c.l_max);
  for (int i = 0; i <= m; ++i) {
    // Bias towards short segments so that long spans are sometimes drivable.
    const int cap = gen.chance(0.7) ? std::max(1, longest / 4) : longest;
    c.lengths.push_back(gen.integer(1, cap));
  }
  c.max_span = gen.chance(0.5) ? 0 : gen.integer(1, 4);
  int row = gen.integer(0, 3);
  for (int i = 0; i < m + 2; ++i) {
    c.rows.push_back(row);
    row += gen.chance(0.8) ? 1 : 2;
  }
  return c;
}

namespace {

PiecewiseLinear continuous(const std::vector<double>& bp, double start, const std::vector<double>& slopes)
{
  std::vector<Segment> segments;
  double value = start;
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    segments.push_back({slopes[k], value - slopes[k] * bp[k]});
    value += slopes[k] * (bp[k + 1] - bp[k]);
  }
  return PiecewiseLinear(bp, std::move(segments));
}

}  // namespace

CellLibrary random_library(Gen& gen)
{
  const std::vector<double> bp = {50, 150, 250, 400};
  CellLibrary lib;
  lib.breakpoints_ps = bp;
  lib.l_max_drive_um = 100;
  lib.l_buffer_um = 10;
  lib.prop_ps_per_um = 0.1;
  lib.t_min_ps = gen.real(60, 140);
  lib.t_max_ps = 400;
  lib.max_frequency_ghz = 20;
  const auto slopes = [&](double lo, double hi) {
    return std::vector<double>{gen.real(lo, hi), gen.real(lo, hi), gen.real(lo, hi)};
  };
  for (const char* name : {"buffer", "majority3", "splitter2"}) {
    CellTiming t;
    t.c2q = continuous(bp, gen.real(5, 12), slopes(0, 0.03));
    t.setup = continuous(bp, gen.real(2, 6), slopes(0, 0.02));
    t.hold = continuous(bp, gen.real(2, 6), slopes(0, 0.02));
    t.rd = continuous(bp, gen.real(10, 20), slopes(0.2, 0.4));
    lib.cells.emplace(name, std::move(t));
  }
  return lib;
}

Circuit random_small_circuit(Gen& gen, const CellLibrary& library, const SmallCircuitOptions& options)
{
  std::vector<std::string> cells;
  for (const auto& [name, timing] : library.cells) {
    cells.push_back(name);
  }
  Circuit c;
  c.num_rows = gen.integer(2, options.max_rows);
  c.name = "small";
  std::vector<std::vector<std::string>> ids(static_cast<std::size_t>(c.num_rows));
  const double step = gen.real(0, 10);
  for (int r = 0; r < c.num_rows; ++r) {
    const int width = gen.integer(1, 3);
    std::vector<double> offsets;
    for (int i = 0; i < width; ++i) {
      offsets.push_back(r * step + gen.real(0, 6));
    }
    std::sort(offsets.begin(), offsets.end());
    for (int i = 0; i < width; ++i) {
      const std::string id = "r" + std::to_string(r) + "g" + std::to_string(i);
      c.gates.push_back({id, cells[static_cast<std::size_t>(gen.integer(0, static_cast<int>(cells.size()) - 1))],
                         r, offsets[static_cast<std::size_t>(i)]});
      ids[static_cast<std::size_t>(r)].push_back(id);
    }
  }
  const auto pick = [&](int row) {
    const auto& v = ids[static_cast<std::size_t>(row)];
    return v[static_cast<std::size_t>(gen.integer(0, static_cast<int>(v.size()) - 1))];
  };
  std::set<std::pair<std::string, std::string>> seen;
  const int wanted = gen.integer(1, options.max_connections);
  for (int attempt = 0; attempt < 4 * wanted && static_cast<int>(c.connections.size()) < wanted; ++attempt) {
    const int from = gen.integer(0, c.num_rows - 2);
    const int span = (from + 2 < c.num_rows && gen.chance(options.skip_prob)) ? 2 : 1;
    const std::string src = pick(from);
    const std::string dst = pick(from + span);
    if (!seen.emplace(src, dst).second) {
      continue;
    }
    Connection conn{src, dst, gen.real(1, library.l_max_drive_um), std::nullopt};
    if (gen.chance(0.3)) {
      conn.prop_ps = gen.real(0, 20);
    }
    c.connections.push_back(std::move(conn));
  }
  return c;
}

namespace {

struct Endpoints
{
  const Gate* src;
  const Gate* dst;
};

Endpoints endpoints(const Circuit& circuit, std::size_t connection)
{
  const Connection& conn = circuit.connections[connection];
  Endpoints e{nullptr, nullptr};
  for (const Gate& g : circuit.gates) {
    if (g.id == conn.src) {
      e.src = &g;
    }
    if (g.id == conn.dst) {
      e.dst = &g;
    }
  }
  if (e.src == nullptr || e.dst == nullptr) {
    throw std::logic_error("dangling connection in test circuit");
  }
  return e;
}

double offset_term(const Circuit& circuit, const CellLibrary& library, std::size_t connection)
{
  const Connection& conn = circuit.connections[connection];
  const auto [src, dst] = endpoints(circuit, connection);
  const double prop = conn.prop_ps ? *conn.prop_ps : conn.length_um * library.prop_ps_per_um;
  return prop - (dst->clock_offset_ps - src->clock_offset_ps);
}

}  // namespace

double setup_demand(const Circuit& circuit, const CellLibrary& library, std::size_t connection, double period)
{
  const auto [src, dst] = endpoints(circuit, connection);
  const double fs = pwl_eval(library.cell(src->cell).c2q, period) + pwl_eval(library.cell(dst->cell).setup, period);
  return offset_term(circuit, library, connection) + fs;
}

double hold_cap(const Circuit& circuit, const CellLibrary& library, std::size_t connection, double period,
                HoldMode mode)
{
  const auto [src, dst] = endpoints(circuit, connection);
  const CellTiming& s = library.cell(src->cell);
  const double reset = mode == HoldMode::kDlplace ? period : pwl_eval(s.rd, period);
  const double fh = pwl_eval(s.c2q, period) + reset - pwl_eval(library.cell(dst->cell).hold, period);
  return offset_term(circuit, library, connection) + fh;
}

std::optional<double> min_latency_at(const Circuit& circuit, const CellLibrary& library, double period,
                                     double slack, HoldMode mode, double delta_max)
{
  const auto n = static_cast<std::size_t>(circuit.num_rows);
  if (n < 2) {
    return 0.0;
  }
  struct Edge
  {
    std::size_t from, to;
    double weight;
  };
  // Node r holds P_r, the sum of the first r deltas; edge u->v means P_v - P_u <= w.
  std::vector<Edge> edges;
  for (std::size_t r = 0; r + 1 < n; ++r) {
    edges.push_back({r + 1, r, 0.0});
    edges.push_back({r, r + 1, delta_max});
  }
  for (std::size_t k = 0; k < circuit.connections.size(); ++k) {
    const auto [src, dst] = endpoints(circuit, k);
    const auto m = static_cast<std::size_t>(src->row);
    const auto q = static_cast<std::size_t>(dst->row);
    edges.push_back({q, m, -(setup_demand(circuit, library, k, period) + slack)});
    edges.push_back({m, q, hold_cap(circuit, library, k, period, mode) - slack});
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  dist[n - 1] = 0.0;
  for (std::size_t pass = 0; pass < n; ++pass) {
    bool changed = false;
    for (const Edge& e : edges) {
      if (dist[e.from] + e.weight < dist[e.to] - 1e-9) {
        dist[e.to] = dist[e.from] + e.weight;
        changed = true;
      }
    }
    if (!changed) {
      // max(P_0 - P_last) = dist[0]; the latency is its negation.
      return -dist[0];
    }
  }
  return std::nullopt;
}

std::optional<double> grid_min_period(const Circuit& circuit, const CellLibrary& library, double lo, double hi,
                                      double step, double slack, HoldMode mode)
{
  const auto steps = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= steps + 1; ++k) {
    const double t = k > steps ? hi : lo + static_cast<double>(k) * step;
    if (min_latency_at(circuit, library, t, slack, mode)) {
      return t;
    }
  }
  return std::nullopt;
}

std::vector<HandSlack> hand_slacks(const Circuit& circuit, const CellLibrary& library,
                                   const std::vector<double>& deltas, double period, HoldMode mode)
{
  const auto arrival = [&](const Gate& g) {
    double clk = g.clock_offset_ps;
    for (int r = 0; r < g.row; ++r) {
      clk += deltas[static_cast<std::size_t>(r)];
    }
    return clk;
  };
  std::vector<HandSlack> out;
  for (std::size_t k = 0; k < circuit.connections.size(); ++k) {
    const Connection& conn = circuit.connections[k];
    const auto [src, dst] = endpoints(circuit, k);
    const CellTiming& s = library.cell(src->cell);
    const CellTiming& d = library.cell(dst->cell);
    const double prop = conn.prop_ps ? *conn.prop_ps : conn.length_um * library.prop_ps_per_um;
    const double launch = arrival(*src) + pwl_eval(s.c2q, period) + prop;
    const double reset = mode == HoldMode::kDlplace ? period : pwl_eval(s.rd, period);
    out.push_back({arrival(*dst) - pwl_eval(d.setup, period) - launch,
                   launch + reset - arrival(*dst) - pwl_eval(d.hold, period)});
  }
  return out;
}

ChainCircuit random_chain_circuit(Gen& gen, const CellLibrary& library, int chains, int max_buffers)
{
  ChainCircuit out;
  Circuit& c = out.circuit;
  c.name = "chains";
  std::string logic;
  for (const auto& [name, timing] : library.cells) {
    if (name != kBufferCell) {
      logic = name;
      break;
    }
  }
  int rows = 1;
  for (int k = 0; k < chains; ++k) {
    const std::string ks = std::to_string(k);
    const int m = gen.integer(0, max_buffers);
    int row = gen.integer(0, 2);
    c.gates.push_back({"s" + ks, logic, row, 0.0});
    std::vector<double> lengths;
    std::vector<int> node_rows{row};
    std::string prev = "s" + ks;
    const int cap = static_cast<int>(library.l_max_drive_um);
    const auto segment = [&] { return static_cast<double>(gen.integer(1, gen.chance(0.7) ? cap / 4 : cap)); };
    for (int i = 0; i < m; ++i) {
      row += gen.chance(0.85) ? 1 : 2;
      const std::string id = "c" + ks + "_" + std::to_string(i);
      c.gates.push_back({id, std::string(kBufferCell), row, 0.0});
      lengths.push_back(segment());
      c.connections.push_back({prev, id, lengths.back(), std::nullopt});
      node_rows.push_back(row);
      prev = id;
    }
    row += 1;
    c.gates.push_back({"t" + ks, logic, row, 0.0});
    lengths.push_back(segment());
    c.connections.push_back({prev, "t" + ks, lengths.back(), std::nullopt});
    node_rows.push_back(row);
    rows = std::max(rows, row + 1);
    if (m > 0 && gen.chance(0.3)) {
      c.connections.push_back({"s" + ks, "t" + ks, 1.0, std::nullopt});
    }
    out.chain_lengths.push_back(std::move(lengths));
    out.chain_rows.push_back(std::move(node_rows));
  }
  c.num_rows = rows;
  return out;
}

Circuit two_row_fixture()
{
  Circuit c;
  c.name = "fix2row";
  c.num_rows = 2;
  c.gates = {{"a", "majority3", 0, 0.0}, {"b", "majority3", 1, 2.0}};
  c.connections = {{"a", "b", 50.0, 5.0}};
  return c;
}

Circuit hold_limited_fixture()
{
  Circuit c;
  c.name = "holdcap";
  c.num_rows = 2;
  c.gates = {{"a", "majority3", 0, 0.0},
             {"c", "majority3", 0, 0.0},
             {"b", "majority3", 1, 0.0},
             {"e", "majority3", 1, 0.0}};
  c.connections = {{"a", "b", 50.0, 45.0}, {"c", "e", 50.0, 5.0}};
  return c;
}

std::string temp_path(const std::string& name)
{
  static std::atomic<int> counter{0};
  const auto dir = std::filesystem::temp_directory_path() / ("qpro_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / (std::to_string(counter++) + "_" + name)).string();
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    throw std::runtime_error("cannot write " + path);
  }
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qpro::testing
