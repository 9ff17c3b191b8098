// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qpro/model.hpp"

namespace qpro {

/// A maximal run of single-fanin, single-fanout buffers between two
/// non-buffer gates. Node i of the chain graph is the source for i = 0, the
/// i-th buffer for 1 <= i <= m, and the sink for i = m + 1.
struct BufferChain
{
  std::string source;
  std::vector<std::string> buffers;
  std::string sink;
  std::vector<double> segment_lengths;         // m + 1 routed lengths
  std::vector<std::size_t> segment_connections;  // indices into Circuit::connections
  std::vector<int> node_rows;                  // m + 2 rows

  std::size_t size() const { return buffers.size(); }
  const std::string& node(std::size_t i) const;

  bool operator==(const BufferChain&) const = default;
};

struct ChainSet
{
  std::vector<BufferChain> chains;
  std::vector<Diagnostic> diagnostics;
};

/// Throws Error(MALFORMED_CHAIN) for a buffer whose fanin is not exactly one.
/// Buffer runs containing a buffer without exactly one fanout are skipped and
/// reported as BUFFER_FANOUT diagnostics.
ChainSet extract_chains(const Circuit& circuit, std::string_view buffer_cell = kBufferCell);

// Routed wire between nodes i < j plus one pin-to-pin length per skipped buffer.
double merged_length(const BufferChain& chain, std::size_t i, std::size_t j,
                     const CellLibrary& library);

struct ChainEdge
{
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t weight = 0;  // buffers skipped
  double length_um = 0.0;
};

/// Drivable spans of one chain. Edge (i, j) exists iff the merged length fits
/// l_max_drive and, for j > i + 1, the row span is at most max_span
/// (max_span <= 0 disables the span cap). Consecutive edges always exist.
struct ChainGraph
{
  std::size_t node_count = 0;
  std::vector<ChainEdge> edges;  // sorted by (from, to)
};

ChainGraph build_chain_graph(const BufferChain& chain, const CellLibrary& library, int max_span = 0);

struct ChainSolution
{
  std::vector<std::size_t> kept;  // node indices, always starts at 0 and ends at m + 1
  std::size_t removed = 0;
};

/// Maximum-weight source-to-sink path by dynamic programming over the chain
/// DAG. Among optimal paths the one removing the earliest buffers wins.
ChainSolution solve_chain(const BufferChain& chain, const CellLibrary& library, int max_span = 0);

struct ChainRemoval
{
  std::size_t chain = 0;
  std::string source;
  std::string sink;
  std::vector<std::string> buffers;
  std::vector<std::size_t> kept;
  std::vector<std::string> removed_gates;
};

struct RemovalPlan
{
  std::vector<ChainRemoval> chains;
  std::vector<std::string> removed_gates;
  std::vector<Connection> merged_connections;
  std::size_t buffers_total = 0;  // buffer cells in the input circuit
  std::vector<Diagnostic> diagnostics;

  std::size_t removed_count() const { return removed_gates.size(); }
};

struct RemovalOptions
{
  int max_span = 2;
  std::string buffer_cell = std::string(kBufferCell);
};

struct RemovalResult
{
  Circuit circuit;
  RemovalPlan plan;
};

/// Removes the optimal buffer set chain by chain and reconnects each removed
/// span with one merged connection. Surviving connections are untouched.
RemovalResult remove_buffers(const Circuit& circuit, const CellLibrary& library,
                             const RemovalOptions& options = {});

}  // namespace qpro
