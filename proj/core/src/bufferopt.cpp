// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/bufferopt.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace qpro {

const std::string& BufferChain::node(std::size_t i) const
{
  if (i == 0) {
    return source;
  }
  if (i <= buffers.size()) {
    return buffers[i - 1];
  }
  return sink;
}

ChainSet extract_chains(const Circuit& circuit, std::string_view buffer_cell)
{
  GateLookup lookup(circuit);
  const std::size_t n = circuit.gates.size();
  std::vector<std::vector<std::size_t>> fanin(n);
  std::vector<std::vector<std::size_t>> fanout(n);
  for (std::size_t ci = 0; ci < circuit.connections.size(); ++ci) {
    const Connection& c = circuit.connections[ci];
    fanout[lookup.index(c.src)].push_back(ci);
    fanin[lookup.index(c.dst)].push_back(ci);
  }
  auto is_buffer = [&](std::size_t g) { return circuit.gates[g].cell == buffer_cell; };

  for (std::size_t g = 0; g < n; ++g) {
    if (is_buffer(g) && fanin[g].size() != 1) {
      throw Error(std::string(codes::kMalformedChain), circuit.gates[g].id,
                  "buffer has " + std::to_string(fanin[g].size()) + " fanins; expected 1");
    }
  }

  ChainSet out;
  std::set<std::size_t> reported;
  for (std::size_t ci = 0; ci < circuit.connections.size(); ++ci) {
    const Connection& first = circuit.connections[ci];
    const std::size_t src = lookup.index(first.src);
    std::size_t current = lookup.index(first.dst);
    if (is_buffer(src) || !is_buffer(current)) {
      continue;
    }
    BufferChain chain;
    chain.source = first.src;
    chain.segment_lengths.push_back(first.length_um);
    chain.segment_connections.push_back(ci);
    chain.node_rows.push_back(circuit.gates[src].row);
    bool ok = true;
    while (is_buffer(current)) {
      chain.buffers.push_back(circuit.gates[current].id);
      chain.node_rows.push_back(circuit.gates[current].row);
      if (fanout[current].size() != 1) {
        if (reported.insert(current).second) {
          out.diagnostics.push_back({std::string(codes::kBufferFanout), circuit.gates[current].id,
                                     "buffer has " + std::to_string(fanout[current].size())
                                         + " fanouts; run excluded from removal",
                                     Severity::kWarning});
        }
        ok = false;
        break;
      }
      const std::size_t next_conn = fanout[current].front();
      const Connection& c = circuit.connections[next_conn];
      chain.segment_lengths.push_back(c.length_um);
      chain.segment_connections.push_back(next_conn);
      current = lookup.index(c.dst);
    }
    if (!ok) {
      continue;
    }
    chain.sink = circuit.gates[current].id;
    chain.node_rows.push_back(circuit.gates[current].row);
    out.chains.push_back(std::move(chain));
  }
  return out;
}

double merged_length(const BufferChain& chain, std::size_t i, std::size_t j,
                     const CellLibrary& library)
{
  double length = 0.0;
  for (std::size_t k = i; k < j; ++k) {
    length += chain.segment_lengths[k];
  }
  return length + static_cast<double>(j - i - 1) * library.l_buffer_um;
}

ChainGraph build_chain_graph(const BufferChain& chain, const CellLibrary& library, int max_span)
{
  ChainGraph graph;
  graph.node_count = chain.size() + 2;
  for (std::size_t i = 0; i + 1 < graph.node_count; ++i) {
    double length = chain.segment_lengths[i];
    graph.edges.push_back({i, i + 1, 0, length});
    for (std::size_t j = i + 2; j < graph.node_count; ++j) {
      length += library.l_buffer_um + chain.segment_lengths[j - 1];
      const bool drivable = length <= library.l_max_drive_um;
      const bool in_span = max_span <= 0 || chain.node_rows[j] - chain.node_rows[i] <= max_span;
      // Both conditions only get harder as j grows.
      if (!drivable || !in_span) {
        break;
      }
      graph.edges.push_back({i, j, j - i - 1, length});
    }
  }
  return graph;
}

ChainSolution solve_chain(const BufferChain& chain, const CellLibrary& library, int max_span)
{
  const ChainGraph graph = build_chain_graph(chain, library, max_span);
  const std::size_t n = graph.node_count;
  const std::size_t sink = n - 1;

  // best[i]: heaviest path weight from node i to the sink. Edges are sorted by
  // (from, to), so scanning backwards visits nodes in reverse topological order.
  std::vector<std::size_t> best(n, 0);
  std::vector<std::size_t> next(n, sink);
  std::vector<bool> reached(n, false);
  reached[sink] = true;
  for (auto it = graph.edges.rbegin(); it != graph.edges.rend(); ++it) {
    if (!reached[it->to]) {
      continue;
    }
    const std::size_t weight = it->weight + best[it->to];
    // Reverse order visits larger `to` first; keep it on ties so the
    // earliest buffers are the ones removed.
    if (!reached[it->from] || weight > best[it->from]) {
      best[it->from] = weight;
      next[it->from] = it->to;
      reached[it->from] = true;
    }
  }

  ChainSolution solution;
  solution.removed = best[0];
  for (std::size_t node = 0;; node = next[node]) {
    solution.kept.push_back(node);
    if (node == sink) {
      break;
    }
  }
  return solution;
}

RemovalResult remove_buffers(const Circuit& circuit, const CellLibrary& library,
                             const RemovalOptions& options)
{
  ChainSet chains = extract_chains(circuit, options.buffer_cell);

  RemovalResult result;
  RemovalPlan& plan = result.plan;
  plan.diagnostics = std::move(chains.diagnostics);
  plan.buffers_total = static_cast<std::size_t>(
      std::count_if(circuit.gates.begin(), circuit.gates.end(),
                    [&](const Gate& g) { return g.cell == options.buffer_cell; }));

  std::unordered_set<std::string> removed;
  // First replaced connection of a span -> merged connection; other replaced
  // connections map to nullopt.
  std::map<std::size_t, std::optional<Connection>> replaced;
  for (std::size_t k = 0; k < chains.chains.size(); ++k) {
    const BufferChain& chain = chains.chains[k];
    const ChainSolution solution = solve_chain(chain, library, options.max_span);
    ChainRemoval removal;
    removal.chain = k;
    removal.source = chain.source;
    removal.sink = chain.sink;
    removal.buffers = chain.buffers;
    removal.kept = solution.kept;
    for (std::size_t p = 0; p + 1 < solution.kept.size(); ++p) {
      const std::size_t a = solution.kept[p];
      const std::size_t b = solution.kept[p + 1];
      if (b == a + 1) {
        continue;
      }
      Connection merged;
      merged.src = chain.node(a);
      merged.dst = chain.node(b);
      merged.length_um = merged_length(chain, a, b, library);
      bool explicit_props = true;
      double props = 0.0;
      for (std::size_t s = a; s < b; ++s) {
        const Connection& seg = circuit.connections[chain.segment_connections[s]];
        explicit_props = explicit_props && seg.prop_ps.has_value();
        props += seg.prop_ps.value_or(0.0);
      }
      if (explicit_props) {
        merged.prop_ps = props
                         + static_cast<double>(b - a - 1) * library.l_buffer_um
                               * library.prop_ps_per_um;
      }
      for (std::size_t node = a + 1; node < b; ++node) {
        removal.removed_gates.push_back(chain.node(node));
        removed.insert(chain.node(node));
      }
      replaced[chain.segment_connections[a]] = merged;
      for (std::size_t s = a + 1; s < b; ++s) {
        replaced[chain.segment_connections[s]] = std::nullopt;
      }
      plan.merged_connections.push_back(std::move(merged));
    }
    plan.removed_gates.insert(plan.removed_gates.end(), removal.removed_gates.begin(),
                              removal.removed_gates.end());
    plan.chains.push_back(std::move(removal));
  }

  Circuit& out = result.circuit;
  out.name = circuit.name;
  out.num_rows = circuit.num_rows;
  out.gates.reserve(circuit.gates.size() - removed.size());
  for (const Gate& g : circuit.gates) {
    if (!removed.contains(g.id)) {
      out.gates.push_back(g);
    }
  }
  out.connections.reserve(circuit.connections.size());
  for (std::size_t ci = 0; ci < circuit.connections.size(); ++ci) {
    auto it = replaced.find(ci);
    if (it == replaced.end()) {
      out.connections.push_back(circuit.connections[ci]);
    } else if (it->second) {
      out.connections.push_back(*it->second);
    }
  }
  return result;
}

}  // namespace qpro
