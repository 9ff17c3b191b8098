// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include <benchmark/benchmark.h>

#include "qpro/bufferopt.hpp"
#include "qpro/generate.hpp"
#include "qpro/solver.hpp"

namespace {

using namespace qpro;

Circuit generated(int rows, int width, double chain_prob = 0.3)
{
  GeneratorOptions g;
  g.rows = rows;
  g.width = width;
  g.chain_prob = chain_prob;
  return generate_circuit(g, default_library());
}

void BM_BuildConstraints(benchmark::State& state)
{
  const CellLibrary lib = default_library();
  const Circuit c = generated(static_cast<int>(state.range(0)), 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_constraints(c, lib, {}));
  }
  state.counters["connections"] = static_cast<double>(c.connections.size());
}
BENCHMARK(BM_BuildConstraints)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_OptimizeSchedule(benchmark::State& state)
{
  const CellLibrary lib = default_library();
  const Circuit c = generated(static_cast<int>(state.range(0)), 20);
  const OptimizationConfig cfg;
  const TimingConstraintSet tcs = build_constraints(c, lib, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_schedule(tcs, lib, cfg));
  }
}
BENCHMARK(BM_OptimizeSchedule)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_OptimizeWeighted(benchmark::State& state)
{
  const CellLibrary lib = default_library();
  const Circuit c = generated(static_cast<int>(state.range(0)), 20);
  OptimizationConfig cfg;
  cfg.priority_mode = PriorityMode::kWeighted;
  cfg.tau = 1;
  cfg.lambda = 1e-4;
  cfg.sigma = 1e-8;
  const TimingConstraintSet tcs = build_constraints(c, lib, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(optimize_schedule(tcs, lib, cfg));
  }
}
BENCHMARK(BM_OptimizeWeighted)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_SolveChain(benchmark::State& state)
{
  CellLibrary lib = default_library();
  BufferChain chain;
  chain.source = "s";
  chain.sink = "t";
  const auto m = static_cast<std::size_t>(state.range(0));
  for (std::size_t i = 0; i <= m + 1; ++i) {
    chain.node_rows.push_back(static_cast<int>(i));
    if (i <= m) {
      chain.segment_lengths.push_back(static_cast<double>(20 + (i * 37) % 90));
    }
    if (i >= 1 && i <= m) {
      chain.buffers.push_back("b" + std::to_string(i));
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_chain(chain, lib));
  }
}
BENCHMARK(BM_SolveChain)->Arg(4)->Arg(12)->Arg(64)->Arg(512);

void BM_RemoveBuffers(benchmark::State& state)
{
  const CellLibrary lib = default_library();
  const Circuit c = generated(static_cast<int>(state.range(0)), 20, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(remove_buffers(c, lib));
  }
}
BENCHMARK(BM_RemoveBuffers)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_StaCheck(benchmark::State& state)
{
  const CellLibrary lib = default_library();
  const Circuit c = generated(1000, 20);
  const Schedule s = optimize_schedule(build_constraints(c, lib, {}), lib, {});
  for (auto _ : state) {
    benchmark::DoNotOptimize(sta_check(c, lib, s, HoldMode::kResetDelay));
  }
}
BENCHMARK(BM_StaCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
