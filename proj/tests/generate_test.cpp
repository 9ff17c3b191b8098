// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qpro/bufferopt.hpp"
#include "qpro/generate.hpp"
#include "qpro/ingest.hpp"
#include "qpro/solver.hpp"

namespace qpro {
namespace {

using testing::Gen;

TEST(Generate, Deterministic)
{
  GeneratorOptions g;
  g.rows = 50;
  g.width = 20;
  g.seed = 1;
  const std::string a = serialize_circuit(generate_circuit(g, default_library()));
  const std::string b = serialize_circuit(generate_circuit(g, default_library()));
  EXPECT_EQ(a, b);
  g.seed = 2;
  EXPECT_NE(serialize_circuit(generate_circuit(g, default_library())), a);
}

TEST(Generate, ShapeAndNames)
{
  GeneratorOptions g;
  g.rows = 6;
  g.width = 3;
  g.seed = 9;
  g.chain_prob = 1.0;
  const Circuit c = generate_circuit(g, default_library());
  EXPECT_EQ(c.name, "gen_r6_w3_s9");
  EXPECT_EQ(c.num_rows, 6);
  std::vector<int> logic(6, 0);
  for (const Gate& gate : c.gates) {
    if (gate.cell != kBufferCell) {
      ++logic[static_cast<std::size_t>(gate.row)];
    }
  }
  EXPECT_EQ(logic, std::vector<int>(6, 3));
  EXPECT_FALSE(extract_chains(c).chains.empty());
  EXPECT_TRUE(validate_circuit(c, default_library()).empty());
}

TEST(Generate, TinyCircuitValidates)
{
  GeneratorOptions g;
  g.rows = 2;
  g.width = 1;
  g.seed = 7;
  const Circuit c = parse_circuit(serialize_circuit(generate_circuit(g, default_library())));
  EXPECT_FALSE(has_errors(validate_circuit(c, default_library())));
}

TEST(Generate, RejectsBadOptions)
{
  GeneratorOptions g;
  g.rows = 0;
  EXPECT_THROW(generate_circuit(g, default_library()), Error);
  g = {};
  g.chain_prob = 1.5;
  EXPECT_THROW(generate_circuit(g, default_library()), Error);
}

// Property: every non-adversarial circuit validates and schedules.
TEST(GenerateProperty, SoundOverSeeds)
{
  Gen gen(31337);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GeneratorOptions g;
    g.rows = gen.integer(1, 40);
    g.width = gen.integer(1, 8);
    g.seed = seed;
    g.chain_prob = gen.real(0, 1);
    g.skip_prob = gen.real(0, 1);
    const CellLibrary lib = seed % 2 ? default_library() : reference_library();
    const Circuit c = generate_circuit(g, lib);
    ASSERT_TRUE(validate_circuit(c, lib).empty()) << "seed " << seed;
    const OptimizationConfig cfg;
    const Schedule s = optimize_schedule(build_constraints(c, lib, cfg), lib, cfg);
    const SlackReport sta = sta_check(c, lib, s, HoldMode::kResetDelay);
    if (sta.min_slack_ps) {
      EXPECT_GE(*sta.min_slack_ps, -1e-6) << "seed " << seed;
    }
  }
}

TEST(GenerateProperty, AdversarialStillValid)
{
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GeneratorOptions g;
    g.rows = 10;
    g.width = 5;
    g.seed = seed;
    g.adversarial = true;
    EXPECT_FALSE(has_errors(validate_circuit(generate_circuit(g, default_library()), default_library())));
  }
}

}  // namespace
}  // namespace qpro
