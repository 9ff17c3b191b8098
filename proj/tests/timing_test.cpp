// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "qpro/generate.hpp"
#include "qpro/timing.hpp"

namespace qpro {
namespace {

using testing::Gen;

std::vector<Variable> deltas_of(const TimingConstraint& c)
{
  std::vector<Variable> out;
  for (const auto& [var, coeff] : c.lhs.coefficients) {
    if (var.kind == VarKind::kDelta) {
      EXPECT_DOUBLE_EQ(coeff, 1.0);
      out.push_back(var);
    }
  }
  return out;
}

TEST(DeltaClk, Differences)
{
  EXPECT_DOUBLE_EQ(delta_clk(Gate{"i", "buffer", 0, 3}, Gate{"j", "buffer", 1, 5}), 2.0);
  EXPECT_DOUBLE_EQ(delta_clk(Gate{"i", "buffer", 0, 4}, Gate{"j", "buffer", 1, 4}), 0.0);
  EXPECT_DOUBLE_EQ(delta_clk(Gate{"i", "buffer", 0, 5}, Gate{"j", "buffer", 1, 3}), -2.0);
  const Circuit c = testing::two_row_fixture();
  EXPECT_DOUBLE_EQ(delta_clk(c, c.connections[0]), 2.0);
}

TEST(BuildConstraints, TwoRowFixture)
{
  const TimingConstraintSet set = build_constraints(testing::two_row_fixture(), reference_library(), {});
  ASSERT_EQ(set.constraints.size(), 2u);
  const TimingConstraint& setup = set.constraints[0];
  const TimingConstraint& hold = set.constraints[1];
  EXPECT_EQ(setup.kind, ConstraintKind::kSetup);
  EXPECT_EQ(setup.sense, Sense::kGreaterEqual);
  EXPECT_EQ(hold.kind, ConstraintKind::kHold);
  EXPECT_EQ(hold.sense, Sense::kLessEqual);
  EXPECT_DOUBLE_EQ(setup.rhs, 3.0);
  EXPECT_DOUBLE_EQ(hold.rhs, 3.0);
  for (double t : {150.0, 200.0, 300.0}) {
    EXPECT_DOUBLE_EQ(setup.timing(t), 15.0);
    EXPECT_NEAR(hold.timing(t), 5.0 + 0.36 * t, 1e-12);
  }
  EXPECT_EQ(deltas_of(setup), (std::vector<Variable>{{VarKind::kDelta, 0}}));
  EXPECT_EQ(deltas_of(hold), (std::vector<Variable>{{VarKind::kDelta, 0}}));

  // Delta_0 = 18 at T = 200: setup tight, hold has 62 ps to spare.
  const std::vector<double> d{18.0};
  EXPECT_NEAR(setup.margin({d, 200.0, 0.0, 18.0}), 0.0, 1e-12);
  EXPECT_NEAR(hold.margin({d, 200.0, 0.0, 18.0}), 62.0, 1e-12);
  EXPECT_NEAR(setup.margin({d, 200.0, 1.0, 18.0}), -1.0, 1e-12);

  EXPECT_DOUBLE_EQ(set.bounds.t_min, 100.0);
  EXPECT_DOUBLE_EQ(set.bounds.t_max, 300.0);
  EXPECT_DOUBLE_EQ(set.bounds.s_min, 0.0);
  EXPECT_DOUBLE_EQ(set.bounds.s_max, 50.0);
  const std::vector<double> l{7.0};
  EXPECT_DOUBLE_EQ(set.latency_definition.evaluate({l, 0, 0, 7.0}), 0.0);
}

TEST(BuildConstraints, SpanTwoCrossesBothRows)
{
  Circuit c;
  c.name = "skip";
  c.num_rows = 3;
  c.gates = {{"a", "majority3", 0, 0}, {"m", "majority3", 1, 0}, {"z", "majority3", 2, 0}};
  c.connections = {{"a", "z", 10, std::nullopt}, {"m", "z", 10, std::nullopt}};
  const TimingConstraintSet set = build_constraints(c, reference_library(), {});
  ASSERT_EQ(set.constraints.size(), 4u);
  const std::vector<Variable> both{{VarKind::kDelta, 0}, {VarKind::kDelta, 1}};
  EXPECT_EQ(deltas_of(set.constraints[0]), both);
  EXPECT_EQ(deltas_of(set.constraints[1]), both);
  EXPECT_EQ(deltas_of(set.constraints[2]), (std::vector<Variable>{{VarKind::kDelta, 1}}));

  OptimizationConfig tight;
  tight.max_span = 1;
  try {
    build_constraints(c, reference_library(), tight);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), codes::kUnsupportedSkip);
    EXPECT_EQ(e.entity(), "a->z");
  }
}

TEST(BuildConstraints, DlplaceUsesPeriod)
{
  OptimizationConfig cfg;
  cfg.hold_mode = HoldMode::kDlplace;
  const TimingConstraintSet set = build_constraints(testing::two_row_fixture(), reference_library(), cfg);
  EXPECT_DOUBLE_EQ(set.constraints[1].timing(200.0), 205.0);
}

TEST(BuildConstraints, RejectsInvalidCircuit)
{
  Circuit c = testing::two_row_fixture();
  c.connections[0].dst = "nowhere";
  EXPECT_THROW(build_constraints(c, reference_library(), {}), Error);
}

TEST(StaCheck, FixtureSlacks)
{
  const Circuit c = testing::two_row_fixture();
  SlackReport r = sta_check(c, reference_library(), {200.0, {18.0}, 0, 18, 1}, HoldMode::kResetDelay);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_NEAR(r.entries[0].setup_slack_ps, 0.0, 1e-12);
  EXPECT_NEAR(r.entries[0].hold_slack_ps, 62.0, 1e-12);
  EXPECT_NEAR(*r.min_slack_ps, 0.0, 1e-12);
  EXPECT_EQ(r.worst, (std::vector<std::string>{"a->b"}));

  r = sta_check(c, reference_library(), {200.0, {17.0}, 0, 17, 1}, HoldMode::kResetDelay);
  EXPECT_NEAR(r.entries[0].setup_slack_ps, -1.0, 1e-12);
}

TEST(StaCheck, NoConnections)
{
  Circuit c;
  c.name = "lonely";
  c.num_rows = 1;
  c.gates = {{"g", "buffer", 0, 0}};
  const SlackReport r = sta_check(c, reference_library(), {100.0, {}, 0, 0, 0}, HoldMode::kResetDelay);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_FALSE(r.min_slack_ps.has_value());
}

TEST(StaCheck, RowCountMismatch)
{
  try {
    sta_check(testing::two_row_fixture(), reference_library(), {200.0, {1.0, 2.0}, 0, 3, 1},
              HoldMode::kResetDelay);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), codes::kSchemaMismatch);
  }
  EXPECT_THROW(sta_check(testing::two_row_fixture(), reference_library(), {400.0, {1.0}, 0, 1, 1},
                         HoldMode::kResetDelay),
               Error);
}

// Property: STA slacks equal constraint margins at S = 0, and both equal the
// hand-computed arrival arithmetic.
TEST(TimingProperty, SlacksEqualConstraintMargins)
{
  Gen gen(314);
  for (int trial = 0; trial < 300; ++trial) {
    const CellLibrary lib = gen.chance(0.5) ? testing::random_library(gen) : default_library();
    const Circuit c = testing::random_small_circuit(gen, lib, {8, 25, 0.3});
    const HoldMode mode = gen.chance(0.5) ? HoldMode::kResetDelay : HoldMode::kDlplace;
    OptimizationConfig cfg;
    cfg.hold_mode = mode;
    const TimingConstraintSet set = build_constraints(c, lib, cfg);
    std::vector<double> deltas;
    for (int r = 0; r + 1 < c.num_rows; ++r) {
      deltas.push_back(gen.real(0, 80));
    }
    const double t = gen.real(lib.breakpoints_ps.front() + 1e-6, lib.breakpoints_ps.back());
    const SlackReport sta = sta_check(c, lib, {t, deltas, 0, 0, 0}, mode);
    const auto hand = testing::hand_slacks(c, lib, deltas, t, mode);
    const VariableValues at{deltas, t, 0.0, 0.0};
    ASSERT_EQ(set.constraints.size(), 2 * sta.entries.size());
    for (std::size_t k = 0; k < sta.entries.size(); ++k) {
      const TimingConstraint& setup = set.constraints[2 * k];
      const TimingConstraint& hold = set.constraints[2 * k + 1];
      EXPECT_NEAR(sta.entries[k].setup_slack_ps, setup.margin(at), 1e-9);
      EXPECT_NEAR(sta.entries[k].hold_slack_ps, hold.margin(at), 1e-9);
      EXPECT_NEAR(sta.entries[k].setup_slack_ps, hand[k].setup, 1e-9);
      EXPECT_NEAR(sta.entries[k].hold_slack_ps, hand[k].hold, 1e-9);
      EXPECT_EQ(sta.entries[k].setup_slack_ps >= 0, setup.margin(at) >= 0);
    }
  }
}

// Property: exactly the crossed deltas appear, once each, with coefficient 1.
TEST(TimingProperty, CrossedDeltasOnly)
{
  Gen gen(2718);
  for (int trial = 0; trial < 200; ++trial) {
    const CellLibrary lib = testing::random_library(gen);
    const Circuit c = testing::random_small_circuit(gen, lib);
    const TimingConstraintSet set = build_constraints(c, lib, {});
    ASSERT_EQ(set.constraints.size(), 2 * c.connections.size());
    for (const TimingConstraint& k : set.constraints) {
      std::vector<Variable> expected;
      for (int r = k.from_row; r < k.to_row; ++r) {
        expected.push_back({VarKind::kDelta, r});
      }
      EXPECT_EQ(deltas_of(k), expected);
    }
  }
}

// Property: dlplace hold bounds never fall below reset-delay hold bounds.
TEST(TimingProperty, DlplaceRelaxesHold)
{
  Gen gen(1618);
  for (int trial = 0; trial < 100; ++trial) {
    const CellLibrary lib = testing::random_library(gen);
    const Circuit c = testing::random_small_circuit(gen, lib);
    OptimizationConfig dl;
    dl.hold_mode = HoldMode::kDlplace;
    const auto reset = build_constraints(c, lib, {});
    const auto relaxed = build_constraints(c, lib, dl);
    for (int probe = 0; probe < 20; ++probe) {
      const double t = gen.real(lib.t_min_ps, lib.t_max_ps);
      for (std::size_t k = 1; k < reset.constraints.size(); k += 2) {
        EXPECT_GE(relaxed.constraints[k].timing(t), reset.constraints[k].timing(t));
      }
    }
  }
}

}  // namespace
}  // namespace qpro
