// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include <gtest/gtest.h>

#include <sstream>

#include "commands.hpp"
#include "oracles.hpp"
#include "qpro/generate.hpp"
#include "qpro/ingest.hpp"

namespace qpro {
namespace {

const std::string kData = QPRO_TEST_DATA_DIR;

struct CliResult
{
  int code = -1;
  std::string out;
  std::string err;
};

CliResult qpro(std::vector<std::string> args)
{
  std::ostringstream out;
  std::ostringstream err;
  CliResult r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string fixture() { return kData + "/fix2row.qc.json"; }
std::string ref_lib() { return kData + "/ref.qlib.json"; }

TEST(CliOptimize, FixtureRunsAtTenGigahertz)
{
  const std::string report = testing::temp_path("fix.report.json");
  const CliResult r = qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--priority",
                      "period,latency,slack", "--out", report});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Report parsed = parse_report(testing::read_file(report));
  EXPECT_DOUBLE_EQ(parsed.frequency_ghz, 10.0);
  EXPECT_NEAR(parsed.schedule.latency_ps, 18.0, 1e-5);
  EXPECT_EQ(parsed.manifest.library_path, ref_lib());
  EXPECT_NE(r.out.find("10"), std::string::npos);
}

TEST(CliOptimize, SlackFloor)
{
  const std::string report = testing::temp_path("smin.report.json");
  const CliResult r = qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--smin", "5", "--out", report});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_GE(*parse_report(testing::read_file(report)).min_slack_ps, 5.0 - 1e-6);
}

TEST(CliOptimize, InfeasibleExitsTwo)
{
  const std::string circuit = testing::temp_path("holdcap.qc.json");
  testing::write_file(circuit, serialize_circuit(testing::hold_limited_fixture()));
  const CliResult r = qpro({"optimize", "--circuit", circuit, "--lib", ref_lib(), "--tmax", "110"});
  EXPECT_EQ(r.code, cli::kExitInfeasible);
  EXPECT_NE(r.err.find("INFEASIBLE"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("residual"), std::string::npos) << r.err;
}

TEST(CliOptimize, UsageErrors)
{
  EXPECT_EQ(qpro({}).code, cli::kExitUsage);
  EXPECT_EQ(qpro({"optimize"}).code, cli::kExitUsage);
  EXPECT_EQ(qpro({"optimize", "--circuit", "/nonexistent.qc.json"}).code, cli::kExitUsage);
  EXPECT_EQ(qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--priority", "period,period"}).code,
            cli::kExitUsage);
  EXPECT_EQ(qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--priority", "period", "--tau", "1"})
                .code,
            cli::kExitUsage);
  EXPECT_EQ(qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--hold-mode", "sometimes"}).code,
            cli::kExitUsage);
  EXPECT_EQ(qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--smin", "9", "--smax", "1"}).code,
            cli::kExitUsage);
}

TEST(CliOptimize, WeightedMode)
{
  const std::string report = testing::temp_path("weighted.report.json");
  const CliResult r = qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--tau", "1", "--sigma", "1e-6",
                      "--lambda", "1e-6", "--out", report});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const Report parsed = parse_report(testing::read_file(report));
  EXPECT_EQ(parsed.manifest.config.priority_mode, PriorityMode::kWeighted);
  EXPECT_NEAR(parsed.schedule.period_ps, 100.0, 1e-9);
}

TEST(CliVerify, ClosureAndTampering)
{
  const std::string report = testing::temp_path("verify.report.json");
  ASSERT_EQ(qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--out", report}).code, cli::kExitOk);
  CliResult r = qpro({"verify", "--circuit", fixture(), "--lib", ref_lib(), "--schedule", report});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;

  Report edited = parse_report(testing::read_file(report));
  edited.schedule.row_deltas_ps[0] -= edited.schedule.slack_ps + 1.0;
  const std::string tampered = testing::temp_path("tampered.report.json");
  testing::write_file(tampered, serialize_report(edited));
  r = qpro({"verify", "--circuit", fixture(), "--lib", ref_lib(), "--schedule", tampered});
  EXPECT_EQ(r.code, cli::kExitVerifyFailed);
  EXPECT_NE(r.err.find("a->b"), std::string::npos) << r.err;
}

TEST(CliVerify, WrongLibraryOrShape)
{
  const std::string report = testing::temp_path("lib.report.json");
  ASSERT_EQ(qpro({"optimize", "--circuit", fixture(), "--lib", ref_lib(), "--out", report}).code, cli::kExitOk);
  EXPECT_NE(qpro({"verify", "--circuit", fixture(), "--lib", kData + "/default.qlib.json", "--schedule", report})
                .code,
            cli::kExitOk);

  GeneratorOptions g;
  g.rows = 4;
  const std::string other = testing::temp_path("other.qc.json");
  testing::write_file(other, serialize_circuit(generate_circuit(g, reference_library())));
  const CliResult r = qpro({"verify", "--circuit", other, "--lib", ref_lib(), "--schedule", report});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("SCHEMA_MISMATCH"), std::string::npos) << r.err;
}

TEST(CliGen, DeterministicAndUsable)
{
  const std::string a = testing::temp_path("a.qc.json");
  const std::string b = testing::temp_path("b.qc.json");
  const std::vector<std::string> args{"gen", "--rows", "50", "--width", "20", "--seed", "1", "--out"};
  auto first = args;
  first.push_back(a);
  auto second = args;
  second.push_back(b);
  ASSERT_EQ(qpro(first).code, cli::kExitOk);
  ASSERT_EQ(qpro(second).code, cli::kExitOk);
  EXPECT_EQ(testing::read_file(a), testing::read_file(b));

  const CliResult tiny = qpro({"gen", "--rows", "2", "--width", "1", "--seed", "7"});
  ASSERT_EQ(tiny.code, cli::kExitOk);
  EXPECT_NO_THROW(parse_circuit(tiny.out));

  const std::string report = testing::temp_path("gen.report.json");
  const CliResult opt = qpro({"optimize", "--circuit", a, "--remove-buffers", "--out", report});
  EXPECT_EQ(opt.code, cli::kExitOk) << opt.err;
  EXPECT_EQ(qpro({"verify", "--circuit", a, "--schedule", report}).code, cli::kExitOk);
  EXPECT_GT(parse_report(testing::read_file(report)).buffers_removed, 0u);
}

TEST(CliSweep, PresetsAndErrors)
{
  const std::string circuit = testing::temp_path("sweep.qc.json");
  ASSERT_EQ(qpro({"gen", "--rows", "12", "--width", "4", "--seed", "3", "--chain-prob", "0.6", "--out", circuit})
                .code,
            cli::kExitOk);
  const CliResult r = qpro({"sweep", "--circuit", circuit, "--configs", "table1a,table1b,table3"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("table1a"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("table1b"), std::string::npos) << r.out;

  EXPECT_EQ(qpro({"sweep", "--circuit", circuit, "--configs", ""}).code, cli::kExitUsage);
  EXPECT_EQ(qpro({"sweep", "--circuit", circuit, "--configs", "table9"}).code, cli::kExitUsage);

  const std::string list = testing::temp_path("configs.json");
  testing::write_file(list, R"({"format_version": 1, "configs": [{"name": "loose"}, {"name": "tight", "s_min": 3}]})");
  const CliResult custom = qpro({"sweep", "--circuit", circuit, "--configs", list});
  EXPECT_EQ(custom.code, cli::kExitOk) << custom.err;
  EXPECT_NE(custom.out.find("tight"), std::string::npos);
}

}  // namespace
}  // namespace qpro
