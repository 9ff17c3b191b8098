// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpro/bufferopt.hpp"
#include "qpro/model.hpp"
#include "qpro/timing.hpp"

// Versioned JSON documents: *.qc.json circuits, *.qlib.json libraries and
// *.report.json optimization reports. Every document carries
// "format_version": 1 and unknown keys are rejected.

namespace qpro {

inline constexpr int kFormatVersion = 1;

/// Malformed JSON throws Error(PARSE_ERROR) with entity "line L, column C".
/// Shape errors throw Error(SCHEMA_ERROR) with a JSON-pointer entity.
/// Validation failures throw Error whose code is the first error found and
/// whose diagnostics list all of them. Warnings go to `warnings` if given.
Circuit parse_circuit(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);
std::string serialize_circuit(const Circuit& circuit);

/// Cells may carry their own "breakpoints_ps"; any that differ from the
/// library's are rejected with SHARED_BREAKPOINTS_REQUIRED.
CellLibrary parse_library(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);
std::string serialize_library(const CellLibrary& library);

// Every key is optional and defaults to OptimizationConfig's value.
OptimizationConfig parse_config(std::string_view text);
std::string serialize_config(const OptimizationConfig& config);

struct NamedConfig
{
  std::string name;
  OptimizationConfig config;
};

// {"format_version": 1, "configs": [{"name": ..., <config keys>}, ...]}
std::vector<NamedConfig> parse_config_list(std::string_view text);

struct PhaseTiming
{
  std::string phase;
  double seconds = 0.0;

  bool operator==(const PhaseTiming&) const = default;
};

struct RunManifest
{
  std::string tool_version;
  std::string circuit_path;
  std::string library_path;
  OptimizationConfig config;
  bool remove_buffers = false;
  std::optional<std::uint64_t> seed;
  std::vector<PhaseTiming> timings;

  bool operator==(const RunManifest&) const = default;
};

struct ChainReport
{
  std::string source;
  std::string sink;
  std::vector<std::string> buffers;
  std::vector<std::string> removed;

  bool operator==(const ChainReport&) const = default;
};

struct Report
{
  RunManifest manifest;
  std::string circuit;
  Schedule schedule;
  double frequency_ghz = 0.0;
  std::optional<double> min_slack_ps;
  std::size_t buffers_total = 0;
  std::size_t buffers_removed = 0;
  // Filled for verbose runs only.
  std::vector<ConnectionSlack> connections;
  std::vector<ChainReport> chains;
  std::vector<Diagnostic> warnings;

  bool operator==(const Report&) const = default;
};

struct ReportInputs
{
  std::string circuit;
  const SlackReport* slacks = nullptr;
  const RemovalPlan* removal = nullptr;
  bool verbose = false;
};

Report emit_report(const Schedule& schedule, const ReportInputs& inputs, RunManifest manifest = {});

std::string serialize_report(const Report& report);
Report parse_report(std::string_view text);

// Aligned two-column summary plus, when present, the per-connection table.
std::string format_report_table(const Report& report);

}  // namespace qpro
