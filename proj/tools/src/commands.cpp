// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "qpro/bufferopt.hpp"
#include "qpro/generate.hpp"
#include "qpro/ingest.hpp"
#include "qpro/solver.hpp"
#include "qpro/timing.hpp"

#ifndef QPRO_VERSION
#define QPRO_VERSION "0.0.0"
#endif

namespace qpro::cli {
namespace {

constexpr double kClosureTolerance = 1e-6;
constexpr const char* kBuiltinLibrary = "builtin:default";

class UsageError : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

using Logger = std::shared_ptr<spdlog::logger>;

Logger make_logger(std::ostream& err)
{
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  sink->set_pattern("%l: %v");
  auto logger = std::make_shared<spdlog::logger>("qpro", std::move(sink));
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("QPRO_LOG")) {
    const std::string_view name = env;
    if (name == "error") {
      level = spdlog::level::err;
    } else if (name == "warn") {
      level = spdlog::level::warn;
    } else if (name == "info") {
      level = spdlog::level::info;
    } else if (name == "debug") {
      level = spdlog::level::debug;
    }
  }
  logger->set_level(level);
  return logger;
}

void log_diagnostics(const Logger& log, const std::vector<Diagnostic>& diagnostics)
{
  for (const Diagnostic& d : diagnostics) {
    const std::string entity = d.entity.empty() ? "" : " [" + d.entity + "]";
    log->log(d.severity == Severity::kError ? spdlog::level::err : spdlog::level::warn, "{}{}: {}", d.code,
             entity, d.message);
  }
}

void log_error(const Logger& log, const Error& e)
{
  if (e.diagnostics().empty()) {
    log->error("{}", e.what());
  } else {
    log_diagnostics(log, e.diagnostics());
  }
}

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(std::string(codes::kIo), path, "cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) {
    throw Error(std::string(codes::kIo), path, "cannot write file");
  }
}

class PhaseClock
{
 public:
  explicit PhaseClock(std::vector<PhaseTiming>& sink) : sink_(sink) {}

  template <typename F>
  auto operator()(std::string phase, F&& body)
  {
    const auto start = std::chrono::steady_clock::now();
    struct Record
    {
      std::vector<PhaseTiming>& sink;
      std::string phase;
      std::chrono::steady_clock::time_point start;
      ~Record()
      {
        sink.push_back({std::move(phase),
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
      }
    } record{sink_, std::move(phase), start};
    return body();
  }

 private:
  std::vector<PhaseTiming>& sink_;
};

struct Flags
{
  std::string circuit;
  std::string lib;
  std::string out;
  std::string priority;
  std::optional<double> tau;
  std::optional<double> sigma;
  std::optional<double> lambda;
  std::optional<double> smin;
  std::optional<double> smax;
  std::optional<double> tmin;
  std::optional<double> tmax;
  std::string hold_mode = "reset-delay";
  bool remove_buffers = false;
  int max_skip = 2;
  bool verbose = false;
  std::optional<std::uint64_t> seed;
};

void add_config_flags(CLI::App& cmd, Flags& f)
{
  cmd.add_option("--priority", f.priority, "Lexicographic order, e.g. period,latency,slack");
  cmd.add_option("--tau", f.tau, "Weight on the period (selects weighted mode)");
  cmd.add_option("--sigma", f.sigma, "Weight on the slack (selects weighted mode)");
  cmd.add_option("--lambda", f.lambda, "Weight on the latency (selects weighted mode)");
  cmd.add_option("--smin", f.smin, "Minimum uniform slack (ps)");
  cmd.add_option("--smax", f.smax, "Maximum uniform slack (ps)");
  cmd.add_option("--tmin", f.tmin, "Lower period bound (ps)");
  cmd.add_option("--tmax", f.tmax, "Upper period bound (ps)");
  cmd.add_option("--hold-mode", f.hold_mode, "reset-delay or dlplace")
      ->check(CLI::IsMember({"reset-delay", "dlplace"}));
  cmd.add_option("--max-skip", f.max_skip, "Largest row span of a connection")->check(CLI::PositiveNumber);
}

std::vector<Criterion> parse_priority(const std::string& csv)
{
  std::vector<Criterion> out;
  std::stringstream stream(csv);
  std::string item;
  while (std::getline(stream, item, ',')) {
    auto k = parse_criterion(item);
    if (!k) {
      throw UsageError("unknown priority criterion '" + item + "'");
    }
    if (std::find(out.begin(), out.end(), *k) != out.end()) {
      throw UsageError("priority lists '" + item + "' twice");
    }
    out.push_back(*k);
  }
  if (out.empty()) {
    throw UsageError("--priority needs at least one criterion");
  }
  return out;
}

OptimizationConfig config_from_flags(const Flags& f)
{
  OptimizationConfig c;
  const bool weighted = f.tau || f.sigma || f.lambda;
  if (weighted && !f.priority.empty()) {
    throw UsageError("--priority and --tau/--sigma/--lambda are mutually exclusive");
  }
  if (weighted) {
    c.priority_mode = PriorityMode::kWeighted;
    c.tau = f.tau.value_or(c.tau);
    c.sigma = f.sigma.value_or(c.sigma);
    c.lambda = f.lambda.value_or(c.lambda);
  } else if (!f.priority.empty()) {
    c.priority = parse_priority(f.priority);
  }
  c.s_min = f.smin.value_or(c.s_min);
  c.s_max = f.smax.value_or(c.s_max);
  c.t_min_override = f.tmin;
  c.t_max_override = f.tmax;
  c.hold_mode = *parse_hold_mode(f.hold_mode);
  c.max_span = f.max_skip;
  if (auto diagnostics = validate_config(c); has_errors(diagnostics)) {
    std::string message;
    for (const Diagnostic& d : diagnostics) {
      message += (message.empty() ? "" : "; ") + to_string(d);
    }
    throw UsageError(message);
  }
  return c;
}

CellLibrary load_library(const std::string& path, const Logger& log)
{
  if (path.empty()) {
    return default_library();
  }
  std::vector<Diagnostic> warnings;
  CellLibrary lib = parse_library(read_file(path), &warnings);
  log_diagnostics(log, warnings);
  return lib;
}

Circuit load_circuit(const std::string& path, const CellLibrary& lib, const Logger& log)
{
  std::vector<Diagnostic> warnings;
  Circuit circuit = parse_circuit(read_file(path), &warnings);
  log_diagnostics(log, warnings);
  std::vector<Diagnostic> diagnostics = validate_circuit(circuit, lib);
  std::erase_if(diagnostics, [](const Diagnostic& d) { return d.severity != Severity::kError; });
  if (!diagnostics.empty()) {
    throw Error(diagnostics.front().code, std::move(diagnostics));
  }
  return circuit;
}

std::size_t count_buffers(const Circuit& circuit)
{
  return static_cast<std::size_t>(std::count_if(circuit.gates.begin(), circuit.gates.end(),
                                                [](const Gate& g) { return g.cell == kBufferCell; }));
}

void log_infeasible(const Logger& log, const InfeasibleError& e)
{
  log->error("{}: {}", e.code(), "no segment admits a schedule");
  log->error("least-violating segment {} (phase-1 residual {:.6g}); largest residuals:", e.segment(),
             e.infeasibility());
  for (const ConstraintResidual& r : e.residuals()) {
    log->error("  {:<40} {:.6g}", r.label, r.residual);
  }
}

// ---- optimize ---------------------------------------------------------------

int cmd_optimize(const Flags& f, std::ostream& out, const Logger& log)
{
  RunManifest manifest;
  manifest.tool_version = QPRO_VERSION;
  manifest.circuit_path = f.circuit;
  manifest.library_path = f.lib.empty() ? kBuiltinLibrary : f.lib;
  manifest.remove_buffers = f.remove_buffers;
  manifest.seed = f.seed;
  manifest.config = config_from_flags(f);
  const OptimizationConfig& config = manifest.config;
  PhaseClock clock(manifest.timings);

  const CellLibrary lib = clock("parse_library", [&] { return load_library(f.lib, log); });
  Circuit circuit = clock("parse_circuit", [&] { return load_circuit(f.circuit, lib, log); });

  RemovalPlan plan;
  if (f.remove_buffers) {
    RemovalResult removed = clock("remove_buffers", [&] {
      return remove_buffers(circuit, lib, {config.max_span, std::string(kBufferCell)});
    });
    circuit = std::move(removed.circuit);
    plan = std::move(removed.plan);
    log_diagnostics(log, plan.diagnostics);
    log->info("removed {} of {} buffers", plan.removed_count(), plan.buffers_total);
  } else {
    plan.buffers_total = count_buffers(circuit);
  }

  const TimingConstraintSet tcs =
      clock("build_constraints", [&] { return build_constraints(circuit, lib, config); });
  log->info("{} constraints over {} row deltas", tcs.constraints.size(), tcs.num_deltas());

  Schedule schedule;
  try {
    OptimizationTrace trace;
    schedule = clock("optimize", [&] { return optimize_schedule(tcs, lib, config, &trace); });
    for (const SegmentOutcome& o : trace.outcomes) {
      log->debug("stage {} segment {}: {} rows={} iterations={} objective={:.9g}", o.stage, o.segment,
                 o.pruned ? std::string_view("pruned") : to_string(o.status), o.lp_rows, o.iterations,
                 o.objective);
    }
  } catch (const InfeasibleError& e) {
    log_infeasible(log, e);
    return kExitInfeasible;
  }

  const SlackReport slacks = clock("sta_check", [&] { return sta_check(circuit, lib, schedule, config.hold_mode); });
  const Report report = emit_report(schedule, {circuit.name, &slacks, &plan, f.verbose}, manifest);
  if (!f.out.empty()) {
    write_file(f.out, serialize_report(report));
  }
  out << format_report_table(report);

  if (slacks.min_slack_ps && *slacks.min_slack_ps < -kClosureTolerance) {
    log->error("schedule misses timing closure: min slack {:.6g} ps", *slacks.min_slack_ps);
    return kExitVerifyFailed;
  }
  return kExitOk;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(const Flags& f, const std::string& schedule_path, std::ostream& out, const Logger& log)
{
  const Report report = parse_report(read_file(schedule_path));
  const CellLibrary lib = load_library(f.lib, log);
  Circuit circuit = load_circuit(f.circuit, lib, log);
  const OptimizationConfig& config = report.manifest.config;
  if (report.manifest.remove_buffers) {
    circuit = remove_buffers(circuit, lib, {config.max_span, std::string(kBufferCell)}).circuit;
  }

  const SlackReport slacks = sta_check(circuit, lib, report.schedule, config.hold_mode);
  std::size_t violations = 0;
  for (const ConnectionSlack& s : slacks.entries) {
    if (s.setup_slack_ps < -kClosureTolerance) {
      log->error("setup violation on {}->{}: {:.6g} ps", s.src, s.dst, s.setup_slack_ps);
      ++violations;
    }
    if (s.hold_slack_ps < -kClosureTolerance) {
      log->error("hold violation on {}->{}: {:.6g} ps", s.src, s.dst, s.hold_slack_ps);
      ++violations;
    }
  }

  Report checked = emit_report(report.schedule, {circuit.name, &slacks, nullptr, f.verbose}, report.manifest);
  out << format_report_table(checked);
  out << (violations == 0 ? "timing closure: pass\n" : "timing closure: FAIL\n");
  return violations == 0 ? kExitOk : kExitVerifyFailed;
}

// ---- gen --------------------------------------------------------------------

int cmd_gen(const GeneratorOptions& options, const Flags& f, std::ostream& out, const Logger& log)
{
  const CellLibrary lib = load_library(f.lib, log);
  const std::string text = serialize_circuit(generate_circuit(options, lib));
  if (f.out.empty()) {
    out << text;
  } else {
    write_file(f.out, text);
  }
  return kExitOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepSpec
{
  std::string name;
  OptimizationConfig config;
  bool remove_buffers = false;
};

std::vector<SweepSpec> expand_configs(const std::string& value, const OptimizationConfig& base)
{
  if (std::filesystem::is_regular_file(value)) {
    std::vector<SweepSpec> out;
    for (NamedConfig& named : parse_config_list(read_file(value))) {
      out.push_back({std::move(named.name), std::move(named.config), false});
    }
    return out;
  }
  std::vector<SweepSpec> out;
  std::stringstream stream(value);
  std::string name;
  const std::vector<Criterion> period_latency_slack = {Criterion::kPeriod, Criterion::kLatency, Criterion::kSlack};
  while (std::getline(stream, name, ',')) {
    OptimizationConfig c = base;
    c.priority_mode = PriorityMode::kLexicographic;
    c.priority = period_latency_slack;
    if (name == "table1a") {
      out.push_back({name, c});
    } else if (name == "table1b") {
      c.s_min = 5.0;
      out.push_back({name, c});
    } else if (name == "table1c") {
      c.priority = {Criterion::kPeriod, Criterion::kSlack, Criterion::kLatency};
      out.push_back({name, c});
    } else if (name == "table3") {
      out.push_back({"baseline", c, false});
      out.push_back({"phase-skip", c, true});
    } else if (name == "base") {
      out.push_back({name, base});
    } else {
      throw UsageError("unknown preset '" + name + "' (and no such config file)");
    }
  }
  if (out.empty()) {
    throw UsageError("--configs is empty");
  }
  return out;
}

std::string percent_change(double after, double before)
{
  if (before == 0.0) {
    return "-";
  }
  std::ostringstream s;
  s << std::showpos << std::fixed << std::setprecision(2) << 100.0 * (after / before - 1.0);
  return s.str();
}

int cmd_sweep(const Flags& f, const std::string& configs, std::ostream& out, const Logger& log)
{
  const OptimizationConfig base = config_from_flags(f);
  const std::vector<SweepSpec> specs = expand_configs(configs, base);
  const CellLibrary lib = load_library(f.lib, log);
  const Circuit circuit = load_circuit(f.circuit, lib, log);
  const std::size_t buffers_total = count_buffers(circuit);

  struct Row
  {
    const SweepSpec* spec;
    ExploreRow result;
    std::size_t removed = 0;
  };
  std::vector<Row> rows;
  for (const SweepSpec& spec : specs) {
    Row row{&spec, {}, 0};
    try {
      if (spec.remove_buffers) {
        const RemovalResult removed =
            remove_buffers(circuit, lib, {spec.config.max_span, std::string(kBufferCell)});
        row.removed = removed.plan.removed_count();
        row.result = explore(removed.circuit, lib, {spec.config}).front();
      } else {
        row.result = explore(circuit, lib, {spec.config}).front();
      }
    } catch (const Error& e) {
      row.result.config = spec.config;
      row.result.error = e.what();
    }
    if (!row.result.error.empty()) {
      log->warn("config {}: {}", spec.name, row.result.error);
    }
    rows.push_back(std::move(row));
  }

  const Row* reference = nullptr;
  for (const Row& r : rows) {
    if (r.result.schedule) {
      reference = &r;
      break;
    }
  }

  std::ostringstream table;
  table << std::left << std::setw(14) << "config" << std::right << std::setw(12) << "freq (GHz)"
        << std::setw(10) << "freq %" << std::setw(14) << "latency (ps)" << std::setw(10) << "lat %"
        << std::setw(12) << "slack (ps)" << std::setw(15) << "min slack (ps)" << std::setw(12)
        << "buf saved %" << "  status\n";
  for (const Row& r : rows) {
    table << std::left << std::setw(14) << r.spec->name << std::right << std::fixed;
    if (r.result.schedule) {
      const Schedule& s = *r.result.schedule;
      const double freq = frequency_ghz(s.period_ps);
      const Schedule& ref = *reference->result.schedule;
      table << std::setw(12) << std::setprecision(4) << freq << std::setw(10)
            << percent_change(freq, frequency_ghz(ref.period_ps)) << std::setw(14) << std::setprecision(3)
            << s.latency_ps << std::setw(10) << percent_change(s.latency_ps, ref.latency_ps) << std::setw(12)
            << s.slack_ps << std::setw(15);
      if (r.result.min_slack_ps) {
        table << *r.result.min_slack_ps;
      } else {
        table << "-";
      }
      table << std::setw(12) << std::setprecision(2)
            << (buffers_total == 0 ? 0.0 : 100.0 * static_cast<double>(r.removed) / static_cast<double>(buffers_total))
            << "  ok\n";
    } else {
      table << std::setw(12) << "-" << std::setw(10) << "-" << std::setw(14) << "-" << std::setw(10) << "-"
            << std::setw(12) << "-" << std::setw(15) << "-" << std::setw(12) << "-" << "  " << r.result.error
            << '\n';
    }
    table.unsetf(std::ios::fixed);
  }
  out << table.str();
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  const Logger log = make_logger(err);

  CLI::App app{"Clock-schedule optimizer for delay-line clocked AQFP circuits", "qpro"};
  app.set_version_flag("--version", std::string("qpro ") + QPRO_VERSION);
  app.require_subcommand(1);

  Flags flags;
  std::string schedule_path;
  std::string configs;
  GeneratorOptions gen;

  CLI::App* optimize = app.add_subcommand("optimize", "Optimize the clock schedule of a circuit");
  optimize->add_option("--circuit", flags.circuit, "Circuit file (*.qc.json)")->required();
  optimize->add_option("--lib", flags.lib, "Cell library (*.qlib.json); built-in default if omitted");
  add_config_flags(*optimize, flags);
  optimize->add_flag("--remove-buffers", flags.remove_buffers, "Remove buffers before scheduling");
  optimize->add_option("--out", flags.out, "Write the JSON report here");
  optimize->add_flag("--verbose", flags.verbose, "Include per-connection slacks and chains");
  optimize->add_option("--seed", flags.seed, "Recorded in the run manifest");

  CLI::App* verify = app.add_subcommand("verify", "Re-check a stored schedule with static timing");
  verify->add_option("--circuit", flags.circuit, "Circuit file")->required();
  verify->add_option("--lib", flags.lib, "Cell library; built-in default if omitted");
  verify->add_option("--schedule", schedule_path, "Report JSON written by optimize")->required();
  verify->add_flag("--verbose", flags.verbose, "Print per-connection slacks");

  CLI::App* generate = app.add_subcommand("gen", "Generate a synthetic circuit");
  generate->add_option("--rows", gen.rows, "Number of rows")->required()->check(CLI::PositiveNumber);
  generate->add_option("--width", gen.width, "Logic gates per row")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen.seed, "Random seed");
  generate->add_option("--chain-prob", gen.chain_prob, "Probability of a buffer chain per gate")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--skip-prob", gen.skip_prob, "Probability of a row-skipping connection per gate")
      ->check(CLI::Range(0.0, 1.0));
  generate->add_flag("--adversarial", gen.adversarial, "Drop the schedulability guarantee");
  generate->add_option("--lib", flags.lib, "Cell library used for the budget; built-in default if omitted");
  generate->add_option("--out", flags.out, "Output file; standard output if omitted");

  CLI::App* sweep = app.add_subcommand("sweep", "Compare optimization configurations");
  sweep->add_option("--circuit", flags.circuit, "Circuit file")->required();
  sweep->add_option("--lib", flags.lib, "Cell library; built-in default if omitted");
  sweep->add_option("--configs", configs, "Presets (table1a,table1b,table1c,table3,base) or a config list file")
      ->required();
  add_config_flags(*sweep, flags);

  std::vector<const char*> argv = {"qpro"};
  for (const std::string& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (optimize->parsed()) {
      return cmd_optimize(flags, out, log);
    }
    if (verify->parsed()) {
      return cmd_verify(flags, schedule_path, out, log);
    }
    if (generate->parsed()) {
      return cmd_gen(gen, flags, out, log);
    }
    return cmd_sweep(flags, configs, out, log);
  } catch (const UsageError& e) {
    log->error("{}", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    log_error(log, e);
    return kExitUsage;
  }
}

}  // namespace qpro::cli
