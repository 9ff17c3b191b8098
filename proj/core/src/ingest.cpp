// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/ingest.hpp"

#include <algorithm>
#include <initializer_list>
#include <limits>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace qpro {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void schema_error(const std::string& path, const std::string& message)
{
  throw Error(std::string(codes::kSchema), path.empty() ? "/" : path, message);
}

Json parse_document(std::string_view text)
{
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const std::string_view head = text.substr(0, end);
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(head.begin(), head.end(), '\n'));
    const std::size_t last_nl = head.rfind('\n');
    const std::size_t column = last_nl == std::string_view::npos ? end + 1 : end - last_nl;
    throw Error(std::string(codes::kParse),
                "line " + std::to_string(line) + ", column " + std::to_string(column), e.what());
  }
}

// Typed, path-aware view of one JSON object with a closed key set.
class Object
{
 public:
  Object(const Json& json, std::string path, const std::vector<std::string_view>& required,
         const std::vector<std::string_view>& optional = {})
      : json_(json), path_(std::move(path))
  {
    if (!json.is_object()) {
      schema_error(path_, "expected an object");
    }
    for (const auto& [key, value] : json.items()) {
      const auto known = [&](const std::vector<std::string_view>& keys) {
        return std::find(keys.begin(), keys.end(), key) != keys.end();
      };
      if (!known(required) && !known(optional)) {
        schema_error(child(key), "unknown key '" + key + "'");
      }
    }
    for (std::string_view key : required) {
      if (!json.contains(key)) {
        schema_error(path_, "missing key '" + std::string(key) + "'");
      }
    }
  }

  std::string child(std::string_view key) const { return path_ + "/" + std::string(key); }
  bool has(std::string_view key) const { return json_.contains(key) && !json_.at(key).is_null(); }
  const Json& at(std::string_view key) const { return json_.at(key); }

  double number(std::string_view key) const { return as_number(at(key), child(key)); }

  std::optional<double> optional_number(std::string_view key) const
  {
    return has(key) ? std::optional(number(key)) : std::nullopt;
  }

  long long integer(std::string_view key) const
  {
    const Json& v = at(key);
    if (!v.is_number_integer()) {
      schema_error(child(key), "expected an integer");
    }
    return v.get<long long>();
  }

  std::string string(std::string_view key) const
  {
    const Json& v = at(key);
    if (!v.is_string()) {
      schema_error(child(key), "expected a string");
    }
    return v.get<std::string>();
  }

  bool boolean(std::string_view key) const
  {
    const Json& v = at(key);
    if (!v.is_boolean()) {
      schema_error(child(key), "expected a boolean");
    }
    return v.get<bool>();
  }

  const Json& array(std::string_view key) const
  {
    const Json& v = at(key);
    if (!v.is_array()) {
      schema_error(child(key), "expected an array");
    }
    return v;
  }

  void require_version() const
  {
    if (integer("format_version") != kFormatVersion) {
      schema_error(child("format_version"), "unsupported format_version; expected 1");
    }
  }

  static double as_number(const Json& v, const std::string& path)
  {
    if (!v.is_number()) {
      schema_error(path, "expected a number");
    }
    return v.get<double>();
  }

 private:
  const Json& json_;
  std::string path_;
};

std::vector<double> number_list(const Json& array, const std::string& path)
{
  std::vector<double> out;
  out.reserve(array.size());
  for (std::size_t i = 0; i < array.size(); ++i) {
    out.push_back(Object::as_number(array[i], path + "/" + std::to_string(i)));
  }
  return out;
}

void throw_if_errors(std::vector<Diagnostic> diagnostics, std::vector<Diagnostic>* warnings)
{
  const auto first = std::find_if(diagnostics.begin(), diagnostics.end(),
                                  [](const Diagnostic& d) { return d.severity == Severity::kError; });
  if (first != diagnostics.end()) {
    std::string code = first->code;
    throw Error(std::move(code), std::move(diagnostics));
  }
  if (warnings != nullptr) {
    warnings->insert(warnings->end(), diagnostics.begin(), diagnostics.end());
  }
}

// ---- circuits ---------------------------------------------------------------

Gate parse_gate(const Json& json, const std::string& path)
{
  Object o(json, path, {"id", "cell", "row", "clock_offset_ps"});
  const long long row = o.integer("row");
  if (row < std::numeric_limits<int>::min() || row > std::numeric_limits<int>::max()) {
    schema_error(o.child("row"), "row out of integer range");
  }
  return {o.string("id"), o.string("cell"), static_cast<int>(row), o.number("clock_offset_ps")};
}

Connection parse_connection(const Json& json, const std::string& path)
{
  Object o(json, path, {"src", "dst", "length_um"}, {"prop_ps"});
  return {o.string("src"), o.string("dst"), o.number("length_um"), o.optional_number("prop_ps")};
}

// ---- libraries --------------------------------------------------------------

Json pwl_to_json(const PiecewiseLinear& f)
{
  Json out = Json::array();
  for (const Segment& s : f.segments()) {
    out.push_back(Json::array({s.slope, s.intercept}));
  }
  return out;
}

PiecewiseLinear parse_pwl(const Json& json, const std::string& path, const std::vector<double>& breakpoints)
{
  if (!json.is_array()) {
    schema_error(path, "expected a list of [slope, intercept] pairs");
  }
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < json.size(); ++i) {
    const std::string item = path + "/" + std::to_string(i);
    if (!json[i].is_array() || json[i].size() != 2) {
      schema_error(item, "expected a [slope, intercept] pair");
    }
    segments.push_back({Object::as_number(json[i][0], item + "/0"),
                        Object::as_number(json[i][1], item + "/1")});
  }
  try {
    return PiecewiseLinear(breakpoints, std::move(segments));
  } catch (const Error& e) {
    throw Error(e.code(), path, e.what());
  }
}

constexpr std::string_view kFunctionNames[] = {"c2q", "setup", "hold", "rd"};

// ---- configs ----------------------------------------------------------------

std::string_view priority_mode_name(PriorityMode mode)
{
  return mode == PriorityMode::kWeighted ? "weighted" : "lexicographic";
}

Json config_to_json(const OptimizationConfig& c)
{
  Json out;
  out["tau"] = c.tau;
  out["sigma"] = c.sigma;
  out["lambda"] = c.lambda;
  out["s_min"] = c.s_min;
  out["s_max"] = c.s_max;
  out["t_min_ps"] = c.t_min_override ? Json(*c.t_min_override) : Json(nullptr);
  out["t_max_ps"] = c.t_max_override ? Json(*c.t_max_override) : Json(nullptr);
  out["hold_mode"] = to_string(c.hold_mode);
  out["priority_mode"] = priority_mode_name(c.priority_mode);
  Json priority = Json::array();
  for (Criterion k : c.priority) {
    priority.push_back(to_string(k));
  }
  out["priority"] = std::move(priority);
  out["delta_max"] = c.delta_max;
  out["max_span"] = c.max_span;
  out["fix_tolerance"] = c.fix_tolerance;
  out["tolerances"] = {{"feasibility", c.tolerances.feasibility},
                       {"optimality", c.tolerances.optimality},
                       {"pivot", c.tolerances.pivot}};
  return out;
}

OptimizationConfig config_from_json(const Json& json, const std::string& path,
                                    std::initializer_list<std::string_view> extra = {})
{
  std::vector<std::string_view> keys = {"tau",      "sigma",         "lambda",    "s_min",
                                        "s_max",    "t_min_ps",      "t_max_ps",  "hold_mode",
                                        "priority_mode", "priority", "delta_max", "max_span",
                                        "fix_tolerance", "tolerances"};
  keys.insert(keys.end(), extra.begin(), extra.end());
  Object o(json, path, {}, keys);

  OptimizationConfig c;
  c.tau = o.optional_number("tau").value_or(c.tau);
  c.sigma = o.optional_number("sigma").value_or(c.sigma);
  c.lambda = o.optional_number("lambda").value_or(c.lambda);
  c.s_min = o.optional_number("s_min").value_or(c.s_min);
  c.s_max = o.optional_number("s_max").value_or(c.s_max);
  c.t_min_override = o.optional_number("t_min_ps");
  c.t_max_override = o.optional_number("t_max_ps");
  if (o.has("hold_mode")) {
    auto mode = parse_hold_mode(o.string("hold_mode"));
    if (!mode) {
      schema_error(o.child("hold_mode"), "expected 'reset-delay' or 'dlplace'");
    }
    c.hold_mode = *mode;
  }
  if (o.has("priority_mode")) {
    const std::string mode = o.string("priority_mode");
    if (mode == "weighted") {
      c.priority_mode = PriorityMode::kWeighted;
    } else if (mode == "lexicographic") {
      c.priority_mode = PriorityMode::kLexicographic;
    } else {
      schema_error(o.child("priority_mode"), "expected 'weighted' or 'lexicographic'");
    }
  }
  if (o.has("priority")) {
    const Json& list = o.array("priority");
    c.priority.clear();
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string item = o.child("priority") + "/" + std::to_string(i);
      auto k = list[i].is_string() ? parse_criterion(list[i].get<std::string>()) : std::nullopt;
      if (!k) {
        schema_error(item, "expected 'period', 'latency' or 'slack'");
      }
      c.priority.push_back(*k);
    }
  }
  c.delta_max = o.optional_number("delta_max").value_or(c.delta_max);
  if (o.has("max_span")) {
    c.max_span = static_cast<int>(o.integer("max_span"));
  }
  c.fix_tolerance = o.optional_number("fix_tolerance").value_or(c.fix_tolerance);
  if (o.has("tolerances")) {
    Object t(o.at("tolerances"), o.child("tolerances"), {}, {"feasibility", "optimality", "pivot"});
    c.tolerances.feasibility = t.optional_number("feasibility").value_or(c.tolerances.feasibility);
    c.tolerances.optimality = t.optional_number("optimality").value_or(c.tolerances.optimality);
    c.tolerances.pivot = t.optional_number("pivot").value_or(c.tolerances.pivot);
  }
  if (auto diagnostics = validate_config(c); has_errors(diagnostics)) {
    throw Error(std::string(codes::kInvalidConfig), std::move(diagnostics));
  }
  return c;
}

Json nullable(const std::optional<double>& v)
{
  return v ? Json(*v) : Json(nullptr);
}

std::string dump(const Json& json)
{
  return json.dump(2) + "\n";
}

}  // namespace

Circuit parse_circuit(std::string_view text, std::vector<Diagnostic>* warnings)
{
  const Json json = parse_document(text);
  Object o(json, "", {"format_version", "name", "num_rows", "gates", "connections"});
  o.require_version();

  Circuit circuit;
  circuit.name = o.string("name");
  const long long rows = o.integer("num_rows");
  if (rows < 0 || rows > std::numeric_limits<int>::max()) {
    schema_error("/num_rows", "must be a non-negative integer");
  }
  circuit.num_rows = static_cast<int>(rows);
  const Json& gates = o.array("gates");
  circuit.gates.reserve(gates.size());
  for (std::size_t i = 0; i < gates.size(); ++i) {
    circuit.gates.push_back(parse_gate(gates[i], "/gates/" + std::to_string(i)));
  }
  const Json& connections = o.array("connections");
  circuit.connections.reserve(connections.size());
  for (std::size_t i = 0; i < connections.size(); ++i) {
    circuit.connections.push_back(
        parse_connection(connections[i], "/connections/" + std::to_string(i)));
  }
  throw_if_errors(validate_structure(circuit), warnings);
  return circuit;
}

std::string serialize_circuit(const Circuit& circuit)
{
  Json out;
  out["format_version"] = kFormatVersion;
  out["name"] = circuit.name;
  out["num_rows"] = circuit.num_rows;
  Json gates = Json::array();
  for (const Gate& g : circuit.gates) {
    gates.push_back({{"id", g.id}, {"cell", g.cell}, {"row", g.row}, {"clock_offset_ps", g.clock_offset_ps}});
  }
  out["gates"] = std::move(gates);
  Json connections = Json::array();
  for (const Connection& c : circuit.connections) {
    Json item = {{"src", c.src}, {"dst", c.dst}, {"length_um", c.length_um}};
    if (c.prop_ps) {
      item["prop_ps"] = *c.prop_ps;
    }
    connections.push_back(std::move(item));
  }
  out["connections"] = std::move(connections);
  return dump(out);
}

CellLibrary parse_library(std::string_view text, std::vector<Diagnostic>* warnings)
{
  const Json json = parse_document(text);
  Object o(json, "",
           {"format_version", "l_max_drive_um", "l_buffer_um", "prop_ps_per_um", "max_frequency_ghz",
            "t_min_ps", "t_max_ps", "breakpoints_ps", "cells"});
  o.require_version();

  CellLibrary lib;
  lib.l_max_drive_um = o.number("l_max_drive_um");
  lib.l_buffer_um = o.number("l_buffer_um");
  lib.prop_ps_per_um = o.number("prop_ps_per_um");
  lib.max_frequency_ghz = o.number("max_frequency_ghz");
  lib.t_min_ps = o.number("t_min_ps");
  lib.t_max_ps = o.number("t_max_ps");
  lib.breakpoints_ps = number_list(o.array("breakpoints_ps"), "/breakpoints_ps");

  const Json& cells = o.at("cells");
  if (!cells.is_object()) {
    schema_error("/cells", "expected an object keyed by cell name");
  }
  for (const auto& [name, body] : cells.items()) {
    const std::string path = "/cells/" + name;
    Object cell(body, path, {"c2q", "setup", "hold", "rd"}, {"breakpoints_ps"});
    const std::vector<double> breakpoints = cell.has("breakpoints_ps")
        ? number_list(cell.array("breakpoints_ps"), cell.child("breakpoints_ps"))
        : lib.breakpoints_ps;
    CellTiming timing;
    PiecewiseLinear* targets[] = {&timing.c2q, &timing.setup, &timing.hold, &timing.rd};
    for (std::size_t f = 0; f < 4; ++f) {
      *targets[f] = parse_pwl(cell.at(kFunctionNames[f]), cell.child(kFunctionNames[f]), breakpoints);
    }
    lib.cells.emplace(name, std::move(timing));
  }
  throw_if_errors(validate_library(lib), warnings);
  return lib;
}

std::string serialize_library(const CellLibrary& library)
{
  Json out;
  out["format_version"] = kFormatVersion;
  out["l_max_drive_um"] = library.l_max_drive_um;
  out["l_buffer_um"] = library.l_buffer_um;
  out["prop_ps_per_um"] = library.prop_ps_per_um;
  out["max_frequency_ghz"] = library.max_frequency_ghz;
  out["t_min_ps"] = library.t_min_ps;
  out["t_max_ps"] = library.t_max_ps;
  out["breakpoints_ps"] = library.breakpoints_ps;
  Json cells = Json::object();
  for (const auto& [name, timing] : library.cells) {
    Json cell;
    const PiecewiseLinear* sources[] = {&timing.c2q, &timing.setup, &timing.hold, &timing.rd};
    for (std::size_t f = 0; f < 4; ++f) {
      cell[std::string(kFunctionNames[f])] = pwl_to_json(*sources[f]);
    }
    const auto bp = timing.c2q.breakpoints();
    if (!std::equal(bp.begin(), bp.end(), library.breakpoints_ps.begin(), library.breakpoints_ps.end())) {
      cell["breakpoints_ps"] = std::vector<double>(bp.begin(), bp.end());
    }
    cells[name] = std::move(cell);
  }
  out["cells"] = std::move(cells);
  return dump(out);
}

OptimizationConfig parse_config(std::string_view text)
{
  const Json json = parse_document(text);
  if (json.is_object() && json.contains("format_version")) {
    Object(Json{{"format_version", json.at("format_version")}}, "", {"format_version"}).require_version();
  }
  return config_from_json(json, "", {"format_version"});
}

std::string serialize_config(const OptimizationConfig& config)
{
  Json out;
  out["format_version"] = kFormatVersion;
  out.update(config_to_json(config));
  return dump(out);
}

std::vector<NamedConfig> parse_config_list(std::string_view text)
{
  const Json json = parse_document(text);
  Object o(json, "", {"format_version", "configs"});
  o.require_version();
  const Json& list = o.array("configs");
  std::vector<NamedConfig> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "/configs/" + std::to_string(i);
    NamedConfig named;
    named.config = config_from_json(list[i], path, {"name"});
    named.name = "config" + std::to_string(i);
    if (list[i].contains("name")) {
      if (!list[i].at("name").is_string()) {
        schema_error(path + "/name", "expected a string");
      }
      named.name = list[i].at("name").get<std::string>();
    }
    out.push_back(std::move(named));
  }
  return out;
}

Report emit_report(const Schedule& schedule, const ReportInputs& inputs, RunManifest manifest)
{
  Report report;
  report.manifest = std::move(manifest);
  report.circuit = inputs.circuit;
  report.schedule = schedule;
  report.frequency_ghz = frequency_ghz(schedule.period_ps);
  if (inputs.slacks != nullptr) {
    report.min_slack_ps = inputs.slacks->min_slack_ps;
    if (inputs.verbose) {
      report.connections = inputs.slacks->entries;
    }
  }
  if (inputs.removal != nullptr) {
    const RemovalPlan& plan = *inputs.removal;
    report.buffers_total = plan.buffers_total;
    report.buffers_removed = plan.removed_count();
    report.warnings = plan.diagnostics;
    if (inputs.verbose) {
      for (const ChainRemoval& c : plan.chains) {
        report.chains.push_back({c.source, c.sink, c.buffers, c.removed_gates});
      }
    }
  }
  return report;
}

std::string serialize_report(const Report& report)
{
  Json out;
  out["format_version"] = kFormatVersion;
  out["circuit"] = report.circuit;
  out["period_ps"] = report.schedule.period_ps;
  out["frequency_ghz"] = report.frequency_ghz;
  out["latency_ps"] = report.schedule.latency_ps;
  out["slack_ps"] = report.schedule.slack_ps;
  out["min_slack_ps"] = nullable(report.min_slack_ps);
  out["segment_index"] = report.schedule.segment_index;
  out["row_deltas_ps"] = report.schedule.row_deltas_ps;
  out["buffers_total"] = report.buffers_total;
  out["buffers_removed"] = report.buffers_removed;

  Json connections = Json::array();
  for (const ConnectionSlack& c : report.connections) {
    connections.push_back({{"connection", c.connection},
                           {"src", c.src},
                           {"dst", c.dst},
                           {"setup_slack_ps", c.setup_slack_ps},
                           {"hold_slack_ps", c.hold_slack_ps}});
  }
  out["connections"] = std::move(connections);
  Json chains = Json::array();
  for (const ChainReport& c : report.chains) {
    chains.push_back({{"source", c.source}, {"sink", c.sink}, {"buffers", c.buffers}, {"removed", c.removed}});
  }
  out["chains"] = std::move(chains);
  Json warnings = Json::array();
  for (const Diagnostic& d : report.warnings) {
    warnings.push_back({{"code", d.code},
                        {"entity", d.entity},
                        {"message", d.message},
                        {"severity", d.severity == Severity::kError ? "error" : "warning"}});
  }
  out["warnings"] = std::move(warnings);

  const RunManifest& m = report.manifest;
  Json manifest;
  manifest["tool_version"] = m.tool_version;
  manifest["inputs"] = {{"circuit", m.circuit_path}, {"library", m.library_path}};
  manifest["config"] = config_to_json(m.config);
  manifest["remove_buffers"] = m.remove_buffers;
  manifest["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  Json timings = Json::array();
  for (const PhaseTiming& t : m.timings) {
    timings.push_back({{"phase", t.phase}, {"seconds", t.seconds}});
  }
  manifest["timings"] = std::move(timings);
  out["manifest"] = std::move(manifest);
  return dump(out);
}

Report parse_report(std::string_view text)
{
  const Json json = parse_document(text);
  Object o(json, "",
           {"format_version", "circuit", "period_ps", "frequency_ghz", "latency_ps", "slack_ps",
            "min_slack_ps", "segment_index", "row_deltas_ps", "buffers_total", "buffers_removed",
            "connections", "chains", "warnings", "manifest"});
  o.require_version();

  const auto count = [&](const Object& obj, std::string_view key) {
    const long long v = obj.integer(key);
    if (v < 0) {
      schema_error(obj.child(key), "must be non-negative");
    }
    return static_cast<std::size_t>(v);
  };
  const auto strings = [](const Json& array, const std::string& path) {
    std::vector<std::string> out;
    if (!array.is_array()) {
      schema_error(path, "expected an array of strings");
    }
    for (std::size_t i = 0; i < array.size(); ++i) {
      if (!array[i].is_string()) {
        schema_error(path + "/" + std::to_string(i), "expected a string");
      }
      out.push_back(array[i].get<std::string>());
    }
    return out;
  };

  Report r;
  r.circuit = o.string("circuit");
  r.schedule.period_ps = o.number("period_ps");
  r.frequency_ghz = o.number("frequency_ghz");
  r.schedule.latency_ps = o.number("latency_ps");
  r.schedule.slack_ps = o.number("slack_ps");
  r.min_slack_ps = o.optional_number("min_slack_ps");
  r.schedule.segment_index = count(o, "segment_index");
  r.schedule.row_deltas_ps = number_list(o.array("row_deltas_ps"), "/row_deltas_ps");
  r.buffers_total = count(o, "buffers_total");
  r.buffers_removed = count(o, "buffers_removed");

  const Json& connections = o.array("connections");
  for (std::size_t i = 0; i < connections.size(); ++i) {
    Object c(connections[i], "/connections/" + std::to_string(i),
             {"connection", "src", "dst", "setup_slack_ps", "hold_slack_ps"});
    r.connections.push_back({count(c, "connection"), c.string("src"), c.string("dst"),
                             c.number("setup_slack_ps"), c.number("hold_slack_ps")});
  }
  const Json& chains = o.array("chains");
  for (std::size_t i = 0; i < chains.size(); ++i) {
    Object c(chains[i], "/chains/" + std::to_string(i), {"source", "sink", "buffers", "removed"});
    r.chains.push_back({c.string("source"), c.string("sink"), strings(c.at("buffers"), c.child("buffers")),
                        strings(c.at("removed"), c.child("removed"))});
  }
  const Json& warnings = o.array("warnings");
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    Object w(warnings[i], "/warnings/" + std::to_string(i), {"code", "entity", "message", "severity"});
    const std::string severity = w.string("severity");
    if (severity != "error" && severity != "warning") {
      schema_error(w.child("severity"), "expected 'error' or 'warning'");
    }
    r.warnings.push_back({w.string("code"), w.string("entity"), w.string("message"),
                          severity == "error" ? Severity::kError : Severity::kWarning});
  }

  Object m(o.at("manifest"), "/manifest",
           {"tool_version", "inputs", "config", "remove_buffers", "seed", "timings"});
  r.manifest.tool_version = m.string("tool_version");
  Object in(m.at("inputs"), "/manifest/inputs", {"circuit", "library"});
  r.manifest.circuit_path = in.string("circuit");
  r.manifest.library_path = in.string("library");
  r.manifest.config = config_from_json(m.at("config"), "/manifest/config");
  r.manifest.remove_buffers = m.boolean("remove_buffers");
  if (m.has("seed")) {
    const Json& seed = m.at("seed");
    if (!seed.is_number_unsigned()) {
      schema_error("/manifest/seed", "expected a non-negative integer");
    }
    r.manifest.seed = seed.get<std::uint64_t>();
  }
  const Json& timings = m.array("timings");
  for (std::size_t i = 0; i < timings.size(); ++i) {
    Object t(timings[i], "/manifest/timings/" + std::to_string(i), {"phase", "seconds"});
    r.manifest.timings.push_back({t.string("phase"), t.number("seconds")});
  }
  return r;
}

std::string format_report_table(const Report& report)
{
  std::ostringstream out;
  out << std::setprecision(6);
  const auto row = [&](std::string_view label, const auto& value) {
    out << std::left << std::setw(18) << label << value << '\n';
  };
  row("circuit", report.circuit);
  row("frequency (GHz)", report.frequency_ghz);
  row("period (ps)", report.schedule.period_ps);
  row("latency (ps)", report.schedule.latency_ps);
  row("slack (ps)", report.schedule.slack_ps);
  if (report.min_slack_ps) {
    row("min slack (ps)", *report.min_slack_ps);
  } else {
    row("min slack (ps)", "n/a");
  }
  row("segment", report.schedule.segment_index);
  row("buffers removed", std::to_string(report.buffers_removed) + " / " + std::to_string(report.buffers_total));

  if (!report.connections.empty()) {
    std::size_t width = 10;
    for (const ConnectionSlack& c : report.connections) {
      width = std::max(width, c.src.size() + c.dst.size() + 2);
    }
    out << '\n'
        << std::left << std::setw(static_cast<int>(width) + 2) << "connection" << std::right
        << std::setw(14) << "setup (ps)" << std::setw(14) << "hold (ps)" << '\n';
    for (const ConnectionSlack& c : report.connections) {
      out << std::left << std::setw(static_cast<int>(width) + 2) << (c.src + "->" + c.dst) << std::right
          << std::setw(14) << c.setup_slack_ps << std::setw(14) << c.hold_slack_ps << '\n';
    }
  }
  return out.str();
}

}  // namespace qpro
