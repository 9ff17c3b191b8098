// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpro {

enum class Severity { kError, kWarning };

// A machine-readable finding about an input entity (gate, connection, cell).
struct Diagnostic
{
  std::string code;
  std::string entity;
  std::string message;
  Severity severity = Severity::kError;

  bool operator==(const Diagnostic&) const = default;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);
std::string to_string(const Diagnostic& diagnostic);

// Base exception. `code` is one of the stable upper-case identifiers below.
class Error : public std::runtime_error
{
 public:
  Error(std::string code, std::string entity, const std::string& message);
  Error(std::string code, std::vector<Diagnostic> diagnostics);

  const std::string& code() const { return code_; }
  const std::string& entity() const { return entity_; }
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::string code_;
  std::string entity_;
  std::vector<Diagnostic> diagnostics_;
};

namespace codes {
inline constexpr std::string_view kDomain = "DOMAIN_ERROR";
inline constexpr std::string_view kArityMismatch = "ARITY_MISMATCH";
inline constexpr std::string_view kBadBreakpoints = "BAD_BREAKPOINTS";
inline constexpr std::string_view kSharedBreakpointsRequired
    = "SHARED_BREAKPOINTS_REQUIRED";
inline constexpr std::string_view kBreakpointsDontSpan = "BREAKPOINTS_DONT_SPAN";
inline constexpr std::string_view kEmptyLibrary = "EMPTY_LIBRARY";
inline constexpr std::string_view kBadLibraryConstant = "BAD_LIBRARY_CONSTANT";
inline constexpr std::string_view kResetExceedsPeriod = "RESET_EXCEEDS_PERIOD";
inline constexpr std::string_view kDiscontinuous = "PWL_DISCONTINUOUS";

inline constexpr std::string_view kDuplicateId = "DUPLICATE_ID";
inline constexpr std::string_view kUnknownGate = "UNKNOWN_GATE";
inline constexpr std::string_view kUnknownCell = "UNKNOWN_CELL";
inline constexpr std::string_view kRowOutOfRange = "ROW_OUT_OF_RANGE";
inline constexpr std::string_view kNonmonotoneRow = "NONMONOTONE_ROW";
inline constexpr std::string_view kLengthExceedsDrive = "LENGTH_EXCEEDS_DRIVE";
inline constexpr std::string_view kBadValue = "BAD_VALUE";
inline constexpr std::string_view kClockOffsetOrder = "CLOCK_OFFSET_NONMONOTONE";

inline constexpr std::string_view kIo = "IO_ERROR";
inline constexpr std::string_view kParse = "PARSE_ERROR";
inline constexpr std::string_view kSchema = "SCHEMA_ERROR";
inline constexpr std::string_view kSchemaMismatch = "SCHEMA_MISMATCH";
inline constexpr std::string_view kInvalidCircuit = "INVALID_CIRCUIT";
inline constexpr std::string_view kInvalidLibrary = "INVALID_LIBRARY";
inline constexpr std::string_view kInvalidConfig = "INVALID_CONFIG";

inline constexpr std::string_view kMalformedChain = "MALFORMED_CHAIN";
inline constexpr std::string_view kBufferFanout = "BUFFER_FANOUT";

inline constexpr std::string_view kUnsupportedSkip = "UNSUPPORTED_SKIP";

inline constexpr std::string_view kDegeneratePivot = "DEGENERATE_PIVOT";
inline constexpr std::string_view kIterationLimit = "ITERATION_LIMIT";
inline constexpr std::string_view kBadLp = "BAD_LP";
inline constexpr std::string_view kInfeasible = "INFEASIBLE";
inline constexpr std::string_view kNoSegment = "NO_SEGMENT";
}  // namespace codes

}  // namespace qpro
