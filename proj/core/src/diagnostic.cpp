// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026, The qpro Authors

#include "qpro/diagnostic.hpp"

#include <algorithm>
#include <sstream>

namespace qpro {

bool has_errors(const std::vector<Diagnostic>& diagnostics)
{
  return std::any_of(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& d) {
    return d.severity == Severity::kError;
  });
}

std::string to_string(const Diagnostic& diagnostic)
{
  std::ostringstream out;
  out << (diagnostic.severity == Severity::kError ? "error " : "warning ") << diagnostic.code;
  if (!diagnostic.entity.empty()) {
    out << " [" << diagnostic.entity << "]";
  }
  out << ": " << diagnostic.message;
  return out.str();
}

namespace {

std::string summarize(const std::string& code, const std::vector<Diagnostic>& diagnostics)
{
  std::ostringstream out;
  out << code;
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::kError) {
      out << "; " << to_string(d);
    }
  }
  return out.str();
}

}  // namespace

Error::Error(std::string code, std::string entity, const std::string& message)
    : std::runtime_error(code + (entity.empty() ? "" : " [" + entity + "]") + ": " + message),
      code_(std::move(code)),
      entity_(std::move(entity))
{
}

Error::Error(std::string code, std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(code, diagnostics)),
      code_(std::move(code)),
      diagnostics_(std::move(diagnostics))
{
}

}  // namespace qpro
