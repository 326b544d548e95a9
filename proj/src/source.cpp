#include "ipa/source.hpp"

namespace ipa {

std::string SourceSpan::str() const {
  return file + ":" + std::to_string(line) + ":" + std::to_string(column);
}

std::string Diagnostic::str() const {
  const char* sev = severity == Severity::Error ? "error" : "warning";
  return span.str() + ": " + sev + "[" + code + "]: " + message;
}

bool has_errors(const Diagnostics& ds) {
  for (const Diagnostic& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

Diagnostic error(std::string code, std::string message, SourceSpan span) {
  return {Severity::Error, std::move(code), std::move(message),
          std::move(span)};
}

Diagnostic warning(std::string code, std::string message, SourceSpan span) {
  return {Severity::Warning, std::move(code), std::move(message),
          std::move(span)};
}

}  // namespace ipa
