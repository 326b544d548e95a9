#pragma once

#include <string>
#include <vector>

namespace ipa {

struct SourceSpan {
  std::string file;
  int line = 0;    // 1-based
  int column = 0;  // 1-based
  int length = 0;

  std::string str() const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;

  // Rendered as "file:line:col: severity[code]: message".
  std::string str() const;
};

using Diagnostics = std::vector<Diagnostic>;

bool has_errors(const Diagnostics& ds);

Diagnostic error(std::string code, std::string message, SourceSpan span);
Diagnostic warning(std::string code, std::string message, SourceSpan span);

// Modeling/evaluation failure (bad index, domain violation, ...). These
// abort the enclosing operation; the CLI reports them as diagnostics.
struct EvalError {
  std::string message;
  SourceSpan span;
  std::string context;  // offending action instance / state, when known
};

}  // namespace ipa
