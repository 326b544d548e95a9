#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ipa/ast.hpp"
#include "ipa/manifest.hpp"
#include "ipa/source.hpp"

namespace ipa {

struct SpecParse {
  std::optional<Spec> spec;
  Diagnostics diags;
  bool ok() const { return spec.has_value() && !has_errors(diags); }
};

// Parses, resolves and validates a spec. `origin` names the source in
// diagnostics (a file path, or e.g. "<test>").
SpecParse parse_spec(const std::string& text, const std::string& origin);

struct ManifestParse {
  std::optional<Manifest> manifest;
  Diagnostics diags;
  bool ok() const { return manifest.has_value() && !has_errors(diags); }
};

// Parses a manifest and loads + validates the root spec and every
// abstraction spec it references (paths are relative to the manifest file).
// A non-empty `root_override` replaces the manifest's own root-spec path;
// this pairs an alternative root (say, a mutated one) with an existing
// manifest.
ManifestParse parse_manifest_file(const std::filesystem::path& path);
ManifestParse parse_manifest_file(const std::filesystem::path& path,
                                  const std::filesystem::path& root_override);
ManifestParse parse_manifest(const std::string& text,
                             const std::filesystem::path& origin);

// Name resolution + static validation over an already-built AST; used by the
// parser and by the composer for merged specs. Appends to `diags`; the spec
// is only usable when no errors were appended.
void resolve_spec(Spec& spec, Diagnostics& diags);

// Resolves an expression against a spec's variables/constants/sorts with an
// optional parameter list (slot 0..n-1). Returns false on errors.
bool resolve_expr_in(Spec& spec, ExprPtr& e, const std::vector<Param>& params,
                     Diagnostics& diags);

// Evaluates a constant expression (constants, literals, arithmetic only).
std::optional<int64_t> eval_const_expr(const Spec& spec, const ExprPtr& e,
                                       Diagnostics& diags);

}  // namespace ipa
