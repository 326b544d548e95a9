#pragma once

#include <string>

#include "ipa/ast.hpp"
#include "ipa/manifest.hpp"

namespace ipa {

// Renders source text that parses back to a structurally equal AST
// (round-trip law; spans and resolution ids are not preserved).
std::string render_spec(const Spec& spec);
std::string render_manifest(const Manifest& m);

std::string render_expr(const ExprPtr& e);
std::string render_var_domain(const VarDomain& d);
std::string render_binder_domain(const BinderDomain& d);

}  // namespace ipa
